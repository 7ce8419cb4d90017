use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use coltuple::bench::{self, Backend, SweepConfig, SweepMode};
use coltuple::codec::Codec;
use coltuple::daos::MappingStrategy;
use coltuple::inspect;
use coltuple::location::{Location, SinkOptions, StoreDir};
use coltuple::ntuple::{NTupleReader, WriterOptions};
use coltuple::objstore::{ContainerHandle, ObjectClass, ObjectStore, PoolConfig};
use coltuple::workload;
use coltuple::Result;

#[derive(Parser)]
#[command(version, about = "Columnar n-tuple storage over files and a simulated object store")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic workload dataset.
    Gen(GenArgs),
    /// Run the workload analysis over a dataset.
    Analyze(OpenArgs),
    /// Run a page/cluster size sweep and emit CSV.
    Sweep(SweepArgs),
    /// Dump a dataset's anchor, header and footer.
    Inspect(InspectArgs),
}

#[derive(Args)]
struct StoreArgs {
    /// Dataset path or daos://<pool>:<ranks>/<container> URI.
    #[arg(long)]
    location: Location,
    /// Pool geometry (key = value lines) for object-store locations.
    #[arg(long)]
    pool_config: Option<PathBuf>,
    /// Directory where object-store containers are kept between runs.
    #[arg(long, default_value = ".coltuple-store")]
    store: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    store: StoreArgs,
    #[command(flatten)]
    layout: LayoutArgs,
    #[arg(long, default_value_t = 100_000)]
    entries: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    elements_per_page: u64,
    #[arg(long, default_value_t = 100_000)]
    elements_per_cluster: u64,
    /// Issue each cluster's page writes as one vector write.
    #[arg(long)]
    batched: bool,
}

#[derive(Args)]
struct LayoutArgs {
    #[arg(long, default_value = "page")]
    mapping: MappingStrategy,
    #[arg(long, default_value = "sx")]
    objclass: ObjectClass,
    #[arg(long, default_value = "none")]
    compression: Codec,
}

#[derive(Args)]
struct OpenArgs {
    #[command(flatten)]
    store: StoreArgs,
}

#[derive(Args)]
struct InspectArgs {
    #[command(flatten)]
    store: StoreArgs,
    /// Also list every page locator.
    #[arg(long)]
    pages: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value = "a")]
    mode: SweepMode,
    #[arg(long, default_value = "file")]
    backend: Backend,
    #[command(flatten)]
    layout: LayoutArgs,
    #[arg(long, default_value_t = bench::CONST_CLUSTER * 2)]
    entries: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = bench::DEFAULT_REPS)]
    reps: usize,
    #[arg(long)]
    pool_config: Option<PathBuf>,
    /// Directory for file-backend datasets; a temporary one if unset.
    #[arg(long)]
    workdir: Option<PathBuf>,
    /// CSV destination; stdout if unset.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn pool_config(path: &Option<PathBuf>) -> Result<PoolConfig> {
    path.as_deref().map_or_else(|| Ok(PoolConfig::default()), PoolConfig::load)
}

/// Prepares `store` for the location, returning the container to persist afterwards.
fn open_store(args: &StoreArgs, store: &ObjectStore) -> Result<Option<ContainerHandle>> {
    match &args.location {
        Location::File(_) => Ok(None),
        Location::Daos(uri) => {
            let config = pool_config(&args.pool_config)?;
            StoreDir::new(&args.store).open(store, uri, &config).map(Some)
        }
    }
}

fn gen(args: GenArgs) -> Result<()> {
    let store = ObjectStore::new();
    let container = open_store(&args.store, &store)?;
    let writer = WriterOptions::new(args.elements_per_page, args.elements_per_cluster)?;
    let sink = SinkOptions {
        codec: args.layout.compression,
        mapping: args.layout.mapping,
        object_class: args.layout.objclass,
        batched_writes: args.batched,
    };
    let report = workload::gen_dataset(&args.store.location, &store, writer, sink, args.entries, args.seed)?;
    if let (Location::Daos(uri), Some(c)) = (&args.store.location, &container) {
        StoreDir::new(&args.store.store).save(uri, c)?;
    }
    let s = &report.summary;
    println!("location        {}", args.store.location);
    println!("entries         {}", s.n_entries);
    println!("clusters        {}", s.n_clusters);
    println!("pages           {}", s.n_pages);
    println!("stored_bytes    {}", s.stored_bytes);
    println!("wall_secs       {:.6}", report.wall.as_secs_f64());
    if let Some(sim) = report.simulated_secs {
        println!("simulated_secs  {sim:.6}");
    }
    Ok(())
}

fn analyze(args: OpenArgs) -> Result<()> {
    let store = ObjectStore::new();
    open_store(&args.store, &store)?;
    let reader = NTupleReader::open(&args.store.location, &store)?;
    let source = reader.source();
    let (stats, sim) = (source.stats(), source.simulated_seconds());
    let start = Instant::now();
    let result = workload::run_analysis(&reader)?;
    let wall = start.elapsed().as_secs_f64();
    println!("events          {}", result.n_events);
    println!("selected        {}", result.n_selected);
    println!("checksum        {:#018x}", result.checksum());
    println!("page_bytes      {}", source.stats().since(&stats).page_bytes);
    println!("wall_secs       {wall:.6}");
    if let (Some(before), Some(after)) = (sim, source.simulated_seconds()) {
        println!("simulated_secs  {:.6}", after - before);
    }
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let config = SweepConfig {
        mode: args.mode,
        backend: args.backend,
        mapping: args.layout.mapping,
        object_class: args.layout.objclass,
        codec: args.layout.compression,
        entries: args.entries,
        seed: args.seed,
        reps: args.reps,
        pool: pool_config(&args.pool_config)?,
        workdir: args.workdir,
    };
    let reports = bench::run_sweep(&config)?;
    match args.out {
        Some(path) => bench::write_csv(&reports, BufWriter::new(File::create(path)?)),
        None => bench::write_csv(&reports, io::stdout().lock()),
    }
}

fn inspect(args: InspectArgs) -> Result<()> {
    let store = ObjectStore::new();
    open_store(&args.store, &store)?;
    let source = coltuple::location::attach(&args.store.location, &store)?;
    io::stdout().write_all(inspect::describe(source.as_ref(), args.pages).as_bytes())?;
    Ok(())
}

fn main() -> ExitCode {
    let result = match Cli::parse().command {
        Command::Gen(a) => gen(a),
        Command::Analyze(a) => analyze(a),
        Command::Sweep(a) => sweep(a),
        Command::Inspect(a) => inspect(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
