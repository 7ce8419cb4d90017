//! Page/cluster size sweeps over the synthetic workload.
//!
//! Every cell writes the dataset then runs the analysis over it, `reps`
//! times. File-backend cells are timed with the wall clock; object-store
//! cells with the simulator's clock. The two are never mixed in one row.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use uuid::Uuid;

use crate::codec::Codec;
use crate::daos::{DaosUri, MappingStrategy};
use crate::error::{Error, Result};
use crate::location::{Location, SinkOptions};
use crate::ntuple::{NTupleReader, WriterOptions};
use crate::objstore::{ObjectClass, ObjectStore, PoolConfig};
use crate::workload::{gen_dataset, run_analysis};

pub const BASE_PAGE: u64 = 10_000;
pub const BASE_CLUSTER: u64 = 20_000;
pub const CONST_CLUSTER: u64 = 320_000;
pub const MAX_SIZE: u64 = 320_000;
pub const DEFAULT_REPS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepMode {
    /// Page size fixed at 10000 elements, cluster size doubling from 20000.
    ConstPageGrowCluster,
    /// Cluster size fixed at 320000 entries, page size doubling from 10000.
    GrowPageConstCluster,
}

impl SweepMode {
    /// `(elements_per_page, elements_per_cluster)` for each cell.
    pub fn cells(self) -> Vec<(u64, u64)> {
        let doubling = |start: u64| std::iter::successors(Some(start), |x| Some(x * 2)).take_while(|x| *x <= MAX_SIZE);
        match self {
            SweepMode::ConstPageGrowCluster => doubling(BASE_CLUSTER).map(|c| (BASE_PAGE, c)).collect(),
            SweepMode::GrowPageConstCluster => doubling(BASE_PAGE).map(|p| (p, CONST_CLUSTER)).collect(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SweepMode::ConstPageGrowCluster => "A",
            SweepMode::GrowPageConstCluster => "B",
        }
    }
}

impl FromStr for SweepMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" | "A" | "const-page" => Ok(SweepMode::ConstPageGrowCluster),
            "b" | "B" | "const-cluster" => Ok(SweepMode::GrowPageConstCluster),
            other => Err(Error::Config(format!("unknown sweep mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Backend {
    #[default]
    File,
    Daos,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::File => "file",
            Backend::Daos => "daos",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "file" => Ok(Backend::File),
            "daos" => Ok(Backend::Daos),
            other => Err(Error::Config(format!("unknown backend '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Write,
    Read,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Clock {
    Wall,
    Simulated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub mode: SweepMode,
    pub backend: Backend,
    pub mapping: MappingStrategy,
    pub object_class: ObjectClass,
    pub codec: Codec,
    pub entries: u64,
    pub seed: u64,
    pub reps: usize,
    pub pool: PoolConfig,
    /// Directory for file-backend datasets; a temporary one if unset.
    pub workdir: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            mode: SweepMode::ConstPageGrowCluster,
            backend: Backend::File,
            mapping: MappingStrategy::OidPerPage,
            object_class: ObjectClass::Sx,
            codec: Codec::Identity,
            entries: 2 * CONST_CLUSTER,
            seed: 42,
            reps: DEFAULT_REPS,
            pool: PoolConfig::default(),
            workdir: None,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::Config("at least one repetition is required".into()));
        }
        self.pool.validate()?;
        if self.backend == Backend::Daos {
            self.object_class.validate(self.pool.n_targets)?;
        }
        Ok(())
    }
}

/// Timing of one phase of one sweep cell over all repetitions.
#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputReport {
    pub mode: SweepMode,
    pub page_elems: u64,
    pub cluster_elems: u64,
    pub backend: Backend,
    pub mapping: Option<MappingStrategy>,
    pub object_class: Option<ObjectClass>,
    pub codec: Codec,
    pub phase: Phase,
    pub clock: Clock,
    /// Page bytes moved per repetition (stored size; metadata excluded).
    pub bytes: u64,
    pub seconds: Vec<f64>,
}

impl ThroughputReport {
    pub fn min(&self) -> f64 {
        self.seconds.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.seconds.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn avg(&self) -> f64 {
        self.seconds.iter().sum::<f64>() / self.seconds.len() as f64
    }

    /// Throughput at the average time, in 10^9 bytes per second.
    pub fn gbps_avg(&self) -> f64 {
        self.bytes as f64 / self.avg() / 1e9
    }

    pub fn seconds_per_byte(&self) -> f64 {
        self.avg() / self.bytes as f64
    }
}

pub const CSV_HEADER: [&str; 14] = [
    "mode",
    "page_elems",
    "cluster_elems",
    "backend",
    "mapping",
    "objclass",
    "codec",
    "bytes",
    "secs_min",
    "secs_avg",
    "secs_max",
    "gbps_avg",
    "phase",
    "clock",
];

pub fn write_csv<W: Write>(reports: &[ThroughputReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in reports {
        w.write_record([
            r.mode.label().to_string(),
            r.page_elems.to_string(),
            r.cluster_elems.to_string(),
            r.backend.to_string(),
            r.mapping.map_or("-".into(), |m| m.to_string()),
            r.object_class.map_or("-".into(), |c| c.to_string()),
            r.codec.name().to_string(),
            r.bytes.to_string(),
            format!("{:.9}", r.min()),
            format!("{:.9}", r.avg()),
            format!("{:.9}", r.max()),
            format!("{:.6}", r.gbps_avg()),
            match r.phase {
                Phase::Write => "write",
                Phase::Read => "read",
            }
            .to_string(),
            match r.clock {
                Clock::Wall => "wall",
                Clock::Simulated => "sim",
            }
            .to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs one `(page, cluster)` cell, returning the write and read reports.
pub fn run_cell(config: &SweepConfig, page: u64, cluster: u64) -> Result<(ThroughputReport, ThroughputReport)> {
    config.validate()?;
    let writer = WriterOptions::new(page, cluster)?;
    let sink = SinkOptions {
        codec: config.codec,
        mapping: config.mapping,
        object_class: config.object_class,
        batched_writes: false,
    };
    let store = ObjectStore::new();
    let tmp;
    let location = match config.backend {
        Backend::File => {
            let dir = match &config.workdir {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    dir.clone()
                }
                None => {
                    tmp = tempfile::tempdir()?;
                    tmp.path().to_path_buf()
                }
            };
            Location::File(dir.join(format!("sweep-{}-{page}-{cluster}.ntpl", config.mode.label())))
        }
        Backend::Daos => {
            let pool = store.create_pool(config.pool.clone())?;
            Location::Daos(DaosUri {
                pool: pool.config().uuid,
                svc_ranks: vec![0],
                container: Uuid::from_u64_pair(page, cluster),
            })
        }
    };
    let report = |phase, clock| ThroughputReport {
        mode: config.mode,
        page_elems: page,
        cluster_elems: cluster,
        backend: config.backend,
        mapping: (config.backend == Backend::Daos).then_some(config.mapping),
        object_class: (config.backend == Backend::Daos).then_some(config.object_class),
        codec: config.codec,
        phase,
        clock,
        bytes: 0,
        seconds: Vec::with_capacity(config.reps),
    };
    let clock = match config.backend {
        Backend::File => Clock::Wall,
        Backend::Daos => Clock::Simulated,
    };
    let mut write = report(Phase::Write, clock);
    let mut read = report(Phase::Read, clock);
    let mut checksum = None;
    for _ in 0..config.reps {
        if let Location::Daos(_) = location {
            location.container(&store)?.clear();
        }
        let gen = gen_dataset(&location, &store, writer, sink, config.entries, config.seed)?;
        write.bytes = gen.summary.stored_bytes;
        write
            .seconds
            .push(gen.simulated_secs.unwrap_or(gen.wall.as_secs_f64()));

        let reader = NTupleReader::open(&location, &store)?;
        let source = reader.source();
        let (stats_before, sim_before) = (source.stats(), source.simulated_seconds());
        let start = Instant::now();
        let result = run_analysis(&reader)?;
        let wall = start.elapsed().as_secs_f64();
        read.bytes = source.stats().since(&stats_before).page_bytes;
        read.seconds.push(match (sim_before, source.simulated_seconds()) {
            (Some(before), Some(after)) => after - before,
            _ => wall,
        });
        let sum = result.checksum();
        if checksum.replace(sum).is_some_and(|prev| prev != sum) {
            return Err(Error::InvalidState("analysis result changed between repetitions".into()));
        }
    }
    Ok((write, read))
}

/// Runs every cell of `config.mode`, in sweep order: one write and one read
/// report per cell.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<ThroughputReport>> {
    let mut out = Vec::new();
    for (page, cluster) in config.mode.cells() {
        let (w, r) = run_cell(config, page, cluster)?;
        out.push(w);
        out.push(r);
    }
    Ok(out)
}
