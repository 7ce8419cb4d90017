//! Generating the synthetic three-hadron workload and running the analysis
//! on both backends.

use std::time::Instant;

use coltuple::daos::DaosUri;
use coltuple::location::{Location, SinkOptions};
use coltuple::ntuple::{NTupleReader, WriterOptions};
use coltuple::objstore::{ObjectStore, PoolConfig};
use coltuple::workload;

fn main() -> coltuple::Result<()> {
    let dir = tempfile::tempdir()?;
    let store = ObjectStore::new();
    let pool = store.create_pool(PoolConfig::default())?;
    let locations = [
        Location::File(dir.path().join("events.ntpl")),
        Location::Daos(DaosUri {
            pool: pool.config().uuid,
            svc_ranks: vec![0],
            container: uuid::Uuid::from_u128(7),
        }),
    ];
    for loc in &locations {
        let gen = workload::gen_dataset(loc, &store, WriterOptions::default(), SinkOptions::default(), 100_000, 42)?;
        let reader = NTupleReader::open(loc, &store)?;
        let start = Instant::now();
        let result = workload::run_analysis(&reader)?;
        let fetched = reader.source().stats().page_bytes;
        println!("{loc}");
        println!("  wrote {} bytes in {:.3} s", gen.summary.stored_bytes, gen.wall.as_secs_f64());
        println!(
            "  selected {} of {} events, checksum {:#018x}, {:.3} s",
            result.n_selected,
            result.n_events,
            result.checksum(),
            start.elapsed().as_secs_f64()
        );
        println!(
            "  fetched {fetched} of {} page bytes",
            reader.source().footer().total_stored_bytes()
        );
    }
    Ok(())
}
