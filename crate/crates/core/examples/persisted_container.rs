//! Keeping an object-store container on disk between processes.

use coltuple::location::{Location, SinkOptions, StoreDir};
use coltuple::ntuple::{NTupleReader, WriterOptions};
use coltuple::objstore::{ObjectStore, PoolConfig};
use coltuple::workload;

fn main() -> coltuple::Result<()> {
    let dir = tempfile::tempdir()?;
    let store_dir = StoreDir::new(dir.path());
    let loc: Location = "daos://4b614f30-f476-4831-84ba-a51197600020:1/f1b0a25a-7fbb-4fba-b7d2-9a9f4e10e8f4".parse()?;
    let Location::Daos(uri) = &loc else { unreachable!() };

    {
        let store = ObjectStore::new();
        let container = store_dir.open(&store, uri, &PoolConfig::default())?;
        workload::gen_dataset(&loc, &store, WriterOptions::default(), SinkOptions::default(), 20_000, 3)?;
        store_dir.save(uri, &container)?;
        println!("saved {} objects to {}", container.keys().len(), store_dir.container_dir(uri).display());
    }

    let store = ObjectStore::new();
    store_dir.open(&store, uri, &PoolConfig::default())?;
    let result = workload::run_analysis(&NTupleReader::open(&loc, &store)?)?;
    println!("reattached: {} events, checksum {:#018x}", result.n_events, result.checksum());
    Ok(())
}
