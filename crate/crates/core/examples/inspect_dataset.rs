//! Text dump of a dataset's metadata.

use coltuple::inspect::describe;
use coltuple::location::{self, Location, SinkOptions};
use coltuple::ntuple::WriterOptions;
use coltuple::objstore::ObjectStore;
use coltuple::workload;

fn main() -> coltuple::Result<()> {
    let dir = tempfile::tempdir()?;
    let loc = Location::File(dir.path().join("small.ntpl"));
    let store = ObjectStore::new();
    workload::gen_dataset(&loc, &store, WriterOptions::new(1000, 2000)?, SinkOptions::default(), 3000, 1)?;
    let source = location::attach(&loc, &store)?;
    print!("{}", describe(source.as_ref(), true));
    Ok(())
}
