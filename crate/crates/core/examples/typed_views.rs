//! Typed views load pages lazily, one column at a time.

use coltuple::location::{Location, SinkOptions};
use coltuple::ntuple::{NTupleReader, WriterOptions};
use coltuple::objstore::ObjectStore;
use coltuple::workload;

fn main() -> coltuple::Result<()> {
    let dir = tempfile::tempdir()?;
    let location = Location::File(dir.path().join("events.ntpl"));
    let store = ObjectStore::new();
    workload::gen_dataset(&location, &store, WriterOptions::default(), SinkOptions::default(), 50_000, 42)?;

    let reader = NTupleReader::open(&location, &store)?;
    let mut is_muon = reader.get_view::<i32>("H1_isMuon")?;
    let before = reader.source().stats();
    let muons = is_muon.iter().filter(|v| matches!(v, Ok(1))).count();
    let fetched = reader.source().stats().since(&before);
    println!("{muons} of {} events have H1_isMuon = 1", is_muon.len());
    println!("{} page loads, {} page bytes fetched", is_muon.page_loads(), fetched.page_bytes);
    println!("dataset holds {} page bytes in total", reader.source().footer().total_stored_bytes());

    let mut hits = reader.get_view::<Vec<i32>>("hits")?;
    println!("hits of entry 7: {:?}", hits.at(7)?);
    if let Err(e) = reader.get_view::<f32>("H1_PX") {
        println!("wrong type: {e}");
    }
    if let Err(e) = reader.get_view::<f64>("H4_PX") {
        println!("unknown field: {e}");
    }
    Ok(())
}
