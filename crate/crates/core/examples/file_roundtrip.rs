//! Writing and reading a dataset in a single file.

use coltuple::codec::Codec;
use coltuple::location::{Location, SinkOptions};
use coltuple::ntuple::{NTupleReader, NTupleWriter, Value, WriterOptions};
use coltuple::objstore::ObjectStore;
use coltuple::schema::{FieldType, Schema};

fn main() -> coltuple::Result<()> {
    let dir = tempfile::tempdir()?;
    let location = Location::File(dir.path().join("events.ntpl"));
    let store = ObjectStore::new();
    let schema = Schema::default()
        .with("id", FieldType::Int64)
        .with("energy", FieldType::Float64)
        .with("hits", FieldType::vector(FieldType::Int32));

    let sink = SinkOptions {
        codec: Codec::General,
        ..Default::default()
    };
    let mut writer = NTupleWriter::create(&location, &store, "Events", schema, WriterOptions::new(100, 500)?, sink)?;
    for i in 0..1234i64 {
        let hits: Vec<i32> = (0..(i % 5) as i32).collect();
        writer.append(&[Value::Int64(i), Value::Float64(i as f64 * 0.25), Value::from(hits)])?;
    }
    let summary = writer.close()?;
    println!(
        "wrote {} entries in {} clusters, {} pages, {} stored bytes",
        summary.n_entries, summary.n_clusters, summary.n_pages, summary.stored_bytes
    );

    let reader = NTupleReader::open(&location, &store)?;
    println!("entry 1233 = {:?}", reader.read_entry(1233)?);
    Ok(())
}
