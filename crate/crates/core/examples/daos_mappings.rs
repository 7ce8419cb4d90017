//! Dataset locations in the object store and the three page-to-key mappings.

use coltuple::daos::MappingStrategy;
use coltuple::location::{self, Location, SinkOptions};
use coltuple::ntuple::{NTupleWriter, Value, WriterOptions};
use coltuple::objstore::{ObjectStore, PoolConfig};
use coltuple::schema::{FieldType, Schema};
use coltuple::storage::PageAddress;

fn main() -> coltuple::Result<()> {
    let uri = "daos://4b614f30-f476-4831-84ba-a51197600020:1/f1b0a25a-7fbb-4fba-b7d2-9a9f4e10e8f4";
    let Location::Daos(parsed) = uri.parse()? else {
        unreachable!()
    };
    println!("pool {}  ranks {:?}  container {}", parsed.pool, parsed.svc_ranks, parsed.container);

    let schema = Schema::default().with("a", FieldType::Int32).with("b", FieldType::Float64);
    for mapping in MappingStrategy::ALL {
        let store = ObjectStore::new();
        store.create_pool(PoolConfig {
            uuid: parsed.pool,
            ..Default::default()
        })?;
        let loc = Location::Daos(parsed.clone());
        let sink = SinkOptions {
            mapping,
            ..Default::default()
        };
        let mut w = NTupleWriter::create(&loc, &store, "t", schema.clone(), WriterOptions::new(2, 4)?, sink)?;
        for i in 0..8 {
            w.append(&[Value::Int32(i), Value::Float64(i as f64)])?;
        }
        w.close()?;

        println!("{mapping}:");
        let source = location::attach(&loc, &store)?;
        for cluster in &source.footer().clusters {
            for (col, page) in cluster.pages() {
                if let PageAddress::Object { key, .. } = page.locator.address {
                    println!("  cluster {} column {} seq {} -> {key}", cluster.cluster_id, col.0, page.commit_seq);
                }
            }
        }
    }
    Ok(())
}
