use std::collections::BTreeSet;
use std::sync::Arc;

use coltuple::codec::Codec;
use coltuple::daos::{
    keys_for_page, DaosSink, DaosSinkOptions, DaosSource, MappingStrategy, ANCHOR_KEY, FOOTER_KEY, HEADER_KEY,
    PAGE_BASE,
};
use coltuple::ntuple::{NTupleReader, NTupleWriter, Value, WriterOptions};
use coltuple::objstore::{ContainerHandle, ObjectClass, ObjectKey, ObjectStore, Oid, PoolConfig};
use coltuple::schema::{ColumnId, FieldType, Schema};
use coltuple::storage::{load_cluster_by_pages, PageAddress, PageSource};
use coltuple::Error;
use uuid::Uuid;

fn container(store: &ObjectStore, n: u128) -> ContainerHandle {
    store
        .create_pool(PoolConfig::default())
        .unwrap()
        .open_container(Uuid::from_u128(n))
}

fn schema() -> Schema {
    Schema::default()
        .with("a", FieldType::Int64)
        .with("b", FieldType::Float32)
        .with("v", FieldType::vector(FieldType::Int32))
}

fn entry(i: i64) -> Vec<Value> {
    vec![
        Value::Int64(i),
        Value::Float32(i as f32 * 0.5),
        Value::from((0..(i % 3) as i32).collect::<Vec<_>>()),
    ]
}

fn write(c: &ContainerHandle, options: DaosSinkOptions, n: i64, page: u64, cluster: u64) {
    let sink = DaosSink::new(c.clone(), options).unwrap();
    let mut w = NTupleWriter::new(Box::new(sink), "t", schema(), WriterOptions::new(page, cluster).unwrap()).unwrap();
    for i in 0..n {
        w.append(&entry(i)).unwrap();
    }
    w.close().unwrap();
}

fn options(strategy: MappingStrategy) -> DaosSinkOptions {
    DaosSinkOptions {
        strategy,
        ..Default::default()
    }
}

#[test]
fn roundtrip_every_mapping() {
    for strategy in MappingStrategy::ALL {
        for codec in [Codec::Identity, Codec::General] {
            let store = ObjectStore::new();
            let c = container(&store, 1);
            write(
                &c,
                DaosSinkOptions {
                    codec,
                    strategy,
                    ..Default::default()
                },
                100,
                8,
                32,
            );
            let source = DaosSource::attach(c).unwrap();
            assert_eq!(source.strategy(), strategy);
            let reader = NTupleReader::new(Arc::new(source));
            for i in 0..100 {
                assert_eq!(reader.read_entry(i as u64).unwrap(), entry(i), "{strategy} {codec:?}");
            }
        }
    }
}

#[test]
fn locator_keys_follow_the_mapping() {
    let store = ObjectStore::new();
    let c = container(&store, 1);
    // a: 3 clusters x (8 entries / 4 per page) pages
    write(&c, options(MappingStrategy::OidPerCluster), 24, 4, 8);
    let source = DaosSource::attach(c.clone()).unwrap();
    for cluster in &source.footer().clusters {
        let mut seqs: Vec<u32> = cluster.pages().map(|(_, p)| p.commit_seq).collect();
        seqs.sort();
        assert_eq!(seqs, (0..cluster.n_pages() as u32).collect::<Vec<_>>());
        for (_, p) in cluster.pages() {
            match p.locator.address {
                PageAddress::Object { key, .. } => {
                    assert_eq!(key, ObjectKey::new(Oid(PAGE_BASE + cluster.cluster_id as u128), p.commit_seq as u64, 0));
                }
                other => panic!("unexpected {other:?}"),
            }
        }
    }
    for key in [ANCHOR_KEY, HEADER_KEY, FOOTER_KEY] {
        assert!(c.fetch(&key).is_ok());
        assert_eq!(c.object_class(key.oid), Some(ObjectClass::Sx));
    }
}

#[test]
fn forced_wrong_mapping_reports_missing_key() {
    let store = ObjectStore::new();
    let c = container(&store, 1);
    write(&c, options(MappingStrategy::OidPerPage), 40, 4, 16);
    let forced = DaosSource::attach_with_mapping(c.clone(), MappingStrategy::OidPerCluster).unwrap();
    let mut missing = 0;
    for cluster in &forced.footer().clusters {
        // a per-page layout only uses dkey 0, so pages with dkey > 0 cannot exist
        for (col, record) in cluster.pages().filter(|(_, p)| p.commit_seq > 0) {
            match forced.populate_page(col, record) {
                Err(Error::NotFound(key)) => {
                    assert_eq!(key, ObjectKey::new(Oid(PAGE_BASE + cluster.cluster_id as u128), record.commit_seq as u64, 0));
                    missing += 1;
                }
                other => panic!("forced mapping read {record:?}: {other:?}"),
            }
        }
    }
    assert!(missing > 0);
    assert!(DaosSource::attach_with_mapping(c, MappingStrategy::OidPerPage).is_ok());
}

#[test]
fn batched_writes_store_the_same_objects() {
    let store = ObjectStore::new();
    let plain = container(&store, 1);
    let batched = store.connect_pool(Uuid::nil()).unwrap().open_container(Uuid::from_u128(2));
    for (c, batch) in [(&plain, false), (&batched, true)] {
        write(
            c,
            DaosSinkOptions {
                batched_writes: batch,
                ..Default::default()
            },
            60,
            8,
            24,
        );
    }
    assert_eq!(plain.keys(), batched.keys());
    for k in plain.keys() {
        assert_eq!(plain.fetch(&k).unwrap(), batched.fetch(&k).unwrap());
    }
    // same updates, but each cluster's pages are serviced in parallel
    assert_eq!(batched.clock().update_ops, plain.clock().update_ops);
    assert!(batched.clock().simulated_seconds < plain.clock().simulated_seconds);
}

#[test]
fn vector_reads_are_no_slower_than_sequential() {
    let store = ObjectStore::new();
    let c = container(&store, 1);
    write(&c, options(MappingStrategy::OidPerPage), 300, 10, 100);
    let source = DaosSource::attach(c).unwrap();
    let all: BTreeSet<ColumnId> = (0..4).map(ColumnId).collect();
    for cluster in 0..3 {
        let sequential = source.sequential_cost(cluster, &all).unwrap();
        let (pages, cost) = source.load_cluster_with_cost(cluster, &all).unwrap();
        assert!(cost.simulated_elapsed <= sequential);
        assert_eq!(pages, load_cluster_by_pages(&source, cluster, &all).unwrap());
    }
    let (pages, cost) = source.load_cluster_with_cost(0, &BTreeSet::new()).unwrap();
    assert!(pages.is_empty());
    assert_eq!(cost.simulated_elapsed, 0.0);
}

#[test]
fn replicated_pages_land_on_every_replica() {
    let store = ObjectStore::new();
    let c = container(&store, 1);
    write(
        &c,
        DaosSinkOptions {
            object_class: ObjectClass::RpXsf { replicas: 3 },
            ..Default::default()
        },
        50,
        10,
        50,
    );
    let source = DaosSource::attach(c.clone()).unwrap();
    for (_, p) in source.footer().clusters[0].pages() {
        let PageAddress::Object { key, .. } = p.locator.address else {
            panic!()
        };
        assert_eq!(c.targets_holding(&key).len(), 3);
    }
    let reader = NTupleReader::new(Arc::new(source));
    assert_eq!(reader.read_entry(49).unwrap(), entry(49));
}

#[test]
fn rejects_invalid_object_class() {
    let store = ObjectStore::new();
    let c = container(&store, 1);
    let bad = DaosSinkOptions {
        object_class: ObjectClass::RpXsf { replicas: 9 },
        ..Default::default()
    };
    assert!(matches!(DaosSink::new(c, bad), Err(Error::Config(_))));
}

#[test]
fn persisted_container_can_be_reattached() {
    let dir = tempfile::tempdir().unwrap();
    let store = ObjectStore::new();
    let c = container(&store, 1);
    write(&c, options(MappingStrategy::AkeyPerPage), 30, 4, 12);
    c.persist(dir.path()).unwrap();

    let fresh = ObjectStore::new();
    let c2 = container(&fresh, 1);
    c2.restore(dir.path()).unwrap();
    let reader = NTupleReader::new(Arc::new(DaosSource::attach(c2).unwrap()));
    for i in 0..30 {
        assert_eq!(reader.read_entry(i as u64).unwrap(), entry(i));
    }
}

#[test]
fn missing_page_object_is_reported() {
    let store = ObjectStore::new();
    let c = container(&store, 1);
    write(&c, options(MappingStrategy::OidPerPage), 20, 5, 20);
    let source = DaosSource::attach(c.clone()).unwrap();
    let snapshot: Vec<_> = c.keys().into_iter().filter(|k| k.oid.hi() == 1).collect();
    // drop everything and restore only the metadata objects
    let meta: Vec<_> = [ANCHOR_KEY, HEADER_KEY, FOOTER_KEY]
        .iter()
        .map(|k| (*k, c.fetch(k).unwrap()))
        .collect();
    c.clear();
    for (k, v) in meta {
        c.update(k, ObjectClass::Sx, v).unwrap();
    }
    let all: BTreeSet<ColumnId> = (0..4).map(ColumnId).collect();
    match source.load_cluster(0, &all) {
        Err(Error::Batch { key, .. }) => assert!(snapshot.contains(&key)),
        other => panic!("expected a batch error, got {other:?}"),
    }
}

#[test]
fn page_keys_match_positions() {
    let store = ObjectStore::new();
    let c = container(&store, 1);
    write(&c, options(MappingStrategy::AkeyPerPage), 24, 4, 8);
    let source = DaosSource::attach(c).unwrap();
    let mut global = 0u64;
    for cluster in &source.footer().clusters {
        for (col, list) in &cluster.page_lists {
            for (i, p) in list.iter().enumerate() {
                let pos = coltuple::storage::PagePosition {
                    cluster_id: cluster.cluster_id,
                    seq_in_cluster: p.commit_seq,
                    global_seq: global + p.commit_seq as u64,
                    column_id: *col,
                    index_in_column: i as u32,
                };
                let PageAddress::Object { key, .. } = p.locator.address else {
                    panic!()
                };
                assert_eq!(key, keys_for_page(MappingStrategy::AkeyPerPage, &pos));
                assert_eq!(key.dkey, col.0 as u64);
                assert_eq!(key.akey, i as u64);
            }
        }
        global += cluster.n_pages() as u64;
    }
}
