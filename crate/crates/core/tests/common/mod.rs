//! Random schemas, entries and storage targets shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use coltuple::codec::Codec;
use coltuple::daos::{DaosUri, MappingStrategy};
use coltuple::location::{self, Location, SinkOptions};
use coltuple::ntuple::{NTupleWriter, Value, WriterOptions};
use coltuple::objstore::{ObjectStore, PoolConfig};
use coltuple::schema::{FieldDescriptor, FieldType, Schema};
use coltuple::storage::PageSource;
use rand::Rng;
use uuid::Uuid;

pub fn scalar_type(rng: &mut impl Rng) -> FieldType {
    match rng.random_range(0..5) {
        0 => FieldType::Int32,
        1 => FieldType::Int64,
        2 => FieldType::Float32,
        3 => FieldType::Float64,
        _ => FieldType::Bool,
    }
}

/// A field type nested at most `depth` levels below the top.
pub fn field_type(rng: &mut impl Rng, depth: u32) -> FieldType {
    match if depth == 0 { 0 } else { rng.random_range(0..4) } {
        0 | 1 => scalar_type(rng),
        2 => FieldType::vector(field_type(rng, depth - 1)),
        _ => FieldType::record(
            (0..rng.random_range(1..=3)).map(|i| FieldDescriptor::new(format!("m{i}"), field_type(rng, depth - 1))),
        ),
    }
}

pub fn schema(rng: &mut impl Rng) -> Schema {
    Schema::new((0..rng.random_range(1..=5)).map(|i| FieldDescriptor::new(format!("f{i}"), field_type(rng, 2))))
}

pub fn value(rng: &mut impl Rng, ty: &FieldType) -> Value {
    match ty {
        FieldType::Int32 => Value::Int32(rng.random()),
        FieldType::Int64 => Value::Int64(rng.random()),
        // finite values only, so equality is exact
        FieldType::Float32 => Value::Float32(rng.random_range(-1e6f32..1e6)),
        FieldType::Float64 => Value::Float64(rng.random_range(-1e12..1e12)),
        FieldType::Bool => Value::Bool(rng.random()),
        FieldType::Vector(inner) => Value::Vector((0..rng.random_range(0..=6)).map(|_| value(rng, inner)).collect()),
        FieldType::Record(members) => Value::Record(members.iter().map(|m| value(rng, &m.ty)).collect()),
    }
}

pub fn entries(rng: &mut impl Rng, schema: &Schema, n: usize) -> Vec<Vec<Value>> {
    (0..n)
        .map(|_| schema.fields.iter().map(|f| value(rng, &f.ty)).collect())
        .collect()
}

pub fn writer_options(rng: &mut impl Rng) -> WriterOptions {
    let page = rng.random_range(1..=16);
    WriterOptions::new(page, page * rng.random_range(1..=6)).unwrap()
}

pub fn codec(rng: &mut impl Rng) -> Codec {
    if rng.random() {
        Codec::General
    } else {
        Codec::Identity
    }
}

/// A storage backend: a file, or an object-store container under one mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    File,
    Daos(MappingStrategy),
}

impl Target {
    pub const ALL: [Target; 4] = [
        Target::File,
        Target::Daos(MappingStrategy::OidPerPage),
        Target::Daos(MappingStrategy::OidPerCluster),
        Target::Daos(MappingStrategy::AkeyPerPage),
    ];
}

/// Somewhere to put datasets; keeps its temporary directory and store alive.
pub struct Scratch {
    pub dir: tempfile::TempDir,
    pub store: ObjectStore,
    pub pool: Uuid,
    next: u64,
}

impl Scratch {
    pub fn new() -> Self {
        Self::with_pool(PoolConfig::default())
    }

    pub fn with_pool(config: PoolConfig) -> Self {
        let store = ObjectStore::new();
        let pool = store.create_pool(config).unwrap().config().uuid;
        Self {
            dir: tempfile::tempdir().unwrap(),
            store,
            pool,
            next: 0,
        }
    }

    pub fn file_path(&mut self) -> PathBuf {
        self.next += 1;
        self.dir.path().join(format!("d{}.ntpl", self.next))
    }

    /// A fresh location for `target`.
    pub fn location(&mut self, target: Target) -> Location {
        match target {
            Target::File => Location::File(self.file_path()),
            Target::Daos(_) => {
                self.next += 1;
                Location::Daos(DaosUri {
                    pool: self.pool,
                    svc_ranks: vec![0],
                    container: Uuid::from_u128(self.next as u128),
                })
            }
        }
    }

    pub fn write(
        &mut self,
        target: Target,
        schema: &Schema,
        rows: &[Vec<Value>],
        options: WriterOptions,
        codec: Codec,
    ) -> Arc<dyn PageSource> {
        let loc = self.location(target);
        let sink = SinkOptions {
            codec,
            mapping: match target {
                Target::Daos(m) => m,
                Target::File => MappingStrategy::default(),
            },
            ..Default::default()
        };
        let mut w = NTupleWriter::create(&loc, &self.store, "t", schema.clone(), options, sink).unwrap();
        for row in rows {
            w.append(row).unwrap();
        }
        w.close().unwrap();
        location::attach(&loc, &self.store).unwrap()
    }
}
