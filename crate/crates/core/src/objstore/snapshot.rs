//! Directory snapshots of a container.
//!
//! `index` is a text file listing every object; each object's records live in
//! `<oid as 32 hex digits>.obj`. The index ends with an `end <count>` line so
//! a truncated index is detected.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use bytes::Bytes;

use super::{ObjectClass, ObjectKey, Oid};
use crate::error::{Error, Result};
use crate::wire;

const INDEX_FILE: &str = "index";
const INDEX_MAGIC: &str = "coltuple-snapshot 1";
const OBJECT_MAGIC: &[u8; 4] = b"CNTO";

pub(super) struct SnapshotObject {
    pub oid: Oid,
    pub class: ObjectClass,
    pub records: Vec<(u64, u64, Bytes)>,
}

pub(super) fn collect(targets: &[HashMap<ObjectKey, Bytes>], classes: &HashMap<Oid, ObjectClass>) -> Vec<SnapshotObject> {
    let mut by_oid: BTreeMap<Oid, BTreeMap<(u64, u64), Bytes>> = BTreeMap::new();
    for target in targets {
        for (key, value) in target {
            by_oid
                .entry(key.oid)
                .or_default()
                .insert((key.dkey, key.akey), value.clone());
        }
    }
    by_oid
        .into_iter()
        .map(|(oid, records)| SnapshotObject {
            oid,
            class: classes.get(&oid).copied().unwrap_or_default(),
            records: records.into_iter().map(|((d, a), v)| (d, a, v)).collect(),
        })
        .collect()
}

fn object_file(oid: Oid) -> String {
    format!("{:032x}.obj", oid.0)
}

pub(super) fn write(dir: &Path, objects: &[SnapshotObject]) -> Result<()> {
    fs::create_dir_all(dir)?;
    // stale object files from an earlier snapshot would be ignored by the
    // index, but remove them so the directory mirrors the container
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "obj") {
            fs::remove_file(path)?;
        }
    }
    let mut index = format!("{INDEX_MAGIC}\n");
    for obj in objects {
        let mut w = wire::Writer::default();
        w.bytes(OBJECT_MAGIC).u32(obj.records.len() as u32);
        for (dkey, akey, value) in &obj.records {
            w.u64(*dkey).u64(*akey).u64(value.len() as u64).bytes(value);
        }
        fs::write(dir.join(object_file(obj.oid)), &w.buf)?;
        index.push_str(&format!("object {:032x} {} {}\n", obj.oid.0, obj.class, obj.records.len()));
    }
    index.push_str(&format!("end {}\n", objects.len()));
    fs::write(dir.join(INDEX_FILE), index)?;
    Ok(())
}

pub(super) fn read(dir: &Path) -> Result<Vec<SnapshotObject>> {
    let index_path = dir.join(INDEX_FILE);
    if !index_path.exists() {
        let empty = fs::read_dir(dir)?.next().is_none();
        return if empty {
            Ok(Vec::new())
        } else {
            Err(Error::corrupt(format!("{} has no snapshot index", dir.display())))
        };
    }
    let text = fs::read_to_string(&index_path)?;
    if !text.ends_with('\n') {
        return Err(Error::corrupt("snapshot index truncated"));
    }
    let mut lines = text.lines();
    if lines.next() != Some(INDEX_MAGIC) {
        return Err(Error::corrupt("snapshot index: bad magic"));
    }
    let mut objects = Vec::new();
    let mut finished = false;
    for line in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.as_slice() {
            ["object", oid, class, n] if !finished => {
                let oid = u128::from_str_radix(oid, 16)
                    .map(Oid)
                    .map_err(|_| Error::corrupt(format!("snapshot index: bad oid '{oid}'")))?;
                let class: ObjectClass = class.parse()?;
                let n: usize = n
                    .parse()
                    .map_err(|_| Error::corrupt("snapshot index: bad record count"))?;
                let records = read_object(&dir.join(object_file(oid)), n)?;
                objects.push(SnapshotObject { oid, class, records });
            }
            ["end", n] if !finished => {
                if n.parse::<usize>().ok() != Some(objects.len()) {
                    return Err(Error::corrupt("snapshot index: object count mismatch"));
                }
                finished = true;
            }
            _ => return Err(Error::corrupt(format!("snapshot index: unexpected line '{line}'"))),
        }
    }
    if !finished {
        return Err(Error::corrupt("snapshot index truncated"));
    }
    Ok(objects)
}

fn read_object(path: &Path, expected: usize) -> Result<Vec<(u64, u64, Bytes)>> {
    let bytes = fs::read(path)?;
    let mut r = wire::Reader::new(&bytes, "snapshot object");
    if r.take(4)? != OBJECT_MAGIC {
        return Err(Error::corrupt(format!("{}: bad magic", path.display())));
    }
    let n = r.count(24)?;
    if n != expected {
        return Err(Error::corrupt(format!("{}: {n} records, index says {expected}", path.display())));
    }
    let mut records = Vec::with_capacity(n);
    for _ in 0..n {
        let dkey = r.u64()?;
        let akey = r.u64()?;
        let len = r.u64()? as usize;
        records.push((dkey, akey, Bytes::copy_from_slice(r.take(len)?)));
    }
    r.finish()?;
    Ok(records)
}
