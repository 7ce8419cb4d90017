//! In-process simulation of a key-array object store.
//!
//! Pools are split into independently accessible targets. Within a container,
//! values are addressed by `(oid, dkey, akey)`; all values sharing an
//! `(oid, dkey)` pair are placed on the same target(s). Every operation is
//! charged against a deterministic cost model so throughput comparisons can
//! run without storage hardware:
//!
//! ```text
//! elapsed = max over targets ( ops_t * latency + bytes_t / bandwidth )
//! ```
//!
//! Synchronous operations are charged one at a time; vector operations are
//! charged as one parallel batch.

mod config;
mod snapshot;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use bytes::Bytes;
use parking_lot::{Mutex, RwLock};
use uuid::Uuid;

use crate::error::{Error, Result};
use crate::wire::{fnv1a64_extend, FNV_OFFSET};

pub use config::PoolConfig;

/// 128-bit object identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Oid(pub u128);

impl Oid {
    pub fn from_parts(hi: u64, lo: u64) -> Self {
        Oid(((hi as u128) << 64) | lo as u128)
    }

    pub fn hi(self) -> u64 {
        (self.0 >> 64) as u64
    }

    pub fn lo(self) -> u64 {
        self.0 as u64
    }
}

impl fmt::Display for Oid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:x}.{:x}", self.hi(), self.lo())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ObjectKey {
    pub oid: Oid,
    pub dkey: u64,
    pub akey: u64,
}

impl ObjectKey {
    pub fn new(oid: Oid, dkey: u64, akey: u64) -> Self {
        Self { oid, dkey, akey }
    }
}

impl fmt::Display for ObjectKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "oid={} dkey={} akey={}", self.oid, self.dkey, self.akey)
    }
}

/// Placement and replication policy of an object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ObjectClass {
    /// Single copy, spread over all targets of the pool by dkey.
    #[default]
    Sx,
    /// Replicated on `replicas` distinct targets; fetches rotate over replicas.
    RpXsf { replicas: u16 },
}

impl ObjectClass {
    pub const DEFAULT_REPLICAS: u16 = 3;

    pub fn replicas(self) -> usize {
        match self {
            ObjectClass::Sx => 1,
            ObjectClass::RpXsf { replicas } => replicas as usize,
        }
    }

    pub fn validate(self, n_targets: usize) -> Result<()> {
        match self {
            ObjectClass::Sx => Ok(()),
            ObjectClass::RpXsf { replicas } if replicas >= 2 && replicas as usize <= n_targets => Ok(()),
            ObjectClass::RpXsf { replicas } => Err(Error::Config(format!(
                "RP_XSF needs 2..={n_targets} replicas, got {replicas}"
            ))),
        }
    }
}

impl fmt::Display for ObjectClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectClass::Sx => f.write_str("sx"),
            ObjectClass::RpXsf { replicas } => write!(f, "rp-xsf:{replicas}"),
        }
    }
}

impl FromStr for ObjectClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase().replace('_', "-");
        match lower.split_once(':') {
            None if lower == "sx" => Ok(ObjectClass::Sx),
            None if lower == "rp-xsf" => Ok(ObjectClass::RpXsf {
                replicas: Self::DEFAULT_REPLICAS,
            }),
            Some(("rp-xsf", n)) => n
                .parse()
                .map(|replicas| ObjectClass::RpXsf { replicas })
                .map_err(|_| Error::Config(format!("bad replica count in '{s}'"))),
            _ => Err(Error::Config(format!("unknown object class '{s}'"))),
        }
    }
}

/// Hash of `(oid, dkey)` used for target selection. Seeded by a fixed
/// constant so placement is stable across processes.
pub fn placement_hash(oid: Oid, dkey: u64) -> u64 {
    let h = fnv1a64_extend(FNV_OFFSET, &oid.0.to_le_bytes());
    fnv1a64_extend(h, &dkey.to_le_bytes())
}

/// Targets holding `key` under `class`. The akey never affects placement.
pub fn placement(key: &ObjectKey, class: ObjectClass, n_targets: usize) -> Vec<usize> {
    let first = (placement_hash(key.oid, key.dkey) % n_targets as u64) as usize;
    (0..class.replicas().min(n_targets))
        .map(|i| (first + i) % n_targets)
        .collect()
}

/// Simulated time and per-target load of one operation or batch.
#[derive(Debug, Clone, PartialEq)]
pub struct CostReport {
    pub simulated_elapsed: f64,
    pub per_target_bytes: Vec<u64>,
    pub per_target_ops: Vec<u64>,
}

impl CostReport {
    pub fn zero(n_targets: usize) -> Self {
        Self {
            simulated_elapsed: 0.0,
            per_target_bytes: vec![0; n_targets],
            per_target_ops: vec![0; n_targets],
        }
    }

    fn charge(&mut self, target: usize, bytes: u64) {
        self.per_target_bytes[target] += bytes;
        self.per_target_ops[target] += 1;
    }

    fn finish(mut self, config: &PoolConfig) -> Self {
        self.simulated_elapsed = self
            .per_target_ops
            .iter()
            .zip(&self.per_target_bytes)
            .map(|(&ops, &bytes)| config.target_time(ops, bytes))
            .fold(0.0, f64::max);
        self
    }

    pub fn total_bytes(&self) -> u64 {
        self.per_target_bytes.iter().sum()
    }

    pub fn total_ops(&self) -> u64 {
        self.per_target_ops.iter().sum()
    }

    /// Number of targets that serviced at least one operation.
    pub fn targets_used(&self) -> usize {
        self.per_target_ops.iter().filter(|&&n| n > 0).count()
    }
}

/// Running totals of everything charged against a pool.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClockSnapshot {
    pub simulated_seconds: f64,
    pub bytes_fetched: u64,
    pub bytes_updated: u64,
    pub fetch_ops: u64,
    pub update_ops: u64,
}

/// Root of the simulated deployment: the set of configured pools.
#[derive(Debug, Clone, Default)]
pub struct ObjectStore {
    pools: Arc<Mutex<HashMap<Uuid, Arc<PoolState>>>>,
}

impl ObjectStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a pool. Re-creating an existing uuid with the same config is a no-op.
    pub fn create_pool(&self, config: PoolConfig) -> Result<PoolHandle> {
        config.validate()?;
        let mut pools = self.pools.lock();
        if let Some(existing) = pools.get(&config.uuid) {
            if existing.config != config {
                return Err(Error::Config(format!("pool {} exists with a different config", config.uuid)));
            }
            return Ok(PoolHandle {
                state: existing.clone(),
            });
        }
        let state = Arc::new(PoolState {
            config,
            containers: Mutex::default(),
            clock: Mutex::default(),
        });
        pools.insert(state.config.uuid, state.clone());
        Ok(PoolHandle { state })
    }

    pub fn connect_pool(&self, uuid: Uuid) -> Result<PoolHandle> {
        self.pools
            .lock()
            .get(&uuid)
            .cloned()
            .map(|state| PoolHandle { state })
            .ok_or(Error::UnknownPool(uuid))
    }
}

#[derive(Debug)]
struct PoolState {
    config: PoolConfig,
    containers: Mutex<HashMap<Uuid, Arc<ContainerState>>>,
    clock: Mutex<ClockSnapshot>,
}

/// Connection to a pool. Containers opened from it keep it alive.
#[derive(Debug, Clone)]
pub struct PoolHandle {
    state: Arc<PoolState>,
}

impl PoolHandle {
    pub fn config(&self) -> &PoolConfig {
        &self.state.config
    }

    /// Opens a container, creating it empty on first use.
    pub fn open_container(&self, uuid: Uuid) -> ContainerHandle {
        let n_targets = self.state.config.n_targets;
        let state = self
            .state
            .containers
            .lock()
            .entry(uuid)
            .or_insert_with(|| Arc::new(ContainerState::new(uuid, n_targets)))
            .clone();
        ContainerHandle {
            pool: self.state.clone(),
            state,
        }
    }

    pub fn clock(&self) -> ClockSnapshot {
        self.state.clock.lock().clone()
    }
}

#[derive(Debug)]
struct ContainerState {
    uuid: Uuid,
    data: RwLock<ContainerData>,
    next_replica: AtomicU64,
    clock: Mutex<ClockSnapshot>,
}

#[derive(Debug)]
struct ContainerData {
    targets: Vec<HashMap<ObjectKey, Bytes>>,
    classes: HashMap<Oid, ObjectClass>,
}

impl ContainerState {
    fn new(uuid: Uuid, n_targets: usize) -> Self {
        Self {
            uuid,
            data: RwLock::new(ContainerData {
                targets: vec![HashMap::new(); n_targets],
                classes: HashMap::new(),
            }),
            next_replica: AtomicU64::new(0),
            clock: Mutex::default(),
        }
    }
}

impl ContainerData {
    fn class_of(&self, oid: Oid) -> Option<ObjectClass> {
        self.classes.get(&oid).copied()
    }

    fn check_class(&self, key: &ObjectKey, class: ObjectClass) -> Result<()> {
        match self.class_of(key.oid) {
            Some(existing) if existing != class => Err(Error::InvalidState(format!(
                "object {} has class {existing}, update requested {class}",
                key.oid
            ))),
            _ => Ok(()),
        }
    }
}

/// One entry of a vector write.
#[derive(Debug, Clone)]
pub struct UpdateDescriptor {
    pub key: ObjectKey,
    pub class: ObjectClass,
    pub data: Bytes,
}

/// Handle on a container's object space.
#[derive(Debug, Clone)]
pub struct ContainerHandle {
    pool: Arc<PoolState>,
    state: Arc<ContainerState>,
}

impl ContainerHandle {
    pub fn uuid(&self) -> Uuid {
        self.state.uuid
    }

    pub fn pool(&self) -> PoolHandle {
        PoolHandle {
            state: self.pool.clone(),
        }
    }

    fn n_targets(&self) -> usize {
        self.pool.config.n_targets
    }

    pub fn update(&self, key: ObjectKey, class: ObjectClass, data: impl Into<Bytes>) -> Result<CostReport> {
        self.write_v(&[UpdateDescriptor {
            key,
            class,
            data: data.into(),
        }])
    }

    pub fn fetch(&self, key: &ObjectKey) -> Result<Bytes> {
        self.fetch_with_cost(key).map(|(b, _)| b)
    }

    pub fn fetch_with_cost(&self, key: &ObjectKey) -> Result<(Bytes, CostReport)> {
        match self.read_v(std::slice::from_ref(key)) {
            Ok((mut payloads, cost)) => Ok((payloads.pop().expect("one payload"), cost)),
            Err(Error::Batch { source, .. }) => Err(*source),
            Err(e) => Err(e),
        }
    }

    /// Batched fetch. Each target services its share serially; all targets
    /// run in parallel.
    pub fn read_v(&self, keys: &[ObjectKey]) -> Result<(Vec<Bytes>, CostReport)> {
        check_unique(keys.iter())?;
        let n_targets = self.n_targets();
        let mut cost = CostReport::zero(n_targets);
        let mut payloads = Vec::with_capacity(keys.len());
        {
            let data = self.state.data.read();
            for (index, key) in keys.iter().enumerate() {
                let class = data.class_of(key.oid).ok_or_else(|| not_found(index, key))?;
                let targets = placement(key, class, n_targets);
                let pick = if targets.len() > 1 {
                    let turn = self.state.next_replica.fetch_add(1, Ordering::Relaxed);
                    targets[(turn % targets.len() as u64) as usize]
                } else {
                    targets[0]
                };
                let value = data.targets[pick].get(key).ok_or_else(|| not_found(index, key))?;
                cost.charge(pick, value.len() as u64);
                payloads.push(value.clone());
            }
        }
        let cost = cost.finish(&self.pool.config);
        for clock in [&self.pool.clock, &self.state.clock] {
            let mut clock = clock.lock();
            clock.simulated_seconds += cost.simulated_elapsed;
            clock.bytes_fetched += cost.total_bytes();
            clock.fetch_ops += keys.len() as u64;
        }
        Ok((payloads, cost))
    }

    /// Batched update. Replicated objects are written to every replica target.
    pub fn write_v(&self, updates: &[UpdateDescriptor]) -> Result<CostReport> {
        check_unique(updates.iter().map(|u| &u.key))?;
        let n_targets = self.n_targets();
        let mut cost = CostReport::zero(n_targets);
        {
            let mut data = self.state.data.write();
            for (index, u) in updates.iter().enumerate() {
                u.class.validate(n_targets).and_then(|_| data.check_class(&u.key, u.class)).map_err(|e| {
                    Error::Batch {
                        index,
                        key: u.key,
                        source: Box::new(e),
                    }
                })?;
            }
            for u in updates {
                data.classes.insert(u.key.oid, u.class);
                for t in placement(&u.key, u.class, n_targets) {
                    data.targets[t].insert(u.key, u.data.clone());
                    cost.charge(t, u.data.len() as u64);
                }
            }
        }
        let cost = cost.finish(&self.pool.config);
        for clock in [&self.pool.clock, &self.state.clock] {
            let mut clock = clock.lock();
            clock.simulated_seconds += cost.simulated_elapsed;
            clock.bytes_updated += cost.total_bytes();
            clock.update_ops += updates.len() as u64;
        }
        Ok(cost)
    }

    /// Cost the batch `keys` would incur, without performing it.
    pub fn estimate_read_v(&self, keys: &[ObjectKey]) -> Result<CostReport> {
        let n_targets = self.n_targets();
        let mut cost = CostReport::zero(n_targets);
        let data = self.state.data.read();
        for (index, key) in keys.iter().enumerate() {
            let class = data.class_of(key.oid).ok_or_else(|| not_found(index, key))?;
            let target = placement(key, class, n_targets)[0];
            let len = data.targets[target]
                .get(key)
                .ok_or_else(|| not_found(index, key))?
                .len();
            cost.charge(target, len as u64);
        }
        Ok(cost.finish(&self.pool.config))
    }

    /// Targets currently holding a value for `key`.
    pub fn targets_holding(&self, key: &ObjectKey) -> Vec<usize> {
        let data = self.state.data.read();
        (0..data.targets.len())
            .filter(|&t| data.targets[t].contains_key(key))
            .collect()
    }

    pub fn object_class(&self, oid: Oid) -> Option<ObjectClass> {
        self.state.data.read().class_of(oid)
    }

    /// Distinct keys stored in the container.
    pub fn keys(&self) -> Vec<ObjectKey> {
        let data = self.state.data.read();
        let mut keys: Vec<ObjectKey> = data
            .targets
            .iter()
            .flat_map(|t| t.keys().copied())
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        keys.sort();
        keys
    }

    pub fn is_empty(&self) -> bool {
        self.state.data.read().targets.iter().all(HashMap::is_empty)
    }

    /// Totals charged by operations on this container since creation or
    /// the last [`ContainerHandle::clear`].
    pub fn clock(&self) -> ClockSnapshot {
        self.state.clock.lock().clone()
    }

    /// Removes every object and resets the container clock and replica rotation.
    pub fn clear(&self) {
        let mut data = self.state.data.write();
        data.targets.iter_mut().for_each(HashMap::clear);
        data.classes.clear();
        *self.state.clock.lock() = ClockSnapshot::default();
        self.state.next_replica.store(0, Ordering::Relaxed);
    }

    /// Writes the container contents to `dir`.
    pub fn persist(&self, dir: &std::path::Path) -> Result<()> {
        let objects = {
            let data = self.state.data.read();
            snapshot::collect(&data.targets, &data.classes)
        };
        snapshot::write(dir, &objects)
    }

    /// Replaces the container contents with the snapshot in `dir`. Restoring
    /// is not charged against the cost model.
    pub fn restore(&self, dir: &std::path::Path) -> Result<()> {
        let objects = snapshot::read(dir)?;
        let n_targets = self.n_targets();
        let mut fresh = ContainerData {
            targets: vec![HashMap::new(); n_targets],
            classes: HashMap::new(),
        };
        for obj in objects {
            obj.class.validate(n_targets)?;
            fresh.classes.insert(obj.oid, obj.class);
            for (dkey, akey, value) in obj.records {
                let key = ObjectKey::new(obj.oid, dkey, akey);
                for t in placement(&key, obj.class, n_targets) {
                    fresh.targets[t].insert(key, value.clone());
                }
            }
        }
        *self.state.data.write() = fresh;
        Ok(())
    }
}

fn not_found(index: usize, key: &ObjectKey) -> Error {
    Error::Batch {
        index,
        key: *key,
        source: Box::new(Error::NotFound(*key)),
    }
}

fn check_unique<'a>(keys: impl Iterator<Item = &'a ObjectKey>) -> Result<()> {
    let mut seen = HashSet::new();
    for (index, key) in keys.enumerate() {
        if !seen.insert(*key) {
            return Err(Error::Batch {
                index,
                key: *key,
                source: Box::new(Error::InvalidState("duplicate key in batch".into())),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pool(n_targets: usize) -> (ObjectStore, PoolHandle) {
        let store = ObjectStore::new();
        let cfg = PoolConfig {
            n_targets,
            ..PoolConfig::default()
        };
        let pool = store.create_pool(cfg).unwrap();
        (store, pool)
    }

    fn key(oid: u128, dkey: u64, akey: u64) -> ObjectKey {
        ObjectKey::new(Oid(oid), dkey, akey)
    }

    #[test]
    fn connect_and_open() {
        let (store, pool) = pool(4);
        let uuid = pool.config().uuid;
        assert!(store.connect_pool(uuid).is_ok());
        assert!(matches!(store.connect_pool(Uuid::from_u128(1)), Err(Error::UnknownPool(_))));

        let c = Uuid::from_u128(99);
        let a = pool.open_container(c);
        let b = store.connect_pool(uuid).unwrap().open_container(c);
        a.update(key(5, 0, 0), ObjectClass::Sx, &b"x"[..]).unwrap();
        assert_eq!(b.fetch(&key(5, 0, 0)).unwrap(), Bytes::from_static(b"x"));
    }

    #[test]
    fn container_outlives_dropped_pool_handle() {
        let (store, pool) = pool(2);
        let c = pool.open_container(Uuid::nil());
        drop(pool);
        drop(store);
        c.update(key(1, 1, 1), ObjectClass::Sx, vec![1u8]).unwrap();
        assert_eq!(c.fetch(&key(1, 1, 1)).unwrap().as_ref(), &[1]);
    }

    #[test]
    fn fetch_update_semantics() {
        let (_s, pool) = pool(4);
        let c = pool.open_container(Uuid::nil());
        let k = key(1, 2, 3);
        assert!(matches!(c.fetch(&k), Err(Error::NotFound(_))));
        c.update(k, ObjectClass::Sx, vec![1u8, 2]).unwrap();
        assert_eq!(c.fetch(&k).unwrap().as_ref(), &[1, 2]);
        c.update(k, ObjectClass::Sx, vec![9u8]).unwrap();
        assert_eq!(c.fetch(&k).unwrap().as_ref(), &[9]);
    }

    #[test]
    fn akey_does_not_move_value() {
        for n in [1, 3, 8, 13] {
            for oid in 0..50u128 {
                let a = placement(&key(oid, 7, 0), ObjectClass::Sx, n);
                let b = placement(&key(oid, 7, 12345), ObjectClass::Sx, n);
                assert_eq!(a, b);
                if n == 1 {
                    assert_eq!(a, vec![0]);
                }
            }
        }
    }

    #[test]
    fn placement_is_balanced() {
        // 1000 distinct (oid, dkey) pairs over 8 targets; 125 per target on average.
        let mut counts = [0usize; 8];
        for i in 0..1000u64 {
            let k = key(1u128 << 64 | (i / 10) as u128, i % 10, 0);
            counts[placement(&k, ObjectClass::Sx, 8)[0]] += 1;
        }
        let max = *counts.iter().max().unwrap();
        assert!(max <= 250, "{counts:?}");
    }

    #[test]
    fn replica_placement() {
        let k = key(77, 1, 0);
        let t = placement(&k, ObjectClass::RpXsf { replicas: 3 }, 8);
        assert_eq!(t.len(), 3);
        assert_eq!(t.iter().collect::<HashSet<_>>().len(), 3);
        assert_eq!(t[0], placement(&k, ObjectClass::Sx, 8)[0]);
    }

    #[test]
    fn placement_hash_is_pinned() {
        // FNV-1a over 16 oid bytes then 8 dkey bytes, all zero.
        assert_eq!(placement_hash(Oid(0), 0), crate::wire::fnv1a64(&[0u8; 24]));
    }

    #[test]
    fn batch_cost_max_rule() {
        let cfg = PoolConfig {
            n_targets: 8,
            latency_secs: 1e-4,
            bandwidth_bytes_per_sec: 1e9,
            ..PoolConfig::default()
        };
        let store = ObjectStore::new();
        let pool = store.create_pool(cfg.clone()).unwrap();
        let c = pool.open_container(Uuid::nil());
        // one dkey per target: find 8 dkeys hitting distinct targets
        let oid = Oid(1 << 64);
        let mut spread = Vec::new();
        let mut seen = HashSet::new();
        for d in 0.. {
            let k = ObjectKey::new(oid, d, 0);
            if seen.insert(placement(&k, ObjectClass::Sx, 8)[0]) {
                spread.push(k);
            }
            if spread.len() == 8 {
                break;
            }
        }
        let same: Vec<_> = (0..8).map(|a| ObjectKey::new(oid, spread[0].dkey, a)).collect();
        for k in spread.iter().chain(&same) {
            c.update(*k, ObjectClass::Sx, vec![0u8; 1000]).unwrap();
        }
        let single = cfg.target_time(1, 1000);
        let (_, spread_cost) = c.read_v(&spread).unwrap();
        assert!((spread_cost.simulated_elapsed - single).abs() < 1e-12);
        assert_eq!(spread_cost.targets_used(), 8);
        let (_, same_cost) = c.read_v(&same).unwrap();
        assert!((same_cost.simulated_elapsed - 8.0 * single).abs() < 1e-12);
    }

    #[test]
    fn batch_errors() {
        let (_s, pool) = pool(4);
        let c = pool.open_container(Uuid::nil());
        c.update(key(1, 0, 0), ObjectClass::Sx, vec![1u8]).unwrap();
        let err = c.read_v(&[key(1, 0, 0), key(2, 0, 0)]).unwrap_err();
        match err {
            Error::Batch { index, key: k, source } => {
                assert_eq!(index, 1);
                assert_eq!(k, key(2, 0, 0));
                assert!(matches!(*source, Error::NotFound(_)));
            }
            other => panic!("{other}"),
        }
        assert!(c.read_v(&[key(1, 0, 0), key(1, 0, 0)]).is_err());
        let dup = UpdateDescriptor {
            key: key(3, 0, 0),
            class: ObjectClass::Sx,
            data: Bytes::from_static(b"a"),
        };
        assert!(c.write_v(&[dup.clone(), dup]).is_err());
        assert!(c.fetch(&key(3, 0, 0)).is_err());
    }

    #[test]
    fn replicas_hold_value() {
        let (_s, pool) = pool(8);
        let c = pool.open_container(Uuid::nil());
        let class = ObjectClass::RpXsf { replicas: 3 };
        let k = key(42, 5, 1);
        c.write_v(&[UpdateDescriptor {
            key: k,
            class,
            data: Bytes::from_static(b"payload"),
        }])
        .unwrap();
        assert_eq!(c.targets_holding(&k), {
            let mut t = placement(&k, class, 8);
            t.sort();
            t
        });
        let mut served = HashSet::new();
        for _ in 0..6 {
            let (v, cost) = c.fetch_with_cost(&k).unwrap();
            assert_eq!(v.as_ref(), b"payload");
            served.insert(cost.per_target_ops.iter().position(|&n| n == 1).unwrap());
        }
        assert_eq!(served.len(), 3);
        assert!(c.update(k, ObjectClass::Sx, vec![1u8]).is_err());
        assert!(c.update(key(9, 0, 0), ObjectClass::RpXsf { replicas: 9 }, vec![1u8]).is_err());
    }

    #[test]
    fn clock_accumulates() {
        let (_s, pool) = pool(2);
        let c = pool.open_container(Uuid::nil());
        c.update(key(1, 0, 0), ObjectClass::Sx, vec![0u8; 10]).unwrap();
        c.fetch(&key(1, 0, 0)).unwrap();
        let clock = pool.clock();
        assert_eq!(clock.bytes_updated, 10);
        assert_eq!(clock.bytes_fetched, 10);
        assert_eq!(clock.fetch_ops, 1);
        assert!(clock.simulated_seconds > 0.0);
    }

    #[test]
    fn object_class_parsing() {
        assert_eq!("sx".parse::<ObjectClass>().unwrap(), ObjectClass::Sx);
        assert_eq!("RP_XSF".parse::<ObjectClass>().unwrap(), ObjectClass::RpXsf { replicas: 3 });
        assert_eq!("rp-xsf:4".parse::<ObjectClass>().unwrap(), ObjectClass::RpXsf { replicas: 4 });
        assert!("rp-xsf:x".parse::<ObjectClass>().is_err());
        assert!("s3".parse::<ObjectClass>().is_err());
        let c = ObjectClass::RpXsf { replicas: 5 };
        assert_eq!(c.to_string().parse::<ObjectClass>().unwrap(), c);
    }

    proptest! {
        #[test]
        fn read_v_matches_sequential(
            values in prop::collection::btree_map((0u128..6, 0u64..6, 0u64..3), prop::collection::vec(any::<u8>(), 1..64), 1..30),
            n_targets in 1usize..9,
        ) {
            let (_s, pool) = pool(n_targets);
            let c = pool.open_container(Uuid::nil());
            let updates: Vec<_> = values.iter().map(|(&(o, d, a), v)| UpdateDescriptor {
                key: key(o, d, a), class: ObjectClass::Sx, data: Bytes::from(v.clone()),
            }).collect();
            c.write_v(&updates).unwrap();
            let keys: Vec<_> = updates.iter().map(|u| u.key).collect();
            let (batched, cost) = c.read_v(&keys).unwrap();
            let mut sequential_elapsed = 0.0;
            for (k, b) in keys.iter().zip(&batched) {
                let (v, single) = c.fetch_with_cost(k).unwrap();
                prop_assert_eq!(&v, b);
                sequential_elapsed += single.simulated_elapsed;
            }
            prop_assert!(cost.simulated_elapsed <= sequential_elapsed + 1e-12);
            // adding a descriptor never decreases elapsed
            for n in 1..keys.len() {
                let smaller = c.estimate_read_v(&keys[..n]).unwrap().simulated_elapsed;
                let larger = c.estimate_read_v(&keys[..n + 1]).unwrap().simulated_elapsed;
                prop_assert!(larger >= smaller);
            }
        }
    }
}
