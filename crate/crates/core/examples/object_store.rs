//! The simulated object store: placement, replication and the cost of
//! single versus vector reads.

use coltuple::objstore::{placement, ObjectClass, ObjectKey, ObjectStore, Oid, PoolConfig};

fn main() -> coltuple::Result<()> {
    let store = ObjectStore::new();
    let pool = store.create_pool(PoolConfig::default())?;
    let container = pool.open_container(uuid::Uuid::from_u128(1));
    let n = pool.config().n_targets;

    let keys: Vec<ObjectKey> = (0..16).map(|d| ObjectKey::new(Oid(1 << 64), d, 0)).collect();
    for k in &keys {
        container.update(*k, ObjectClass::Sx, vec![0u8; 64 * 1024])?;
    }
    let targets: Vec<usize> = keys.iter().map(|k| placement(k, ObjectClass::Sx, n)[0]).collect();
    println!("16 dkeys of one object land on targets {targets:?}");
    println!(
        "rp-xsf:3 copies of dkey 0 live on {:?}",
        placement(&keys[0], ObjectClass::RpXsf { replicas: 3 }, n)
    );

    let one_by_one: f64 = keys
        .iter()
        .map(|k| container.fetch_with_cost(k).map(|(_, c)| c.simulated_elapsed))
        .sum::<coltuple::Result<f64>>()?;
    let (_, batched) = container.read_v(&keys)?;
    println!("sequential fetches: {one_by_one:.6} s simulated");
    println!(
        "one vector read:    {:.6} s simulated over {} targets",
        batched.simulated_elapsed,
        batched.targets_used()
    );
    Ok(())
}
