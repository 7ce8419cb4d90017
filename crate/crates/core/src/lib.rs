pub mod bench;
pub mod codec;
pub mod daos;
pub mod file;
pub mod inspect;
pub mod location;
pub mod ntuple;
pub mod encoding;
pub mod error;
pub mod objstore;
pub mod schema;
pub mod storage;
pub mod workload;
mod wire;

pub use error::{Error, Result};
pub use wire::fnv1a64;
