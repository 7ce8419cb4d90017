//! Backend selection from a dataset location string.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use crate::codec::Codec;
use crate::daos::{DaosSink, DaosSinkOptions, DaosSource, DaosUri, MappingStrategy, SCHEME};
use crate::error::{Error, Result};
use crate::file::{FileSink, FileSource};
use crate::objstore::{ContainerHandle, ObjectClass, ObjectStore, PoolConfig};
use crate::storage::{PageSink, PageSource};

/// Where a dataset lives: a POSIX file path or a `daos://` URI.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    File(PathBuf),
    Daos(DaosUri),
}

impl FromStr for Location {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.starts_with(SCHEME) {
            Ok(Location::Daos(s.parse()?))
        } else if let Some((scheme, _)) = s.split_once("://") {
            Err(Error::Uri(format!("unsupported scheme '{scheme}://'")))
        } else if s.is_empty() {
            Err(Error::Uri("empty location".into()))
        } else {
            Ok(Location::File(PathBuf::from(s)))
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::File(path) => write!(f, "{}", path.display()),
            Location::Daos(uri) => write!(f, "{uri}"),
        }
    }
}

impl Location {
    pub fn is_daos(&self) -> bool {
        matches!(self, Location::Daos(_))
    }

    /// Opens the container named by a `daos://` location. The pool must
    /// already exist in `store`; the container is created on first use.
    pub fn container(&self, store: &ObjectStore) -> Result<ContainerHandle> {
        match self {
            Location::Daos(uri) => Ok(store.connect_pool(uri.pool)?.open_container(uri.container)),
            Location::File(path) => Err(Error::Uri(format!("{} is not an object-store location", path.display()))),
        }
    }
}

/// Settings for a new dataset. The mapping, object class and batching only
/// apply to object-store locations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SinkOptions {
    pub codec: Codec,
    pub mapping: MappingStrategy,
    pub object_class: ObjectClass,
    pub batched_writes: bool,
}

pub fn create_sink(location: &Location, store: &ObjectStore, options: SinkOptions) -> Result<Box<dyn PageSink>> {
    match location {
        Location::File(path) => Ok(Box::new(FileSink::create(path, options.codec)?)),
        Location::Daos(_) => {
            let container = location.container(store)?;
            Ok(Box::new(DaosSink::new(
                container,
                DaosSinkOptions {
                    codec: options.codec,
                    strategy: options.mapping,
                    object_class: options.object_class,
                    batched_writes: options.batched_writes,
                },
            )?))
        }
    }
}

pub fn attach(location: &Location, store: &ObjectStore) -> Result<Arc<dyn PageSource>> {
    match location {
        Location::File(path) => Ok(Arc::new(FileSource::attach(path)?)),
        Location::Daos(_) => Ok(Arc::new(DaosSource::attach(location.container(store)?)?)),
    }
}

/// On-disk home for object-store containers between runs: each container
/// is snapshotted to `<root>/<pool uuid>/<container uuid>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoreDir {
    pub root: PathBuf,
}

impl StoreDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn container_dir(&self, uri: &DaosUri) -> PathBuf {
        self.root.join(uri.pool.to_string()).join(uri.container.to_string())
    }

    /// Creates the pool named by `uri` in `store` (with `config` geometry)
    /// and loads the container's snapshot if one exists.
    pub fn open(&self, store: &ObjectStore, uri: &DaosUri, config: &PoolConfig) -> Result<ContainerHandle> {
        if !config.uuid.is_nil() && config.uuid != uri.pool {
            return Err(Error::Config(format!(
                "pool config is for pool {}, location names {}",
                config.uuid, uri.pool
            )));
        }
        let pool = store.create_pool(PoolConfig {
            uuid: uri.pool,
            ..config.clone()
        })?;
        let container = pool.open_container(uri.container);
        let dir = self.container_dir(uri);
        if dir.exists() {
            container.restore(&dir)?;
        }
        Ok(container)
    }

    pub fn save(&self, uri: &DaosUri, container: &ContainerHandle) -> Result<()> {
        container.persist(&self.container_dir(uri))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dispatch_on_scheme() {
        assert_eq!(
            "/tmp/x.ntpl".parse::<Location>().unwrap(),
            Location::File("/tmp/x.ntpl".into())
        );
        let uri = "daos://4b614f30-f476-4831-84ba-a51197600020:1/f1b0a25a-7fbb-4fba-b7d2-9a9f4e10e8f4";
        let loc: Location = uri.parse().unwrap();
        assert!(loc.is_daos());
        assert_eq!(loc.to_string(), uri);
        assert!(matches!("s3://bucket/key".parse::<Location>(), Err(Error::Uri(_))));
        assert!(matches!("daos://nonsense".parse::<Location>(), Err(Error::Uri(_))));
    }

    #[test]
    fn unknown_pool() {
        let loc: Location = "daos://4b614f30-f476-4831-84ba-a51197600020:1/f1b0a25a-7fbb-4fba-b7d2-9a9f4e10e8f4"
            .parse()
            .unwrap();
        let store = ObjectStore::new();
        assert!(matches!(attach(&loc, &store), Err(Error::UnknownPool(_))));
        assert!(matches!(
            create_sink(&loc, &store, SinkOptions::default()),
            Err(Error::UnknownPool(_))
        ));
    }

    #[test]
    fn store_dir_roundtrip() {
        let tmp = tempfile::tempdir().unwrap();
        let dirs = StoreDir::new(tmp.path());
        let Location::Daos(uri) = "daos://4b614f30-f476-4831-84ba-a51197600020:1/f1b0a25a-7fbb-4fba-b7d2-9a9f4e10e8f4"
            .parse()
            .unwrap()
        else {
            unreachable!()
        };
        let key = crate::objstore::ObjectKey::default();
        let c = dirs.open(&ObjectStore::new(), &uri, &PoolConfig::default()).unwrap();
        c.update(key, ObjectClass::Sx, vec![7u8]).unwrap();
        dirs.save(&uri, &c).unwrap();
        let again = dirs.open(&ObjectStore::new(), &uri, &PoolConfig::default()).unwrap();
        assert_eq!(again.fetch(&key).unwrap().as_ref(), &[7u8]);
        let other_pool = PoolConfig {
            uuid: uuid::Uuid::from_u128(5),
            ..Default::default()
        };
        assert!(dirs.open(&ObjectStore::new(), &uri, &other_pool).is_err());
    }
}
