//! Object-store backend.
//!
//! Datasets live in a container addressed by a `daos://` URI. Pages are
//! stored as values under keys chosen by a [`MappingStrategy`]; header,
//! footer and anchor use reserved OIDs with a constant dkey/akey pair. Page
//! and cluster OIDs have their high 64-bit word set to 1 so they never
//! collide with the metadata OIDs.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use bytes::Bytes;
use uuid::Uuid;

use crate::codec::Codec;
use crate::encoding::Page;
use crate::error::{Error, Result};
use crate::objstore::{ContainerHandle, CostReport, ObjectClass, ObjectKey, Oid, UpdateDescriptor};
use crate::schema::ColumnId;
use crate::storage::{
    check_columns, unpack_page, unpack_section, AnchorRecord, ClusterBuilder, ClusterDescriptor, ClusterPages,
    DatasetFooter, DatasetHeader, IoStats, IoStatsSnapshot, PageAddress, PageLocator, PagePosition, PageRecord,
    PageSink, PageSource, FORMAT_VERSION,
};

pub const SCHEME: &str = "daos://";

/// Base of the page/cluster OID namespace (high word 1).
pub const PAGE_BASE: u128 = 1 << 64;

pub const ANCHOR_KEY: ObjectKey = ObjectKey {
    oid: Oid(0),
    dkey: 0,
    akey: 0,
};
pub const HEADER_KEY: ObjectKey = ObjectKey {
    oid: Oid(1),
    dkey: 0,
    akey: 0,
};
pub const FOOTER_KEY: ObjectKey = ObjectKey {
    oid: Oid(2),
    dkey: 0,
    akey: 0,
};

/// `daos://<pool-uuid>:<rank>(_<rank>)*/<container-uuid>`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DaosUri {
    pub pool: Uuid,
    /// Service replica ranks. Kept for fidelity; the simulator ignores them.
    pub svc_ranks: Vec<u32>,
    pub container: Uuid,
}

fn parse_uuid(text: &str, what: &str) -> Result<Uuid> {
    let hyphens_ok = text.len() == 36
        && text
            .char_indices()
            .all(|(i, c)| if matches!(i, 8 | 13 | 18 | 23) { c == '-' } else { c.is_ascii_hexdigit() });
    if !hyphens_ok {
        return Err(Error::Uri(format!("malformed {what} uuid '{text}'")));
    }
    Uuid::parse_str(text).map_err(|e| Error::Uri(format!("malformed {what} uuid '{text}': {e}")))
}

impl FromStr for DaosUri {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let rest = text
            .strip_prefix(SCHEME)
            .ok_or_else(|| Error::Uri(format!("'{text}' does not start with {SCHEME}")))?;
        let (authority, container) = rest
            .split_once('/')
            .ok_or_else(|| Error::Uri("missing '/' before the container uuid".into()))?;
        let (pool, ranks) = authority
            .split_once(':')
            .ok_or_else(|| Error::Uri("missing ':' after the pool uuid".into()))?;
        let pool = parse_uuid(pool, "pool")?;
        let container = parse_uuid(container, "container")?;
        if ranks.is_empty() {
            return Err(Error::Uri("empty service rank list".into()));
        }
        let svc_ranks = ranks
            .split('_')
            .map(|r| {
                if r.is_empty() || !r.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(Error::Uri(format!("invalid rank '{r}'")));
                }
                r.parse::<u32>().map_err(|_| Error::Uri(format!("rank '{r}' out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DaosUri {
            pool,
            svc_ranks,
            container,
        })
    }
}

impl fmt::Display for DaosUri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ranks: Vec<String> = self.svc_ranks.iter().map(u32::to_string).collect();
        write!(f, "{SCHEME}{}:{}/{}", self.pool, ranks.join("_"), self.container)
    }
}

/// Rule assigning object keys to pages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MappingStrategy {
    /// A fresh sequential OID per committed page; dkey and akey constant.
    #[default]
    OidPerPage,
    /// OID from the cluster id; dkey is the page's sequence number in the cluster.
    OidPerCluster,
    /// OID from the cluster id, dkey from the column id, akey from the page's
    /// index within that column.
    AkeyPerPage,
}

impl MappingStrategy {
    pub const ALL: [MappingStrategy; 3] = [
        MappingStrategy::OidPerPage,
        MappingStrategy::OidPerCluster,
        MappingStrategy::AkeyPerPage,
    ];

    pub fn tag(self) -> u8 {
        match self {
            MappingStrategy::OidPerPage => 0,
            MappingStrategy::OidPerCluster => 1,
            MappingStrategy::AkeyPerPage => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(MappingStrategy::OidPerPage),
            1 => Ok(MappingStrategy::OidPerCluster),
            2 => Ok(MappingStrategy::AkeyPerPage),
            t => Err(Error::corrupt(format!("unknown mapping strategy {t}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MappingStrategy::OidPerPage => "page",
            MappingStrategy::OidPerCluster => "cluster",
            MappingStrategy::AkeyPerPage => "akey",
        }
    }
}

impl fmt::Display for MappingStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MappingStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "page" | "oid-per-page" => Ok(MappingStrategy::OidPerPage),
            "cluster" | "oid-per-cluster" => Ok(MappingStrategy::OidPerCluster),
            "akey" | "akey-per-page" => Ok(MappingStrategy::AkeyPerPage),
            other => Err(Error::Config(format!("unknown mapping '{other}'"))),
        }
    }
}

pub fn keys_for_page(strategy: MappingStrategy, pos: &PagePosition) -> ObjectKey {
    match strategy {
        MappingStrategy::OidPerPage => ObjectKey::new(Oid(PAGE_BASE + pos.global_seq as u128), 0, 0),
        MappingStrategy::OidPerCluster => {
            ObjectKey::new(Oid(PAGE_BASE + pos.cluster_id as u128), pos.seq_in_cluster as u64, 0)
        }
        MappingStrategy::AkeyPerPage => ObjectKey::new(
            Oid(PAGE_BASE + pos.cluster_id as u128),
            pos.column_id.0 as u64,
            pos.index_in_column as u64,
        ),
    }
}

pub const OBJECT_ANCHOR_LEN: usize = 64;

/// Anchor object: locates and describes the header and footer objects and
/// records the dataset-wide mapping and object class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ObjectAnchor {
    pub format_version: u32,
    pub strategy: MappingStrategy,
    pub object_class: ObjectClass,
    pub header_size_stored: u64,
    pub header_size_uncompressed: u64,
    pub footer_size_stored: u64,
    pub footer_size_uncompressed: u64,
    pub header_codec_id: u16,
    pub footer_codec_id: u16,
}

impl ObjectAnchor {
    pub fn to_bytes(&self) -> [u8; OBJECT_ANCHOR_LEN] {
        let mut out = [0u8; OBJECT_ANCHOR_LEN];
        out[0..4].copy_from_slice(&crate::file::MAGIC);
        out[4..8].copy_from_slice(&self.format_version.to_le_bytes());
        out[8] = self.strategy.tag();
        let (class_tag, replicas) = match self.object_class {
            ObjectClass::Sx => (0u8, 1u16),
            ObjectClass::RpXsf { replicas } => (1, replicas),
        };
        out[9] = class_tag;
        out[10..12].copy_from_slice(&replicas.to_le_bytes());
        out[16..24].copy_from_slice(&self.header_size_stored.to_le_bytes());
        out[24..32].copy_from_slice(&self.header_size_uncompressed.to_le_bytes());
        out[32..40].copy_from_slice(&self.footer_size_stored.to_le_bytes());
        out[40..48].copy_from_slice(&self.footer_size_uncompressed.to_le_bytes());
        out[48..50].copy_from_slice(&self.header_codec_id.to_le_bytes());
        out[50..52].copy_from_slice(&self.footer_codec_id.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != OBJECT_ANCHOR_LEN || bytes[0..4] != crate::file::MAGIC {
            return Err(Error::NotADataset("anchor object is malformed".into()));
        }
        let u64_at = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"));
        let u16_at = |at: usize| u16::from_le_bytes(bytes[at..at + 2].try_into().expect("2 bytes"));
        let format_version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
        if format_version != FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(format_version));
        }
        let object_class = match bytes[9] {
            0 => ObjectClass::Sx,
            1 => ObjectClass::RpXsf { replicas: u16_at(10) },
            t => return Err(Error::corrupt(format!("unknown object class tag {t}"))),
        };
        Ok(Self {
            format_version,
            strategy: MappingStrategy::from_tag(bytes[8])?,
            object_class,
            header_size_stored: u64_at(16),
            header_size_uncompressed: u64_at(24),
            footer_size_stored: u64_at(32),
            footer_size_uncompressed: u64_at(40),
            header_codec_id: u16_at(48),
            footer_codec_id: u16_at(50),
        })
    }

    pub fn record(&self) -> AnchorRecord {
        AnchorRecord {
            format_version: self.format_version,
            header_size_stored: self.header_size_stored,
            header_size_uncompressed: self.header_size_uncompressed,
            footer_size_stored: self.footer_size_stored,
            footer_size_uncompressed: self.footer_size_uncompressed,
            header_codec_id: self.header_codec_id,
            footer_codec_id: self.footer_codec_id,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DaosSinkOptions {
    pub codec: Codec,
    pub strategy: MappingStrategy,
    pub object_class: ObjectClass,
    /// Buffer the pages of a cluster and write them with one vector write
    /// on `commit_cluster` instead of one synchronous update per page.
    pub batched_writes: bool,
}

pub struct DaosSink {
    container: ContainerHandle,
    options: DaosSinkOptions,
    clusters: ClusterBuilder,
    pending: Vec<UpdateDescriptor>,
    closed: bool,
}

impl DaosSink {
    pub fn new(container: ContainerHandle, options: DaosSinkOptions) -> Result<Self> {
        options
            .object_class
            .validate(container.pool().config().n_targets)?;
        Ok(Self {
            container,
            options,
            clusters: ClusterBuilder::default(),
            pending: Vec::new(),
            closed: false,
        })
    }

    fn check_open(&self) -> Result<()> {
        if self.closed {
            Err(Error::SinkClosed)
        } else {
            Ok(())
        }
    }

    fn flush_pending(&mut self) -> Result<()> {
        if !self.pending.is_empty() {
            self.container.write_v(&self.pending)?;
            self.pending.clear();
        }
        Ok(())
    }

    fn put_metadata(&self, key: ObjectKey, data: Vec<u8>) -> Result<()> {
        self.container.update(key, ObjectClass::Sx, data).map(|_| ())
    }
}

impl PageSink for DaosSink {
    fn commit_page(&mut self, page: &Page) -> Result<PageLocator> {
        self.check_open()?;
        let pos = self.clusters.position(page)?;
        let key = keys_for_page(self.options.strategy, &pos);
        let stored = Bytes::from(self.options.codec.compress(&page.payload)?);
        let size = stored.len() as u64;
        if self.options.batched_writes {
            self.pending.push(UpdateDescriptor {
                key,
                class: self.options.object_class,
                data: stored,
            });
        } else {
            self.container.update(key, self.options.object_class, stored)?;
        }
        let locator = PageLocator {
            address: PageAddress::Object { key, size },
            uncompressed_size: page.payload.len() as u64,
            codec_id: self.options.codec.id(),
        };
        self.clusters.push(page, locator);
        Ok(locator)
    }

    fn commit_cluster(&mut self, n_entries: u64) -> Result<ClusterDescriptor> {
        self.check_open()?;
        let descriptor = self.clusters.finish(n_entries)?;
        self.flush_pending()?;
        Ok(descriptor)
    }

    fn commit_dataset(&mut self, header: &DatasetHeader, footer: &DatasetFooter) -> Result<AnchorRecord> {
        self.check_open()?;
        if self.clusters.pending_pages() > 0 {
            return Err(Error::InvalidState("pages committed after the last cluster".into()));
        }
        footer.validate(header)?;
        let codec = self.options.codec;
        let header_raw = header.serialize();
        let footer_raw = footer.serialize();
        let header_stored = codec.compress(&header_raw)?;
        let footer_stored = codec.compress(&footer_raw)?;
        let anchor = ObjectAnchor {
            format_version: FORMAT_VERSION,
            strategy: self.options.strategy,
            object_class: self.options.object_class,
            header_size_stored: header_stored.len() as u64,
            header_size_uncompressed: header_raw.len() as u64,
            footer_size_stored: footer_stored.len() as u64,
            footer_size_uncompressed: footer_raw.len() as u64,
            header_codec_id: codec.id(),
            footer_codec_id: codec.id(),
        };
        self.put_metadata(HEADER_KEY, header_stored)?;
        self.put_metadata(FOOTER_KEY, footer_stored)?;
        self.put_metadata(ANCHOR_KEY, anchor.to_bytes().to_vec())?;
        self.closed = true;
        Ok(anchor.record())
    }

    fn codec(&self) -> Codec {
        self.options.codec
    }
}

pub struct DaosSource {
    container: ContainerHandle,
    anchor: ObjectAnchor,
    strategy: MappingStrategy,
    header: DatasetHeader,
    footer: DatasetFooter,
    positions: HashMap<(ColumnId, u64), PagePosition>,
    stats: IoStats,
}

impl DaosSource {
    /// Attaches to the dataset in `container`, taking the mapping from its anchor.
    pub fn attach(container: ContainerHandle) -> Result<Self> {
        let source = Self::open(container, None)?;
        for cluster in &source.footer.clusters {
            for (col, record) in cluster.pages() {
                let expected = source.key_of(col, record)?;
                match record.locator.address {
                    PageAddress::Object { key, .. } if key == expected => {}
                    _ => {
                        return Err(Error::corrupt(format!(
                            "locator of column {col} page at element {} disagrees with the {} mapping",
                            record.first_element_index, source.strategy
                        )))
                    }
                }
            }
        }
        Ok(source)
    }

    /// Attaches while deriving page keys from `strategy` instead of the
    /// mapping recorded in the anchor. Locators are not cross-checked, so a
    /// wrong strategy yields not-found errors, or the bytes of whichever
    /// object the derived key happens to name.
    pub fn attach_with_mapping(container: ContainerHandle, strategy: MappingStrategy) -> Result<Self> {
        Self::open(container, Some(strategy))
    }

    fn open(container: ContainerHandle, forced: Option<MappingStrategy>) -> Result<Self> {
        let stats = IoStats::default();
        let fetch = |key: &ObjectKey| -> Result<Bytes> {
            let bytes = container.fetch(key).map_err(|e| match e {
                Error::NotFound(_) if *key == ANCHOR_KEY => {
                    Error::NotADataset(format!("container {} holds no anchor", container.uuid()))
                }
                other => other,
            })?;
            stats.metadata(bytes.len() as u64);
            Ok(bytes)
        };
        let anchor = ObjectAnchor::from_bytes(&fetch(&ANCHOR_KEY)?)?;
        let header_stored = fetch(&HEADER_KEY)?;
        let footer_stored = fetch(&FOOTER_KEY)?;
        if header_stored.len() as u64 != anchor.header_size_stored
            || footer_stored.len() as u64 != anchor.footer_size_stored
        {
            return Err(Error::corrupt("metadata object sizes disagree with the anchor"));
        }
        let header = DatasetHeader::deserialize(&unpack_section(
            anchor.header_codec_id,
            &header_stored,
            anchor.header_size_uncompressed,
        )?)?;
        let footer = DatasetFooter::deserialize(&unpack_section(
            anchor.footer_codec_id,
            &footer_stored,
            anchor.footer_size_uncompressed,
        )?)?;
        footer.validate(&header)?;

        let mut positions = HashMap::new();
        let mut global_base = 0u64;
        for cluster in &footer.clusters {
            for (col, pages) in &cluster.page_lists {
                for (i, p) in pages.iter().enumerate() {
                    positions.insert(
                        (*col, p.first_element_index),
                        PagePosition {
                            cluster_id: cluster.cluster_id,
                            seq_in_cluster: p.commit_seq,
                            global_seq: global_base + p.commit_seq as u64,
                            column_id: *col,
                            index_in_column: i as u32,
                        },
                    );
                }
            }
            global_base += cluster.n_pages() as u64;
        }
        Ok(Self {
            strategy: forced.unwrap_or(anchor.strategy),
            container,
            anchor,
            header,
            footer,
            positions,
            stats,
        })
    }

    pub fn anchor(&self) -> &ObjectAnchor {
        &self.anchor
    }

    pub fn strategy(&self) -> MappingStrategy {
        self.strategy
    }

    pub fn container(&self) -> &ContainerHandle {
        &self.container
    }

    fn key_of(&self, column: ColumnId, record: &PageRecord) -> Result<ObjectKey> {
        let pos = self
            .positions
            .get(&(column, record.first_element_index))
            .ok_or_else(|| Error::corrupt(format!("page of column {column} is not part of this dataset")))?;
        Ok(keys_for_page(self.strategy, pos))
    }

    /// Like [`PageSource::load_cluster`], also returning the simulated cost
    /// of the vector read.
    pub fn load_cluster_with_cost(
        &self,
        cluster_id: u32,
        columns: &BTreeSet<ColumnId>,
    ) -> Result<(ClusterPages, CostReport)> {
        let cluster = self.cluster(cluster_id)?;
        check_columns(&self.header, columns)?;
        let mut selected = Vec::new();
        for (col, pages) in &cluster.page_lists {
            if columns.contains(col) {
                for p in pages {
                    p.locator.validate()?;
                    selected.push((*col, p, self.key_of(*col, p)?));
                }
            }
        }
        let n_targets = self.container.pool().config().n_targets;
        if selected.is_empty() {
            return Ok((ClusterPages::new(), CostReport::zero(n_targets)));
        }
        let keys: Vec<ObjectKey> = selected.iter().map(|s| s.2).collect();
        let (payloads, cost) = self.container.read_v(&keys)?;
        self.stats.physical_read();
        let mut out = ClusterPages::new();
        for ((col, record, _), stored) in selected.into_iter().zip(payloads) {
            self.stats.page(stored.len() as u64);
            out.entry(col).or_default().push(unpack_page(col, record, &stored)?);
        }
        Ok((out, cost))
    }

    /// Simulated cost of fetching `columns` of a cluster page by page.
    pub fn sequential_cost(&self, cluster_id: u32, columns: &BTreeSet<ColumnId>) -> Result<f64> {
        let cluster = self.cluster(cluster_id)?;
        let mut total = 0.0;
        for (col, p) in cluster.pages().filter(|(c, _)| columns.contains(c)) {
            total += self
                .container
                .estimate_read_v(&[self.key_of(col, p)?])?
                .simulated_elapsed;
        }
        Ok(total)
    }
}

impl PageSource for DaosSource {
    fn header(&self) -> &DatasetHeader {
        &self.header
    }

    fn footer(&self) -> &DatasetFooter {
        &self.footer
    }

    fn populate_page(&self, column: ColumnId, record: &PageRecord) -> Result<Page> {
        record.locator.validate()?;
        let key = self.key_of(column, record)?;
        let stored = self.container.fetch(&key)?;
        self.stats.physical_read();
        self.stats.page(stored.len() as u64);
        unpack_page(column, record, &stored)
    }

    fn load_cluster(&self, cluster_id: u32, columns: &BTreeSet<ColumnId>) -> Result<ClusterPages> {
        self.load_cluster_with_cost(cluster_id, columns).map(|(pages, _)| pages)
    }

    fn stats(&self) -> IoStatsSnapshot {
        self.stats.snapshot()
    }

    fn anchor_record(&self) -> AnchorRecord {
        self.anchor.record()
    }

    fn simulated_seconds(&self) -> Option<f64> {
        Some(self.container.clock().simulated_seconds)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objstore::{ObjectStore, PoolConfig};

    const SAMPLE_URI: &str = "daos://4b614f30-f476-4831-84ba-a51197600020:1/f1b0a25a-7fbb-4fba-b7d2-9a9f4e10e8f4";

    #[test]
    fn parse_reference_uri() {
        let uri: DaosUri = SAMPLE_URI.parse().unwrap();
        assert_eq!(uri.pool, Uuid::parse_str("4b614f30-f476-4831-84ba-a51197600020").unwrap());
        assert_eq!(uri.svc_ranks, vec![1]);
        assert_eq!(uri.container, Uuid::parse_str("f1b0a25a-7fbb-4fba-b7d2-9a9f4e10e8f4").unwrap());
        assert_eq!(uri.to_string(), SAMPLE_URI);
    }

    #[test]
    fn parse_rank_list() {
        let text = "daos://4b614f30-f476-4831-84ba-a51197600020:0_2_5/f1b0a25a-7fbb-4fba-b7d2-9a9f4e10e8f4";
        let uri: DaosUri = text.parse().unwrap();
        assert_eq!(uri.svc_ranks, vec![0, 2, 5]);
        assert_eq!(uri.to_string(), text);
    }

    #[test]
    fn reject_bad_scheme() {
        assert!(matches!(
            "http://4b614f30-f476-4831-84ba-a51197600020:1/f1b0a25a-7fbb-4fba-b7d2-9a9f4e10e8f4".parse::<DaosUri>(),
            Err(Error::Uri(_))
        ));
    }

    fn pos(cluster_id: u32, seq_in_cluster: u32, global_seq: u64, column: u32, index_in_column: u32) -> PagePosition {
        PagePosition {
            cluster_id,
            seq_in_cluster,
            global_seq,
            column_id: ColumnId(column),
            index_in_column,
        }
    }

    #[test]
    fn mapping_rules() {
        let k = keys_for_page(MappingStrategy::OidPerCluster, &pos(7, 3, 99, 0, 0));
        assert_eq!(k, ObjectKey::new(Oid(PAGE_BASE + 7), 3, 0));
        let k = keys_for_page(MappingStrategy::OidPerPage, &pos(1, 0, 4, 2, 0));
        assert_eq!(k, ObjectKey::new(Oid(PAGE_BASE + 4), 0, 0));
        let k = keys_for_page(MappingStrategy::AkeyPerPage, &pos(2, 5, 17, 1, 0));
        assert_eq!(k, ObjectKey::new(Oid(PAGE_BASE + 2), 1, 0));
        for key in [ANCHOR_KEY, HEADER_KEY, FOOTER_KEY] {
            assert_eq!(key.oid.hi(), 0);
        }
        assert_eq!(k.oid.hi(), 1);
    }

    #[test]
    fn anchor_roundtrip() {
        let a = ObjectAnchor {
            format_version: FORMAT_VERSION,
            strategy: MappingStrategy::AkeyPerPage,
            object_class: ObjectClass::RpXsf { replicas: 4 },
            header_size_stored: 10,
            header_size_uncompressed: 20,
            footer_size_stored: 30,
            footer_size_uncompressed: 40,
            header_codec_id: 1,
            footer_codec_id: 1,
        };
        assert_eq!(ObjectAnchor::from_bytes(&a.to_bytes()).unwrap(), a);
        assert!(ObjectAnchor::from_bytes(&[0u8; 64]).is_err());
    }

    #[test]
    fn attach_empty_container() {
        let store = ObjectStore::new();
        let c = store.create_pool(PoolConfig::default()).unwrap().open_container(Uuid::nil());
        assert!(matches!(DaosSource::attach(c), Err(Error::NotADataset(_))));
    }

    #[test]
    fn closed_sink_rejects_pages() {
        let store = ObjectStore::new();
        let c = store.create_pool(PoolConfig::default()).unwrap().open_container(Uuid::nil());
        let header = DatasetHeader::new("t", crate::schema::Schema::default().with("a", crate::schema::FieldType::Int32))
            .unwrap();
        let mut sink = DaosSink::new(c, DaosSinkOptions::default()).unwrap();
        sink.commit_dataset(&header, &DatasetFooter::new(vec![], &header)).unwrap();
        let page = Page {
            column_id: ColumnId(0),
            first_element_index: 0,
            n_elements: 1,
            payload: vec![0; 4],
        };
        assert!(matches!(sink.commit_page(&page), Err(Error::SinkClosed)));
        assert!(matches!(
            sink.commit_dataset(&header, &DatasetFooter::new(vec![], &header)),
            Err(Error::SinkClosed)
        ));
    }
}
