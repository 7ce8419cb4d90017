//! Backend-agnostic page storage contracts.
//!
//! A [`PageSink`] receives encoded pages one at a time, groups them into
//! clusters and finally persists the dataset header and footer. A
//! [`PageSource`] attaches to a persisted dataset and reads pages back, one at
//! a time or a whole cluster (column subset) at once.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicU64, Ordering};

use crate::codec::{self, Codec};
use crate::encoding::Page;
use crate::error::{Error, Result};
use crate::objstore::{ObjectKey, Oid};
use crate::schema::{ColumnDescriptor, ColumnId, ColumnRole, ElementType, FieldColumns, FieldDescriptor, FieldType, Schema, SchemaLayout};
use crate::wire::{self, fnv1a64};

pub const FORMAT_VERSION: u32 = 1;

/// Encoded size of one locator inside a footer.
pub const LOCATOR_RECORD_LEN: usize = 51;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PageAddress {
    File { offset: u64, size: u64 },
    Object { key: ObjectKey, size: u64 },
}

/// Where a stored page lives and how to turn it back into its payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PageLocator {
    pub address: PageAddress,
    pub uncompressed_size: u64,
    pub codec_id: u16,
}

impl PageLocator {
    pub fn stored_size(&self) -> u64 {
        match self.address {
            PageAddress::File { size, .. } | PageAddress::Object { size, .. } => size,
        }
    }

    pub fn validate(&self) -> Result<Codec> {
        if self.stored_size() == 0 || self.uncompressed_size == 0 {
            return Err(Error::corrupt("page locator with zero size"));
        }
        Codec::from_id(self.codec_id)
    }

    fn write(&self, w: &mut wire::Writer) {
        let (tag, size, a, b, c, d) = match self.address {
            PageAddress::File { offset, size } => (0u8, size, offset, 0, 0, 0),
            PageAddress::Object { key, size } => {
                (1u8, size, key.oid.hi(), key.oid.lo(), key.dkey, key.akey)
            }
        };
        w.u8(tag).u16(self.codec_id).u64(self.uncompressed_size).u64(size).u64(a).u64(b).u64(c).u64(d);
    }

    fn read(r: &mut wire::Reader<'_>) -> Result<Self> {
        let tag = r.u8()?;
        let codec_id = r.u16()?;
        let uncompressed_size = r.u64()?;
        let size = r.u64()?;
        let (a, b, c, d) = (r.u64()?, r.u64()?, r.u64()?, r.u64()?);
        let address = match tag {
            0 => PageAddress::File { offset: a, size },
            1 => PageAddress::Object {
                key: ObjectKey::new(Oid::from_parts(a, b), c, d),
                size,
            },
            t => return Err(Error::corrupt(format!("unknown locator tag {t}"))),
        };
        Ok(Self {
            address,
            uncompressed_size,
            codec_id,
        })
    }
}

/// A page entry in a cluster's page list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PageRecord {
    pub locator: PageLocator,
    pub first_element_index: u64,
    pub n_elements: u64,
    /// Position of the page in the commit order of its cluster.
    pub commit_seq: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterDescriptor {
    pub cluster_id: u32,
    pub first_entry: u64,
    pub n_entries: u64,
    pub page_lists: BTreeMap<ColumnId, Vec<PageRecord>>,
}

impl ClusterDescriptor {
    pub fn n_pages(&self) -> usize {
        self.page_lists.values().map(Vec::len).sum()
    }

    pub fn pages(&self) -> impl Iterator<Item = (ColumnId, &PageRecord)> {
        self.page_lists
            .iter()
            .flat_map(|(c, pages)| pages.iter().map(move |p| (*c, p)))
    }

    /// Element range `[start, end)` covered for `column`, if it has pages.
    pub fn element_span(&self, column: ColumnId) -> Option<(u64, u64)> {
        let pages = self.page_lists.get(&column)?;
        let first = pages.first()?;
        let last = pages.last()?;
        Some((first.first_element_index, last.first_element_index + last.n_elements))
    }

    /// Stored bytes of the pages of `columns`.
    pub fn stored_bytes(&self, columns: &BTreeSet<ColumnId>) -> u64 {
        self.pages()
            .filter(|(c, _)| columns.contains(c))
            .map(|(_, p)| p.locator.stored_size())
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetFooter {
    pub clusters: Vec<ClusterDescriptor>,
    pub n_entries: u64,
    pub schema_digest: u64,
}

impl DatasetFooter {
    pub fn new(clusters: Vec<ClusterDescriptor>, header: &DatasetHeader) -> Self {
        let n_entries = clusters.last().map(|c| c.first_entry + c.n_entries).unwrap_or(0);
        Self {
            clusters,
            n_entries,
            schema_digest: header.digest(),
        }
    }

    pub fn total_stored_bytes(&self) -> u64 {
        self.clusters
            .iter()
            .flat_map(|c| c.pages())
            .map(|(_, p)| p.locator.stored_size())
            .sum()
    }

    pub fn n_pages(&self) -> usize {
        self.clusters.iter().map(ClusterDescriptor::n_pages).sum()
    }

    pub fn serialize(&self) -> Vec<u8> {
        let mut w = wire::Writer::default();
        w.u64(self.n_entries).u64(self.schema_digest).u32(self.clusters.len() as u32);
        for c in &self.clusters {
            w.u32(c.cluster_id).u64(c.first_entry).u64(c.n_entries).u32(c.page_lists.len() as u32);
            for (col, pages) in &c.page_lists {
                w.u32(col.0).u32(pages.len() as u32);
                for p in pages {
                    w.u64(p.first_element_index).u64(p.n_elements).u32(p.commit_seq);
                    p.locator.write(&mut w);
                }
            }
        }
        w.buf
    }

    pub fn deserialize(bytes: &[u8]) -> Result<Self> {
        let mut r = wire::Reader::new(bytes, "footer");
        let n_entries = r.u64()?;
        let schema_digest = r.u64()?;
        let n_clusters = r.count(24)?;
        let mut clusters = Vec::with_capacity(n_clusters);
        for _ in 0..n_clusters {
            let cluster_id = r.u32()?;
            let first_entry = r.u64()?;
            let n = r.u64()?;
            let n_cols = r.count(8)?;
            let mut page_lists = BTreeMap::new();
            for _ in 0..n_cols {
                let col = ColumnId(r.u32()?);
                let n_pages = r.count(20 + LOCATOR_RECORD_LEN)?;
                let mut pages = Vec::with_capacity(n_pages);
                for _ in 0..n_pages {
                    let first_element_index = r.u64()?;
                    let n_elements = r.u64()?;
                    let commit_seq = r.u32()?;
                    let locator = PageLocator::read(&mut r)?;
                    pages.push(PageRecord {
                        locator,
                        first_element_index,
                        n_elements,
                        commit_seq,
                    });
                }
                if page_lists.insert(col, pages).is_some() {
                    return Err(Error::corrupt(format!("column {col} listed twice in cluster {cluster_id}")));
                }
            }
            clusters.push(ClusterDescriptor {
                cluster_id,
                first_entry,
                n_entries: n,
                page_lists,
            });
        }
        r.finish()?;
        Ok(Self {
            clusters,
            n_entries,
            schema_digest,
        })
    }

    /// Structural checks against the header: cluster partitioning, page
    /// contiguity per column, and entry coverage of non-nested columns.
    pub fn validate(&self, header: &DatasetHeader) -> Result<()> {
        let computed = header.digest();
        if computed != self.schema_digest {
            return Err(Error::DigestMismatch {
                computed,
                recorded: self.schema_digest,
            });
        }
        let n_columns = header.layout.columns().len() as u32;
        let entry_columns = header.entry_columns();
        let mut next_entry = 0u64;
        let mut next_element: BTreeMap<ColumnId, u64> = BTreeMap::new();
        for (i, c) in self.clusters.iter().enumerate() {
            if c.cluster_id as usize != i || c.first_entry != next_entry {
                return Err(Error::corrupt(format!("cluster {i} out of sequence")));
            }
            next_entry += c.n_entries;
            for (col, pages) in &c.page_lists {
                if col.0 >= n_columns {
                    return Err(Error::corrupt(format!("cluster {i} references unknown column {col}")));
                }
                let next = next_element.entry(*col).or_insert(0);
                for p in pages {
                    if p.first_element_index != *next || p.n_elements == 0 {
                        return Err(Error::corrupt(format!("column {col} pages not contiguous in cluster {i}")));
                    }
                    *next += p.n_elements;
                }
            }
            for col in &entry_columns {
                let span = c.element_span(*col).map(|(s, e)| e - s).unwrap_or(0);
                if span != c.n_entries {
                    return Err(Error::corrupt(format!(
                        "column {col} covers {span} elements in cluster {i} of {} entries",
                        c.n_entries
                    )));
                }
            }
        }
        if next_entry != self.n_entries {
            return Err(Error::corrupt("clusters do not cover all entries"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetHeader {
    pub version: u32,
    pub name: String,
    pub layout: SchemaLayout,
}

impl DatasetHeader {
    pub fn new(name: impl Into<String>, schema: Schema) -> Result<Self> {
        Ok(Self {
            version: FORMAT_VERSION,
            name: name.into(),
            layout: SchemaLayout::new(schema)?,
        })
    }

    pub fn schema(&self) -> &Schema {
        self.layout.schema()
    }

    pub fn columns(&self) -> &[ColumnDescriptor] {
        self.layout.columns()
    }

    /// Columns holding exactly one element per entry (not nested in a vector).
    pub fn entry_columns(&self) -> Vec<ColumnId> {
        fn walk(f: &FieldColumns, out: &mut Vec<ColumnId>) {
            match f {
                FieldColumns::Leaf(id) => out.push(*id),
                FieldColumns::Vector { index, .. } => out.push(*index),
                FieldColumns::Record(children) => children.iter().for_each(|c| walk(c, out)),
            }
        }
        let mut out = Vec::new();
        self.layout.field_columns().iter().for_each(|f| walk(f, &mut out));
        out
    }

    pub fn digest(&self) -> u64 {
        fnv1a64(&self.serialize())
    }

    pub fn serialize(&self) -> Vec<u8> {
        let mut w = wire::Writer::default();
        w.u32(self.version).str(&self.name);
        write_fields(&mut w, &self.schema().fields);
        w.u32(self.columns().len() as u32);
        for c in self.columns() {
            w.u32(c.id.0)
                .u8(match c.role {
                    ColumnRole::Value => 0,
                    ColumnRole::Index => 1,
                })
                .u8(c.element_type.tag())
                .str(&c.source_field);
        }
        w.buf
    }

    pub fn deserialize(bytes: &[u8]) -> Result<Self> {
        let mut r = wire::Reader::new(bytes, "header");
        let version = r.u32()?;
        if version != FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let name = r.str()?;
        let fields = read_fields(&mut r, 0)?;
        let n_cols = r.count(10)?;
        let mut columns = Vec::with_capacity(n_cols);
        for _ in 0..n_cols {
            let id = ColumnId(r.u32()?);
            let role = match r.u8()? {
                0 => ColumnRole::Value,
                1 => ColumnRole::Index,
                t => return Err(Error::corrupt(format!("unknown column role {t}"))),
            };
            let tag = r.u8()?;
            let element_type =
                ElementType::from_tag(tag).ok_or_else(|| Error::corrupt(format!("unknown element type {tag}")))?;
            let source_field = r.str()?;
            columns.push(ColumnDescriptor {
                id,
                role,
                element_type,
                source_field,
            });
        }
        r.finish()?;
        let layout = SchemaLayout::new(Schema { fields }).map_err(|e| Error::corrupt(format!("header schema: {e}")))?;
        if layout.columns() != columns.as_slice() {
            return Err(Error::corrupt("header column table does not match schema"));
        }
        Ok(Self { version, name, layout })
    }
}

const TAG_VECTOR: u8 = 6;
const TAG_RECORD: u8 = 7;
const MAX_NESTING: usize = 64;

fn type_tag(ty: &FieldType) -> u8 {
    match ty {
        FieldType::Int32 => 1,
        FieldType::Int64 => 2,
        FieldType::Float32 => 3,
        FieldType::Float64 => 4,
        FieldType::Bool => 5,
        FieldType::Vector(_) => TAG_VECTOR,
        FieldType::Record(_) => TAG_RECORD,
    }
}

fn write_fields(w: &mut wire::Writer, fields: &[FieldDescriptor]) {
    w.u32(fields.len() as u32);
    for f in fields {
        w.u16(f.name.len() as u16).bytes(f.name.as_bytes());
        write_type(w, &f.ty);
    }
}

fn write_type(w: &mut wire::Writer, ty: &FieldType) {
    w.u8(type_tag(ty));
    match ty {
        FieldType::Vector(inner) => write_type(w, inner),
        FieldType::Record(children) => write_fields(w, children),
        _ => {}
    }
}

fn read_fields(r: &mut wire::Reader<'_>, depth: usize) -> Result<Vec<FieldDescriptor>> {
    let n = r.count(3)?;
    (0..n)
        .map(|_| {
            let len = r.u16()? as usize;
            let name = String::from_utf8(r.take(len)?.to_vec()).map_err(|_| Error::corrupt("field name not UTF-8"))?;
            let ty = read_type(r, depth)?;
            Ok(FieldDescriptor { name, ty })
        })
        .collect()
}

fn read_type(r: &mut wire::Reader<'_>, depth: usize) -> Result<FieldType> {
    if depth > MAX_NESTING {
        return Err(Error::corrupt("schema nesting too deep"));
    }
    Ok(match r.u8()? {
        1 => FieldType::Int32,
        2 => FieldType::Int64,
        3 => FieldType::Float32,
        4 => FieldType::Float64,
        5 => FieldType::Bool,
        TAG_VECTOR => FieldType::Vector(Box::new(read_type(r, depth + 1)?)),
        TAG_RECORD => FieldType::Record(read_fields(r, depth + 1)?),
        t => return Err(Error::corrupt(format!("unknown field type tag {t}"))),
    })
}

/// Page lists accumulated for the cluster currently being written.
#[derive(Debug, Default)]
pub(crate) struct ClusterBuilder {
    pages: BTreeMap<ColumnId, Vec<PageRecord>>,
    next_cluster_id: u32,
    next_first_entry: u64,
    next_element: BTreeMap<ColumnId, u64>,
    commit_seq: u32,
    pub global_pages: u64,
}

/// Coordinates of a page within the dataset being written or read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PagePosition {
    pub cluster_id: u32,
    pub seq_in_cluster: u32,
    pub global_seq: u64,
    pub column_id: ColumnId,
    pub index_in_column: u32,
}

impl ClusterBuilder {
    /// Checks that `page` continues its column and returns its coordinates.
    pub fn position(&self, page: &Page) -> Result<PagePosition> {
        if page.n_elements == 0 {
            return Err(Error::InvalidState("cannot commit a page without elements".into()));
        }
        let expected = self.next_element.get(&page.column_id).copied().unwrap_or(0);
        if page.first_element_index != expected {
            return Err(Error::InvalidState(format!(
                "page for column {} starts at element {}, expected {expected}",
                page.column_id, page.first_element_index
            )));
        }
        Ok(PagePosition {
            cluster_id: self.next_cluster_id,
            seq_in_cluster: self.commit_seq,
            global_seq: self.global_pages,
            column_id: page.column_id,
            index_in_column: self.pages.get(&page.column_id).map_or(0, |v| v.len() as u32),
        })
    }

    pub fn push(&mut self, page: &Page, locator: PageLocator) {
        self.pages.entry(page.column_id).or_default().push(PageRecord {
            locator,
            first_element_index: page.first_element_index,
            n_elements: page.n_elements,
            commit_seq: self.commit_seq,
        });
        self.next_element
            .insert(page.column_id, page.first_element_index + page.n_elements);
        self.commit_seq += 1;
        self.global_pages += 1;
    }

    pub fn pending_pages(&self) -> usize {
        self.commit_seq as usize
    }

    pub fn finish(&mut self, n_entries: u64) -> Result<ClusterDescriptor> {
        if self.commit_seq == 0 {
            return Err(Error::InvalidState("commit_cluster without committed pages".into()));
        }
        let descriptor = ClusterDescriptor {
            cluster_id: self.next_cluster_id,
            first_entry: self.next_first_entry,
            n_entries,
            page_lists: std::mem::take(&mut self.pages),
        };
        self.next_cluster_id += 1;
        self.next_first_entry += n_entries;
        self.commit_seq = 0;
        Ok(descriptor)
    }
}

/// Opaque summary of what a sink wrote when finalising a dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnchorRecord {
    pub format_version: u32,
    pub header_size_stored: u64,
    pub header_size_uncompressed: u64,
    pub footer_size_stored: u64,
    pub footer_size_uncompressed: u64,
    pub header_codec_id: u16,
    pub footer_codec_id: u16,
}

pub trait PageSink {
    /// Compresses and stores one page of the current cluster.
    fn commit_page(&mut self, page: &Page) -> Result<PageLocator>;

    /// Closes the current cluster, which must contain at least one page.
    fn commit_cluster(&mut self, n_entries: u64) -> Result<ClusterDescriptor>;

    /// Persists header and footer, then the anchor. The sink is closed afterwards.
    fn commit_dataset(&mut self, header: &DatasetHeader, footer: &DatasetFooter) -> Result<AnchorRecord>;

    fn codec(&self) -> Codec;
}

/// Pages of one cluster, keyed by column, each list in element order.
pub type ClusterPages = BTreeMap<ColumnId, Vec<Page>>;

pub trait PageSource: Send + Sync {
    fn header(&self) -> &DatasetHeader;

    fn footer(&self) -> &DatasetFooter;

    /// Fetches and decompresses a single page of `column`.
    fn populate_page(&self, column: ColumnId, record: &PageRecord) -> Result<Page>;

    /// Fetches all pages of `columns` in one cluster. Equivalent to calling
    /// [`PageSource::populate_page`] for each of them.
    fn load_cluster(&self, cluster_id: u32, columns: &BTreeSet<ColumnId>) -> Result<ClusterPages>;

    fn stats(&self) -> IoStatsSnapshot;

    /// Sizes and codecs recorded in the dataset's anchor.
    fn anchor_record(&self) -> AnchorRecord;

    /// Simulated seconds spent in the backend so far, for backends with a cost model.
    fn simulated_seconds(&self) -> Option<f64> {
        None
    }

    fn cluster(&self, cluster_id: u32) -> Result<&ClusterDescriptor> {
        self.footer()
            .clusters
            .get(cluster_id as usize)
            .ok_or(Error::OutOfRange {
                index: cluster_id as u64,
                len: self.footer().clusters.len() as u64,
            })
    }
}

/// Reference implementation of `load_cluster` as a loop of single-page reads.
pub fn load_cluster_by_pages<S: PageSource + ?Sized>(
    source: &S,
    cluster_id: u32,
    columns: &BTreeSet<ColumnId>,
) -> Result<ClusterPages> {
    let cluster = source.cluster(cluster_id)?;
    check_columns(source.header(), columns)?;
    let mut out = ClusterPages::new();
    for col in columns {
        let pages = match cluster.page_lists.get(col) {
            Some(pages) => pages,
            None => continue,
        };
        let loaded = pages
            .iter()
            .map(|p| source.populate_page(*col, p))
            .collect::<Result<Vec<_>>>()?;
        out.insert(*col, loaded);
    }
    Ok(out)
}

pub(crate) fn check_columns(header: &DatasetHeader, columns: &BTreeSet<ColumnId>) -> Result<()> {
    let n = header.columns().len() as u32;
    match columns.iter().find(|c| c.0 >= n) {
        Some(c) => Err(Error::OutOfRange {
            index: c.0 as u64,
            len: n as u64,
        }),
        None => Ok(()),
    }
}

/// Turns stored page bytes into a [`Page`].
pub(crate) fn unpack_page(column: ColumnId, record: &PageRecord, stored: &[u8]) -> Result<Page> {
    let codec = record.locator.validate()?;
    if stored.len() as u64 != record.locator.stored_size() {
        return Err(Error::corrupt(format!(
            "page of column {column}: read {} bytes, locator says {}",
            stored.len(),
            record.locator.stored_size()
        )));
    }
    let payload = codec.decompress(stored, record.locator.uncompressed_size as usize)?;
    Ok(Page {
        column_id: column,
        first_element_index: record.first_element_index,
        n_elements: record.n_elements,
        payload,
    })
}

/// Decompresses a header or footer section.
pub(crate) fn unpack_section(codec_id: u16, stored: &[u8], uncompressed: u64) -> Result<Vec<u8>> {
    codec::decompress(codec_id, stored, uncompressed as usize)
}

/// Fetch accounting shared by all sources.
#[derive(Debug, Default)]
pub struct IoStats {
    page_bytes: AtomicU64,
    pages: AtomicU64,
    physical_reads: AtomicU64,
    metadata_bytes: AtomicU64,
}

impl IoStats {
    pub(crate) fn page(&self, stored_bytes: u64) {
        self.page_bytes.fetch_add(stored_bytes, Ordering::Relaxed);
        self.pages.fetch_add(1, Ordering::Relaxed);
    }

    pub(crate) fn physical_read(&self) {
        self.physical_reads.fetch_add(1, Ordering::Relaxed);
    }

    pub(crate) fn metadata(&self, bytes: u64) {
        self.metadata_bytes.fetch_add(bytes, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> IoStatsSnapshot {
        IoStatsSnapshot {
            page_bytes: self.page_bytes.load(Ordering::Relaxed),
            pages: self.pages.load(Ordering::Relaxed),
            physical_reads: self.physical_reads.load(Ordering::Relaxed),
            metadata_bytes: self.metadata_bytes.load(Ordering::Relaxed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IoStatsSnapshot {
    /// Stored (possibly compressed) page bytes fetched.
    pub page_bytes: u64,
    pub pages: u64,
    /// Backend read operations issued (file reads or store operations).
    pub physical_reads: u64,
    pub metadata_bytes: u64,
}

impl IoStatsSnapshot {
    pub fn since(&self, earlier: &IoStatsSnapshot) -> IoStatsSnapshot {
        IoStatsSnapshot {
            page_bytes: self.page_bytes - earlier.page_bytes,
            pages: self.pages - earlier.pages,
            physical_reads: self.physical_reads - earlier.physical_reads,
            metadata_bytes: self.metadata_bytes - earlier.metadata_bytes,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::FieldType;

    fn header() -> DatasetHeader {
        let particle = FieldType::record([
            FieldDescriptor::new("fE", FieldType::Float32),
            FieldDescriptor::new("fIds", FieldType::vector(FieldType::Int32)),
        ]);
        DatasetHeader::new(
            "Events",
            Schema::default()
                .with("fId", FieldType::Int32)
                .with("fPtcls", FieldType::vector(particle)),
        )
        .unwrap()
    }

    fn page(col: u32, first: u64, n: u64) -> Page {
        Page {
            column_id: ColumnId(col),
            first_element_index: first,
            n_elements: n,
            payload: vec![0; n as usize * 4],
        }
    }

    fn locator(offset: u64, size: u64) -> PageLocator {
        PageLocator {
            address: PageAddress::File { offset, size },
            uncompressed_size: size,
            codec_id: 0,
        }
    }

    #[test]
    fn header_roundtrip_and_digest() {
        let h = header();
        let bytes = h.serialize();
        let back = DatasetHeader::deserialize(&bytes).unwrap();
        assert_eq!(back, h);
        assert_eq!(back.digest(), h.digest());
        assert_eq!(h.entry_columns(), vec![ColumnId(0), ColumnId(1)]);
    }

    #[test]
    fn header_rejects_bad_version_and_truncation() {
        let mut bytes = header().serialize();
        assert!(DatasetHeader::deserialize(&bytes[..bytes.len() - 1]).is_err());
        bytes[0] = 9;
        assert!(matches!(DatasetHeader::deserialize(&bytes), Err(Error::UnsupportedVersion(9))));
    }

    #[test]
    fn builder_bookkeeping() {
        let mut b = ClusterBuilder::default();
        assert!(b.finish(10).is_err());
        let mut offset = 64;
        for col in 0..4 {
            for half in 0..2 {
                let p = page(col, half * 5, 5);
                let pos = b.position(&p).unwrap();
                assert_eq!(pos.index_in_column, half as u32);
                b.push(&p, locator(offset, 20));
                offset += 20;
            }
        }
        let c0 = b.finish(20_000).unwrap();
        assert_eq!(c0.n_pages(), 8);
        assert_eq!(c0.n_entries, 20_000);
        assert_eq!(c0.cluster_id, 0);
        b.push(&page(0, 10, 1), locator(offset, 4));
        let c1 = b.finish(1).unwrap();
        assert_eq!(c1.first_entry, 20_000);
        assert_eq!(c1.cluster_id, 1);
    }

    #[test]
    fn builder_rejects_gaps() {
        let b = ClusterBuilder::default();
        assert!(b.position(&page(0, 3, 1)).is_err());
        assert!(b.position(&page(0, 0, 0)).is_err());
    }

    #[test]
    fn footer_roundtrip_and_validation() {
        let h = header();
        let mut b = ClusterBuilder::default();
        // fId, fPtcls index: 2 entries; fE: 3 particles; fIds index: 3; fIds values: 1
        for (col, n) in [(0, 2), (1, 2), (2, 3), (3, 3), (4, 1)] {
            let p = page(col, 0, n);
            b.push(&p, locator(64, n * 4));
        }
        let footer = DatasetFooter::new(vec![b.finish(2).unwrap()], &h);
        let back = DatasetFooter::deserialize(&footer.serialize()).unwrap();
        assert_eq!(back, footer);
        back.validate(&h).unwrap();

        let mut wrong = footer.clone();
        wrong.schema_digest ^= 1;
        assert!(matches!(wrong.validate(&h), Err(Error::DigestMismatch { .. })));

        let mut short = footer.clone();
        short.clusters[0].n_entries = 3;
        short.n_entries = 3;
        assert!(short.validate(&h).is_err());

        let bytes = footer.serialize();
        assert!(DatasetFooter::deserialize(&bytes[..bytes.len() - 3]).is_err());
    }

    #[test]
    fn empty_footer() {
        let h = header();
        let footer = DatasetFooter::new(vec![], &h);
        assert_eq!(footer.n_entries, 0);
        footer.validate(&h).unwrap();
    }

    #[test]
    fn locator_validation() {
        assert!(locator(0, 0).validate().is_err());
        let mut l = locator(0, 4);
        l.codec_id = 77;
        assert!(matches!(l.validate(), Err(Error::UnknownCodec(77))));
    }
}
