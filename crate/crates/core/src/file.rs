//! Single-file backend.
//!
//! Physical layout:
//!
//! ```text
//! [0, 64)        anchor (written last)
//! [64, ..)       pages in commit order
//! ..             header (possibly compressed)
//! ..             footer (possibly compressed)
//! ```
//!
//! The anchor records offsets and sizes of the header and footer, so a file
//! whose writer died before finalising has an all-zero anchor and is rejected
//! on attach.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{Seek, SeekFrom, Write};
use std::os::unix::fs::FileExt;
use std::path::{Path, PathBuf};

use crate::codec::Codec;
use crate::encoding::Page;
use crate::error::{Error, Result};
use crate::schema::ColumnId;
use crate::storage::{
    check_columns, unpack_page, unpack_section, AnchorRecord, ClusterBuilder, ClusterDescriptor, ClusterPages,
    DatasetFooter, DatasetHeader, IoStats, IoStatsSnapshot, PageAddress, PageLocator, PageRecord, PageSink, PageSource,
    FORMAT_VERSION,
};

pub const ANCHOR_LEN: u64 = 64;
pub const MAGIC: [u8; 4] = *b"CNTP";

/// Reads separated by less than this many bytes are merged into one.
pub const COALESCE_GAP: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FileAnchor {
    pub format_version: u32,
    pub header_offset: u64,
    pub header_size_stored: u64,
    pub header_size_uncompressed: u64,
    pub footer_offset: u64,
    pub footer_size_stored: u64,
    pub footer_size_uncompressed: u64,
    pub header_codec_id: u16,
    pub footer_codec_id: u16,
}

impl FileAnchor {
    pub fn to_bytes(&self) -> [u8; ANCHOR_LEN as usize] {
        let mut out = [0u8; ANCHOR_LEN as usize];
        out[0..4].copy_from_slice(&MAGIC);
        out[4..8].copy_from_slice(&self.format_version.to_le_bytes());
        out[8..16].copy_from_slice(&self.header_offset.to_le_bytes());
        out[16..24].copy_from_slice(&self.header_size_stored.to_le_bytes());
        out[24..32].copy_from_slice(&self.header_size_uncompressed.to_le_bytes());
        out[32..40].copy_from_slice(&self.footer_offset.to_le_bytes());
        out[40..48].copy_from_slice(&self.footer_size_stored.to_le_bytes());
        out[48..56].copy_from_slice(&self.footer_size_uncompressed.to_le_bytes());
        out[56..58].copy_from_slice(&self.header_codec_id.to_le_bytes());
        out[58..60].copy_from_slice(&self.footer_codec_id.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < ANCHOR_LEN as usize {
            return Err(Error::NotADataset("file shorter than the anchor".into()));
        }
        if bytes[0..4] != MAGIC {
            return Err(Error::NotADataset("missing anchor magic".into()));
        }
        let u64_at = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"));
        let u16_at = |at: usize| u16::from_le_bytes(bytes[at..at + 2].try_into().expect("2 bytes"));
        let format_version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
        if format_version != FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(format_version));
        }
        Ok(Self {
            format_version,
            header_offset: u64_at(8),
            header_size_stored: u64_at(16),
            header_size_uncompressed: u64_at(24),
            footer_offset: u64_at(32),
            footer_size_stored: u64_at(40),
            footer_size_uncompressed: u64_at(48),
            header_codec_id: u16_at(56),
            footer_codec_id: u16_at(58),
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

pub struct FileSink {
    file: Option<File>,
    path: PathBuf,
    offset: u64,
    codec: Codec,
    clusters: ClusterBuilder,
}

impl FileSink {
    /// Creates (or truncates) `path` and reserves the anchor.
    pub fn create(path: impl AsRef<Path>, codec: Codec) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut file = File::create(&path)?;
        file.write_all(&[0u8; ANCHOR_LEN as usize])?;
        Ok(Self {
            file: Some(file),
            path,
            offset: ANCHOR_LEN,
            codec,
            clusters: ClusterBuilder::default(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn file(&mut self) -> Result<&mut File> {
        self.file.as_mut().ok_or(Error::SinkClosed)
    }

    fn append(&mut self, bytes: &[u8]) -> Result<u64> {
        let at = self.offset;
        self.file()?.write_all(bytes)?;
        self.offset += bytes.len() as u64;
        Ok(at)
    }
}

impl PageSink for FileSink {
    fn commit_page(&mut self, page: &Page) -> Result<PageLocator> {
        self.file()?;
        self.clusters.position(page)?;
        let stored = self.codec.compress(&page.payload)?;
        let offset = self.append(&stored)?;
        let locator = PageLocator {
            address: PageAddress::File {
                offset,
                size: stored.len() as u64,
            },
            uncompressed_size: page.payload.len() as u64,
            codec_id: self.codec.id(),
        };
        self.clusters.push(page, locator);
        Ok(locator)
    }

    fn commit_cluster(&mut self, n_entries: u64) -> Result<ClusterDescriptor> {
        self.file()?;
        self.clusters.finish(n_entries)
    }

    fn commit_dataset(&mut self, header: &DatasetHeader, footer: &DatasetFooter) -> Result<AnchorRecord> {
        self.file()?;
        if self.clusters.pending_pages() > 0 {
            return Err(Error::InvalidState("pages committed after the last cluster".into()));
        }
        footer.validate(header)?;
        let header_raw = header.serialize();
        let footer_raw = footer.serialize();
        let header_stored = self.codec.compress(&header_raw)?;
        let footer_stored = self.codec.compress(&footer_raw)?;
        let header_offset = self.append(&header_stored)?;
        let footer_offset = self.append(&footer_stored)?;
        let anchor = FileAnchor {
            format_version: FORMAT_VERSION,
            header_offset,
            header_size_stored: header_stored.len() as u64,
            header_size_uncompressed: header_raw.len() as u64,
            footer_offset,
            footer_size_stored: footer_stored.len() as u64,
            footer_size_uncompressed: footer_raw.len() as u64,
            header_codec_id: self.codec.id(),
            footer_codec_id: self.codec.id(),
        };
        let mut file = self.file.take().ok_or(Error::SinkClosed)?;
        file.sync_data()?;
        file.seek(SeekFrom::Start(0))?;
        file.write_all(&anchor.to_bytes())?;
        file.sync_all()?;
        Ok(anchor.record())
    }

    fn codec(&self) -> Codec {
        self.codec
    }
}

pub struct FileSource {
    file: File,
    len: u64,
    anchor: FileAnchor,
    header: DatasetHeader,
    footer: DatasetFooter,
    stats: IoStats,
}

impl FileSource {
    pub fn attach(path: impl AsRef<Path>) -> Result<Self> {
        let file = File::open(path.as_ref())?;
        let len = file.metadata()?.len();
        if len < ANCHOR_LEN {
            return Err(Error::NotADataset(format!("{} bytes is too short for an anchor", len)));
        }
        let mut raw = [0u8; ANCHOR_LEN as usize];
        file.read_exact_at(&mut raw, 0)?;
        let anchor = FileAnchor::from_bytes(&raw)?;
        let stats = IoStats::default();
        let section = |offset: u64, size: u64, what: &str| -> Result<Vec<u8>> {
            if size == 0 || offset < ANCHOR_LEN || offset.checked_add(size).is_none_or(|end| end > len) {
                return Err(Error::corrupt(format!("{what} [{offset}, +{size}) outside file of {len} bytes")));
            }
            let mut buf = vec![0u8; size as usize];
            file.read_exact_at(&mut buf, offset)?;
            stats.metadata(size);
            Ok(buf)
        };
        let header_stored = section(anchor.header_offset, anchor.header_size_stored, "header")?;
        let footer_stored = section(anchor.footer_offset, anchor.footer_size_stored, "footer")?;
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
        Ok(Self {
            file,
            len,
            anchor,
            header,
            footer,
            stats,
        })
    }

    pub fn anchor(&self) -> &FileAnchor {
        &self.anchor
    }

    fn read_range(&self, offset: u64, size: u64) -> Result<Vec<u8>> {
        if offset.checked_add(size).is_none_or(|end| end > self.len) {
            return Err(Error::corrupt(format!(
                "read [{offset}, +{size}) beyond end of file ({} bytes)",
                self.len
            )));
        }
        let mut buf = vec![0u8; size as usize];
        self.file.read_exact_at(&mut buf, offset)?;
        self.stats.physical_read();
        Ok(buf)
    }
}

fn file_address(record: &PageRecord) -> Result<(u64, u64)> {
    match record.locator.address {
        PageAddress::File { offset, size } => Ok((offset, size)),
        PageAddress::Object { .. } => Err(Error::corrupt("object locator in a file dataset")),
    }
}

/// Groups `(offset, size)` ranges, sorted by offset, into runs that can be
/// served by one read. Returns `(run_offset, run_len, member indices)`.
pub(crate) fn coalesce(ranges: &[(u64, u64)], gap: u64) -> Vec<(u64, u64, Vec<usize>)> {
    let mut runs: Vec<(u64, u64, Vec<usize>)> = Vec::new();
    for (i, &(offset, size)) in ranges.iter().enumerate() {
        if let Some((start, len, members)) = runs.last_mut() {
            let end = *start + *len;
            if offset >= end && offset - end < gap {
                *len = offset + size - *start;
                members.push(i);
                continue;
            }
        }
        runs.push((offset, size, vec![i]));
    }
    runs
}

impl PageSource for FileSource {
    fn header(&self) -> &DatasetHeader {
        &self.header
    }

    fn footer(&self) -> &DatasetFooter {
        &self.footer
    }

    fn populate_page(&self, column: ColumnId, record: &PageRecord) -> Result<Page> {
        record.locator.validate()?;
        let (offset, size) = file_address(record)?;
        let stored = self.read_range(offset, size)?;
        self.stats.page(size);
        unpack_page(column, record, &stored)
    }

    fn load_cluster(&self, cluster_id: u32, columns: &BTreeSet<ColumnId>) -> Result<ClusterPages> {
        let cluster = self.cluster(cluster_id)?;
        check_columns(&self.header, columns)?;
        let mut wanted: Vec<(ColumnId, usize, &PageRecord, u64, u64)> = Vec::new();
        for (col, pages) in cluster.page_lists.range(..) {
            if !columns.contains(col) {
                continue;
            }
            for (i, p) in pages.iter().enumerate() {
                p.locator.validate()?;
                let (offset, size) = file_address(p)?;
                wanted.push((*col, i, p, offset, size));
            }
        }
        wanted.sort_by_key(|w| w.3);
        let ranges: Vec<(u64, u64)> = wanted.iter().map(|w| (w.3, w.4)).collect();

        let mut out = ClusterPages::new();
        for col in columns {
            if let Some(pages) = cluster.page_lists.get(col) {
                out.insert(*col, Vec::with_capacity(pages.len()));
            }
        }
        let mut slots: Vec<Option<Page>> = vec![None; wanted.len()];
        for (start, len, members) in coalesce(&ranges, COALESCE_GAP) {
            let buf = self.read_range(start, len)?;
            for m in members {
                let (col, _, record, offset, size) = wanted[m];
                let rel = (offset - start) as usize;
                self.stats.page(size);
                slots[m] = Some(unpack_page(col, record, &buf[rel..rel + size as usize])?);
            }
        }
        let mut ordered: Vec<(ColumnId, usize, Page)> = wanted
            .iter()
            .zip(slots)
            .map(|(w, p)| (w.0, w.1, p.expect("every slot filled")))
            .collect();
        ordered.sort_by_key(|(c, i, _)| (*c, *i));
        for (col, _, page) in ordered {
            out.get_mut(&col).expect("column slot").push(page);
        }
        Ok(out)
    }

    fn stats(&self) -> IoStatsSnapshot {
        self.stats.snapshot()
    }

    fn anchor_record(&self) -> AnchorRecord {
        self.anchor.record()
    }
}
