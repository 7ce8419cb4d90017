use crate::encoding::{encode_data, ColumnData, Page};
use crate::error::{Error, Result};
use crate::location::{create_sink, Location, SinkOptions};
use crate::objstore::ObjectStore;
use crate::schema::{ColumnId, FieldColumns, Schema};
use crate::storage::{AnchorRecord, ClusterDescriptor, DatasetFooter, DatasetHeader, PageSink};

use super::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WriterOptions {
    /// A column's buffer is committed as a page once it holds this many elements.
    pub elements_per_page: u64,
    /// A cluster is committed after this many entries.
    pub elements_per_cluster: u64,
}

impl Default for WriterOptions {
    fn default() -> Self {
        Self {
            elements_per_page: 10_000,
            elements_per_cluster: 100_000,
        }
    }
}

impl WriterOptions {
    pub fn new(elements_per_page: u64, elements_per_cluster: u64) -> Result<Self> {
        let options = Self {
            elements_per_page,
            elements_per_cluster,
        };
        options.validate()?;
        Ok(options)
    }

    pub fn validate(&self) -> Result<()> {
        if self.elements_per_page == 0 || self.elements_per_cluster == 0 {
            return Err(Error::Config("page and cluster sizes must be positive".into()));
        }
        if self.elements_per_cluster < self.elements_per_page {
            return Err(Error::Config(format!(
                "cluster size {} is smaller than page size {}",
                self.elements_per_cluster, self.elements_per_page
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WriteSummary {
    pub n_entries: u64,
    pub n_clusters: usize,
    pub n_pages: usize,
    /// Page bytes as stored, after compression.
    pub stored_bytes: u64,
    pub anchor: AnchorRecord,
}

struct ColumnBuffer {
    data: ColumnData,
    /// Element index of the first buffered element.
    first_element: u64,
    /// For index columns: end offset of the last appended collection.
    running_total: u64,
}

/// Appends entries and pages them out through a [`PageSink`].
///
/// Dropping a writer without calling [`NTupleWriter::close`] leaves the
/// dataset without an anchor, so it cannot be attached.
pub struct NTupleWriter {
    header: DatasetHeader,
    sink: Box<dyn PageSink>,
    options: WriterOptions,
    buffers: Vec<ColumnBuffer>,
    clusters: Vec<ClusterDescriptor>,
    entries_in_cluster: u64,
    n_entries: u64,
}

impl NTupleWriter {
    pub fn new(sink: Box<dyn PageSink>, name: &str, schema: Schema, options: WriterOptions) -> Result<Self> {
        options.validate()?;
        let header = DatasetHeader::new(name, schema)?;
        let buffers = header
            .columns()
            .iter()
            .map(|c| ColumnBuffer {
                data: ColumnData::empty(c.element_type),
                first_element: 0,
                running_total: 0,
            })
            .collect();
        Ok(Self {
            header,
            sink,
            options,
            buffers,
            clusters: Vec::new(),
            entries_in_cluster: 0,
            n_entries: 0,
        })
    }

    pub fn create(
        location: &Location,
        store: &ObjectStore,
        name: &str,
        schema: Schema,
        options: WriterOptions,
        sink_options: SinkOptions,
    ) -> Result<Self> {
        options.validate()?;
        Self::new(create_sink(location, store, sink_options)?, name, schema, options)
    }

    pub fn header(&self) -> &DatasetHeader {
        &self.header
    }

    pub fn n_entries(&self) -> u64 {
        self.n_entries
    }

    /// Appends one entry: one value per top-level field, in schema order.
    pub fn append(&mut self, entry: &[Value]) -> Result<()> {
        let fields = &self.header.schema().fields;
        if entry.len() != fields.len() {
            return Err(Error::schema(format!(
                "entry has {} values, schema has {} fields",
                entry.len(),
                fields.len()
            )));
        }
        for (value, field) in entry.iter().zip(fields) {
            value.check(&field.ty).map_err(|e| Error::schema(format!("field '{}': {e}", field.name)))?;
        }
        let layout = self.header.layout.field_columns();
        for (value, cols) in entry.iter().zip(layout) {
            push_value(&mut self.buffers, cols, value);
        }
        self.flush_full_pages()?;
        self.entries_in_cluster += 1;
        self.n_entries += 1;
        if self.entries_in_cluster == self.options.elements_per_cluster {
            self.commit_cluster()?;
        }
        Ok(())
    }

    fn flush_full_pages(&mut self) -> Result<()> {
        let per_page = self.options.elements_per_page as usize;
        for id in 0..self.buffers.len() {
            while self.buffers[id].data.len() >= per_page {
                self.flush_page(id, per_page)?;
            }
        }
        Ok(())
    }

    fn flush_page(&mut self, id: usize, n: usize) -> Result<()> {
        let buffer = &mut self.buffers[id];
        let data = buffer.data.drain_front(n);
        let page = Page {
            column_id: ColumnId(id as u32),
            first_element_index: buffer.first_element,
            n_elements: n as u64,
            payload: encode_data(&data),
        };
        buffer.first_element += n as u64;
        self.sink.commit_page(&page)?;
        Ok(())
    }

    fn commit_cluster(&mut self) -> Result<()> {
        for id in 0..self.buffers.len() {
            let n = self.buffers[id].data.len();
            if n > 0 {
                self.flush_page(id, n)?;
            }
        }
        let cluster = self.sink.commit_cluster(self.entries_in_cluster)?;
        self.clusters.push(cluster);
        self.entries_in_cluster = 0;
        Ok(())
    }

    /// Flushes partial pages and the open cluster, then commits the dataset.
    pub fn close(mut self) -> Result<WriteSummary> {
        if self.entries_in_cluster > 0 {
            self.commit_cluster()?;
        }
        let footer = DatasetFooter::new(std::mem::take(&mut self.clusters), &self.header);
        let anchor = self.sink.commit_dataset(&self.header, &footer)?;
        Ok(WriteSummary {
            n_entries: self.n_entries,
            n_clusters: footer.clusters.len(),
            n_pages: footer.n_pages(),
            stored_bytes: footer.total_stored_bytes(),
            anchor,
        })
    }
}

fn push_value(buffers: &mut [ColumnBuffer], cols: &FieldColumns, value: &Value) {
    match (cols, value) {
        (FieldColumns::Leaf(id), v) => v.push_scalar(&mut buffers[id.0 as usize].data),
        (FieldColumns::Vector { index, inner }, Value::Vector(items)) => {
            for item in items {
                push_value(buffers, inner, item);
            }
            let buffer = &mut buffers[index.0 as usize];
            buffer.running_total += items.len() as u64;
            let end = buffer.running_total;
            match &mut buffer.data {
                ColumnData::Index(v) => v.push(end),
                other => unreachable!("index column holds {}", other.element_type()),
            }
        }
        (FieldColumns::Record(members), Value::Record(values)) => {
            for (cols, v) in members.iter().zip(values) {
                push_value(buffers, cols, v);
            }
        }
        _ => unreachable!("value was checked against the schema"),
    }
}
