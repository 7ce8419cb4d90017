use std::collections::{BTreeMap, BTreeSet};
use std::marker::PhantomData;
use std::sync::Arc;

use crate::encoding::{decode_data, ColumnData};
use crate::error::{Error, Result};
use crate::location::{attach, Location};
use crate::objstore::ObjectStore;
use crate::schema::{ColumnId, FieldColumns};
use crate::storage::{DatasetHeader, PageRecord, PageSource};

use super::{Value, ViewType};

/// Reads entries of an attached dataset.
pub struct NTupleReader {
    source: Arc<dyn PageSource>,
    /// All page records of each column, in element order.
    pages: Vec<Arc<[PageRecord]>>,
}

impl NTupleReader {
    pub fn new(source: Arc<dyn PageSource>) -> Self {
        let mut pages: Vec<Vec<PageRecord>> = vec![Vec::new(); source.header().columns().len()];
        for cluster in &source.footer().clusters {
            for (col, list) in &cluster.page_lists {
                pages[col.0 as usize].extend_from_slice(list);
            }
        }
        Self {
            pages: pages.into_iter().map(Arc::from).collect(),
            source,
        }
    }

    pub fn open(location: &Location, store: &ObjectStore) -> Result<Self> {
        Ok(Self::new(attach(location, store)?))
    }

    pub fn source(&self) -> &Arc<dyn PageSource> {
        &self.source
    }

    pub fn header(&self) -> &DatasetHeader {
        self.source.header()
    }

    pub fn n_entries(&self) -> u64 {
        self.source.footer().n_entries
    }

    pub fn n_clusters(&self) -> usize {
        self.source.footer().clusters.len()
    }

    /// A lazily loading view of the field at `path` (dot-separated through records).
    pub fn get_view<T: ViewType>(&self, path: &str) -> Result<View<T>> {
        let (field, cols) = self
            .header()
            .layout
            .find(path)
            .ok_or_else(|| Error::UnknownField(path.to_string()))?;
        if !T::accepts(&field.ty) {
            return Err(Error::mismatch(T::type_name(), &field.ty));
        }
        Ok(View {
            reader: self.field_reader(cols),
            n_entries: self.n_entries(),
            _type: PhantomData,
        })
    }

    fn field_reader(&self, cols: &FieldColumns) -> FieldReader {
        match cols {
            FieldColumns::Leaf(id) => FieldReader::Leaf(self.cursor(*id)),
            FieldColumns::Vector { index, inner } => FieldReader::Vector {
                index: self.cursor(*index),
                inner: Box::new(self.field_reader(inner)),
            },
            FieldColumns::Record(members) => {
                FieldReader::Record(members.iter().map(|m| self.field_reader(m)).collect())
            }
        }
    }

    fn cursor(&self, column: ColumnId) -> ColumnCursor {
        ColumnCursor {
            source: Arc::clone(&self.source),
            column,
            element_type: self.header().columns()[column.0 as usize].element_type,
            pages: Arc::clone(&self.pages[column.0 as usize]),
            current: None,
            boundary: None,
            loads: 0,
        }
    }

    /// Reads entry `index` as one value per top-level field.
    pub fn read_entry(&self, index: u64) -> Result<Vec<Value>> {
        let mut views = self.entry_views()?;
        views.iter_mut().map(|v| v.at(index)).collect()
    }

    /// Untyped views of every top-level field, for row-wise scans.
    pub fn entry_views(&self) -> Result<Vec<View<Value>>> {
        self.header()
            .schema()
            .fields
            .iter()
            .map(|f| self.get_view::<Value>(&f.name))
            .collect()
    }

    /// Loads the listed leaf fields of one cluster with a single
    /// `load_cluster` call. Fields nested in vectors are not addressable here.
    pub fn load_columns(&self, cluster_id: u32, paths: &[&str]) -> Result<ClusterColumns> {
        let mut ids = Vec::with_capacity(paths.len());
        for path in paths {
            match self.header().layout.find(path) {
                Some((_, FieldColumns::Leaf(id))) => ids.push(*id),
                Some((field, _)) => return Err(Error::mismatch("scalar field", &field.ty)),
                None => return Err(Error::UnknownField(path.to_string())),
            }
        }
        let set: BTreeSet<ColumnId> = ids.iter().copied().collect();
        let cluster = self.source.cluster(cluster_id)?;
        let mut pages = self.source.load_cluster(cluster_id, &set)?;
        let mut columns = BTreeMap::new();
        for id in set {
            let element_type = self.header().columns()[id.0 as usize].element_type;
            let mut data = ColumnData::empty(element_type);
            for page in pages.remove(&id).unwrap_or_default() {
                data.extend(decode_data(element_type, &page.payload, page.n_elements)?)?;
            }
            if data.len() as u64 != cluster.n_entries {
                return Err(Error::corrupt(format!(
                    "column {id} has {} elements in cluster {cluster_id} of {} entries",
                    data.len(),
                    cluster.n_entries
                )));
            }
            columns.insert(id, data);
        }
        Ok(ClusterColumns {
            first_entry: cluster.first_entry,
            n_entries: cluster.n_entries,
            ids,
            columns,
        })
    }
}

/// Decoded scalar columns of one cluster, in the order they were requested.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterColumns {
    pub first_entry: u64,
    pub n_entries: u64,
    ids: Vec<ColumnId>,
    columns: BTreeMap<ColumnId, ColumnData>,
}

impl ClusterColumns {
    /// Column data of the `i`-th requested path.
    pub fn get(&self, i: usize) -> &ColumnData {
        &self.columns[&self.ids[i]]
    }
}

struct ColumnCursor {
    source: Arc<dyn PageSource>,
    column: ColumnId,
    element_type: crate::schema::ElementType,
    pages: Arc<[PageRecord]>,
    current: Option<(usize, ColumnData)>,
    /// Last element of the previously current index page, so reading the
    /// start offset of a page's first collection needs no reload.
    boundary: Option<(u64, u64)>,
    loads: u64,
}

impl ColumnCursor {
    /// Makes the page holding `element` current and returns its offset within it.
    fn seek(&mut self, element: u64) -> Result<(&ColumnData, usize)> {
        let hit = |i: usize, pages: &[PageRecord]| {
            let p = &pages[i];
            element >= p.first_element_index && element < p.first_element_index + p.n_elements
        };
        let slot = match &self.current {
            Some((i, _)) if hit(*i, &self.pages) => *i,
            _ => {
                let i = self
                    .pages
                    .partition_point(|p| p.first_element_index + p.n_elements <= element);
                if i == self.pages.len() || !hit(i, &self.pages) {
                    let len = self.pages.last().map_or(0, |p| p.first_element_index + p.n_elements);
                    return Err(Error::OutOfRange { index: element, len });
                }
                let record = self.pages[i];
                let page = self.source.populate_page(self.column, &record)?;
                let data = decode_data(self.element_type, &page.payload, page.n_elements)?;
                self.loads += 1;
                if let Some((old, ColumnData::Index(v))) = &self.current {
                    let p = &self.pages[*old];
                    if let Some(last) = v.last() {
                        self.boundary = Some((p.first_element_index + p.n_elements - 1, *last));
                    }
                }
                self.current = Some((i, data));
                i
            }
        };
        let (_, data) = self.current.as_ref().expect("page loaded");
        Ok((data, (element - self.pages[slot].first_element_index) as usize))
    }

    fn value(&mut self, element: u64) -> Result<Value> {
        let (data, offset) = self.seek(element)?;
        Ok(Value::from_column(data, offset))
    }

    fn offset(&mut self, element: u64) -> Result<u64> {
        if let Some((e, v)) = self.boundary {
            if e == element {
                return Ok(v);
            }
        }
        match self.seek(element)? {
            (ColumnData::Index(v), offset) => Ok(v[offset]),
            (other, _) => Err(Error::mismatch("index64", other.element_type())),
        }
    }
}

enum FieldReader {
    Leaf(ColumnCursor),
    Vector {
        index: ColumnCursor,
        inner: Box<FieldReader>,
    },
    Record(Vec<FieldReader>),
}

impl FieldReader {
    fn read(&mut self, element: u64) -> Result<Value> {
        match self {
            FieldReader::Leaf(cursor) => cursor.value(element),
            FieldReader::Vector { index, inner } => {
                let start = if element == 0 { 0 } else { index.offset(element - 1)? };
                let end = index.offset(element)?;
                if end < start {
                    return Err(Error::corrupt("index column is not monotonic"));
                }
                (start..end).map(|j| inner.read(j)).collect::<Result<_>>().map(Value::Vector)
            }
            FieldReader::Record(members) => members
                .iter_mut()
                .map(|m| m.read(element))
                .collect::<Result<_>>()
                .map(Value::Record),
        }
    }

    fn loads(&self) -> u64 {
        match self {
            FieldReader::Leaf(cursor) => cursor.loads,
            FieldReader::Vector { index, inner } => index.loads + inner.loads(),
            FieldReader::Record(members) => members.iter().map(FieldReader::loads).sum(),
        }
    }
}

/// Typed, lazily loading access to one field. Each column keeps its most
/// recently used page, so a sequential pass loads every page once.
pub struct View<T> {
    reader: FieldReader,
    n_entries: u64,
    _type: PhantomData<fn() -> T>,
}

impl<T: ViewType> View<T> {
    pub fn at(&mut self, entry: u64) -> Result<T> {
        if entry >= self.n_entries {
            return Err(Error::OutOfRange {
                index: entry,
                len: self.n_entries,
            });
        }
        self.reader.read(entry).map(T::from_value)
    }

    pub fn len(&self) -> u64 {
        self.n_entries
    }

    pub fn is_empty(&self) -> bool {
        self.n_entries == 0
    }

    /// Pages fetched by this view so far.
    pub fn page_loads(&self) -> u64 {
        self.reader.loads()
    }

    /// Iterates over all entries in order.
    pub fn iter(&mut self) -> impl Iterator<Item = Result<T>> + '_ {
        (0..self.n_entries).map(move |i| self.at(i))
    }
}
