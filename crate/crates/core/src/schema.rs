//! Nested record schemas and their flattening onto typed columns.
//!
//! A [`Schema`] is the top-level record of an n-tuple. Every leaf member
//! becomes one value column; every variable-length vector additionally gets
//! an index column holding end offsets into its inner columns. Records do not
//! produce columns of their own, their members are flattened with
//! dot-qualified names.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

/// Logical type of a field.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldType {
    Int32,
    Int64,
    Float32,
    Float64,
    Bool,
    Vector(Box<FieldType>),
    /// Named group of child fields. Flattened at column level.
    Record(Vec<FieldDescriptor>),
}

impl FieldType {
    pub fn vector(inner: FieldType) -> Self {
        FieldType::Vector(Box::new(inner))
    }

    pub fn record(children: impl IntoIterator<Item = FieldDescriptor>) -> Self {
        FieldType::Record(children.into_iter().collect())
    }

    pub fn is_scalar(&self) -> bool {
        !matches!(self, FieldType::Vector(_) | FieldType::Record(_))
    }
}

impl fmt::Display for FieldType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldType::Int32 => f.write_str("int32"),
            FieldType::Int64 => f.write_str("int64"),
            FieldType::Float32 => f.write_str("float32"),
            FieldType::Float64 => f.write_str("float64"),
            FieldType::Bool => f.write_str("bool"),
            FieldType::Vector(inner) => write!(f, "vector<{inner}>"),
            FieldType::Record(children) => {
                f.write_str("record{")?;
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}: {}", c.name, c.ty)?;
                }
                f.write_str("}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDescriptor {
    pub name: String,
    pub ty: FieldType,
}

impl FieldDescriptor {
    pub fn new(name: impl Into<String>, ty: FieldType) -> Self {
        Self {
            name: name.into(),
            ty,
        }
    }
}

/// The top-level record of a dataset.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Schema {
    pub fields: Vec<FieldDescriptor>,
}

impl Schema {
    pub fn new(fields: impl IntoIterator<Item = FieldDescriptor>) -> Self {
        Self {
            fields: fields.into_iter().collect(),
        }
    }

    pub fn with(mut self, name: impl Into<String>, ty: FieldType) -> Self {
        self.fields.push(FieldDescriptor::new(name, ty));
        self
    }

    /// Checks naming rules and qualified-name uniqueness.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        validate_fields(&self.fields, "", &mut seen)
    }
}

fn validate_fields(fields: &[FieldDescriptor], prefix: &str, seen: &mut HashSet<String>) -> Result<()> {
    for field in fields {
        if !is_valid_name(&field.name) {
            return Err(Error::schema(format!("invalid field name '{}'", field.name)));
        }
        let path = qualify(prefix, &field.name);
        if !seen.insert(path.clone()) {
            return Err(Error::schema(format!("duplicate field '{path}'")));
        }
        validate_type(&field.ty, &path, seen)?;
    }
    Ok(())
}

fn validate_type(ty: &FieldType, path: &str, seen: &mut HashSet<String>) -> Result<()> {
    match ty {
        FieldType::Vector(inner) => validate_type(inner, path, seen),
        FieldType::Record(children) => {
            if children.is_empty() {
                return Err(Error::schema(format!("record '{path}' has no members")));
            }
            validate_fields(children, path, seen)
        }
        _ => Ok(()),
    }
}

fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn qualify(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_string()
    } else {
        format!("{prefix}.{name}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColumnId(pub u32);

impl fmt::Display for ColumnId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColumnRole {
    Value,
    Index,
}

/// Physical element type stored in a column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementType {
    Int32,
    Int64,
    Float32,
    Float64,
    PackedBool,
    Index64,
}

impl ElementType {
    pub fn tag(self) -> u8 {
        match self {
            ElementType::Int32 => 1,
            ElementType::Int64 => 2,
            ElementType::Float32 => 3,
            ElementType::Float64 => 4,
            ElementType::PackedBool => 5,
            ElementType::Index64 => 6,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        Some(match tag {
            1 => ElementType::Int32,
            2 => ElementType::Int64,
            3 => ElementType::Float32,
            4 => ElementType::Float64,
            5 => ElementType::PackedBool,
            6 => ElementType::Index64,
            _ => return None,
        })
    }

    /// Encoded size of `n` elements.
    pub fn payload_len(self, n: u64) -> u64 {
        match self {
            ElementType::Int32 | ElementType::Float32 => n * 4,
            ElementType::Int64 | ElementType::Float64 | ElementType::Index64 => n * 8,
            ElementType::PackedBool => n.div_ceil(8),
        }
    }

    fn for_scalar(ty: &FieldType) -> Option<Self> {
        Some(match ty {
            FieldType::Int32 => ElementType::Int32,
            FieldType::Int64 => ElementType::Int64,
            FieldType::Float32 => ElementType::Float32,
            FieldType::Float64 => ElementType::Float64,
            FieldType::Bool => ElementType::PackedBool,
            _ => return None,
        })
    }
}

impl fmt::Display for ElementType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ElementType::Int32 => "Int32",
            ElementType::Int64 => "Int64",
            ElementType::Float32 => "Float32",
            ElementType::Float64 => "Float64",
            ElementType::PackedBool => "PackedBool",
            ElementType::Index64 => "Index64",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnDescriptor {
    pub id: ColumnId,
    pub role: ColumnRole,
    pub element_type: ElementType,
    pub source_field: String,
}

/// How a field's values are spread over columns. Mirrors the field tree.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldColumns {
    Leaf(ColumnId),
    Vector {
        index: ColumnId,
        inner: Box<FieldColumns>,
    },
    Record(Vec<FieldColumns>),
}

impl FieldColumns {
    /// All column ids reachable from this field, in column order.
    pub fn column_ids(&self) -> Vec<ColumnId> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<ColumnId>) {
        match self {
            FieldColumns::Leaf(id) => out.push(*id),
            FieldColumns::Vector { index, inner } => {
                out.push(*index);
                inner.collect(out);
            }
            FieldColumns::Record(children) => children.iter().for_each(|c| c.collect(out)),
        }
    }
}

/// A validated schema together with its column table.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaLayout {
    schema: Schema,
    columns: Vec<ColumnDescriptor>,
    fields: Vec<FieldColumns>,
}

impl SchemaLayout {
    pub fn new(schema: Schema) -> Result<Self> {
        schema.validate()?;
        let mut builder = ColumnBuilder::default();
        let fields = schema
            .fields
            .iter()
            .map(|f| builder.field(&f.ty, &f.name))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            schema,
            columns: builder.columns,
            fields,
        })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn columns(&self) -> &[ColumnDescriptor] {
        &self.columns
    }

    pub fn column(&self, id: ColumnId) -> Option<&ColumnDescriptor> {
        self.columns.get(id.0 as usize)
    }

    /// Column mapping of each top-level field, parallel to `schema().fields`.
    pub fn field_columns(&self) -> &[FieldColumns] {
        &self.fields
    }

    /// Resolves a dot-qualified path through records (not through vectors).
    pub fn find(&self, path: &str) -> Option<(&FieldDescriptor, &FieldColumns)> {
        let mut parts = path.split('.');
        let first = parts.next()?;
        let pos = self.schema.fields.iter().position(|f| f.name == first)?;
        let mut field = &self.schema.fields[pos];
        let mut cols = &self.fields[pos];
        for part in parts {
            match (&field.ty, cols) {
                (FieldType::Record(children), FieldColumns::Record(child_cols)) => {
                    let pos = children.iter().position(|f| f.name == part)?;
                    field = &children[pos];
                    cols = &child_cols[pos];
                }
                _ => return None,
            }
        }
        Some((field, cols))
    }
}

#[derive(Default)]
struct ColumnBuilder {
    columns: Vec<ColumnDescriptor>,
}

impl ColumnBuilder {
    fn push(&mut self, role: ColumnRole, element_type: ElementType, path: &str) -> ColumnId {
        let id = ColumnId(self.columns.len() as u32);
        self.columns.push(ColumnDescriptor {
            id,
            role,
            element_type,
            source_field: path.to_string(),
        });
        id
    }

    fn field(&mut self, ty: &FieldType, path: &str) -> Result<FieldColumns> {
        match ty {
            FieldType::Vector(inner) => {
                let index = self.push(ColumnRole::Index, ElementType::Index64, path);
                let inner = self.field(inner, path)?;
                Ok(FieldColumns::Vector {
                    index,
                    inner: Box::new(inner),
                })
            }
            FieldType::Record(children) => children
                .iter()
                .map(|c| self.field(&c.ty, &qualify(path, &c.name)))
                .collect::<Result<Vec<_>>>()
                .map(FieldColumns::Record),
            scalar => {
                let et = ElementType::for_scalar(scalar)
                    .ok_or_else(|| Error::schema(format!("unsupported type {scalar}")))?;
                Ok(FieldColumns::Leaf(self.push(ColumnRole::Value, et, path)))
            }
        }
    }
}

/// Flattens `schema` into its ordered column table.
///
/// Ordering is depth-first over the declared field order; the index column of
/// a vector always precedes the columns of its element type.
pub fn columns_for_schema(schema: &Schema) -> Result<Vec<ColumnDescriptor>> {
    SchemaLayout::new(schema.clone()).map(|l| l.columns)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(cols: &[ColumnDescriptor]) -> Vec<(ElementType, &str)> {
        cols.iter().map(|c| (c.element_type, c.source_field.as_str())).collect()
    }

    #[test]
    fn single_scalar() {
        let cols = columns_for_schema(&Schema::default().with("fId", FieldType::Int32)).unwrap();
        assert_eq!(cols.len(), 1);
        assert_eq!(cols[0].role, ColumnRole::Value);
        assert_eq!(summary(&cols), vec![(ElementType::Int32, "fId")]);
    }

    #[test]
    fn particle_vector() {
        let particle = FieldType::record([
            FieldDescriptor::new("fE", FieldType::Float32),
            FieldDescriptor::new("fIds", FieldType::vector(FieldType::Int32)),
        ]);
        let schema = Schema::default().with("fPtcls", FieldType::vector(particle));
        let cols = columns_for_schema(&schema).unwrap();
        assert_eq!(
            summary(&cols),
            vec![
                (ElementType::Index64, "fPtcls"),
                (ElementType::Float32, "fPtcls.fE"),
                (ElementType::Index64, "fPtcls.fIds"),
                (ElementType::Int32, "fPtcls.fIds"),
            ]
        );
        let roles: Vec<_> = cols.iter().map(|c| c.role).collect();
        assert_eq!(
            roles,
            vec![ColumnRole::Index, ColumnRole::Value, ColumnRole::Index, ColumnRole::Value]
        );
        let ids: Vec<_> = cols.iter().map(|c| c.id.0).collect();
        assert_eq!(ids, vec![0, 1, 2, 3]);
    }

    #[test]
    fn bool_is_packed() {
        let cols = columns_for_schema(&Schema::default().with("a", FieldType::Bool)).unwrap();
        assert_eq!(summary(&cols), vec![(ElementType::PackedBool, "a")]);
    }

    #[test]
    fn rejects_duplicates_and_bad_names() {
        let dup = Schema::default().with("x", FieldType::Int32).with("x", FieldType::Bool);
        assert!(matches!(columns_for_schema(&dup), Err(Error::Schema(_))));

        let nested_dup = Schema::default().with(
            "r",
            FieldType::record([
                FieldDescriptor::new("a", FieldType::Int32),
                FieldDescriptor::new("a", FieldType::Int64),
            ]),
        );
        assert!(columns_for_schema(&nested_dup).is_err());

        for bad in ["", "1abc", "a-b", "a.b", "é"] {
            let s = Schema::default().with(bad, FieldType::Int32);
            assert!(columns_for_schema(&s).is_err(), "{bad:?} accepted");
        }
        assert!(columns_for_schema(&Schema::default().with("_ok9", FieldType::Int32)).is_ok());
    }

    #[test]
    fn empty_record_rejected() {
        let s = Schema::default().with("r", FieldType::Record(vec![]));
        assert!(columns_for_schema(&s).is_err());
    }

    #[test]
    fn deterministic_ids() {
        let s = Schema::default()
            .with("a", FieldType::vector(FieldType::vector(FieldType::Float64)))
            .with("b", FieldType::Bool);
        assert_eq!(columns_for_schema(&s).unwrap(), columns_for_schema(&s).unwrap());
    }

    #[test]
    fn find_through_records() {
        let s = Schema::default().with(
            "h",
            FieldType::record([
                FieldDescriptor::new("px", FieldType::Float64),
                FieldDescriptor::new("v", FieldType::vector(FieldType::record([FieldDescriptor::new(
                    "q",
                    FieldType::Int32,
                )]))),
            ]),
        );
        let layout = SchemaLayout::new(s).unwrap();
        let (f, cols) = layout.find("h.px").unwrap();
        assert_eq!(f.ty, FieldType::Float64);
        assert_eq!(cols, &FieldColumns::Leaf(ColumnId(0)));
        assert!(layout.find("h.v").is_some());
        assert!(layout.find("h.v.q").is_none());
        assert!(layout.find("nope").is_none());
    }
}
