//! Entry-level access: append whole entries, read fields through typed views.

mod reader;
mod writer;

pub use reader::{ClusterColumns, NTupleReader, View};
pub use writer::{NTupleWriter, WriteSummary, WriterOptions};

use crate::encoding::ColumnData;
use crate::error::{Error, Result};
use crate::schema::FieldType;

/// A field value of one entry.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int32(i32),
    Int64(i64),
    Float32(f32),
    Float64(f64),
    Bool(bool),
    Vector(Vec<Value>),
    /// Member values in declaration order.
    Record(Vec<Value>),
}

impl Value {
    /// Checks that the value has the shape of `ty`.
    pub fn conforms(&self, ty: &FieldType) -> bool {
        match (self, ty) {
            (Value::Int32(_), FieldType::Int32)
            | (Value::Int64(_), FieldType::Int64)
            | (Value::Float32(_), FieldType::Float32)
            | (Value::Float64(_), FieldType::Float64)
            | (Value::Bool(_), FieldType::Bool) => true,
            (Value::Vector(items), FieldType::Vector(inner)) => items.iter().all(|v| v.conforms(inner)),
            (Value::Record(members), FieldType::Record(fields)) => {
                members.len() == fields.len() && members.iter().zip(fields).all(|(v, f)| v.conforms(&f.ty))
            }
            _ => false,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Value::Int32(_) => "int32",
            Value::Int64(_) => "int64",
            Value::Float32(_) => "float32",
            Value::Float64(_) => "float64",
            Value::Bool(_) => "bool",
            Value::Vector(_) => "vector",
            Value::Record(_) => "record",
        }
    }

    pub(crate) fn check(&self, ty: &FieldType) -> Result<()> {
        if self.conforms(ty) {
            Ok(())
        } else {
            Err(Error::mismatch(ty, self.kind()))
        }
    }

    pub(crate) fn push_scalar(&self, column: &mut ColumnData) {
        match (self, column) {
            (Value::Int32(x), ColumnData::Int32(v)) => v.push(*x),
            (Value::Int64(x), ColumnData::Int64(v)) => v.push(*x),
            (Value::Float32(x), ColumnData::Float32(v)) => v.push(*x),
            (Value::Float64(x), ColumnData::Float64(v)) => v.push(*x),
            (Value::Bool(x), ColumnData::Bool(v)) => v.push(*x),
            (value, column) => unreachable!("{} pushed into {} column", value.kind(), column.element_type()),
        }
    }

    pub(crate) fn from_column(column: &ColumnData, i: usize) -> Value {
        match column {
            ColumnData::Int32(v) => Value::Int32(v[i]),
            ColumnData::Int64(v) => Value::Int64(v[i]),
            ColumnData::Float32(v) => Value::Float32(v[i]),
            ColumnData::Float64(v) => Value::Float64(v[i]),
            ColumnData::Bool(v) => Value::Bool(v[i]),
            ColumnData::Index(v) => Value::Int64(v[i] as i64),
        }
    }
}

macro_rules! value_from {
    ($($t:ty => $variant:ident),*) => {$(
        impl From<$t> for Value {
            fn from(x: $t) -> Self {
                Value::$variant(x)
            }
        }
    )*};
}

value_from!(i32 => Int32, i64 => Int64, f32 => Float32, f64 => Float64, bool => Bool);

impl<T: Into<Value>> From<Vec<T>> for Value {
    fn from(items: Vec<T>) -> Self {
        Value::Vector(items.into_iter().map(Into::into).collect())
    }
}

/// Rust types a view can produce.
pub trait ViewType: Sized {
    fn accepts(ty: &FieldType) -> bool;

    fn type_name() -> String;

    /// Converts a value already known to conform to an accepted type.
    fn from_value(value: Value) -> Self;
}

macro_rules! scalar_view {
    ($($t:ty => $variant:ident, $name:literal),*) => {$(
        impl ViewType for $t {
            fn accepts(ty: &FieldType) -> bool {
                matches!(ty, FieldType::$variant)
            }

            fn type_name() -> String {
                $name.into()
            }

            fn from_value(value: Value) -> Self {
                match value {
                    Value::$variant(x) => x,
                    other => unreachable!("view of {} received {other:?}", $name),
                }
            }
        }
    )*};
}

scalar_view!(i32 => Int32, "int32", i64 => Int64, "int64", f32 => Float32, "float32", f64 => Float64, "float64", bool => Bool, "bool");

impl<T: ViewType> ViewType for Vec<T> {
    fn accepts(ty: &FieldType) -> bool {
        matches!(ty, FieldType::Vector(inner) if T::accepts(inner))
    }

    fn type_name() -> String {
        format!("vector<{}>", T::type_name())
    }

    fn from_value(value: Value) -> Self {
        match value {
            Value::Vector(items) => items.into_iter().map(T::from_value).collect(),
            other => unreachable!("vector view received {other:?}"),
        }
    }
}

/// Untyped view of any field.
impl ViewType for Value {
    fn accepts(_: &FieldType) -> bool {
        true
    }

    fn type_name() -> String {
        "value".into()
    }

    fn from_value(value: Value) -> Self {
        value
    }
}
