//! Element encodings for page payloads.
//!
//! Fixed-width types are stored little-endian. Booleans are bit-packed,
//! least significant bit first, 8 per octet, with the final octet
//! zero-padded. Index columns hold 64-bit end offsets.

use crate::error::{Error, Result};
use crate::schema::{ColumnDescriptor, ColumnId, ElementType};

/// A typed run of column elements.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Int32(Vec<i32>),
    Int64(Vec<i64>),
    Float32(Vec<f32>),
    Float64(Vec<f64>),
    Bool(Vec<bool>),
    Index(Vec<u64>),
}

impl ColumnData {
    pub fn empty(element_type: ElementType) -> Self {
        match element_type {
            ElementType::Int32 => ColumnData::Int32(Vec::new()),
            ElementType::Int64 => ColumnData::Int64(Vec::new()),
            ElementType::Float32 => ColumnData::Float32(Vec::new()),
            ElementType::Float64 => ColumnData::Float64(Vec::new()),
            ElementType::PackedBool => ColumnData::Bool(Vec::new()),
            ElementType::Index64 => ColumnData::Index(Vec::new()),
        }
    }

    pub fn element_type(&self) -> ElementType {
        match self {
            ColumnData::Int32(_) => ElementType::Int32,
            ColumnData::Int64(_) => ElementType::Int64,
            ColumnData::Float32(_) => ElementType::Float32,
            ColumnData::Float64(_) => ElementType::Float64,
            ColumnData::Bool(_) => ElementType::PackedBool,
            ColumnData::Index(_) => ElementType::Index64,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ColumnData::Int32(v) => v.len(),
            ColumnData::Int64(v) => v.len(),
            ColumnData::Float32(v) => v.len(),
            ColumnData::Float64(v) => v.len(),
            ColumnData::Bool(v) => v.len(),
            ColumnData::Index(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Moves all elements out, leaving an empty buffer of the same type.
    pub fn take(&mut self) -> ColumnData {
        std::mem::replace(self, ColumnData::empty(self.element_type()))
    }

    /// Splits off the first `n` elements (`n <= len`).
    pub fn drain_front(&mut self, n: usize) -> ColumnData {
        fn split<T>(v: &mut Vec<T>, n: usize) -> Vec<T> {
            let rest = v.split_off(n);
            std::mem::replace(v, rest)
        }
        match self {
            ColumnData::Int32(v) => ColumnData::Int32(split(v, n)),
            ColumnData::Int64(v) => ColumnData::Int64(split(v, n)),
            ColumnData::Float32(v) => ColumnData::Float32(split(v, n)),
            ColumnData::Float64(v) => ColumnData::Float64(split(v, n)),
            ColumnData::Bool(v) => ColumnData::Bool(split(v, n)),
            ColumnData::Index(v) => ColumnData::Index(split(v, n)),
        }
    }

    /// Appends the elements of `other`, which must have the same type.
    pub fn extend(&mut self, other: ColumnData) -> Result<()> {
        match (self, other) {
            (ColumnData::Int32(a), ColumnData::Int32(b)) => a.extend(b),
            (ColumnData::Int64(a), ColumnData::Int64(b)) => a.extend(b),
            (ColumnData::Float32(a), ColumnData::Float32(b)) => a.extend(b),
            (ColumnData::Float64(a), ColumnData::Float64(b)) => a.extend(b),
            (ColumnData::Bool(a), ColumnData::Bool(b)) => a.extend(b),
            (ColumnData::Index(a), ColumnData::Index(b)) => a.extend(b),
            (a, b) => return Err(Error::mismatch(a.element_type(), b.element_type())),
        }
        Ok(())
    }
}

/// An encoded range of one column's elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Page {
    pub column_id: ColumnId,
    pub first_element_index: u64,
    pub n_elements: u64,
    pub payload: Vec<u8>,
}

pub fn encode_elements(column: &ColumnDescriptor, values: &ColumnData) -> Result<Vec<u8>> {
    if values.element_type() != column.element_type {
        return Err(Error::mismatch(column.element_type, values.element_type()));
    }
    if values.is_empty() {
        return Err(Error::InvalidState("cannot encode an empty element range".into()));
    }
    Ok(encode_data(values))
}

pub(crate) fn encode_data(values: &ColumnData) -> Vec<u8> {
    let mut out = Vec::with_capacity(values.element_type().payload_len(values.len() as u64) as usize);
    match values {
        ColumnData::Int32(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        ColumnData::Int64(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        ColumnData::Float32(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        ColumnData::Float64(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        ColumnData::Index(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        ColumnData::Bool(v) => {
            for chunk in v.chunks(8) {
                let byte = chunk
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (bit, &b)| acc | ((b as u8) << bit));
                out.push(byte);
            }
        }
    }
    out
}

pub fn decode_elements(column: &ColumnDescriptor, payload: &[u8], n_elements: u64) -> Result<ColumnData> {
    decode_data(column.element_type, payload, n_elements)
}

pub(crate) fn decode_data(element_type: ElementType, payload: &[u8], n_elements: u64) -> Result<ColumnData> {
    let expected = element_type.payload_len(n_elements);
    if payload.len() as u64 != expected {
        return Err(Error::corrupt(format!(
            "{element_type} payload of {n_elements} elements must be {expected} bytes, got {}",
            payload.len()
        )));
    }
    fn fixed<const N: usize, T>(payload: &[u8], f: impl Fn([u8; N]) -> T) -> Vec<T> {
        payload
            .chunks_exact(N)
            .map(|c| f(c.try_into().expect("chunk width")))
            .collect()
    }
    Ok(match element_type {
        ElementType::Int32 => ColumnData::Int32(fixed(payload, i32::from_le_bytes)),
        ElementType::Int64 => ColumnData::Int64(fixed(payload, i64::from_le_bytes)),
        ElementType::Float32 => ColumnData::Float32(fixed(payload, f32::from_le_bytes)),
        ElementType::Float64 => ColumnData::Float64(fixed(payload, f64::from_le_bytes)),
        ElementType::Index64 => ColumnData::Index(fixed(payload, u64::from_le_bytes)),
        ElementType::PackedBool => ColumnData::Bool(
            (0..n_elements as usize)
                .map(|i| payload[i / 8] >> (i % 8) & 1 == 1)
                .collect(),
        ),
    })
}

/// Splits variable-length entries into an end-offset index and the
/// flattened values.
pub fn shred_vector<T: Clone>(entries: &[Vec<T>]) -> (Vec<u64>, Vec<T>) {
    let mut index = Vec::with_capacity(entries.len());
    let mut values = Vec::new();
    for entry in entries {
        values.extend_from_slice(entry);
        index.push(values.len() as u64);
    }
    (index, values)
}

/// Inverse of [`shred_vector`].
pub fn unshred_vector<T: Clone>(index: &[u64], values: &[T]) -> Result<Vec<Vec<T>>> {
    let mut start = 0u64;
    let mut out = Vec::with_capacity(index.len());
    for &end in index {
        if end < start || end > values.len() as u64 {
            return Err(Error::corrupt(format!(
                "index offset {end} outside [{start}, {}]",
                values.len()
            )));
        }
        out.push(values[start as usize..end as usize].to_vec());
        start = end;
    }
    if start != values.len() as u64 {
        return Err(Error::corrupt("trailing values not covered by index"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::ColumnRole;
    use proptest::prelude::*;

    fn col(element_type: ElementType) -> ColumnDescriptor {
        ColumnDescriptor {
            id: ColumnId(0),
            role: ColumnRole::Value,
            element_type,
            source_field: "x".into(),
        }
    }

    #[test]
    fn int32_little_endian() {
        let bytes = encode_elements(&col(ElementType::Int32), &ColumnData::Int32(vec![1])).unwrap();
        assert_eq!(bytes, [1, 0, 0, 0]);
        let back = decode_elements(&col(ElementType::Int32), &bytes, 1).unwrap();
        assert_eq!(back, ColumnData::Int32(vec![1]));
    }

    #[test]
    fn bool_packing_lsb_first() {
        let bits = vec![true, false, true, false, false, false, false, false, true];
        let c = col(ElementType::PackedBool);
        let bytes = encode_elements(&c, &ColumnData::Bool(bits.clone())).unwrap();
        assert_eq!(bytes, [0x05, 0x01]);
        assert_eq!(decode_elements(&c, &[0x05, 0x01], 9).unwrap(), ColumnData::Bool(bits));
    }

    #[test]
    fn float64_zero() {
        let bytes = encode_elements(&col(ElementType::Float64), &ColumnData::Float64(vec![0.0])).unwrap();
        assert_eq!(bytes, [0u8; 8]);
    }

    #[test]
    fn short_payload_is_corruption() {
        let err = decode_elements(&col(ElementType::Int32), &[0u8; 7], 2).unwrap_err();
        assert!(matches!(err, Error::Corruption(_)));
    }

    #[test]
    fn type_mismatch_and_empty() {
        let c = col(ElementType::Int32);
        assert!(matches!(
            encode_elements(&c, &ColumnData::Int64(vec![1])),
            Err(Error::TypeMismatch { .. })
        ));
        assert!(encode_elements(&c, &ColumnData::Int32(vec![])).is_err());
    }

    #[test]
    fn shred_examples() {
        assert_eq!(shred_vector(&[vec![1, 2], vec![], vec![3]]), (vec![2, 2, 3], vec![1, 2, 3]));
        assert_eq!(shred_vector::<i32>(&[vec![]]), (vec![0], vec![]));
        assert_eq!(shred_vector(&[vec![5]]), (vec![1], vec![5]));
    }

    #[test]
    fn unshred_rejects_bad_index() {
        assert!(unshred_vector(&[3, 1], &[1, 2, 3]).is_err());
        assert!(unshred_vector(&[4], &[1, 2, 3]).is_err());
        assert!(unshred_vector(&[1], &[1, 2, 3]).is_err());
    }

    fn arb_data() -> impl Strategy<Value = ColumnData> {
        prop_oneof![
            prop::collection::vec(any::<i32>(), 1..200).prop_map(ColumnData::Int32),
            prop::collection::vec(any::<i64>(), 1..200).prop_map(ColumnData::Int64),
            prop::collection::vec(-1e30f32..1e30, 1..200).prop_map(ColumnData::Float32),
            prop::collection::vec(-1e300f64..1e300, 1..200).prop_map(ColumnData::Float64),
            prop::collection::vec(any::<bool>(), 1..200).prop_map(ColumnData::Bool),
            prop::collection::vec(any::<u64>(), 1..200).prop_map(ColumnData::Index),
        ]
    }

    proptest! {
        #[test]
        fn encode_decode_roundtrip(data in arb_data()) {
            let c = col(data.element_type());
            let bytes = encode_elements(&c, &data).unwrap();
            prop_assert_eq!(bytes.len() as u64, c.element_type.payload_len(data.len() as u64));
            let back = decode_elements(&c, &bytes, data.len() as u64).unwrap();
            prop_assert_eq!(back, data);
        }

        #[test]
        fn packed_bool_size(bits in prop::collection::vec(any::<bool>(), 1..500)) {
            let bytes = encode_data(&ColumnData::Bool(bits.clone()));
            prop_assert_eq!(bytes.len(), bits.len().div_ceil(8));
        }

        #[test]
        fn shred_unshred_inverse(entries in prop::collection::vec(prop::collection::vec(any::<i32>(), 0..6), 0..40)) {
            let (index, values) = shred_vector(&entries);
            prop_assert_eq!(unshred_vector(&index, &values).unwrap(), entries);
        }
    }
}
