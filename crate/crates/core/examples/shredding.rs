//! Vector offsets and packed booleans, the two non-trivial element encodings.

use coltuple::encoding::{decode_elements, encode_elements, shred_vector, unshred_vector, ColumnData};
use coltuple::schema::{columns_for_schema, FieldType, Schema};

fn main() -> coltuple::Result<()> {
    let rows = vec![vec![1, 2, 3], vec![], vec![4, 5]];
    let (index, values) = shred_vector(&rows);
    println!("rows    {rows:?}");
    println!("index   {index:?}");
    println!("values  {values:?}");
    assert_eq!(unshred_vector(&index, &values)?, rows);

    let schema = Schema::default().with("flag", FieldType::Bool);
    let column = &columns_for_schema(&schema)?[0];
    let bits: Vec<bool> = (0..11).map(|i| i % 3 == 0).collect();
    let bytes = encode_elements(column, &ColumnData::Bool(bits.clone()))?;
    println!("11 bools -> {} bytes: {:02x?}", bytes.len(), bytes);
    assert_eq!(decode_elements(column, &bytes, bits.len() as u64)?, ColumnData::Bool(bits));
    Ok(())
}
