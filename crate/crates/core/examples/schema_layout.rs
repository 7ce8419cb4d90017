//! Flattening a nested schema onto columns.

use coltuple::schema::{FieldDescriptor, FieldType, Schema};
use coltuple::storage::DatasetHeader;

fn main() -> coltuple::Result<()> {
    let particle = FieldType::record([
        FieldDescriptor::new("fE", FieldType::Float32),
        FieldDescriptor::new("fIds", FieldType::vector(FieldType::Int32)),
    ]);
    let schema = Schema::default()
        .with("fRun", FieldType::Int64)
        .with("fTrigger", FieldType::Bool)
        .with("fPtcls", FieldType::vector(particle));

    let header = DatasetHeader::new("Events", schema)?;
    println!("schema digest {:#018x}", header.digest());
    for c in header.columns() {
        println!("column {:>2}  {:<10} {:?}  {}", c.id.0, c.element_type.to_string(), c.role, c.source_field);
    }
    Ok(())
}
