use std::io;

use crate::objstore::ObjectKey;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),

    #[error("type mismatch: expected {expected}, found {found}")]
    TypeMismatch { expected: String, found: String },

    #[error("corrupt data: {0}")]
    Corruption(String),

    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("unknown codec id {0}")]
    UnknownCodec(u16),

    #[error("compression failure: {0}")]
    Codec(String),

    #[error("sink is closed")]
    SinkClosed,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("not a dataset: {0}")]
    NotADataset(String),

    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),

    #[error("schema digest mismatch: header hashes to {computed:#018x}, footer records {recorded:#018x}")]
    DigestMismatch { computed: u64, recorded: u64 },

    #[error("key not found: {0}")]
    NotFound(ObjectKey),

    #[error("batch failed at descriptor {index} ({key}): {source}")]
    Batch {
        index: usize,
        key: ObjectKey,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown pool {0}")]
    UnknownPool(uuid::Uuid),

    #[error("invalid uri: {0}")]
    Uri(String),

    #[error("unknown field '{0}'")]
    UnknownField(String),

    #[error("index {index} out of range (len {len})")]
    OutOfRange { index: u64, len: u64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn corrupt(msg: impl Into<String>) -> Self {
        Error::Corruption(msg.into())
    }

    pub(crate) fn schema(msg: impl Into<String>) -> Self {
        Error::Schema(msg.into())
    }

    pub(crate) fn mismatch(expected: impl ToString, found: impl ToString) -> Self {
        Error::TypeMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
