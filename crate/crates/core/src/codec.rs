//! Per-page compression codecs.
//!
//! Every page, header and footer records the id of the codec it was stored
//! with. Id 0 is the identity; id 1 is zstd.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const ZSTD_LEVEL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Codec {
    #[default]
    Identity,
    General,
}

impl Codec {
    pub fn id(self) -> u16 {
        match self {
            Codec::Identity => 0,
            Codec::General => 1,
        }
    }

    pub fn from_id(id: u16) -> Result<Self> {
        match id {
            0 => Ok(Codec::Identity),
            1 => Ok(Codec::General),
            other => Err(Error::UnknownCodec(other)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Codec::Identity => "none",
            Codec::General => "general",
        }
    }

    pub fn compress(self, payload: &[u8]) -> Result<Vec<u8>> {
        match self {
            Codec::Identity => Ok(payload.to_vec()),
            Codec::General => zstd::bulk::compress(payload, ZSTD_LEVEL).map_err(|e| Error::Codec(e.to_string())),
        }
    }

    pub fn decompress(self, stored: &[u8], expected_size: usize) -> Result<Vec<u8>> {
        let out = match self {
            Codec::Identity => stored.to_vec(),
            Codec::General => {
                zstd::bulk::decompress(stored, expected_size).map_err(|e| Error::Codec(e.to_string()))?
            }
        };
        if out.len() != expected_size {
            return Err(Error::corrupt(format!(
                "decompressed {} bytes, expected {expected_size}",
                out.len()
            )));
        }
        Ok(out)
    }
}

impl fmt::Display for Codec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Codec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" | "identity" => Ok(Codec::Identity),
            "general" | "zstd" => Ok(Codec::General),
            other => Err(Error::Config(format!("unknown compression '{other}'"))),
        }
    }
}

/// Decompresses with the codec registered under `codec_id`.
pub fn decompress(codec_id: u16, stored: &[u8], expected_size: usize) -> Result<Vec<u8>> {
    Codec::from_id(codec_id)?.decompress(stored, expected_size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_is_byte_exact() {
        let data: Vec<u8> = (0..=255).collect();
        assert_eq!(Codec::Identity.compress(&data).unwrap(), data);
    }

    #[test]
    fn constant_page_compresses_well() {
        let page: Vec<u8> = std::iter::repeat_n(7i32.to_le_bytes(), 10_000).flatten().collect();
        assert_eq!(page.len(), 40_000);
        let stored = Codec::General.compress(&page).unwrap();
        assert!(stored.len() * 100 < page.len(), "{} bytes", stored.len());
        assert_eq!(Codec::General.decompress(&stored, page.len()).unwrap(), page);
    }

    #[test]
    fn size_mismatch_and_garbage() {
        let stored = Codec::General.compress(b"hello hello hello").unwrap();
        assert!(Codec::General.decompress(&stored, 3).is_err());
        assert!(Codec::General.decompress(b"not a frame", 10).is_err());
        assert!(Codec::Identity.decompress(b"abc", 4).is_err());
    }

    #[test]
    fn unknown_id() {
        assert!(matches!(Codec::from_id(9), Err(Error::UnknownCodec(9))));
    }

    proptest! {
        #[test]
        fn general_roundtrip(data in prop::collection::vec(any::<u8>(), 0..4096)) {
            let stored = Codec::General.compress(&data).unwrap();
            prop_assert_eq!(Codec::General.decompress(&stored, data.len()).unwrap(), data);
        }
    }
}
