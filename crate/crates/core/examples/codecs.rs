//! Page codecs: identity and zstd.

use coltuple::codec::Codec;

fn main() -> coltuple::Result<()> {
    let constant = vec![0u8; 40_000];
    let ramp: Vec<u8> = (0..40_000u32).map(|i| (i * 7 % 251) as u8).collect();
    for (name, page) in [("constant", &constant), ("ramp", &ramp)] {
        for codec in [Codec::Identity, Codec::General] {
            let stored = codec.compress(page)?;
            assert_eq!(&codec.decompress(&stored, page.len())?, page);
            println!("{name:<9} {:<8} id {} {:>6} -> {:>6} bytes", codec.name(), codec.id(), page.len(), stored.len());
        }
    }
    Ok(())
}
