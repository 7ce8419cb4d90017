//! Human-readable dump of a dataset's anchor, header and footer.

use std::fmt::Write;

use crate::codec::Codec;
use crate::storage::{PageAddress, PageSource};

fn codec_name(id: u16) -> String {
    Codec::from_id(id).map_or_else(|_| format!("unknown({id})"), |c| c.name().to_string())
}

/// Renders the metadata of `source`. With `pages`, every page locator is listed.
pub fn describe(source: &dyn PageSource, pages: bool) -> String {
    let mut out = String::new();
    let anchor = source.anchor_record();
    let header = source.header();
    let footer = source.footer();
    // writing to a String cannot fail
    let _ = (|| -> std::fmt::Result {
        writeln!(out, "anchor")?;
        writeln!(out, "  format_version  {}", anchor.format_version)?;
        writeln!(
            out,
            "  header          {} bytes stored, {} uncompressed, codec {}",
            anchor.header_size_stored,
            anchor.header_size_uncompressed,
            codec_name(anchor.header_codec_id)
        )?;
        writeln!(
            out,
            "  footer          {} bytes stored, {} uncompressed, codec {}",
            anchor.footer_size_stored,
            anchor.footer_size_uncompressed,
            codec_name(anchor.footer_codec_id)
        )?;
        writeln!(out, "header")?;
        writeln!(out, "  name     {}", header.name)?;
        writeln!(out, "  version  {}", header.version)?;
        writeln!(out, "  digest   {:#018x}", header.digest())?;
        writeln!(out, "  fields")?;
        for f in &header.schema().fields {
            writeln!(out, "    {}: {}", f.name, f.ty)?;
        }
        writeln!(out, "  columns")?;
        for c in header.columns() {
            writeln!(out, "    {:>3} {:<8} {}", c.id.0, c.element_type.to_string(), c.source_field)?;
        }
        writeln!(out, "footer")?;
        writeln!(out, "  entries  {}", footer.n_entries)?;
        writeln!(out, "  clusters {}", footer.clusters.len())?;
        writeln!(out, "  pages    {}", footer.n_pages())?;
        writeln!(out, "  bytes    {}", footer.total_stored_bytes())?;
        for c in &footer.clusters {
            writeln!(
                out,
                "  cluster {} entries [{}, {}) pages {}",
                c.cluster_id,
                c.first_entry,
                c.first_entry + c.n_entries,
                c.n_pages()
            )?;
            if !pages {
                continue;
            }
            for (col, p) in c.pages() {
                let at = match p.locator.address {
                    PageAddress::File { offset, size } => format!("file @{offset} +{size}"),
                    PageAddress::Object { key, size } => format!("object {key} +{size}"),
                };
                writeln!(
                    out,
                    "    col {:>3} seq {:>4} elems [{}, {}) {} codec {}",
                    col.0,
                    p.commit_seq,
                    p.first_element_index,
                    p.first_element_index + p.n_elements,
                    at,
                    codec_name(p.locator.codec_id)
                )?;
            }
        }
        Ok(())
    })();
    out
}
