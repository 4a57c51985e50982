//! Plain-text exports of sampled fields: CSV and portable graymap, each
//! embedding seed, grid, and truncation metadata in comment headers.

use super::FieldGrid;
use std::io::{self, Write};
use std::path::Path;

fn metadata_lines(field: &FieldGrid, comment: &str) -> String {
    format!(
        "{c} seed={} sample_index={} terms={} xi0={:.17}\n{c} half_width={} resolution={} counting_radius={}\n",
        field.seed,
        field.sample_index,
        field.n_terms,
        field.xi0,
        field.grid.half_width,
        field.grid.resolution,
        field.grid.counting_radius,
        c = comment,
    )
}

/// Writes the grid as CSV (rows = y, columns = x), metadata in `#` comments.
pub fn write_field_csv(field: &FieldGrid, path: &Path) -> io::Result<()> {
    let mut out = io::BufWriter::new(std::fs::File::create(path)?);
    out.write_all(metadata_lines(field, "#").as_bytes())?;
    let res = field.grid.resolution;
    let mut line = String::with_capacity(res * 20);
    for row in 0..res {
        line.clear();
        for col in 0..res {
            if col > 0 {
                line.push(',');
            }
            line.push_str(&format!("{:.10e}", field.value(row, col)));
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// Writes the grid as an ASCII portable graymap (P2), values linearly mapped
/// to 0..=255 over the field's range.
pub fn write_field_pgm(field: &FieldGrid, path: &Path) -> io::Result<()> {
    let mut out = io::BufWriter::new(std::fs::File::create(path)?);
    let res = field.grid.resolution;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in &field.values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    writeln!(out, "P2")?;
    out.write_all(metadata_lines(field, "#").as_bytes())?;
    writeln!(out, "{res} {res}")?;
    writeln!(out, "255")?;
    for row in 0..res {
        let mut line = String::with_capacity(res * 4);
        for col in 0..res {
            if col > 0 {
                line.push(' ');
            }
            let g = ((field.value(row, col) - lo) / span * 255.0).round() as u32;
            line.push_str(&g.min(255).to_string());
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}
