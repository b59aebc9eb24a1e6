//! File formats: CSV matrices and label lists, binary PGM heatmaps, JSON
//! sidecars.
//!
//! Matrix CSV is row-major, one row per line, comma-separated, no header by
//! default; an optional leading `# rows cols` comment carries the shape for
//! human readers (the reader infers the shape either way and skips any `#`
//! line). Entries are written as `{:.16e}` — 17 significant digits — which
//! round-trips every finite f64 exactly through `str::parse`.

use crate::CliError;
use gnrfm::{Matrix, SyntheticSpec};
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

/// Identification of the RNG family behind every seeded artifact in this
/// workspace. Recorded in `meta.json` so regenerated data can be checked for
/// provenance.
pub const RNG_ID: &str = "chacha8";

fn read_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::usage(format!("{}: {e}", path.display()))
}

fn write_err(path: &Path, e: io::Error) -> CliError {
    CliError::usage(format!("cannot write {}: {e}", path.display()))
}

/// Write `m` as CSV. With `shape_comment`, the first line is `# rows cols`.
pub fn write_matrix_csv(path: &Path, m: &Matrix, shape_comment: bool) -> Result<(), CliError> {
    let file = fs::File::create(path).map_err(|e| write_err(path, e))?;
    let mut w = BufWriter::new(file);
    let inner = |w: &mut BufWriter<fs::File>| -> io::Result<()> {
        if shape_comment {
            writeln!(w, "# {} {}", m.rows(), m.cols())?;
        }
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if j > 0 {
                    w.write_all(b",")?;
                }
                write!(w, "{:.16e}", m[(i, j)])?;
            }
            w.write_all(b"\n")?;
        }
        w.flush()
    };
    inner(&mut w).map_err(|e| write_err(path, e))
}

/// Read a CSV matrix written by [`write_matrix_csv`] (or by anything else
/// that emits comma-separated numeric rows). Blank lines and `#` comments are
/// skipped; all rows must have the same width.
pub fn read_matrix_csv(path: &Path) -> Result<Matrix, CliError> {
    let text = fs::read_to_string(path).map_err(|e| read_err(path, e))?;
    parse_matrix_csv(&text).map_err(|e| read_err(path, e))
}

fn parse_matrix_csv(text: &str) -> Result<Matrix, String> {
    let mut data = Vec::new();
    let mut width = None;
    let mut height = 0usize;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut count = 0usize;
        for tok in line.split(',') {
            let tok = tok.trim();
            let v: f64 = tok
                .parse()
                .map_err(|_| format!("line {}: not a number: {tok:?}", lineno + 1))?;
            data.push(v);
            count += 1;
        }
        match width {
            None => width = Some(count),
            Some(w) if w != count => {
                return Err(format!(
                    "line {}: expected {} entries per row, found {}",
                    lineno + 1,
                    w,
                    count
                ));
            }
            _ => {}
        }
        height += 1;
    }
    let width = width.ok_or("no data rows")?;
    Matrix::from_vec(height, width, data).map_err(|e| e.to_string())
}

/// Write cluster labels, one per line.
pub fn write_labels_csv(path: &Path, labels: &[usize]) -> Result<(), CliError> {
    let mut out = String::with_capacity(labels.len() * 4);
    for &l in labels {
        out.push_str(&l.to_string());
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| write_err(path, e))
}

/// Read a label list. Tolerant about layout: labels may be separated by
/// newlines, commas, or whitespace, and may be written as floats (`2.0`) as
/// long as they are non-negative integers underneath.
pub fn read_labels_csv(path: &Path) -> Result<Vec<usize>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| read_err(path, e))?;
    let mut labels = Vec::new();
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for tok in line.split([',', ' ', '\t']) {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            let v: f64 = tok
                .parse()
                .map_err(|_| read_err(path, format!("not a label: {tok:?}")))?;
            if !(v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v <= usize::MAX as f64) {
                return Err(read_err(
                    path,
                    format!("not a non-negative integer label: {tok:?}"),
                ));
            }
            labels.push(v as usize);
        }
    }
    if labels.is_empty() {
        return Err(read_err(path, "no labels found"));
    }
    Ok(labels)
}

/// Write `m` as a binary 8-bit PGM (P5) heatmap, linearly scaled from 0 to
/// the maximum entry (an all-zero matrix renders black). Negative entries
/// clamp to 0.
pub fn write_pgm(path: &Path, m: &Matrix) -> Result<(), CliError> {
    let max = m.data().iter().cloned().fold(0.0f64, f64::max);
    let scale = if max > 0.0 { 255.0 / max } else { 0.0 };
    let mut bytes = Vec::with_capacity(32 + m.rows() * m.cols());
    bytes.extend_from_slice(format!("P5\n{} {}\n255\n", m.cols(), m.rows()).as_bytes());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let v = (m[(i, j)].max(0.0) * scale).round().clamp(0.0, 255.0);
            bytes.push(v as u8);
        }
    }
    fs::write(path, bytes).map_err(|e| write_err(path, e))
}

/// Sidecar written next to generated data: the exact spec plus the RNG family
/// ([`RNG_ID`]), enough to regenerate the files bit-for-bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenMeta {
    pub spec: SyntheticSpec,
    pub rng: String,
}

/// Serialize `value` as pretty-printed JSON at `path`.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::usage(format!("cannot serialize {}: {e}", path.display())))?;
    fs::write(path, text + "\n").map_err(|e| write_err(path, e))
}

/// Deserialize JSON from `path`.
pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| read_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| read_err(path, e))
}
