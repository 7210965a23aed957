//! File formats: Matrix Market (coordinate, real, symmetric), JSON reports,
//! CSV bench records and plain edge lists.
//!
//! Output is deterministic: identical inputs give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use repdet_core::{Graph, LogDetReport, SparseSymMatrix};

use crate::bench::BenchRecord;
use crate::error::{Error, Result};

pub const MATRIX_MARKET_BANNER: &str = "%%MatrixMarket matrix coordinate real symmetric";

/// Shortest decimal that parses back to the same `f64` (never more than 17
/// significant digits). Integral values print without a fraction.
pub fn format_value(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Renders `m` as Matrix Market text. Lower triangle only (`row >= col`),
/// records sorted by `(col, row)`, 1-based indices. Each `comments` line is
/// prefixed with `%`.
pub fn matrix_market_string(m: &SparseSymMatrix, comments: &[&str]) -> String {
    let mut out = String::with_capacity(32 * (m.stored_nnz() + 2));
    out.push_str(MATRIX_MARKET_BANNER);
    out.push('\n');
    for c in comments {
        let _ = writeln!(out, "% {c}");
    }
    let _ = writeln!(out, "{} {} {}", m.dim(), m.dim(), m.stored_nnz());
    // Upper (r, c) sorted by (r, c) is lower (c, r) sorted by column then row.
    for &(r, c, v) in m.entries() {
        let _ = writeln!(out, "{} {} {}", c + 1, r + 1, format_value(v));
    }
    out
}

pub fn write_matrix_market<W: Write>(m: &SparseSymMatrix, comments: &[&str], mut w: W) -> Result<()> {
    w.write_all(matrix_market_string(m, comments).as_bytes())?;
    Ok(())
}

pub fn export_matrix_market(m: &SparseSymMatrix, comments: &[&str], path: &Path) -> Result<()> {
    fs::write(path, matrix_market_string(m, comments)).map_err(|e| Error::path(path, e))
}

fn mm_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Format { line, msg: msg.into() }
}

/// Parses a coordinate/real/symmetric Matrix Market stream. Rejects any other
/// banner (pattern, complex, integer, array, general), upper-triangle records,
/// duplicates and count mismatches.
pub fn read_matrix_market<R: Read>(r: R) -> Result<SparseSymMatrix> {
    let mut lines = BufReader::new(r).lines().enumerate();

    let (_, banner) = lines.next().ok_or_else(|| mm_err(1, "empty input"))?;
    let banner = banner?;
    let tokens: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    let expected = ["%%matrixmarket", "matrix", "coordinate", "real", "symmetric"];
    if tokens.len() != expected.len() || tokens.iter().zip(expected).any(|(t, e)| t != e) {
        return Err(mm_err(1, format!("unsupported banner `{banner}`, expected `{MATRIX_MARKET_BANNER}`")));
    }

    let mut size: Option<(usize, usize)> = None;
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    for (k, line) in lines {
        let lineno = k + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(mm_err(lineno, "expected three fields"));
        }
        let int = |s: &str| s.parse::<usize>().map_err(|_| mm_err(lineno, format!("bad integer `{s}`")));
        match size {
            None => {
                let (rows, cols, nnz) = (int(fields[0])?, int(fields[1])?, int(fields[2])?);
                if rows != cols {
                    return Err(mm_err(lineno, "symmetric matrix must be square"));
                }
                size = Some((rows, nnz));
                triplets.reserve(nnz);
            }
            Some((dim, _)) => {
                let (row, col) = (int(fields[0])?, int(fields[1])?);
                let value: f64 = fields[2].parse().map_err(|_| mm_err(lineno, format!("bad value `{}`", fields[2])))?;
                if row == 0 || col == 0 || row > dim || col > dim {
                    return Err(mm_err(lineno, "index out of range"));
                }
                if row < col {
                    return Err(mm_err(lineno, "symmetric storage must be lower triangle"));
                }
                triplets.push((col - 1, row - 1, value));
            }
        }
    }
    let (dim, nnz) = size.ok_or_else(|| mm_err(0, "missing size line"))?;
    if triplets.len() != nnz {
        return Err(mm_err(0, format!("header declares {nnz} entries, found {}", triplets.len())));
    }
    triplets.sort_by_key(|t| (t.0, t.1));
    if triplets.windows(2).any(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
        return Err(mm_err(0, "duplicate entry"));
    }
    triplets.retain(|t| t.2 != 0.0);
    Ok(SparseSymMatrix::from_sorted_upper(dim, triplets)?)
}

pub fn import_matrix_market(path: &Path) -> Result<SparseSymMatrix> {
    let file = fs::File::open(path).map_err(|e| Error::path(path, e))?;
    read_matrix_market(file)
}

/// One JSON object with keys `n, N, log_det_primal, log_det_dual, log_det_K,
/// duality_residual, method`, pretty-printed with a trailing newline.
pub fn report_json(r: &LogDetReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(r)?;
    s.push('\n');
    Ok(s)
}

pub fn write_report_json(r: &LogDetReport, path: &Path) -> Result<()> {
    fs::write(path, report_json(r)?).map_err(|e| Error::path(path, e))
}

pub fn parse_report_json(s: &str) -> Result<LogDetReport> {
    Ok(serde_json::from_str(s)?)
}

/// CSV with header `n,N,closed_form_ns,oracle_ns,log_det_primal,oracle_log_det,abs_diff`;
/// oracle columns are empty when the oracle was skipped.
pub fn write_bench_csv<W: Write>(records: &[BenchRecord], w: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    for r in records {
        writer.serialize(r)?;
    }
    if records.is_empty() {
        writer.write_record(crate::bench::CSV_HEADER)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_bench_csv<R: Read>(r: R) -> Result<Vec<BenchRecord>> {
    let mut reader = csv::Reader::from_reader(r);
    let header: Vec<String> = reader.headers()?.iter().map(String::from).collect();
    if header != crate::bench::CSV_HEADER {
        return Err(mm_err(1, format!("unexpected CSV header {header:?}")));
    }
    reader.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// `u v` per line, 1-based, sorted.
pub fn edge_list_string(g: &Graph) -> String {
    let mut out = String::with_capacity(12 * g.edge_count());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{} {}", u + 1, v + 1);
    }
    out
}

pub fn export_edge_list(g: &Graph, path: &Path) -> Result<()> {
    fs::write(path, edge_list_string(g)).map_err(|e| Error::path(path, e))
}
