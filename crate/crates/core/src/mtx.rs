//! MatrixMarket `coordinate real general` files and plain vector files.
//!
//! File indices are 1-based; in memory they are 0-based.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::{MatrixLike, SparseMatrix};

pub const HEADER: &str = "%%MatrixMarket matrix coordinate real general";

pub fn load_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_matrix_market(&text, path)
}

pub fn parse_matrix_market(text: &str, path: &Path) -> Result<SparseMatrix> {
    let err = |line: usize, message: String| Error::Parse { path: path.to_path_buf(), line, message };
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));

    let (_, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens != ["%%matrixmarket", "matrix", "coordinate", "real", "general"] {
        return Err(err(1, format!("expected header `{HEADER}`, found `{}`", header.trim())));
    }

    let mut size: Option<(usize, usize, usize)> = None;
    let mut entries = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (lineno, line) in lines {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(err(lineno, "size line must hold `rows cols nnz`".into()));
                }
                let parse = |s: &str| s.parse::<usize>().map_err(|_| err(lineno, format!("invalid count `{s}`")));
                size = Some((parse(fields[0])?, parse(fields[1])?, parse(fields[2])?));
            }
            Some((rows, cols, _)) => {
                if fields.len() != 3 {
                    return Err(err(lineno, "entry line must hold `row col value`".into()));
                }
                let i: usize =
                    fields[0].parse().map_err(|_| err(lineno, format!("invalid row index `{}`", fields[0])))?;
                let j: usize =
                    fields[1].parse().map_err(|_| err(lineno, format!("invalid column index `{}`", fields[1])))?;
                let v: f64 = fields[2].parse().map_err(|_| err(lineno, format!("invalid value `{}`", fields[2])))?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(err(lineno, format!("index ({i}, {j}) out of range for {rows}x{cols}")));
                }
                if !v.is_finite() {
                    return Err(err(lineno, format!("non-finite value `{}`", fields[2])));
                }
                if !seen.insert((i, j)) {
                    return Err(err(lineno, format!("duplicate entry ({i}, {j})")));
                }
                entries.push((i - 1, j - 1, v));
            }
        }
    }
    let (rows, cols, nnz) = size.ok_or_else(|| err(1, "missing size line".into()))?;
    if entries.len() != nnz {
        return Err(err(text.lines().count(), format!("size line declares {nnz} entries, found {}", entries.len())));
    }
    SparseMatrix::from_triplets(rows, cols, entries)
}

/// Canonical text form: entries sorted by `(row, col)`, values printed with
/// shortest round-trip precision.
pub fn to_matrix_market_string<M: MatrixLike>(m: &M) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    out.push_str(&format!("{} {} {}\n", m.rows(), m.cols(), m.nnz()));
    m.for_each_nonzero(|i, j, v| out.push_str(&format!("{} {} {:e}\n", i + 1, j + 1, v)));
    out
}

pub fn save_matrix_market<M: MatrixLike>(m: &M, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    w.write_all(to_matrix_market_string(m).as_bytes())?;
    w.flush()?;
    Ok(())
}

/// Reads one real per line; blank lines and `%`/`#` comments are skipped.
pub fn load_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') || t.starts_with('#') {
            continue;
        }
        let v: f64 = t.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: k + 1,
            message: format!("invalid real `{t}`"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: k + 1,
                message: format!("non-finite value `{t}`"),
            });
        }
        out.push(v);
    }
    Ok(out)
}

pub fn save_vector(v: &[f64], path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    for x in v {
        writeln!(w, "{x:e}")?;
    }
    w.flush()?;
    Ok(())
}
