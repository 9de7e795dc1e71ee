//! Matrix Market coordinate format (`real general` / `real symmetric`).

use std::fmt::Write as _;
use std::path::Path;

use super::{CsrMatrix, SparseError};

/// Serializes with 17 significant digits so stored values round-trip exactly.
pub fn write_matrix_market_string(a: &CsrMatrix) -> String {
    let mut out = String::with_capacity(32 * (a.nnz() + 2));
    out.push_str("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(out, "{} {} {}", a.rows(), a.cols(), a.nnz());
    for (i, j, v) in a.iter() {
        let _ = writeln!(out, "{} {} {:.16e}", i + 1, j + 1, v);
    }
    out
}

pub fn write_matrix_market(a: &CsrMatrix, path: &Path) -> Result<(), SparseError> {
    std::fs::write(path, write_matrix_market_string(a))?;
    Ok(())
}

pub fn read_matrix_market(path: &Path) -> Result<CsrMatrix, SparseError> {
    parse_matrix_market(&std::fs::read_to_string(path)?)
}

pub fn parse_matrix_market(text: &str) -> Result<CsrMatrix, SparseError> {
    let err = |line: usize, message: &str| SparseError::Parse {
        line,
        message: message.to_string(),
    };
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));

    let (ln, header) = lines.next().ok_or_else(|| err(1, "empty file"))?;
    let fields: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(err(ln, "expected a %%MatrixMarket matrix header"));
    }
    if fields[2] != "coordinate" {
        return Err(err(ln, "only coordinate format is supported"));
    }
    if fields[3] != "real" && fields[3] != "integer" {
        return Err(err(ln, "only real or integer fields are supported"));
    }
    let symmetric = match fields[4].as_str() {
        "general" => false,
        "symmetric" => true,
        _ => return Err(err(ln, "only general or symmetric storage is supported")),
    };

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (ln, size_line) = body.next().ok_or_else(|| err(ln + 1, "missing size line"))?;
    let dims: Vec<usize> = size_line
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| err(ln, "size line must hold three integers"))?;
    let [rows, cols, nnz] = dims[..] else {
        return Err(err(ln, "size line must hold three integers"));
    };

    let mut triplets = Vec::with_capacity(if symmetric { 2 * nnz } else { nnz });
    let mut last_line = ln;
    for (ln, line) in body {
        last_line = ln;
        let mut it = line.split_whitespace();
        let (Some(i), Some(j), Some(v), None) = (it.next(), it.next(), it.next(), it.next()) else {
            return Err(err(ln, "entry must be `row col value`"));
        };
        let i: usize = i.parse().map_err(|_| err(ln, "bad row index"))?;
        let j: usize = j.parse().map_err(|_| err(ln, "bad column index"))?;
        let v: f64 = v.parse().map_err(|_| err(ln, "bad value"))?;
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(err(ln, "index out of range"));
        }
        if !v.is_finite() {
            return Err(err(ln, "non-finite value"));
        }
        triplets.push((i - 1, j - 1, v));
        if symmetric && i != j {
            triplets.push((j - 1, i - 1, v));
        }
    }
    let expected = if symmetric {
        triplets.iter().filter(|(i, j, _)| i >= j).count()
    } else {
        triplets.len()
    };
    if expected != nnz {
        return Err(err(last_line, "entry count does not match the size line"));
    }
    CsrMatrix::from_triplets(rows, cols, &triplets)
}
