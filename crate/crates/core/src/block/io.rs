//! Block manifests: a plain-text index of one Matrix Market file per block.
//!
//! ```text
//! n=3
//! sizes=4,3,2
//! A 1 A1.mtx
//! B 1 B1t.mtx
//! C 1 C1.mtx
//! ```
//!
//! `B` files hold `B_iᵀ`. A missing `C_i` defaults to the transpose of the
//! `B_i` file. Paths are relative to the manifest's directory. The `sizes`
//! line is optional on input and always written on output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{BlockError, BlockTridiagonalSystem};
use crate::dense::DenseMatrix;
use crate::sparse::{read_matrix_market, write_matrix_market, CsrMatrix};

pub const MANIFEST_FILE: &str = "system.manifest";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    pub role: char,
    /// One-based block index.
    pub index: usize,
    pub path: PathBuf,
    /// Manifest line the entry came from (0 for entries not read from disk).
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    pub n: usize,
    pub sizes: Option<Vec<usize>>,
    pub entries: Vec<ManifestEntry>,
}

fn parse_err(line: usize, message: impl Into<String>) -> BlockError {
    BlockError::Parse {
        line,
        message: message.into(),
    }
}

pub fn read_manifest(path: &Path) -> Result<Manifest, BlockError> {
    let text = std::fs::read_to_string(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (ln, first) = lines.next().ok_or_else(|| parse_err(1, "empty manifest"))?;
    let n: usize = first
        .strip_prefix("n=")
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n| n >= 1)
        .ok_or_else(|| parse_err(ln, "first line must be `n=<count>`"))?;

    let mut sizes = None;
    let mut entries = Vec::new();
    for (ln, line) in lines {
        if let Some(rest) = line.strip_prefix("sizes=") {
            let s: Vec<usize> = rest
                .split(',')
                .map(|t| t.trim().parse())
                .collect::<Result<_, _>>()
                .map_err(|_| parse_err(ln, "sizes must be comma-separated integers"))?;
            if s.len() != n || s.contains(&0) {
                return Err(parse_err(ln, format!("expected {n} positive sizes")));
            }
            sizes = Some(s);
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(role), Some(idx), Some(file), None) = (it.next(), it.next(), it.next(), it.next())
        else {
            return Err(parse_err(ln, "entry must be `<role> <i> <path>`"));
        };
        let role = match role {
            "A" | "B" | "C" => role.chars().next().unwrap(),
            _ => return Err(parse_err(ln, format!("unknown role `{role}`"))),
        };
        let index: usize = idx
            .parse()
            .map_err(|_| parse_err(ln, format!("bad block index `{idx}`")))?;
        let limit = if role == 'A' { n } else { n - 1 };
        if index == 0 || index > limit {
            return Err(parse_err(ln, format!("{role} index {index} outside 1..={limit}")));
        }
        if entries
            .iter()
            .any(|e: &ManifestEntry| e.role == role && e.index == index)
        {
            return Err(parse_err(ln, format!("duplicate entry {role} {index}")));
        }
        entries.push(ManifestEntry {
            role,
            index,
            path: base.join(file),
            line: ln,
        });
    }
    Ok(Manifest { n, sizes, entries })
}

/// Writes every matrix to `dir` and a manifest listing them.
pub fn write_manifest(
    dir: &Path,
    n: usize,
    sizes: &[usize],
    blocks: &[(char, usize, &CsrMatrix)],
) -> Result<PathBuf, BlockError> {
    std::fs::create_dir_all(dir)?;
    let mut text = format!("n={n}\n");
    let sizes: Vec<String> = sizes.iter().map(ToString::to_string).collect();
    let _ = writeln!(text, "sizes={}", sizes.join(","));
    for &(role, i, m) in blocks {
        let file = match role {
            'B' => format!("B{i}t.mtx"),
            _ => format!("{role}{i}.mtx"),
        };
        write_matrix_market(m, &dir.join(&file))?;
        let _ = writeln!(text, "{role} {i} {file}");
    }
    let path = dir.join(MANIFEST_FILE);
    std::fs::write(&path, text)?;
    Ok(path)
}

/// Exports every block of `sys` into `dir`; returns the manifest path.
pub fn mm_export(sys: &BlockTridiagonalSystem, dir: &Path) -> Result<PathBuf, BlockError> {
    let n = sys.n();
    let mut owned = Vec::new();
    for i in 0..n {
        owned.push(('A', i + 1, CsrMatrix::from_dense(sys.diag(i))));
    }
    for i in 0..n - 1 {
        owned.push(('B', i + 1, CsrMatrix::from_dense(sys.upper(i))));
        owned.push(('C', i + 1, CsrMatrix::from_dense(sys.lower(i))));
    }
    let blocks: Vec<_> = owned.iter().map(|(r, i, m)| (*r, *i, m)).collect();
    write_manifest(dir, n, &sys.block_sizes(), &blocks)
}

pub fn mm_import(manifest: &Path) -> Result<BlockTridiagonalSystem, BlockError> {
    let man = read_manifest(manifest)?;
    let n = man.n;
    let find = |role: char, i: usize| man.entries.iter().find(|e| e.role == role && e.index == i);
    let load = |e: &ManifestEntry| -> Result<DenseMatrix, BlockError> {
        read_matrix_market(&e.path)
            .map(|m| m.to_dense())
            .map_err(|err| parse_err(e.line, format!("{}: {err}", e.path.display())))
    };

    let mut diag = Vec::with_capacity(n);
    for i in 1..=n {
        let e = find('A', i).ok_or_else(|| parse_err(0, format!("missing entry A {i}")))?;
        let a = load(e)?;
        if !a.is_square() {
            return Err(parse_err(e.line, format!("A {i} is not square")));
        }
        if let Some(s) = &man.sizes {
            if a.rows() != s[i - 1] {
                return Err(parse_err(
                    e.line,
                    format!("A {i} has size {}, manifest says {}", a.rows(), s[i - 1]),
                ));
            }
        }
        diag.push(a);
    }
    let mut upper = Vec::with_capacity(n.saturating_sub(1));
    let mut lower = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..n {
        let want = (diag[i - 1].rows(), diag[i].rows());
        let eb = find('B', i).ok_or_else(|| parse_err(0, format!("missing entry B {i}")))?;
        let bt = load(eb)?;
        if bt.shape() != want {
            return Err(parse_err(
                eb.line,
                format!("B {i} is {:?}, expected {:?}", bt.shape(), want),
            ));
        }
        let c = match find('C', i) {
            Some(ec) => {
                let c = load(ec)?;
                if c.shape() != (want.1, want.0) {
                    return Err(parse_err(
                        ec.line,
                        format!("C {i} is {:?}, expected {:?}", c.shape(), (want.1, want.0)),
                    ));
                }
                c
            }
            None => bt.transpose(),
        };
        upper.push(bt);
        lower.push(c);
    }
    BlockTridiagonalSystem::new(diag, upper, lower)
}
