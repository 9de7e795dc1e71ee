use super::{CsrMatrix, SparseError};

/// Asymmetry (relative to the largest entry) above which `ichol` refuses the input.
pub const SYMMETRY_RTOL: f64 = 1e-12;
/// First relative diagonal shift tried after a breakdown.
pub const INITIAL_SHIFT: f64 = 1e-3;
pub const MAX_SHIFT_RESTARTS: usize = 20;

/// Incomplete Cholesky factor `L·Lᵀ ≈ A + shift·diag(A)`.
///
/// `L` is stored by rows with the diagonal as the last entry of each row.
#[derive(Clone, Debug)]
pub struct IcFactor {
    l: CsrMatrix,
    shift: f64,
    tau: f64,
}

impl IcFactor {
    pub fn lower(&self) -> &CsrMatrix {
        &self.l
    }

    /// Relative diagonal shift that was needed, 0 if the first attempt succeeded.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    pub fn nnz(&self) -> usize {
        self.l.nnz()
    }
}

/// Threshold incomplete Cholesky, left-looking by columns.
///
/// Entries in the pattern of `A` are always kept. A fill entry is dropped
/// when its value before division by the pivot satisfies
/// `|w_i| < tau·sqrt(a_ii·a_jj)`. `tau = 0` gives the complete factor.
pub fn ichol(a: &CsrMatrix, tau: f64) -> Result<IcFactor, SparseError> {
    if a.rows() != a.cols() {
        return Err(SparseError::DimensionMismatch {
            expected: a.rows(),
            found: a.cols(),
        });
    }
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(SparseError::InvalidTolerance(tau));
    }
    let asym = a.asymmetry();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    if asym > SYMMETRY_RTOL * scale {
        return Err(SparseError::NotSymmetric {
            asymmetry: asym / scale,
        });
    }
    let sym;
    let a = if asym > 0.0 {
        sym = a.linear_combination(0.5, &a.transpose(), 0.5)?;
        &sym
    } else {
        a
    };
    let diag = a.diagonal();
    if let Some(row) = diag.iter().position(|&d| d <= 0.0) {
        return Err(SparseError::NonPositiveDiagonal { row });
    }

    let mut shift = 0.0;
    for _ in 0..=MAX_SHIFT_RESTARTS {
        if let Some(l) = factor_once(a, &diag, tau, shift) {
            return Ok(IcFactor { l, shift, tau });
        }
        shift = if shift == 0.0 {
            INITIAL_SHIFT
        } else {
            2.0 * shift
        };
    }
    Err(SparseError::BreakdownUnrecoverable {
        restarts: MAX_SHIFT_RESTARTS,
    })
}

/// One attempt on `A + shift·diag(A)`. Returns `None` on a nonpositive pivot.
fn factor_once(a: &CsrMatrix, diag: &[f64], tau: f64, shift: f64) -> Option<CsrMatrix> {
    let n = a.rows();
    // columns of L, each sorted by row, diagonal first
    let mut cols: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    // next[k]: position in column k of the first entry not yet consumed
    let mut next = vec![0usize; n];
    // head[j]: columns k < j whose next entry lies in row j
    let mut head: Vec<Vec<usize>> = vec![Vec::new(); n];

    let mut w = vec![0.0f64; n];
    let mut in_pattern = vec![false; n];
    let mut occupied = vec![false; n];
    let mut touched: Vec<usize> = Vec::new();

    // lower triangle of A is read column-wise through the upper triangle by rows
    for j in 0..n {
        let (idx, vals) = a.row(j);
        for (&i, &v) in idx.iter().zip(vals) {
            if i < j {
                continue;
            }
            w[i] = if i == j { v + shift * v } else { v };
            in_pattern[i] = true;
            occupied[i] = true;
            touched.push(i);
        }
        if !occupied[j] {
            occupied[j] = true;
            touched.push(j);
        }

        for k in std::mem::take(&mut head[j]) {
            let col = &cols[k];
            let pos = next[k];
            let ljk = col[pos].1;
            for &(i, lik) in &col[pos..] {
                if !occupied[i] {
                    occupied[i] = true;
                    w[i] = 0.0;
                    touched.push(i);
                }
                w[i] -= lik * ljk;
            }
            next[k] = pos + 1;
            if let Some(&(r, _)) = col.get(pos + 1) {
                head[r].push(k);
            }
        }

        let pivot = w[j];
        if !(pivot > 0.0 && pivot.is_finite()) {
            return None;
        }
        let ljj = pivot.sqrt();
        touched.sort_unstable();
        let mut col = Vec::with_capacity(touched.len());
        col.push((j, ljj));
        for &i in &touched {
            if i == j {
                continue;
            }
            let wi = w[i];
            let keep = in_pattern[i] || wi.abs() >= tau * (diag[i] * diag[j]).sqrt();
            if keep && wi != 0.0 {
                col.push((i, wi / ljj));
            }
        }
        for &i in &touched {
            w[i] = 0.0;
            in_pattern[i] = false;
            occupied[i] = false;
        }
        touched.clear();

        next[j] = 1;
        if let Some(&(r, _)) = col.get(1) {
            head[r].push(j);
        }
        cols.push(col);
    }

    // transpose the column store into rows: diagonal ends up last in each row
    let mut counts = vec![0usize; n + 1];
    for col in &cols {
        for &(i, _) in col {
            counts[i + 1] += 1;
        }
    }
    for i in 0..n {
        counts[i + 1] += counts[i];
    }
    let nnz = counts[n];
    let mut fill = counts.clone();
    let mut col_indices = vec![0usize; nnz];
    let mut values = vec![0.0f64; nnz];
    for (j, col) in cols.iter().enumerate() {
        for &(i, v) in col {
            col_indices[fill[i]] = j;
            values[fill[i]] = v;
            fill[i] += 1;
        }
    }
    CsrMatrix::from_raw(n, n, counts, col_indices, values).ok()
}

/// Solves `L·Lᵀ·x = b`.
pub fn ic_solve(f: &IcFactor, b: &[f64]) -> Result<Vec<f64>, SparseError> {
    let mut x = b.to_vec();
    ic_solve_in_place(f, &mut x)?;
    Ok(x)
}

pub fn ic_solve_in_place(f: &IcFactor, x: &mut [f64]) -> Result<(), SparseError> {
    let l = &f.l;
    let n = l.rows();
    if x.len() != n {
        return Err(SparseError::DimensionMismatch {
            expected: n,
            found: x.len(),
        });
    }
    for i in 0..n {
        let (idx, vals) = l.row(i);
        let last = idx.len() - 1;
        let mut s = x[i];
        for k in 0..last {
            s -= vals[k] * x[idx[k]];
        }
        x[i] = s / vals[last];
    }
    for i in (0..n).rev() {
        let (idx, vals) = l.row(i);
        let last = idx.len() - 1;
        let xi = x[i] / vals[last];
        x[i] = xi;
        for k in 0..last {
            x[idx[k]] -= vals[k] * xi;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::spmv;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn laplacian_2d(m: usize) -> CsrMatrix {
        let id = |i: usize, j: usize| i * m + j;
        let mut t = Vec::new();
        for i in 0..m {
            for j in 0..m {
                t.push((id(i, j), id(i, j), 4.0));
                if i > 0 {
                    t.push((id(i, j), id(i - 1, j), -1.0));
                }
                if i + 1 < m {
                    t.push((id(i, j), id(i + 1, j), -1.0));
                }
                if j > 0 {
                    t.push((id(i, j), id(i, j - 1), -1.0));
                }
                if j + 1 < m {
                    t.push((id(i, j), id(i, j + 1), -1.0));
                }
            }
        }
        CsrMatrix::from_triplets(m * m, m * m, &t).unwrap()
    }

    fn banded_spd(n: usize, bw: usize, seed: u64) -> CsrMatrix {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 * bw as f64 + 1.0));
            for d in 1..=bw {
                if i + d < n {
                    let v = rng.gen_range(-1.0..1.0);
                    t.push((i, i + d, v));
                    t.push((i + d, i, v));
                }
            }
        }
        CsrMatrix::from_triplets(n, n, &t).unwrap()
    }

    fn llt_defect(f: &IcFactor, a: &CsrMatrix) -> f64 {
        let l = f.lower().to_dense();
        let llt = l.mat_mul(&l.transpose()).unwrap();
        llt.sub(&a.to_dense()).unwrap().frobenius_norm()
    }

    fn norm(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn diagonal_matrix_has_diagonal_factor() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 4.0), (1, 1, 9.0)]).unwrap();
        for tau in [0.0, 1e-3, 0.5] {
            let f = ichol(&a, tau).unwrap();
            assert_eq!(f.lower().to_dense().as_slice(), &[2.0, 0.0, 0.0, 3.0]);
            assert_eq!(f.shift(), 0.0);
        }
    }

    #[test]
    fn zero_tolerance_is_complete_cholesky() {
        let a = banded_spd(5, 2, 7);
        let f = ichol(&a, 0.0).unwrap();
        assert!(llt_defect(&f, &a) < 1e-12);
    }

    #[test]
    fn laplacian_fill_lies_between_pattern_and_full() {
        let a = laplacian_2d(16);
        let tril = a.iter().filter(|&(i, j, _)| j <= i).count();
        let full = ichol(&a, 0.0).unwrap().nnz();
        let partial = ichol(&a, 1e-3).unwrap().nnz();
        assert!(tril < partial && partial < full, "{tril} < {partial} < {full}");
    }

    #[test]
    fn identity_factor_returns_rhs() {
        let f = ichol(&CsrMatrix::identity(4), 0.1).unwrap();
        let b = vec![1.0, -2.0, 0.5, 3.0];
        assert_eq!(ic_solve(&f, &b).unwrap(), b);
    }

    #[test]
    fn complete_factor_solves_exactly() {
        let a = banded_spd(40, 3, 11);
        let f = ichol(&a, 0.0).unwrap();
        let b: Vec<f64> = (0..40).map(|i| (i as f64).sin()).collect();
        let x = ic_solve(&f, &b).unwrap();
        let r: Vec<f64> = spmv(&a, &x).unwrap().iter().zip(&b).map(|(p, q)| p - q).collect();
        assert!(norm(&r) / norm(&b) < 1e-10);
    }

    #[test]
    fn incomplete_factor_reduces_residual() {
        let a = laplacian_2d(16);
        let f = ichol(&a, 1e-3).unwrap();
        let b = vec![1.0; a.rows()];
        // the scaled rhs b/4 is the Jacobi guess; IC should beat it
        let jacobi: Vec<f64> = b.iter().map(|v| v / 4.0).collect();
        let res = |x: &[f64]| {
            let ax = spmv(&a, x).unwrap();
            norm(&ax.iter().zip(&b).map(|(p, q)| p - q).collect::<Vec<_>>())
        };
        let x = ic_solve(&f, &b).unwrap();
        assert!(res(&x) < res(&jacobi));
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 1, 2.0)]).unwrap();
        assert!(matches!(ichol(&a, 0.0), Err(SparseError::NotSymmetric { .. })));
    }

    #[test]
    fn indefinite_input_gets_a_shift() {
        // symmetric with positive diagonal but indefinite
        let a = CsrMatrix::from_triplets(
            2,
            2,
            &[(0, 0, 1.0), (0, 1, 1.01), (1, 0, 1.01), (1, 1, 1.0)],
        )
        .unwrap();
        let f = ichol(&a, 0.0).unwrap();
        assert!(f.shift() > 0.0);
        let shifted = a.linear_combination(1.0, &CsrMatrix::identity(2), f.shift()).unwrap();
        assert!(llt_defect(&f, &shifted) < 1e-12);
    }

    #[test]
    fn fill_is_monotone_in_tolerance() {
        let a = laplacian_2d(12);
        let nnz: Vec<usize> = [0.0, 1e-4, 1e-3, 1e-2]
            .iter()
            .map(|&t| ichol(&a, t).unwrap().nnz())
            .collect();
        assert!(nnz.windows(2).all(|w| w[0] >= w[1]), "{nnz:?}");
    }

    proptest! {
        #[test]
        fn complete_factor_reproduces_spd_matrix(n in 2usize..40, bw in 1usize..5, seed in any::<u64>()) {
            let a = banded_spd(n, bw, seed);
            let f = ichol(&a, 0.0).unwrap();
            prop_assert_eq!(f.shift(), 0.0);
            prop_assert!(llt_defect(&f, &a) <= 1e-10 * a.to_dense().frobenius_norm());
        }
    }
}
