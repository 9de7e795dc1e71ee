use super::SparseError;
use crate::dense::DenseMatrix;

/// Compressed sparse row matrix.
///
/// Column indices are strictly increasing within each row and no explicit
/// zeros are stored.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            row_offsets: vec![0; rows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Assembles from `(row, col, value)` triplets. Duplicates are summed and
    /// entries that end up exactly zero are dropped.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self, SparseError> {
        let mut counts = vec![0usize; rows + 1];
        for &(i, j, v) in triplets {
            if i >= rows || j >= cols {
                return Err(SparseError::IndexOutOfRange {
                    row: i,
                    col: j,
                    rows,
                    cols,
                });
            }
            if !v.is_finite() {
                return Err(SparseError::NonFinite { row: i, col: j });
            }
            counts[i + 1] += 1;
        }
        for i in 0..rows {
            counts[i + 1] += counts[i];
        }
        // bucket by row, keeping insertion order for deterministic summation
        let mut next = counts.clone();
        let mut bucket = vec![(0usize, 0.0f64); triplets.len()];
        for &(i, j, v) in triplets {
            bucket[next[i]] = (j, v);
            next[i] += 1;
        }

        let mut row_offsets = Vec::with_capacity(rows + 1);
        let mut col_indices = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_offsets.push(0);
        for i in 0..rows {
            let row = &mut bucket[counts[i]..counts[i + 1]];
            row.sort_by_key(|&(j, _)| j);
            let mut k = 0;
            while k < row.len() {
                let j = row[k].0;
                let mut sum = 0.0;
                while k < row.len() && row[k].0 == j {
                    sum += row[k].1;
                    k += 1;
                }
                if sum != 0.0 {
                    col_indices.push(j);
                    values.push(sum);
                }
            }
            row_offsets.push(col_indices.len());
        }
        Ok(Self {
            rows,
            cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Builds from raw CSR arrays, validating every structural invariant.
    pub fn from_raw(
        rows: usize,
        cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self, SparseError> {
        let bad = |what: &str| Err(SparseError::Structure(what.to_string()));
        if row_offsets.len() != rows + 1 || row_offsets[0] != 0 {
            return bad("row_offsets must have length rows+1 and start at 0");
        }
        if *row_offsets.last().unwrap() != col_indices.len() || col_indices.len() != values.len() {
            return bad("last row offset must equal nnz");
        }
        for i in 0..rows {
            if row_offsets[i] > row_offsets[i + 1] {
                return bad("row_offsets must be nondecreasing");
            }
            let cols_i = &col_indices[row_offsets[i]..row_offsets[i + 1]];
            if cols_i.windows(2).any(|w| w[0] >= w[1]) || cols_i.iter().any(|&j| j >= cols) {
                return bad("column indices must be strictly increasing and in range");
            }
        }
        if values.iter().any(|&v| v == 0.0 || !v.is_finite()) {
            return bad("stored values must be finite and nonzero");
        }
        Ok(Self {
            rows,
            cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn from_dense(a: &DenseMatrix) -> Self {
        let mut triplets = Vec::new();
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                if a[(i, j)] != 0.0 {
                    triplets.push((i, j, a[(i, j)]));
                }
            }
        }
        Self::from_triplets(a.rows(), a.cols(), &triplets).expect("indices in range")
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.iter() {
            d[(i, j)] = v;
        }
        d
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[s..e], &self.values[s..e])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |k| vals[k])
    }

    /// Iterates stored entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.cols + 1];
        for &j in &self.col_indices {
            counts[j + 1] += 1;
        }
        for j in 0..self.cols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut col_indices = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for (i, j, v) in self.iter() {
            col_indices[next[j]] = i;
            values[next[j]] = v;
            next[j] += 1;
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            row_offsets: counts,
            col_indices,
            values,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        if s == 0.0 {
            return Self::zeros(self.rows, self.cols);
        }
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// `alpha * self + beta * other`.
    pub fn linear_combination(
        &self,
        alpha: f64,
        other: &CsrMatrix,
        beta: f64,
    ) -> Result<Self, SparseError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(SparseError::DimensionMismatch {
                expected: self.rows,
                found: other.rows,
            });
        }
        let triplets: Vec<_> = self
            .iter()
            .map(|(i, j, v)| (i, j, alpha * v))
            .chain(other.iter().map(|(i, j, v)| (i, j, beta * v)))
            .collect();
        Self::from_triplets(self.rows, self.cols, &triplets)
    }

    /// Keeps the rows and columns listed in `keep_rows` / `keep_cols`, in
    /// that order.
    pub fn select(&self, keep_rows: &[usize], keep_cols: &[usize]) -> Self {
        let mut col_map = vec![usize::MAX; self.cols];
        for (new, &old) in keep_cols.iter().enumerate() {
            col_map[old] = new;
        }
        let mut triplets = Vec::new();
        for (new_i, &old_i) in keep_rows.iter().enumerate() {
            let (cols, vals) = self.row(old_i);
            for (&j, &v) in cols.iter().zip(vals) {
                if col_map[j] != usize::MAX {
                    triplets.push((new_i, col_map[j], v));
                }
            }
        }
        Self::from_triplets(keep_rows.len(), keep_cols.len(), &triplets).expect("in range")
    }

    /// Largest entrywise asymmetry `max |a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let t = self.transpose();
        self.linear_combination(1.0, &t, -1.0)
            .map(|d| d.values.iter().fold(0.0f64, |m, v| m.max(v.abs())))
            .unwrap_or(f64::INFINITY)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Sparse matrix-vector product into a caller buffer.
    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        for (i, yi) in y.iter_mut().enumerate() {
            let (s, e) = (self.row_offsets[i], self.row_offsets[i + 1]);
            let mut acc = 0.0;
            for k in s..e {
                acc += self.values[k] * x[self.col_indices[k]];
            }
            *yi = acc;
        }
    }
}

/// `y = A x`, rows processed in order.
pub fn spmv(a: &CsrMatrix, x: &[f64]) -> Result<Vec<f64>, SparseError> {
    if x.len() != a.cols {
        return Err(SparseError::DimensionMismatch {
            expected: a.cols,
            found: x.len(),
        });
    }
    let mut y = vec![0.0; a.rows];
    a.spmv_into(x, &mut y);
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn duplicates_are_summed() {
        let a = CsrMatrix::from_triplets(1, 1, &[(0, 0, 1.0), (0, 0, 1.0)]).unwrap();
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.get(0, 0), 2.0);
    }

    #[test]
    fn cancelling_entries_are_dropped() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 1, 1.5), (0, 1, -1.5), (1, 0, 3.0)]).unwrap();
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.row_offsets(), &[0, 0, 1]);
    }

    #[test]
    fn empty_triplets_give_zero_matrix() {
        let a = CsrMatrix::from_triplets(3, 4, &[]).unwrap();
        assert_eq!(a.nnz(), 0);
        assert_eq!(a.row_offsets(), &[0, 0, 0, 0]);
    }

    #[test]
    fn tridiagonal_row_offsets() {
        let mut t = Vec::new();
        for i in 0..3usize {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            if i < 2 {
                t.push((i, i + 1, -1.0));
            }
        }
        let a = CsrMatrix::from_triplets(3, 3, &t).unwrap();
        assert_eq!(a.row_offsets(), &[0, 2, 5, 7]);
        assert_eq!(a.col_indices(), &[0, 1, 0, 1, 2, 1, 2]);
    }

    #[test]
    fn out_of_range_is_rejected() {
        let err = CsrMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]).unwrap_err();
        assert!(matches!(err, SparseError::IndexOutOfRange { row: 2, .. }));
    }

    #[test]
    fn raw_arrays_are_validated() {
        assert!(CsrMatrix::from_raw(2, 2, vec![0, 1, 2], vec![0, 1], vec![1.0, 2.0]).is_ok());
        assert!(CsrMatrix::from_raw(2, 2, vec![0, 2, 1], vec![0, 1], vec![1.0, 2.0]).is_err());
        assert!(CsrMatrix::from_raw(1, 2, vec![0, 2], vec![1, 0], vec![1.0, 2.0]).is_err());
        assert!(CsrMatrix::from_raw(1, 2, vec![0, 1], vec![0], vec![0.0]).is_err());
    }

    #[test]
    fn identity_and_zero_products() {
        let x = vec![1.0, -2.0, 3.5];
        assert_eq!(spmv(&CsrMatrix::identity(3), &x).unwrap(), x);
        assert_eq!(spmv(&CsrMatrix::zeros(3, 3), &x).unwrap(), vec![0.0; 3]);
        assert!(spmv(&CsrMatrix::identity(2), &x).is_err());
    }

    fn random_sparse(n: usize, m: usize, seed: u64) -> CsrMatrix {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let t: Vec<_> = (0..4 * n)
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..m), rng.gen_range(-1.0..1.0)))
            .collect();
        CsrMatrix::from_triplets(n, m, &t).unwrap()
    }

    #[test]
    fn spmv_matches_dense_oracle() {
        for seed in 0..10 {
            let n = 20 + 18 * seed as usize;
            let a = random_sparse(n, n, seed);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed + 100);
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y = spmv(&a, &x).unwrap();
            let dense = a.to_dense();
            let oracle: Vec<f64> = (0..n)
                .map(|i| (0..n).map(|j| dense[(i, j)] * x[j]).sum())
                .collect();
            let scale = oracle.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for (p, q) in y.iter().zip(&oracle) {
                assert!((p - q).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn transpose_and_select() {
        let a = random_sparse(7, 5, 3);
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.transpose().to_dense(), a.to_dense().transpose());
        let s = a.select(&[4, 1], &[0, 3]);
        assert_eq!(s.get(0, 1), a.get(4, 3));
        assert_eq!(s.get(1, 0), a.get(1, 0));
    }
}
