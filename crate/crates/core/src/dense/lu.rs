use super::{DenseError, DenseMatrix};

/// Relative pivot threshold below which a matrix is declared singular.
pub const SINGULAR_PIVOT_RTOL: f64 = 1e-14;

/// LU factorization with partial pivoting, `P·A = L·U`.
///
/// `L` (unit lower) and `U` share one storage matrix; `perm[i]` is the row of
/// `A` that ended up in row `i`.
#[derive(Clone, Debug)]
pub struct LuFactors {
    lu: DenseMatrix,
    perm: Vec<usize>,
    sign: f64,
}

pub fn lu_factor(a: &DenseMatrix) -> Result<LuFactors, DenseError> {
    if !a.is_square() {
        return Err(DenseError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let threshold = SINGULAR_PIVOT_RTOL * a.inf_norm();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;

    for k in 0..n {
        let (piv, piv_abs) = (k..n)
            .map(|i| (i, lu[(i, k)].abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if piv_abs <= threshold || piv_abs == 0.0 {
            return Err(DenseError::Singular { column: k });
        }
        if piv != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = tmp;
            }
            perm.swap(k, piv);
            sign = -sign;
        }
        let pivot = lu[(k, k)];
        for i in (k + 1)..n {
            let l = lu[(i, k)] / pivot;
            lu[(i, k)] = l;
            if l == 0.0 {
                continue;
            }
            for j in (k + 1)..n {
                lu[(i, j)] -= l * lu[(k, j)];
            }
        }
    }
    Ok(LuFactors { lu, perm, sign })
}

/// Solves `A·X = B` for every column of `b`.
pub fn lu_solve(f: &LuFactors, b: &DenseMatrix) -> Result<DenseMatrix, DenseError> {
    if b.rows() != f.dim() {
        return Err(DenseError::DimensionMismatch {
            op: "lu_solve",
            left: f.lu.shape(),
            right: b.shape(),
        });
    }
    let mut x = DenseMatrix::zeros(b.rows(), b.cols());
    for j in 0..b.cols() {
        let col = f.solve_vec(&b.column(j))?;
        x.set_column(j, &col);
    }
    Ok(x)
}

impl LuFactors {
    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Sign of the row permutation (+1 or -1).
    pub fn permutation_sign(&self) -> f64 {
        self.sign
    }

    pub fn determinant(&self) -> f64 {
        (0..self.dim()).fold(self.sign, |d, i| d * self.lu[(i, i)])
    }

    /// Unit lower-triangular factor.
    pub fn l(&self) -> DenseMatrix {
        let n = self.dim();
        let mut l = DenseMatrix::identity(n);
        for i in 0..n {
            for j in 0..i {
                l[(i, j)] = self.lu[(i, j)];
            }
        }
        l
    }

    pub fn u(&self) -> DenseMatrix {
        let n = self.dim();
        let mut u = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                u[(i, j)] = self.lu[(i, j)];
            }
        }
        u
    }

    /// Applies the row permutation: returns `P·a`.
    pub fn permute_rows(&self, a: &DenseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(a.rows(), a.cols());
        for (i, &src) in self.perm.iter().enumerate() {
            for j in 0..a.cols() {
                out[(i, j)] = a[(src, j)];
            }
        }
        out
    }

    pub fn solve_vec(&self, b: &[f64]) -> Result<Vec<f64>, DenseError> {
        let n = self.dim();
        if b.len() != n {
            return Err(DenseError::DimensionMismatch {
                op: "lu_solve",
                left: self.lu.shape(),
                right: (b.len(), 1),
            });
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s = row[..i].iter().zip(&x[..i]).fold(0.0, |acc, (l, y)| acc + l * y);
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s = row[i + 1..]
                .iter()
                .zip(&x[i + 1..])
                .fold(0.0, |acc, (u, y)| acc + u * y);
            x[i] = (x[i] - s) / row[i];
        }
        Ok(x)
    }

    /// Explicit inverse, column by column.
    pub fn inverse(&self) -> DenseMatrix {
        let n = self.dim();
        lu_solve(self, &DenseMatrix::identity(n)).expect("square by construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn random_well_conditioned(n: usize, seed: u64) -> DenseMatrix {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = rng.gen_range(-1.0..1.0);
            }
            a[(i, i)] += n as f64;
        }
        a
    }

    fn reconstruction_error(a: &DenseMatrix) -> f64 {
        let f = lu_factor(a).unwrap();
        let pa = f.permute_rows(a);
        let lu = f.l().mat_mul(&f.u()).unwrap();
        pa.sub(&lu).unwrap().frobenius_norm() / a.frobenius_norm()
    }

    #[test]
    fn identity_has_trivial_factors() {
        let f = lu_factor(&DenseMatrix::identity(3)).unwrap();
        assert_eq!(f.l(), DenseMatrix::identity(3));
        assert_eq!(f.u(), DenseMatrix::identity(3));
        assert_eq!(f.permutation(), &[0, 1, 2]);
    }

    #[test]
    fn swap_matrix_needs_one_interchange() {
        let a = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let f = lu_factor(&a).unwrap();
        assert_eq!(f.u(), DenseMatrix::identity(2));
        assert_eq!(f.permutation(), &[1, 0]);
        assert_eq!(f.permutation_sign(), -1.0);
    }

    #[test]
    fn seeded_8x8_reconstructs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let data = (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = DenseMatrix::from_row_major(8, 8, data).unwrap();
        assert!(reconstruction_error(&a) < 1e-13);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(lu_factor(&a), Err(DenseError::Singular { column: 1 })));
        assert!(lu_factor(&DenseMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn solves_trivial_systems() {
        let b = DenseMatrix::from_rows(&[vec![3.0], vec![-1.0]]).unwrap();
        let f = lu_factor(&DenseMatrix::identity(2)).unwrap();
        assert_eq!(lu_solve(&f, &b).unwrap(), b);

        let d = DenseMatrix::from_diagonal(&[2.0, 4.0]);
        let rhs = DenseMatrix::from_rows(&[vec![2.0], vec![4.0]]).unwrap();
        let x = lu_solve(&lu_factor(&d).unwrap(), &rhs).unwrap();
        assert_eq!(x.column(0), vec![1.0, 1.0]);
    }

    #[test]
    fn matches_closed_form_2x2_inverse() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(22);
        for _ in 0..20 {
            let (a, b, c, d): (f64, f64, f64, f64) = (
                rng.gen_range(-1.0..1.0) + 2.0,
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0) + 2.0,
            );
            let (r0, r1): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let det = a * d - b * c;
            let oracle = [(d * r0 - b * r1) / det, (-c * r0 + a * r1) / det];
            let m = DenseMatrix::from_rows(&[vec![a, b], vec![c, d]]).unwrap();
            let x = lu_factor(&m).unwrap().solve_vec(&[r0, r1]).unwrap();
            assert!((x[0] - oracle[0]).abs() < 1e-13 && (x[1] - oracle[1]).abs() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn reconstruction_bound_holds(n in 2usize..50, seed in any::<u64>()) {
            let a = random_well_conditioned(n, seed);
            prop_assert!(reconstruction_error(&a) <= 1e-12);
        }

        #[test]
        fn residual_bound_holds(n in 2usize..30, seed in any::<u64>()) {
            let a = random_well_conditioned(n, seed);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let x = lu_factor(&a).unwrap().solve_vec(&b).unwrap();
            let ax = a.mat_vec(&x).unwrap();
            let res = ax.iter().zip(&b).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
            let xnorm = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            prop_assert!(res <= 1e-10 * a.inf_norm() * xnorm);
        }
    }
}
