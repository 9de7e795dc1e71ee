use super::{pbar_polynomials, Polynomial, SpectralError};

/// Routh table of a real polynomial, rows from `λ^k` down to `λ^0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RouthTable {
    pub rows: Vec<Vec<f64>>,
    pub first_column: Vec<f64>,
    pub sign_changes: usize,
}

/// Builds the table with `r_ij = -det[[r_{i-2,1}, r_{i-2,j+1}], [r_{i-1,1}, r_{i-1,j+1}]] / r_{i-1,1}`.
///
/// A vanishing first-column entry stops construction with an error rather
/// than an epsilon perturbation.
pub fn routh_table(p: &Polynomial) -> Result<RouthTable, SpectralError> {
    let k = p.degree();
    if k == 0 {
        return Err(SpectralError::DegreeTooLow);
    }
    let width = k / 2 + 1;
    let zero_tol = 1e-14 * p.coeffs().iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(k + 1);
    for start in [0usize, 1] {
        let row = (0..width)
            .map(|j| {
                let deg = k as isize - start as isize - 2 * j as isize;
                if deg >= 0 {
                    p.coeff(deg as usize)
                } else {
                    0.0
                }
            })
            .collect();
        rows.push(row);
    }
    for i in 2..=k {
        let (above, prev) = (&rows[i - 2], &rows[i - 1]);
        let pivot = prev[0];
        if pivot.abs() <= zero_tol {
            return Err(SpectralError::ZeroFirstColumnEntry { row: i - 1 });
        }
        let row = (0..width)
            .map(|j| {
                let a = above.get(j + 1).copied().unwrap_or(0.0);
                let b = prev.get(j + 1).copied().unwrap_or(0.0);
                -(above[0] * b - a * pivot) / pivot
            })
            .collect();
        rows.push(row);
    }
    let first_column: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    if let Some(row) = first_column.iter().position(|v| v.abs() <= zero_tol) {
        return Err(SpectralError::ZeroFirstColumnEntry { row });
    }
    let sign_changes = first_column
        .windows(2)
        .filter(|w| w[0].signum() != w[1].signum())
        .count();
    Ok(RouthTable {
        rows,
        first_column,
        sign_changes,
    })
}

/// Expected vs. actual values of the five key coefficients of `p̄_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientLaw {
    pub k: usize,
    /// `[a_k, a_{k-1}, a_{k-2}, a_{k-3}, a_0]`.
    pub expected: [f64; 5],
    pub actual: [f64; 5],
    pub holds: bool,
}

pub fn coefficient_law_check(k: usize) -> Result<CoefficientLaw, SpectralError> {
    if k < 3 {
        return Err(SpectralError::DegreeTooLow);
    }
    let p = pbar_polynomials(k).pop().expect("k >= 1");
    let kf = k as f64;
    let expected = [
        1.0,
        -1.0,
        kf - 1.0,
        -(kf - 2.0),
        if k % 2 == 0 { 1.0 } else { -1.0 },
    ];
    let actual = [
        p.coeff(k),
        p.coeff(k - 1),
        p.coeff(k - 2),
        p.coeff(k - 3),
        p.coeff(0),
    ];
    Ok(CoefficientLaw {
        k,
        expected,
        actual,
        holds: expected == actual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_pbar() {
        let t = routh_table(&Polynomial::linear(1.0)).unwrap();
        assert_eq!(t.first_column, vec![1.0, -1.0]);
        assert_eq!(t.sign_changes, 1);
    }

    #[test]
    fn cubic_pbar_by_hand() {
        // rows (1, 2), (-1, -1); r_21 = -(1*(-1) - 2*(-1))/(-1) = 1; r_31 = -((-1)*0 - (-1)*1)/1 = -1
        let p = pbar_polynomials(3).pop().unwrap();
        let t = routh_table(&p).unwrap();
        assert_eq!(t.first_column, vec![1.0, -1.0, 1.0, -1.0]);
        assert_eq!(t.sign_changes, 3);
    }

    #[test]
    fn stable_quadratic() {
        let p = Polynomial::new(vec![1.0, 1.0, 1.0]).unwrap();
        let t = routh_table(&p).unwrap();
        assert_eq!(t.first_column, vec![1.0, 1.0, 1.0]);
        assert_eq!(t.sign_changes, 0);
    }

    #[test]
    fn zero_first_column_is_rejected() {
        // λ³ + λ² + λ + 1 gives a zero row
        let p = Polynomial::new(vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            routh_table(&p),
            Err(SpectralError::ZeroFirstColumnEntry { .. })
        ));
        assert!(routh_table(&Polynomial::constant(2.0)).is_err());
    }

    #[test]
    fn pbar_tables_alternate() {
        for k in 1..=12 {
            let p = pbar_polynomials(k).pop().unwrap();
            let t = routh_table(&p).unwrap();
            assert_eq!(t.rows.len(), k + 1);
            assert_eq!(t.sign_changes, k, "k = {k}");
            for (i, v) in t.first_column.iter().enumerate() {
                let want = if i % 2 == 0 { 1.0 } else { -1.0 };
                assert_eq!(*v, want, "k = {k}, row {i}");
            }
        }
    }

    #[test]
    fn coefficient_law_examples() {
        let c3 = coefficient_law_check(3).unwrap();
        assert_eq!(c3.actual, [1.0, -1.0, 2.0, -1.0, -1.0]);
        assert!(c3.holds);
        let c4 = coefficient_law_check(4).unwrap();
        assert_eq!(c4.actual, [1.0, -1.0, 3.0, -2.0, 1.0]);
        assert!(c4.holds);
        assert!((3..=30).all(|k| coefficient_law_check(k).unwrap().holds));
        assert!(coefficient_law_check(2).is_err());
    }

    #[test]
    fn sign_changes_count_right_half_plane_roots() {
        // oracle: count roots with positive real part directly
        for k in 1..=10 {
            let p = pbar_polynomials(k).pop().unwrap();
            let rhp = p.roots().unwrap().iter().filter(|z| z.re > 0.0).count();
            assert_eq!(routh_table(&p).unwrap().sign_changes, rhp);
        }
    }
}
