use std::time::Instant;

use super::{KrylovError, LinearOperator};
use crate::schur::Preconditioner;

/// Relative size of `h_{j+1,j}` below which the Arnoldi vector counts as zero.
pub const BREAKDOWN_RTOL: f64 = 1e-14;
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    /// Preconditioned relative residual after each step, starting with 1.
    pub history: Vec<f64>,
    pub converged: bool,
    pub seconds: f64,
}

impl SolveStats {
    pub fn final_residual(&self) -> f64 {
        *self.history.last().unwrap_or(&0.0)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn precondition(m: Option<&Preconditioner>, v: Vec<f64>) -> Result<Vec<f64>, KrylovError> {
    match m {
        Some(p) => Ok(p.apply(&v)?),
        None => Ok(v),
    }
}

/// Full left-preconditioned GMRES from a zero initial guess.
///
/// Stops once `‖M⁻¹(b − Ax)‖ / ‖M⁻¹b‖ ≤ tol` or after `maxit` steps; the
/// latter returns the current iterate with `converged = false`.
pub fn gmres(
    op: &dyn LinearOperator,
    precond: Option<&Preconditioner>,
    b: &[f64],
    tol: f64,
    maxit: usize,
) -> Result<(Vec<f64>, SolveStats), KrylovError> {
    let start = Instant::now();
    let n = op.dim();
    if !(tol > 0.0) {
        return Err(KrylovError::InvalidTolerance(tol));
    }
    if b.len() != n {
        return Err(KrylovError::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    if let Some(p) = precond {
        if p.dim() != n {
            return Err(KrylovError::DimensionMismatch {
                expected: n,
                found: p.dim(),
            });
        }
    }

    let r0 = precondition(precond, b.to_vec())?;
    let beta = norm(&r0);
    let mut stats = SolveStats {
        iterations: 0,
        history: vec![1.0],
        converged: false,
        seconds: 0.0,
    };
    if beta == 0.0 {
        stats.history = vec![0.0];
        stats.converged = true;
        stats.seconds = start.elapsed().as_secs_f64();
        return Ok((vec![0.0; n], stats));
    }

    let mut basis: Vec<Vec<f64>> = vec![r0.iter().map(|v| v / beta).collect()];
    // columns of the rotated Hessenberg matrix, i.e. R
    let mut r_cols: Vec<Vec<f64>> = Vec::new();
    let (mut cs, mut sn) = (Vec::<f64>::new(), Vec::<f64>::new());
    let mut g = vec![beta];
    let mut av = vec![0.0; n];

    for j in 0..maxit {
        op.apply(&basis[j], &mut av);
        let mut w = precondition(precond, av.clone())?;
        let w_norm0 = norm(&w);
        let mut h = Vec::with_capacity(j + 2);
        for v in &basis {
            let hij = dot(&w, v);
            w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= hij * vi);
            h.push(hij);
        }
        let h_next = norm(&w);
        h.push(h_next);

        for i in 0..j {
            let (a, b) = (h[i], h[i + 1]);
            h[i] = cs[i] * a + sn[i] * b;
            h[i + 1] = -sn[i] * a + cs[i] * b;
        }
        let r = h[j].hypot(h[j + 1]);
        let happy = h_next <= BREAKDOWN_RTOL * w_norm0.max(f64::MIN_POSITIVE);
        if r == 0.0 || (happy && h[j].abs() <= BREAKDOWN_RTOL * w_norm0) {
            return Err(KrylovError::Breakdown { iteration: j + 1 });
        }
        let (c, s) = (h[j] / r, h[j + 1] / r);
        cs.push(c);
        sn.push(s);
        h[j] = r;
        h.truncate(j + 1);
        r_cols.push(h);
        let gj = g[j];
        g[j] = c * gj;
        g.push(-s * gj);

        let rel = g[j + 1].abs() / beta;
        stats.history.push(rel);
        stats.iterations = j + 1;
        stats.converged = rel <= tol;
        if stats.converged || happy {
            break;
        }
        basis.push(w.iter().map(|v| v / h_next).collect());
    }

    // back substitution R y = g
    let k = stats.iterations;
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = g[i];
        for (l, yl) in y.iter().enumerate().skip(i + 1) {
            s -= r_cols[l][i] * yl;
        }
        y[i] = s / r_cols[i][i];
    }
    let mut x = vec![0.0; n];
    for (yi, v) in y.iter().zip(&basis) {
        x.iter_mut().zip(v).for_each(|(xi, vi)| *xi += yi * vi);
    }
    stats.seconds = start.elapsed().as_secs_f64();
    Ok((x, stats))
}
