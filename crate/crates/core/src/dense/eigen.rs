//! Eigenvalues of real nonsymmetric matrices.
//!
//! The matrix is balanced, reduced to upper Hessenberg form with Householder
//! reflections, and then driven to quasi-triangular form by the implicit
//! Francis double-shift QR iteration. Only eigenvalues are computed.

use super::{ComplexScalar, DenseError, DenseMatrix};

/// Subdiagonal entries below this fraction of the adjacent diagonal
/// magnitudes are treated as zero.
pub const DEFLATION_RTOL: f64 = 1e-13;

/// Largest matrix the eigensolver accepts.
pub const MAX_EIGEN_DIM: usize = 2000;

/// All eigenvalues of a real square matrix, complex pairs conjugate-ordered
/// (positive imaginary part first).
pub fn eigenvalues(a: &DenseMatrix) -> Result<Vec<ComplexScalar>, DenseError> {
    if !a.is_square() {
        return Err(DenseError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if a.rows() > MAX_EIGEN_DIM {
        return Err(DenseError::TooLarge {
            dim: a.rows(),
            max: MAX_EIGEN_DIM,
        });
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = a.clone();
    balance(&mut h);
    hessenberg_in_place(&mut h);
    hessenberg_qr(&mut h)
}

/// Parlett–Reinsch diagonal scaling by powers of two. A similarity
/// transform, so the spectrum is unchanged and no rounding is introduced.
fn balance(a: &mut DenseMatrix) {
    const RADIX: f64 = 2.0;
    let n = a.rows();
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut g = r / RADIX;
            let mut f = 1.0;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= g;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form (entries below the first
/// subdiagonal are zeroed explicitly).
pub fn hessenberg(a: &DenseMatrix) -> Result<DenseMatrix, DenseError> {
    if !a.is_square() {
        return Err(DenseError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let mut h = a.clone();
    hessenberg_in_place(&mut h);
    Ok(h)
}

fn hessenberg_in_place(h: &mut DenseMatrix) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    let mut v = vec![0.0; n];
    for k in 0..n - 2 {
        let scale: f64 = ((k + 1)..n).map(|i| h[(i, k)].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut sigma = 0.0;
        for i in (k + 1)..n {
            v[i] = h[(i, k)] / scale;
            sigma += v[i] * v[i];
        }
        let mut g = sigma.sqrt();
        if v[k + 1] > 0.0 {
            g = -g;
        }
        // v <- x - g e1, reflector I - v v^T / beta
        let beta = sigma - v[k + 1] * g;
        v[k + 1] -= g;

        for j in k..n {
            let mut f = 0.0;
            for i in (k + 1)..n {
                f += v[i] * h[(i, j)];
            }
            f /= beta;
            for i in (k + 1)..n {
                h[(i, j)] -= f * v[i];
            }
        }
        for i in 0..n {
            let mut f = 0.0;
            for j in (k + 1)..n {
                f += v[j] * h[(i, j)];
            }
            f /= beta;
            for j in (k + 1)..n {
                h[(i, j)] -= f * v[j];
            }
        }
        h[(k + 1, k)] = scale * g;
        for i in (k + 2)..n {
            h[(i, k)] = 0.0;
        }
    }
}

fn sign_of(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix, eigenvalues only.
fn hessenberg_qr(a: &mut DenseMatrix) -> Result<Vec<ComplexScalar>, DenseError> {
    let n = a.rows();
    let max_sweeps = 60 * n;
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];

    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }

    let mut nn = n as isize - 1;
    let mut shift_acc = 0.0;
    while nn >= 0 {
        let mut its = 0usize;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l >= 1 {
                let mut s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[(l, l - 1)].abs() <= DEFLATION_RTOL * s {
                    a[(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[(nu, nu)];
            if l == nu {
                wr[nu] = x + shift_acc;
                wi[nu] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[(nu - 1, nu - 1)];
            let mut w = a[(nu, nu - 1)] * a[(nu - 1, nu)];
            if l + 1 == nu {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += shift_acc;
                if q >= 0.0 {
                    z = p + sign_of(z, p);
                    wr[nu - 1] = x + z;
                    wr[nu] = if z != 0.0 { x - w / z } else { x + z };
                    wi[nu - 1] = 0.0;
                    wi[nu] = 0.0;
                } else {
                    wr[nu - 1] = x + p;
                    wr[nu] = x + p;
                    wi[nu - 1] = z;
                    wi[nu] = -z;
                }
                nn -= 2;
                break;
            }

            if its >= max_sweeps {
                return Err(DenseError::NoConvergence { sweeps: its });
            }
            if its == 10 || its == 20 {
                // exceptional shift
                shift_acc += x;
                for i in 0..=nu {
                    a[(i, i)] -= x;
                }
                let s = a[(nu, nu - 1)].abs() + a[(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;

            let mut m = nu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[(m, m)];
                let r0 = x - z;
                let s0 = y - z;
                p = (r0 * s0 - w) / a[(m + 1, m)] + a[(m, m + 1)];
                q = a[(m + 1, m + 1)] - z - r0 - s0;
                r = a[(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
                if u <= f64::EPSILON * v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nu {
                a[(i, i - 2)] = 0.0;
                if i != m + 2 {
                    a[(i, i - 3)] = 0.0;
                }
            }

            let mut k = m;
            while k < nu {
                let notlast = k + 1 != nu;
                if k != m {
                    p = a[(k, k - 1)];
                    q = a[(k + 1, k - 1)];
                    r = if notlast { a[(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign_of((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[(k, k - 1)] = -a[(k, k - 1)];
                        }
                    } else {
                        a[(k, k - 1)] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = a[(k, j)] + q * a[(k + 1, j)];
                        if notlast {
                            pp += r * a[(k + 2, j)];
                            a[(k + 2, j)] -= pp * z;
                        }
                        a[(k + 1, j)] -= pp * y;
                        a[(k, j)] -= pp * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = x * a[(i, k)] + y * a[(i, k + 1)];
                        if notlast {
                            pp += z * a[(i, k + 2)];
                            a[(i, k + 2)] -= pp * r;
                        }
                        a[(i, k + 1)] -= pp * q;
                        a[(i, k)] -= pp;
                    }
                }
                k += 1;
            }
        }
    }

    Ok(wr
        .into_iter()
        .zip(wi)
        .map(|(re, im)| ComplexScalar::new(re, im))
        .collect())
}

/// Evaluates `c0 I + c1 T + ... + cd T^d` by Horner's rule.
pub fn mat_poly_eval(coeffs: &[f64], t: &DenseMatrix) -> Result<DenseMatrix, DenseError> {
    if !t.is_square() {
        return Err(DenseError::NotSquare {
            rows: t.rows(),
            cols: t.cols(),
        });
    }
    let Some((&lead, rest)) = coeffs.split_last() else {
        return Err(DenseError::DimensionMismatch {
            op: "mat_poly_eval",
            left: t.shape(),
            right: (0, 0),
        });
    };
    let n = t.rows();
    let mut acc = DenseMatrix::identity(n).scale(lead);
    for &c in rest.iter().rev() {
        acc = acc.mat_mul(t)?;
        for i in 0..n {
            acc[(i, i)] += c;
        }
    }
    Ok(acc)
}

/// Roots of the polynomial with ascending coefficients `coeffs`, computed as
/// companion-matrix eigenvalues and then polished with guarded Newton steps.
pub fn poly_roots(coeffs: &[f64]) -> Result<Vec<ComplexScalar>, DenseError> {
    let degree = coeffs.len().saturating_sub(1);
    match coeffs.last() {
        Some(&lead) if lead != 0.0 && degree >= 1 => {
            let mut companion = DenseMatrix::zeros(degree, degree);
            for j in 0..degree {
                companion[(0, j)] = -coeffs[degree - 1 - j] / lead;
            }
            for i in 1..degree {
                companion[(i, i - 1)] = 1.0;
            }
            let roots = eigenvalues(&companion)?;
            Ok(roots.into_iter().map(|z| polish_root(coeffs, z)).collect())
        }
        _ => Err(DenseError::ZeroLeadingCoefficient),
    }
}

fn eval_with_derivative(coeffs: &[f64], z: ComplexScalar) -> (ComplexScalar, ComplexScalar) {
    let mut p = ComplexScalar::new(0.0, 0.0);
    let mut dp = ComplexScalar::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn polish_root(coeffs: &[f64], mut z: ComplexScalar) -> ComplexScalar {
    let real_input = z.im == 0.0;
    for _ in 0..4 {
        let (p, dp) = eval_with_derivative(coeffs, z);
        if p.norm() == 0.0 || dp.norm() == 0.0 {
            break;
        }
        let cand = z - p / dp;
        let (pc, _) = eval_with_derivative(coeffs, cand);
        if !(pc.norm() < p.norm()) {
            break;
        }
        z = cand;
    }
    if real_input {
        z.im = 0.0;
    }
    z
}

/// Ratio of largest to smallest eigenvalue modulus.
pub fn spectral_condition(eigs: &[ComplexScalar]) -> Result<f64, DenseError> {
    let (lo, hi) = eigs
        .iter()
        .map(|z| z.norm())
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), m| (lo.min(m), hi.max(m)));
    if eigs.is_empty() || lo == 0.0 {
        return Err(DenseError::ZeroEigenvalue);
    }
    Ok(hi / lo)
}
