use std::fmt;

use super::SpectralError;
use crate::dense::{poly_roots, ComplexScalar};
use crate::schur::Preset;

/// Real polynomial, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Trailing zero coefficients are trimmed; the zero polynomial is rejected.
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self, SpectralError> {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(SpectralError::ZeroPolynomial);
        }
        Ok(Self { coeffs })
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c]).expect("nonzero constant")
    }

    /// `λ - root`.
    pub fn linear(root: f64) -> Self {
        Self {
            coeffs: vec![-root, 1.0],
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `λ^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn monic(&self) -> Self {
        let lead = self.leading();
        Self {
            coeffs: self.coeffs.iter().map(|c| c / lead).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial { coeffs: out }
    }

    /// `self + s·other`; the result may not be the zero polynomial.
    pub fn add_scaled(&self, other: &Polynomial, s: f64) -> Result<Polynomial, SpectralError> {
        let n = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + s * other.coeff(k)).collect())
    }

    /// `λ·self`.
    pub fn shift(&self) -> Polynomial {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(0.0);
        coeffs.extend_from_slice(&self.coeffs);
        Polynomial { coeffs }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: ComplexScalar) -> ComplexScalar {
        self.coeffs
            .iter()
            .rev()
            .fold(ComplexScalar::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn roots(&self) -> Result<Vec<ComplexScalar>, SpectralError> {
        if self.degree() == 0 {
            return Ok(Vec::new());
        }
        Ok(poly_roots(&self.coeffs)?)
    }

    pub fn product(factors: &[Polynomial]) -> Polynomial {
        factors
            .iter()
            .fold(Polynomial::constant(1.0), |acc, f| acc.mul(f))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 {
                continue;
            }
            let sign = if c < 0.0 { "-" } else { "+" };
            if first {
                if c < 0.0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            let show_coeff = k == 0 || a != 1.0;
            if show_coeff {
                write!(f, "{a}")?;
            }
            match k {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{k}")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// `p̄_0 = 1`, `p̄_1 = λ - 1`, `p̄_{i+1} = λ p̄_i + p̄_{i-1}`; returns `[p̄_0, …, p̄_n]`.
pub fn pbar_polynomials(n: usize) -> Vec<Polynomial> {
    three_term(n, 1.0)
}

/// `p̃_0 = 1`, `p̃_1 = λ - 1`, `p̃_{i+1} = λ p̃_i - p̃_{i-1}`; returns `[p̃_0, …, p̃_n]`.
pub fn ptilde_polynomials(n: usize) -> Vec<Polynomial> {
    three_term(n, -1.0)
}

fn three_term(n: usize, sign: f64) -> Vec<Polynomial> {
    let mut out = vec![Polynomial::constant(1.0)];
    if n == 0 {
        return out;
    }
    out.push(Polynomial::linear(1.0));
    for i in 1..n {
        let next = out[i]
            .shift()
            .add_scaled(&out[i - 1], sign)
            .expect("monic of degree i+1");
        out.push(next);
    }
    out
}

fn poly(c: &[f64]) -> Polynomial {
    Polynomial::new(c.to_vec()).expect("nonzero literal")
}

/// Factors of the polynomial that the exactly preconditioned matrix
/// satisfies under the preset's hypothesis.
pub fn predicted_polynomial(preset: Preset) -> Vec<Polynomial> {
    let lm1 = Polynomial::linear(1.0);
    let lp1 = Polynomial::linear(-1.0);
    let lam = Polynomial::linear(0.0);
    // λ²-λ-1, λ²-λ+1, λ³-λ²-2λ+1, λ³-λ²-1, λ³-λ²+2λ-1, λ³-λ²+1
    let q_minus = poly(&[-1.0, -1.0, 1.0]);
    let q_plus = poly(&[1.0, -1.0, 1.0]);
    match preset {
        Preset::P1 => vec![lm1.clone(), lm1.clone(), lm1],
        Preset::P2 | Preset::P4 => vec![lm1.clone(), lm1, lp1],
        Preset::P3 => vec![lm1, lp1.clone(), lp1],
        Preset::PD1 => vec![lm1, q_minus, poly(&[1.0, -2.0, -1.0, 1.0])],
        Preset::PD2 => vec![lm1, q_minus, poly(&[-1.0, 0.0, -1.0, 1.0])],
        Preset::PD3 => vec![lm1, q_plus, poly(&[-1.0, 2.0, -1.0, 1.0])],
        Preset::PD4 => vec![lm1, q_plus, poly(&[1.0, 0.0, -1.0, 1.0])],
        Preset::Q1 => vec![lm1.clone(), lm1],
        Preset::Q2 => vec![lm1, lp1],
        Preset::QD1 => vec![lam, lm1, q_minus],
        Preset::QD2 => vec![lam, lm1, q_plus],
        Preset::Pn(n) => vec![lm1; n],
        Preset::Dn(n) => pbar_polynomials(n).into_iter().skip(1).collect(),
        Preset::Mn(n) => ptilde_polynomials(n).into_iter().skip(1).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(z: &ComplexScalar, re: f64, im: f64, tol: f64) -> bool {
        (z.re - re).abs() < tol && (z.im - im).abs() < tol
    }

    #[test]
    fn pbar_first_members() {
        let p = pbar_polynomials(3);
        assert_eq!(p[1].coeffs(), &[-1.0, 1.0]);
        assert_eq!(p[2].coeffs(), &[1.0, -1.0, 1.0]);
        assert_eq!(p[3].coeffs(), &[-1.0, 2.0, -1.0, 1.0]);
        assert_eq!(p[3], predicted_polynomial(Preset::PD3)[2]);
    }

    #[test]
    fn ptilde_first_members() {
        let p = ptilde_polynomials(3);
        assert_eq!(p[1].coeffs(), &[-1.0, 1.0]);
        assert_eq!(p[2].coeffs(), &[-1.0, -1.0, 1.0]);
        assert_eq!(p[3].coeffs(), &[1.0, -2.0, -1.0, 1.0]);
        assert_eq!(p[2..4], predicted_polynomial(Preset::PD1)[1..3]);
    }

    #[test]
    fn degrees_of_predictions() {
        let deg = |p: Preset| predicted_polynomial(p).iter().map(Polynomial::degree).sum::<usize>();
        assert_eq!(deg(Preset::P1), 3);
        assert_eq!(deg(Preset::PD2), 6);
        assert_eq!(deg(Preset::Q1), 2);
        assert_eq!(deg(Preset::QD2), 4);
        assert_eq!(deg(Preset::Pn(6)), 6);
        assert_eq!(deg(Preset::Dn(5)), 15);
        assert_eq!(deg(Preset::Mn(4)), 10);
    }

    #[test]
    fn printed_pd1_roots() {
        let mut roots: Vec<f64> = predicted_polynomial(Preset::PD1)
            .iter()
            .flat_map(|f| f.roots().unwrap())
            .map(|z| {
                assert!(z.im.abs() < 1e-12);
                z.re
            })
            .collect();
        roots.sort_by(f64::total_cmp);
        let printed = [-1.2470, -0.6180, 0.4450, 1.0, 1.6180, 1.8019];
        for (r, p) in roots.iter().zip(printed) {
            assert!((r - p).abs() < 1e-4, "{r} vs {p}");
        }
    }

    #[test]
    fn additive_diagonal_nonzero_roots() {
        let s5 = 5f64.sqrt();
        let qd1: Vec<_> = predicted_polynomial(Preset::QD1)
            .iter()
            .flat_map(|f| f.roots().unwrap())
            .collect();
        for (re, im) in [(0.0, 0.0), (1.0, 0.0), ((1.0 + s5) / 2.0, 0.0), ((1.0 - s5) / 2.0, 0.0)] {
            assert!(qd1.iter().any(|z| close(z, re, im, 1e-12)));
        }
        let s3 = 3f64.sqrt();
        let qd2: Vec<_> = predicted_polynomial(Preset::QD2)
            .iter()
            .flat_map(|f| f.roots().unwrap())
            .collect();
        for (re, im) in [(1.0, 0.0), (0.5, s3 / 2.0), (0.5, -s3 / 2.0)] {
            assert!(qd2.iter().any(|z| close(z, re, im, 1e-12)));
        }
    }

    #[test]
    fn display_and_eval() {
        let p = pbar_polynomials(3).pop().unwrap();
        assert_eq!(p.to_string(), "x^3 - x^2 + 2x - 1");
        assert_eq!(p.eval(2.0), 7.0);
        assert!(Polynomial::new(vec![0.0, 0.0]).is_err());
        assert_eq!(Polynomial::new(vec![2.0, 4.0, 0.0]).unwrap().monic().coeffs(), &[0.5, 1.0]);
    }
}
