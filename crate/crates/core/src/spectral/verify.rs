use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{predicted_polynomial, Polynomial, SpectralError};
use crate::block::{
    assemble, assemble_arrowhead, permute_threeblock, random_system, SystemOptions,
    MAX_GENERATION_RETRIES,
};
use crate::dense::{eigenvalues, mat_poly_eval, ComplexScalar, DenseMatrix};
use crate::schur::{
    additive_schur, make_additive, make_nested, nested_chain, preconditioned_matrix, Preset,
};

/// Normalized threshold used for every annihilation check.
pub const ANNIHILATION_TOL: f64 = 1e-9;
/// Membership tolerance against internally computed roots.
pub const MEMBERSHIP_TOL: f64 = 1e-7;
/// Membership tolerance against roots printed to four decimals.
pub const PRINTED_ROOT_TOL: f64 = 1e-3;

/// `‖∏ p_i(T)‖_F / ∏ (1 + ‖T‖_F)^{deg p_i}`.
pub fn annihilation_residual(t: &DenseMatrix, factors: &[Polynomial]) -> Result<f64, SpectralError> {
    if !t.is_square() {
        return Err(SpectralError::NotSquare {
            rows: t.rows(),
            cols: t.cols(),
        });
    }
    let scale = 1.0 + t.frobenius_norm();
    let mut prod = DenseMatrix::identity(t.rows());
    let mut norm = 1.0;
    for f in factors {
        prod = prod.mat_mul(&mat_poly_eval(f.coeffs(), t)?)?;
        norm *= scale.powi(f.degree() as i32);
    }
    Ok(prod.frobenius_norm() / norm)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Membership {
    /// Nearest predicted root and its distance, per eigenvalue.
    pub nearest: Vec<(ComplexScalar, f64)>,
    pub max_distance: f64,
    pub tol: f64,
    pub within: bool,
}

pub fn spectrum_membership(eigs: &[ComplexScalar], roots: &[ComplexScalar], tol: f64) -> Membership {
    let nearest: Vec<(ComplexScalar, f64)> = eigs
        .iter()
        .map(|e| {
            roots
                .iter()
                .map(|r| (*r, (e - r).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap_or((ComplexScalar::new(f64::NAN, f64::NAN), f64::INFINITY))
        })
        .collect();
    let max_distance = nearest.iter().fold(0.0f64, |m, (_, d)| m.max(*d));
    Membership {
        nearest,
        max_distance,
        tol,
        within: max_distance <= tol,
    }
}

pub fn min_real_part(eigs: &[ComplexScalar]) -> f64 {
    eigs.iter().map(|z| z.re).fold(f64::INFINITY, f64::min)
}

/// True iff every eigenvalue has real part strictly above `margin`.
pub fn positive_stable(eigs: &[ComplexScalar], margin: f64) -> bool {
    min_real_part(eigs) > margin
}

/// Roots of all factors, with the largest number of coincident roots.
pub fn predicted_roots(factors: &[Polynomial]) -> Result<(Vec<ComplexScalar>, usize), SpectralError> {
    let mut roots = Vec::new();
    for f in factors {
        roots.extend(f.roots()?);
    }
    let multiplicity = roots
        .iter()
        .map(|r| roots.iter().filter(|s| (*s - r).norm() < 1e-6).count())
        .max()
        .unwrap_or(0);
    Ok((roots, multiplicity))
}

/// Eigenvalues of a Jordan block of size `m` move by about `(eps·‖T‖)^{1/m}`
/// under rounding; distinct roots use the fixed membership tolerance.
pub fn membership_tolerance(t_norm: f64, multiplicity: usize) -> f64 {
    if multiplicity <= 1 {
        return MEMBERSHIP_TOL;
    }
    let jordan = 10.0 * (f64::EPSILON * (1.0 + t_norm)).powf(1.0 / multiplicity as f64);
    jordan.max(MEMBERSHIP_TOL)
}

#[derive(Clone, Debug)]
pub struct SpectralReport {
    pub eigenvalues: Vec<ComplexScalar>,
    /// Factor product (as text) and its normalized annihilation residual.
    pub residuals: Vec<(String, f64)>,
    pub min_real_part: f64,
    pub membership: Membership,
}

pub fn spectral_report(t: &DenseMatrix, factors: &[Polynomial]) -> Result<SpectralReport, SpectralError> {
    let eigs = eigenvalues(t)?;
    let residual = annihilation_residual(t, factors)?;
    let (roots, mult) = predicted_roots(factors)?;
    let membership = spectrum_membership(&eigs, &roots, membership_tolerance(t.frobenius_norm(), mult));
    Ok(SpectralReport {
        min_real_part: min_real_part(&eigs),
        residuals: vec![(Polynomial::product(factors).to_string(), residual)],
        eigenvalues: eigs,
        membership,
    })
}

/// One verification scenario: a preset, a seed and the system hypothesis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyCase {
    pub preset: Preset,
    pub seed: u64,
    /// `A_i = 0` for every block after the first (zero corner for additive presets).
    pub zero_tail: bool,
    /// `C_i = B_i` and nonzero `A_i` symmetric positive definite.
    pub symmetric: bool,
    /// Fixed block sizes; drawn from the seed when absent.
    pub sizes: Option<Vec<usize>>,
}

impl VerifyCase {
    /// The preset under the hypothesis its predicted polynomial needs.
    pub fn standard(preset: Preset, seed: u64) -> Self {
        Self {
            preset,
            seed,
            zero_tail: preset.needs_zero_tail(),
            symmetric: false,
            sizes: None,
        }
    }

    /// Symmetric system with SPD diagonal blocks and no zero tail.
    pub fn symmetric_spd(preset: Preset, seed: u64) -> Self {
        Self {
            preset,
            seed,
            zero_tail: false,
            symmetric: true,
            sizes: None,
        }
    }

    pub fn with_sizes(mut self, sizes: Vec<usize>) -> Self {
        self.sizes = Some(sizes);
        self
    }

    pub fn label(&self) -> String {
        let mut s = self.preset.name();
        if self.symmetric {
            s.push_str("-spd");
        }
        if self.zero_tail && !self.preset.needs_zero_tail() {
            s.push_str("-zt");
        }
        s
    }

    /// Whether the predicted polynomial applies to this case.
    pub fn polynomial_applies(&self) -> bool {
        !self.preset.needs_zero_tail() || self.zero_tail
    }

    /// Whether all eigenvalues are expected in the open right half-plane.
    pub fn stability_expected(&self) -> bool {
        let stable_preset = matches!(
            self.preset,
            Preset::P1 | Preset::Pn(_) | Preset::PD3 | Preset::Dn(_) | Preset::Q1 | Preset::QD2
        );
        let spd_dn = matches!(self.preset, Preset::Dn(_)) && self.symmetric;
        (stable_preset && self.polynomial_applies()) || spd_dn
    }

    /// Fixed sizes if given, else sizes in 2..=8 drawn from the seed and made
    /// nonincreasing under a zero tail.
    pub fn block_sizes(&self) -> Vec<usize> {
        if let Some(s) = &self.sizes {
            return s.clone();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x5a5a_5a5a);
        let mut sizes: Vec<usize> = (0..self.preset.block_count())
            .map(|_| rng.gen_range(2..=8))
            .collect();
        if self.zero_tail {
            sizes.sort_unstable_by(|a, b| b.cmp(a));
        }
        sizes
    }

    /// Assembled system matrix and its exactly preconditioned counterpart.
    pub fn build(&self) -> Result<(DenseMatrix, DenseMatrix), SpectralError> {
        let sizes = self.block_sizes();
        let spec = self.preset.spec();
        if !spec.family.is_additive() {
            let opts = SystemOptions::new(sizes, self.seed)
                .zero_tail(self.zero_tail)
                .symmetric_spd(self.symmetric);
            let sys = random_system(&opts)?;
            let chain = nested_chain(&sys)?;
            let p = make_nested(&spec, &sys, &chain)?;
            let a = assemble(&sys);
            let t = preconditioned_matrix(&p, &a)?;
            return Ok((a, t));
        }
        // additive presets: retry until the leading blocks and S are invertible
        for attempt in 0..=MAX_GENERATION_RETRIES as u64 {
            let seed = self.seed.wrapping_add(attempt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let opts = SystemOptions::new(sizes.clone(), seed).symmetric_spd(self.symmetric);
            let mut sys = random_system(&opts)?;
            if self.zero_tail {
                let z = DenseMatrix::zeros(sizes[1], sizes[1]);
                sys = sys.with_diag(1, z)?;
            }
            let (arrow, _) = permute_threeblock(&sys)?;
            let Ok(schur) = additive_schur(&arrow) else {
                continue;
            };
            let p = make_additive(&spec, &arrow, &schur)?;
            let a = assemble_arrowhead(&arrow);
            let t = preconditioned_matrix(&p, &a)?;
            return Ok((a, t));
        }
        Err(SpectralError::GenerationFailed {
            retries: MAX_GENERATION_RETRIES,
        })
    }
}

/// One CSV row of a verification sweep.
#[derive(Clone, Debug)]
pub struct VerifyRow {
    pub label: String,
    pub seed: u64,
    pub sizes: Vec<usize>,
    /// Normalized annihilation residual, if the predicted polynomial applies.
    pub residual: Option<f64>,
    pub min_real_part: f64,
    pub max_distance: Option<f64>,
    pub membership_tol: Option<f64>,
    pub stability_expected: bool,
    pub pass: bool,
}

pub fn verify_case(case: &VerifyCase) -> Result<VerifyRow, SpectralError> {
    let (_, t) = case.build()?;
    let eigs = eigenvalues(&t)?;
    let min_re = min_real_part(&eigs);
    let (residual, distance, tol) = if case.polynomial_applies() {
        let factors = predicted_polynomial(case.preset);
        let residual = annihilation_residual(&t, &factors)?;
        let (roots, mult) = predicted_roots(&factors)?;
        let tol = membership_tolerance(t.frobenius_norm(), mult);
        let m = spectrum_membership(&eigs, &roots, tol);
        (Some(residual), Some(m.max_distance), Some(tol))
    } else {
        (None, None, None)
    };
    let stability_expected = case.stability_expected();
    let pass = residual.map_or(true, |r| r <= ANNIHILATION_TOL)
        && distance.zip(tol).map_or(true, |(d, t)| d <= t)
        && (!stability_expected || min_re > 0.0);
    Ok(VerifyRow {
        label: case.label(),
        seed: case.seed,
        sizes: case.block_sizes(),
        residual,
        min_real_part: min_re,
        max_distance: distance,
        membership_tol: tol,
        stability_expected,
        pass,
    })
}

pub const CSV_HEADER: &str =
    "preset,seed,sizes,residual,min_real_part,max_distance,membership_tol,stability_expected,pass";

pub fn write_verify_csv<W: Write>(out: &mut W, rows: &[VerifyRow]) -> std::io::Result<()> {
    let opt = |v: Option<f64>| v.map_or_else(String::new, |x| format!("{x:.6e}"));
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        let sizes: Vec<String> = r.sizes.iter().map(ToString::to_string).collect();
        writeln!(
            out,
            "{},{},{},{},{:.6e},{},{},{},{}",
            r.label,
            r.seed,
            sizes.join("x"),
            opt(r.residual),
            r.min_real_part,
            opt(r.max_distance),
            opt(r.membership_tol),
            r.stability_expected,
            r.pass
        )?;
    }
    Ok(())
}
