use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use saddle_core::biot::{
    assemble_biot, biot_table, build_mesh, export_biot, ordering_invariants, BiotError, BiotParameters,
};
use saddle_core::block::{assemble, mm_export, random_system, BlockError, SystemOptions};
use saddle_core::dense::{eigenvalues, ComplexScalar, MAX_EIGEN_DIM};
use saddle_core::schur::{block_ldu, nested_chain, Preset};
use saddle_core::sparse::SparseError;
use saddle_core::spectral::{
    coefficient_law_check, pbar_polynomials, predicted_polynomial, predicted_roots, routh_table,
    verify_case, write_verify_csv, VerifyCase,
};

use crate::args::{BiotArgs, ExportArgs, Format, Kind, SpectrumArgs, VerifyArgs};
use crate::{CliError, Outcome};

/// LDU reconstruction must hold to this relative Frobenius error.
const LDU_TOL: f64 = 1e-11;
/// Highest degree of the Routh and coefficient checks.
const ROUTH_MAX_DEGREE: usize = 12;

fn failed(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

fn sparse_is_io(e: &SparseError) -> bool {
    matches!(e, SparseError::Io(_))
}

fn block_is_io(e: &BlockError) -> bool {
    match e {
        BlockError::Io(_) => true,
        BlockError::Sparse(s) => sparse_is_io(s),
        _ => false,
    }
}

fn block_error(e: BlockError) -> CliError {
    if block_is_io(&e) {
        CliError::Io(e.to_string())
    } else {
        failed(e)
    }
}

fn biot_error(e: BiotError) -> CliError {
    let io = match &e {
        BiotError::Block(b) => block_is_io(b),
        BiotError::Sparse(s) => sparse_is_io(s),
        _ => false,
    };
    if io {
        CliError::Io(e.to_string())
    } else {
        failed(e)
    }
}

fn write_output(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(bytes)
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

fn sized_case(case: VerifyCase, sizes: Option<&Vec<usize>>, strict: bool) -> Result<VerifyCase, CliError> {
    match sizes {
        Some(s) if s.len() == case.preset.block_count() => Ok(case.with_sizes(s.clone())),
        Some(s) if strict => Err(CliError::Usage(format!(
            "{} has {} blocks but --sizes lists {}",
            case.preset,
            case.preset.block_count(),
            s.len()
        ))),
        _ => Ok(case),
    }
}

/// The cases of one seed: the requested (or default) presets, then the
/// n-block family rows when `--n` is given.
fn verify_cases(a: &VerifyArgs, seed: u64) -> Result<Vec<VerifyCase>, CliError> {
    let explicit = !a.presets.is_empty();
    let presets: Vec<Preset> = if explicit {
        a.presets.clone()
    } else {
        Preset::THREE_BLOCK
            .iter()
            .copied()
            .chain([Preset::Pn(3), Preset::Dn(3)])
            .collect()
    };
    let mut cases = Vec::new();
    for p in presets {
        cases.push(sized_case(VerifyCase::standard(p, seed), a.sizes.as_ref(), explicit)?);
    }
    if let Some(n) = a.n {
        if n < 2 {
            return Err(CliError::Usage("--n must be at least 2".into()));
        }
        for k in 2..=n {
            for case in [
                VerifyCase::standard(Preset::Pn(k), seed),
                VerifyCase::standard(Preset::Dn(k), seed),
                VerifyCase::standard(Preset::Mn(k), seed),
                VerifyCase::symmetric_spd(Preset::Dn(k), seed),
            ] {
                cases.push(sized_case(case, a.sizes.as_ref(), false)?);
            }
        }
    }
    Ok(cases)
}

/// Coefficient law, Routh sign changes and block LDU reconstruction; returns
/// `(name, pass, detail)` per check.
fn structural_checks(seed: u64, n_max: usize) -> Vec<(String, bool, String)> {
    let mut out = Vec::new();
    for k in 3..=ROUTH_MAX_DEGREE {
        let (pass, detail) = match coefficient_law_check(k) {
            Ok(c) => (c.holds, format!("expected {:?} actual {:?}", c.expected, c.actual)),
            Err(e) => (false, e.to_string()),
        };
        out.push((format!("coefficient law k={k}"), pass, detail));
    }
    for p in pbar_polynomials(ROUTH_MAX_DEGREE).iter().skip(1) {
        let k = p.degree();
        let (pass, detail) = match routh_table(p) {
            Ok(t) => (t.sign_changes == k, format!("{} sign changes", t.sign_changes)),
            Err(e) => (false, e.to_string()),
        };
        out.push((format!("routh table k={k}"), pass, detail));
    }
    for n in 2..=n_max.max(3) {
        let sizes = VerifyCase::standard(Preset::Pn(n), seed).block_sizes();
        let result = random_system(&SystemOptions::new(sizes, seed))
            .map_err(|e| e.to_string())
            .and_then(|sys| {
                let chain = nested_chain(&sys).map_err(|e| e.to_string())?;
                let ldu = block_ldu(&sys, &chain).map_err(|e| e.to_string())?;
                ldu.reconstruction_error(&assemble(&sys)).map_err(|e| e.to_string())
            });
        let (pass, detail) = match result {
            Ok(err) => (err <= LDU_TOL, format!("relative error {err:.3e}")),
            Err(e) => (false, e),
        };
        out.push((format!("block LDU n={n} seed={seed}"), pass, detail));
    }
    out
}

pub fn verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let seeds: Vec<u64> = (0..a.seeds as u64).map(|s| a.seed.wrapping_add(s)).collect();
    // reject bad combinations before any work
    let per_seed = seeds
        .iter()
        .map(|&s| verify_cases(a, s))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    let mut failures = 0usize;
    for case in per_seed.iter().flatten() {
        match verify_case(case) {
            Ok(row) => {
                if !row.pass {
                    failures += 1;
                    eprintln!(
                        "FAIL {} seed={}: residual={:?} max_distance={:?} tol={:?} min_re={:.3e}",
                        row.label, row.seed, row.residual, row.max_distance, row.membership_tol, row.min_real_part
                    );
                }
                rows.push(row);
            }
            Err(e) => {
                failures += 1;
                eprintln!("FAIL {} seed={}: {e}", case.label(), case.seed);
            }
        }
    }
    let mut structural = 0usize;
    for &seed in &seeds {
        for (name, pass, detail) in structural_checks(seed, a.n.unwrap_or(3)) {
            structural += 1;
            if !pass {
                failures += 1;
                eprintln!("FAIL {name}: {detail}");
            }
        }
    }
    let mut buf = Vec::new();
    write_verify_csv(&mut buf, &rows).map_err(|e| CliError::Io(e.to_string()))?;
    write_output(a.out.as_deref(), &buf)?;
    eprintln!(
        "verify: {} spectral rows, {structural} structural checks, {failures} failures",
        rows.len()
    );
    Ok(if failures == 0 {
        Outcome::Pass
    } else {
        Outcome::CheckFailed
    })
}

fn nearest(z: ComplexScalar, roots: &[ComplexScalar]) -> Option<(ComplexScalar, f64)> {
    roots
        .iter()
        .map(|&r| (r, (z - r).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

pub fn spectrum(a: &SpectrumArgs) -> Result<Outcome, CliError> {
    let cases = a
        .presets
        .iter()
        .map(|&p| {
            let base = if a.spd {
                VerifyCase::symmetric_spd(p, a.seed)
            } else {
                VerifyCase::standard(p, a.seed)
            };
            sized_case(base, a.sizes.as_ref(), true)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let limit = a.max_dim.min(MAX_EIGEN_DIM);
    for c in &cases {
        let dim: usize = c.block_sizes().iter().sum();
        if dim > limit {
            return Err(CliError::Guard(format!("{} has dimension {dim} > {limit}", c.label())));
        }
    }
    let mut text = String::from("preset,re,im,nearest_re,nearest_im,distance\n");
    for c in &cases {
        let (_, t) = c.build().map_err(failed)?;
        let mut eigs = eigenvalues(&t).map_err(failed)?;
        eigs.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
        let roots = if c.polynomial_applies() {
            predicted_roots(&predicted_polynomial(c.preset)).map_err(failed)?.0
        } else {
            Vec::new()
        };
        for z in eigs {
            let _ = write!(text, "{},{:.10e},{:.10e}", c.label(), z.re, z.im);
            match nearest(z, &roots) {
                Some((r, d)) => {
                    let _ = writeln!(text, ",{:.10e},{:.10e},{d:.3e}", r.re, r.im);
                }
                None => text.push_str(",,,\n"),
            }
        }
    }
    write_output(a.out.as_deref(), text.as_bytes())?;
    Ok(Outcome::Pass)
}

fn biot_header(tau: f64, a: &BiotArgs) -> Vec<String> {
    vec![
        format!("tau={tau:e} (incomplete Cholesky drop tolerance)"),
        format!(
            "GMRES: full, left preconditioned, zero initial guess, relative residual tol={:e}, maxit={}",
            a.tol, a.maxit
        ),
        "rhs: body force f=(1,1) on u rows, zero on xi rows, -dt*Q_s*(1,psi) with Q_s=1 and g=0 on p rows".into(),
        "bc: u=0 and p=0 on x=0 and x=1, natural conditions on y=0 and y=1".into(),
    ]
}

pub fn biot(a: &BiotArgs) -> Result<Outcome, CliError> {
    let params = BiotParameters::default();
    let mut text = String::new();
    let mut failures = 0usize;
    for (i, &tau) in a.tau.iter().enumerate() {
        let table = biot_table(&a.n, tau, &params, a.tol, a.maxit).map_err(biot_error)?;
        if i > 0 {
            text.push('\n');
        }
        match a.format {
            Format::Csv => {
                for line in biot_header(tau, a) {
                    let _ = writeln!(text, "# {line}");
                }
                text.push_str(&table.to_csv("N"));
            }
            Format::Markdown => {
                let _ = writeln!(text, "### tau = {tau:e}\n");
                for line in biot_header(tau, a).iter().skip(1) {
                    let _ = writeln!(text, "- {line}");
                }
                text.push('\n');
                text.push_str(&table.to_markdown("N"));
            }
        }
        if a.check_ordering {
            for c in ordering_invariants(&table) {
                if !c.pass {
                    failures += 1;
                    eprintln!("FAIL ordering {} tau={tau:e}: {}", c.name, c.detail);
                }
            }
        }
    }
    write_output(a.out.as_deref(), text.as_bytes())?;
    Ok(if failures == 0 {
        Outcome::Pass
    } else {
        Outcome::CheckFailed
    })
}

pub fn export(a: &ExportArgs) -> Result<Outcome, CliError> {
    let manifest = match a.kind {
        Kind::Random => {
            if a.sizes.len() < 2 {
                return Err(CliError::Usage("--sizes needs at least two blocks".into()));
            }
            let opts = SystemOptions::new(a.sizes.clone(), a.seed)
                .zero_tail(a.zero_tail)
                .symmetric_spd(a.spd);
            let sys = random_system(&opts).map_err(block_error)?;
            mm_export(&sys, &a.out).map_err(block_error)?
        }
        Kind::Biot => {
            let asm = assemble_biot(&build_mesh(a.n).map_err(biot_error)?, &BiotParameters::default())
                .map_err(biot_error)?;
            export_biot(&asm, &a.out).map_err(biot_error)?
        }
    };
    println!("{}", manifest.display());
    Ok(Outcome::Pass)
}
