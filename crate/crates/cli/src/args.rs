use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use saddle_core::schur::Preset;

const CONFIG_HELP: &str = "Any flag may also come from `--config FILE`: one `key=value` per line, \
keys are the long flag names (for example `seed=7`, `sizes=4,3,2`, `check-ordering=true`), \
`command=<subcommand>` selects the subcommand, `#` starts a comment. Flags given on the \
command line override the file.\n\n\
Exit codes: 0 success, 1 verification failure, 2 usage, 3 size guard, 4 IO.";

#[derive(Debug, Parser)]
#[command(name = "saddle", version, about = "Schur-complement block preconditioners: verification, spectra, Biot benchmark")]
#[command(after_help = CONFIG_HELP)]
pub struct Cli {
    /// key=value config file (handled before flag parsing).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the invariant suite and write a CSV report.
    #[command(args_override_self = true, after_help = VERIFY_HELP)]
    Verify(VerifyArgs),
    /// Eigenvalues of exactly preconditioned systems beside the predicted roots.
    #[command(args_override_self = true, after_help = SPECTRUM_HELP)]
    Spectrum(SpectrumArgs),
    /// GMRES iteration counts for the Biot model problem.
    #[command(args_override_self = true, after_help = BIOT_HELP)]
    Biot(BiotArgs),
    /// Write Matrix Market blocks and a manifest.
    #[command(args_override_self = true, after_help = EXPORT_HELP)]
    Export(ExportArgs),
}

const VERIFY_HELP: &str = "CSV columns: preset,seed,sizes,residual,min_real_part,max_distance,membership_tol,stability_expected,pass\n\
  preset              preset name; `-spd` marks a symmetric system with SPD blocks, `-zt` a forced zero tail\n\
  sizes               block sizes joined by `x`\n\
  residual            normalized annihilation residual of the predicted polynomial (empty if it does not apply)\n\
  min_real_part       smallest real part of the preconditioned spectrum\n\
  max_distance        largest distance from an eigenvalue to the nearest predicted root\n\
  membership_tol      tolerance for max_distance\n\
  stability_expected  whether every eigenvalue must lie in the open right half-plane\n\
  pass                row verdict\n\n\
Default presets: P1-P4, PD1-PD4, Q1, Q2, QD1, QD2, Pn3, Dn3. `--n N` adds Pn, Dn, Mn and symmetric Dn \
rows for every block count 2..=N. Polynomial coefficient, Routh table and block LDU checks run on \
every invocation and report on stderr.";

const SPECTRUM_HELP: &str = "CSV columns: preset,re,im,nearest_re,nearest_im,distance\n\
  one row per eigenvalue, sorted by real then imaginary part; the nearest predicted root and its \
distance are empty when the predicted polynomial does not apply";

const BIOT_HELP: &str = "Output: per drop tolerance, `#` header lines (tau, GMRES tolerance, right-hand side, \
boundary conditions) followed by a table with columns N,PD1,PD2,PD3,PD4,P1,P2,P3,P4 and one row per \
mesh size. A cell that did not converge within --maxit prints `>maxit`; this does not change the \
exit code unless --check-ordering is given and an ordering invariant fails.";

const EXPORT_HELP: &str = "Writes one .mtx file per block and a manifest.txt listing them. `--kind random` \
writes A1..An, B1t.., C1..; `--kind biot` writes A1-A3, B1t, B2t plus the mass matrices M_xi.mtx and M_p.mtx.";

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse::<Preset>().map_err(|e| e.to_string())
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        Ok(_) => Err("must be positive".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(_) => Err("must be positive and finite".into()),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of consecutive seeds starting at --seed.
    #[arg(long, default_value = "1", value_parser = positive_usize)]
    pub seeds: usize,
    /// Block sizes for every case with a matching block count.
    #[arg(long, value_delimiter = ',', value_parser = positive_usize)]
    pub sizes: Option<Vec<usize>>,
    /// Presets to check instead of the default suite.
    #[arg(long = "preset", value_delimiter = ',', value_parser = parse_preset)]
    pub presets: Vec<Preset>,
    /// Add the n-block family rows for block counts 2..=N.
    #[arg(long, value_parser = positive_usize)]
    pub n: Option<usize>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long = "preset", value_delimiter = ',', value_parser = parse_preset, required = true, num_args = 1..)]
    pub presets: Vec<Preset>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',', value_parser = positive_usize)]
    pub sizes: Option<Vec<usize>>,
    /// Symmetric system with SPD diagonal blocks and no zero tail.
    #[arg(long)]
    pub spd: bool,
    /// Refuse systems larger than this.
    #[arg(long, default_value = "400", value_parser = positive_usize)]
    pub max_dim: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Markdown,
}

#[derive(Debug, Args)]
pub struct BiotArgs {
    /// Mesh sizes: an N x N grid of squares, each split into two triangles.
    #[arg(long = "N", value_delimiter = ',', default_value = "16", value_parser = positive_usize)]
    pub n: Vec<usize>,
    /// Incomplete Cholesky drop tolerances, one table each.
    #[arg(long, value_delimiter = ',', default_value = "1e-3", value_parser = positive_f64)]
    pub tau: Vec<f64>,
    /// Relative residual tolerance of GMRES.
    #[arg(long, default_value = "1e-8", value_parser = positive_f64)]
    pub tol: f64,
    #[arg(long, default_value = "2000", value_parser = positive_usize)]
    pub maxit: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Exit 1 unless every row satisfies P1 < P4 < P2 ~ P3 and PD3 < PD1 ~ PD2 < PD4.
    #[arg(long)]
    pub check_ordering: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Random,
    Biot,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long, value_enum, default_value_t = Kind::Random)]
    pub kind: Kind,
    /// Block sizes of a random system.
    #[arg(long, value_delimiter = ',', default_value = "4,3,2", value_parser = positive_usize)]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random system with zero diagonal blocks after the first.
    #[arg(long)]
    pub zero_tail: bool,
    /// Random system with SPD diagonal blocks and C_i = B_i.
    #[arg(long)]
    pub spd: bool,
    /// Biot mesh size.
    #[arg(long = "N", default_value = "4", value_parser = positive_usize)]
    pub n: usize,
    /// Target directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
}
