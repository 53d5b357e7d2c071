//! Command-line driver: runs the transformation pipelines and writes CSV,
//! JSON-lines and SVG results.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 numerical failure.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod figures;
pub mod svg;

pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "specweight", version, about = "Spectral-weight transformations of radial Schrodinger problems")]
pub struct Cli {
    /// Output directory (created if absent).
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    #[command(flatten)]
    pub grid: GridArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Outer radius of the grid.
    #[arg(long, global = true)]
    pub r_max: Option<f64>,
    /// Number of grid points (odd, >= 9).
    #[arg(long, global = true)]
    pub n_points: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Well,
    Free,
    Coulomb,
    Linear,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Change the weight of one bound level and compare spectra and centroids.
    Shift(ShiftArgs),
    /// Build a bound state embedded in the continuum.
    Bsec(BsecArgs),
    /// Phase shifts of a BSEC potential over an energy range.
    PhaseScan(PhaseScanArgs),
    /// Resonance widths after cutting the BSEC potential at knots.
    Resonance(ResonanceArgs),
    /// Barrier/well block decomposition of a shift result.
    Blocks(BlocksArgs),
    /// Permute or blank blocks of a free-case BSEC potential.
    Rearrange(RearrangeArgs),
    /// Regenerate the four reference figures with fixed parameters.
    Figs,
}

#[derive(Debug, Args)]
pub struct ShiftArgs {
    #[arg(long, value_enum, default_value = "well")]
    pub model: ModelKind,
    /// Well width.
    #[arg(long = "L", default_value_t = std::f64::consts::PI)]
    pub width: f64,
    /// Slope of the linear model.
    #[arg(long = "g", default_value_t = 1.0)]
    pub slope: f64,
    /// Chosen level (ground state is 1).
    #[arg(long)]
    pub nu: usize,
    /// New weight as a multiple of the old one, c^2 / c0^2.
    #[arg(long, conflicts_with = "c2", required_unless_present = "c2")]
    pub c2_ratio: Option<f64>,
    /// New weight c^2 = psi'(0)^2 given directly.
    #[arg(long)]
    pub c2: Option<f64>,
    /// Number of levels to compare.
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
}

#[derive(Debug, Args)]
pub struct BsecArgs {
    #[arg(long, value_enum, default_value = "free")]
    pub model: ModelKind,
    /// Wave number of the embedded state, E_b = kb^2.
    #[arg(long)]
    pub kb: f64,
    /// Gathering strength delta c^2.
    #[arg(long, required_unless_present = "dc2_ladder")]
    pub dc2: Option<f64>,
    /// Several gathering strengths, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub dc2_ladder: Option<Vec<f64>>,
    /// Coulomb strength in V0 = Z / r.
    #[arg(long = "Z", default_value_t = 1.0)]
    pub strength: f64,
    /// Slope in V0 = g r (must be <= 0).
    #[arg(long = "g", default_value_t = -0.1)]
    pub slope: f64,
}

#[derive(Debug, Args)]
pub struct PhaseScanArgs {
    #[arg(long)]
    pub from_bsec: PathBuf,
    #[arg(long)]
    pub emin: f64,
    #[arg(long)]
    pub emax: f64,
    #[arg(long, default_value_t = 101)]
    pub n: usize,
    /// Start of the matching window.
    #[arg(long)]
    pub match_r: f64,
    /// Length of the matching window (default: ten wavelengths at emin).
    #[arg(long)]
    pub match_span: Option<f64>,
    /// Also analyse envelope beats at energy `--E`.
    #[arg(long, requires = "energy")]
    pub beats: bool,
    #[arg(long = "E")]
    pub energy: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ResonanceArgs {
    #[arg(long)]
    pub from_bsec: PathBuf,
    /// Knot numbers (1 = first knot after the origin) to cut at.
    #[arg(long, value_delimiter = ',', required = true)]
    pub rcut_knots: Vec<usize>,
    /// Energy window `lo,hi`.
    #[arg(long, value_delimiter = ',', num_args = 1, required = true)]
    pub window: Vec<f64>,
    #[arg(long, default_value_t = 81)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct BlocksArgs {
    #[arg(long)]
    pub from_shift: PathBuf,
}

#[derive(Debug, Args)]
pub struct RearrangeArgs {
    #[arg(long)]
    pub from_bsec: PathBuf,
    /// New order of the leading blocks, e.g. `0,2,1`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub perm: Vec<usize>,
    /// Positions to fill with zero potential.
    #[arg(long, value_delimiter = ',')]
    pub zero: Vec<usize>,
}

/// Exit code for an error chain: numerical failures from the library map to
/// 3, I/O to 1, everything else (bad flags, unreadable input) to 2.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<specweight::Error>() {
            return match e {
                _ if e.is_numerical() => EXIT_NUMERICAL,
                specweight::Error::Io(_) => EXIT_IO,
                _ => EXIT_INVALID,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return EXIT_IO;
        }
    }
    EXIT_INVALID
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match commands::dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}
