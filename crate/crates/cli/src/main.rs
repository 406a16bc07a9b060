use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use perdec::{Bounds, IntVector, Region};

mod commands;
mod manifest;

use manifest::Run;

/// Exact periodic decompositions of integer configurations on Z^d.
///
/// Every run writes its outputs and a `manifest.json` to the output
/// directory. Exit status is 0 when every check passed, 2 when a bounded
/// search ran out of budget, and 1 on failure or error.
#[derive(Parser, Debug)]
#[command(name = "perdec", version)]
struct Cli {
    #[command(flatten)]
    opts: Options,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Require every input to have this dimension.
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Largest multiplier tried by annihilator searches.
    #[arg(long, global = true, default_value_t = 32)]
    pub bound_search: u64,
    /// Largest fiber period accepted by fiber extraction.
    #[arg(long, global = true, default_value_t = 64)]
    pub bound_period: u64,
    /// Translate budget for stabilized limits.
    #[arg(long, global = true, default_value_t = 256)]
    pub kmax: u64,
    /// Consecutive equal translates needed to call a limit stable.
    #[arg(long, global = true, default_value_t = 8)]
    pub patience: u64,
    /// Half-width of the box used for window-evidence checks.
    #[arg(long, global = true, default_value_t = 6)]
    pub check_radius: i64,
    /// Box to rasterize outputs on, as `lo..hi` with comma-separated
    /// coordinates, e.g. `-5,-5..5,5`. Repeatable.
    #[arg(long = "window", global = true, value_parser = parse_window)]
    pub windows: Vec<Region>,
    /// Output directory.
    #[arg(long, global = true, default_value = "perdec-out")]
    pub out: PathBuf,
    /// `text` additionally writes a grid dump next to every 2-d window.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

impl Options {
    pub fn bounds(&self) -> Bounds {
        Bounds {
            search: self.bound_search,
            period: self.bound_period,
            k_max: self.kmax,
            patience: self.patience,
            check_radius: self.check_radius,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Polynomial arithmetic.
    #[command(subcommand)]
    Poly(PolyCmd),
    /// Apply a polynomial to a configuration.
    Act { poly: PathBuf, config: PathBuf },
    /// Periodic decomposition of a configuration.
    Decompose(DecomposeArgs),
    /// Sparse configurations and their fiber decompositions.
    #[command(subcommand)]
    Sparse(SparseCmd),
    /// Tiles and co-tilers.
    #[command(subcommand)]
    Tiling(TilingCmd),
}

#[derive(Subcommand, Debug)]
pub enum PolyCmd {
    Add { f: PathBuf, g: PathBuf },
    Mul { f: PathBuf, g: PathBuf },
    /// Direction of a line polynomial, or `absent`.
    LineDir { f: PathBuf },
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    pub config: PathBuf,
    /// A polynomial annihilating the input, or a JSON array of line
    /// polynomials whose product does.
    #[arg(long)]
    pub annihilator: Option<PathBuf>,
    /// Search a difference-polynomial annihilator from `--annihilator`.
    #[arg(long)]
    pub search: bool,
    /// Number of independent periods wanted per component.
    #[arg(long, requires = "periodizer")]
    pub k: Option<usize>,
    /// Candidate periodizers for `--k`; the first whose support meets the
    /// current subspace only at the origin is used. Repeatable.
    #[arg(long)]
    pub periodizer: Vec<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum SparseCmd {
    /// Test `|supp(c) ∩ (C_m + t)| <= a·m` for `m <= m-max`.
    Check {
        config: PathBuf,
        #[arg(long)]
        a: u64,
        #[arg(long, default_value_t = 8)]
        m_max: u64,
    },
    /// Split a configuration into periodic fibers along a direction.
    Fibers {
        config: PathBuf,
        /// Direction as comma-separated coordinates.
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
        direction: IntVector,
    },
    /// Two-direction split by line polynomials `phi`, `psi`.
    Split { config: PathBuf, phi: PathBuf, psi: PathBuf },
    /// Split by a JSON array of line polynomials.
    Decompose { config: PathBuf, factors: PathBuf },
    /// Find the line factors from an annihilator, then split.
    Full { config: PathBuf, annihilator: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum TilingCmd {
    /// Is the configuration a co-tiler of the tile?
    Verify { tile: PathBuf, config: PathBuf },
    /// Are the tiles independent?
    Independent {
        #[arg(required = true)]
        tiles: Vec<PathBuf>,
    },
    /// Decompose a common co-tiler of independent tiles.
    Decompose {
        config: PathBuf,
        #[arg(required = true)]
        tiles: Vec<PathBuf>,
    },
}

fn parse_vector(s: &str) -> Result<IntVector, String> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()
        .map(IntVector::new)
}

fn parse_window(s: &str) -> Result<Region, String> {
    let (lo, hi) = s.split_once("..").ok_or("expected lo..hi")?;
    Region::new(parse_vector(lo)?, parse_vector(hi)?).map_err(|e| e.to_string())
}

fn configure_threads() {
    if let Some(n) = std::env::var("PERDEC_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            // Fails only if a pool already exists, which cannot happen here.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Poly(PolyCmd::Add { .. }) => "poly add",
        Command::Poly(PolyCmd::Mul { .. }) => "poly mul",
        Command::Poly(PolyCmd::LineDir { .. }) => "poly line-dir",
        Command::Act { .. } => "act",
        Command::Decompose(_) => "decompose",
        Command::Sparse(SparseCmd::Check { .. }) => "sparse check",
        Command::Sparse(SparseCmd::Fibers { .. }) => "sparse fibers",
        Command::Sparse(SparseCmd::Split { .. }) => "sparse split",
        Command::Sparse(SparseCmd::Decompose { .. }) => "sparse decompose",
        Command::Sparse(SparseCmd::Full { .. }) => "sparse full",
        Command::Tiling(TilingCmd::Verify { .. }) => "tiling verify",
        Command::Tiling(TilingCmd::Independent { .. }) => "tiling independent",
        Command::Tiling(TilingCmd::Decompose { .. }) => "tiling decompose",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let start = Instant::now();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut run = Run::new(command_name(&cli.command), args, cli.opts.out.clone(), cli.opts.bounds());
    let result = commands::dispatch(&mut run, &cli.opts, &cli.command);
    if let Err(e) = &result {
        eprintln!("perdec: {e}");
    }
    let status = run.finish(result.as_ref().err(), start.elapsed().as_millis());
    ExitCode::from(status.exit_code() as u8)
}
