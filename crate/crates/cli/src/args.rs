use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "semigroup", version, about = "Discretised semigroup, dilation and von Neumann inequality checks")]
pub struct Cli {
    /// Tolerance used by every check.
    #[arg(long, global = true, env = "SEMIGROUP_TOL", default_value_t = 1e-10)]
    pub tol: f64,

    /// Largest number of entries of any dense matrix a command may build.
    #[arg(long, global = true, env = "SEMIGROUP_MAX_ENTRIES", default_value_t = semigroup_core::DEFAULT_MAX_ENTRIES)]
    pub max_entries: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate or check the discretised semigroup T^(N).
    #[command(subcommand)]
    Interp(InterpCommand),
    /// Exhaustive check of the projection/shift commutation relation.
    Bscr(BscrArgs),
    /// Build the three-operator Parrott tuple from two unitaries.
    Parrott(ParrottArgs),
    /// Check the von Neumann inequality for one tuple and polynomial.
    Vn(VnArgs),
    /// Random search for von Neumann inequality violations.
    VnSearch(VnSearchArgs),
    /// Block unitary dilation of a single contraction.
    Dilate(DilateArgs),
    /// Approximation error of time-scaled blends of exp(t A).
    Approx(ApproxArgs),
    /// Operator class flags of a matrix.
    Structure(StructureArgs),
    /// Check that T^(N)(t) inherits the operator classes of the tuple.
    Preserve(PreserveArgs),
}

#[derive(Debug, Subcommand)]
pub enum InterpCommand {
    /// Dense matrix of T^(N)(t).
    Eval(InterpEvalArgs),
    /// Homomorphism, commutation, contractivity, interpolation and
    /// compression checks over the grid.
    Check(InterpCheckArgs),
}

#[derive(Debug, Args)]
pub struct InterpEvalArgs {
    #[arg(long)]
    pub tuple: PathBuf,
    /// Grid resolution.
    #[arg(long = "N")]
    pub n: usize,
    /// Grid time "k1/N,k2/N,…"; bare integers are whole units.
    #[arg(long = "t")]
    pub t: String,
    /// Write the operator as a matrix file instead of embedding it in the report.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InterpCheckArgs {
    #[arg(long)]
    pub tuple: PathBuf,
    #[arg(long = "N")]
    pub n: usize,
    /// Check all times with numerators below this bound; defaults to 2N.
    #[arg(long)]
    pub max_num: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BscrArgs {
    #[arg(long = "N")]
    pub n: usize,
    /// Sample U(t)*P(s)U(t) f for the pair "s,t", each as k/N or an integer.
    #[arg(long, requires = "out")]
    pub trace: Option<String>,
    /// Signal f as a JSON list of N [re, im] pairs; defaults to all ones.
    #[arg(long, requires = "trace")]
    pub signal: Option<PathBuf>,
    /// CSV file for the trace.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ParrottArgs {
    #[arg(long)]
    pub r1: PathBuf,
    #[arg(long)]
    pub r2: PathBuf,
    /// Only require R2 to be a contraction.
    #[arg(long)]
    pub relaxed: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VnArgs {
    #[arg(long)]
    pub tuple: PathBuf,
    #[arg(long)]
    pub poly: PathBuf,
    /// Torus lattice size M per axis.
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VnSearchArgs {
    #[arg(long = "d")]
    pub d: usize,
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    /// Degree cap of the random test polynomials.
    #[arg(long, default_value_t = 3)]
    pub poly_degree: u32,
    /// Extra tuple-and-polynomial case files appended to the pool.
    #[arg(long = "case")]
    pub cases: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DilateArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    /// Highest power the dilation must reproduce.
    #[arg(long = "m")]
    pub m: usize,
    /// Report the power check and unitarity defect.
    #[arg(long)]
    pub verify: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    /// Commuting generators A_i in the tuple file format.
    #[arg(long)]
    pub generators: PathBuf,
    /// Comma-separated lattice spacings.
    #[arg(long)]
    pub eps_list: String,
    #[arg(long)]
    pub tmax: f64,
    #[arg(long)]
    pub steps: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct StructureArgs {
    #[arg(long)]
    pub matrix: PathBuf,
}

#[derive(Debug, Args)]
pub struct PreserveArgs {
    #[arg(long)]
    pub tuple: PathBuf,
    #[arg(long = "N")]
    pub n: usize,
    /// Check all times with numerators below this bound; defaults to 2N.
    #[arg(long)]
    pub max_num: Option<usize>,
}
