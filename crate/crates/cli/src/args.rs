use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "affine-cf",
    version,
    about = "Characteristic functions of affine processes as symbol power series"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the series over a (t, x, u) grid.
    Eval(EvalArgs),
    /// Evaluate the series and an oracle over a grid and report the errors.
    Compare(CompareArgs),
    /// Dump the exact coefficient table (or the symbolic terms d_k).
    Tables(TablesArgs),
    /// Dump the counting triangle with row sums.
    Triangle(TriangleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Local,
    Global,
    Generalized,
}

impl ModeArg {
    pub fn engine_name(self) -> &'static str {
        match self {
            ModeArg::Local => "local",
            ModeArg::Global => "global",
            ModeArg::Generalized => "generalized",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RecursionArg {
    Difference,
    BruteForce,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Model file (JSON).
    #[arg(long)]
    pub model: PathBuf,
    /// Truncation order K.
    #[arg(long, default_value_t = affine_cf::series::DEFAULT_ORDER)]
    pub k: usize,
    /// Times: `min:max:count`, a comma list, or a single value.
    #[arg(long, allow_hyphen_values = true)]
    pub t: String,
    /// Frequencies, one flag per coordinate; missing coordinates are 0.
    #[arg(long, allow_hyphen_values = true)]
    pub u: Vec<String>,
    /// State points, one flag per coordinate; the grid is their product.
    /// Missing coordinates default to 0 moved into the state domain.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Vec<String>,
    #[arg(long, value_enum, default_value = "local")]
    pub mode: ModeArg,
    /// Baseline for the generalized mode.
    #[arg(long)]
    pub baseline: Option<String>,
    /// User baseline definitions (JSON); each is registered under its name.
    #[arg(long)]
    pub baseline_config: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "difference")]
    pub recursion: RecursionArg,
    /// Fixed time-transform parameter for the global mode.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Oracle name: auto, closed, levy, vasicek, cir, heston, riccati.
    #[arg(long, default_value = "auto")]
    pub oracle: String,
    /// RK4 steps of the Riccati oracle.
    #[arg(long, default_value_t = 2000)]
    pub rk_steps: usize,
    /// Include wall-clock timings in the summary (output is then not reproducible).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Clone, Args)]
pub struct TablesArgs {
    /// Highest row.
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    /// Largest accepted `--k`.
    #[arg(long, default_value_t = 20)]
    pub cap: usize,
    /// Dump the symbolic terms d_k instead of the coefficient table.
    #[arg(long)]
    pub series: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TriangleArgs {
    /// Number of rows, at most 20.
    #[arg(long, default_value_t = 5)]
    pub rows: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}
