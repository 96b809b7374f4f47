use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use levykernel_core::stable::Route;

#[derive(Debug, Parser)]
#[command(
    name = "levykernel",
    version,
    about = "Heat kernels of radial Lévy processes and their fractional derivatives"
)]
pub struct Cli {
    /// TOML file with default tolerances (falls back to $LEVYKERNEL_CONFIG).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one kernel value.
    Eval(EvalArgs),
    /// Tabulate a kernel over a radial grid.
    Sweep(SweepArgs),
    /// Cross-check several methods on a grid and fit the tail.
    Compare(CompareArgs),
    /// Ratios of the kernel to its two-sided power-law envelope.
    Envelope(EnvelopeArgs),
    /// List the built-in symbols.
    Symbols(SymbolsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum MethodArg {
    Mb,
    Series,
    SmallR,
    Closed,
    Oracle,
    Auto,
}

impl MethodArg {
    pub fn as_str(&self) -> &'static str {
        match self {
            MethodArg::Mb => "mb",
            MethodArg::Series => "series",
            MethodArg::SmallR => "small-r",
            MethodArg::Closed => "closed",
            MethodArg::Oracle => "oracle",
            MethodArg::Auto => "auto",
        }
    }

    pub fn route(&self) -> Route {
        match self {
            MethodArg::Mb => Route::Mb,
            MethodArg::Series => Route::Series,
            MethodArg::SmallR => Route::SmallR,
            MethodArg::Closed => Route::Closed,
            MethodArg::Oracle => Route::Oracle,
            MethodArg::Auto => Route::Auto,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct KernelArgs {
    /// Dimension.
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    /// Stability index in (0, 2]; required unless --symbol is given.
    #[arg(long, conflicts_with = "symbol")]
    pub alpha: Option<f64>,
    /// Order of the fractional Laplacian applied to the kernel.
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Radial symbol as inline JSON, or @path to a JSON file.
    #[arg(long, value_name = "JSON|@FILE")]
    pub symbol: Option<String>,
    /// Integration-by-parts order for --symbol contours.
    #[arg(long)]
    pub k: Option<usize>,
    /// Contour abscissa; the height is still chosen adaptively.
    #[arg(long = "contour-c", value_name = "C")]
    pub contour_c: Option<f64>,
    /// Relative tolerance, overriding the config file.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long = "r-min")]
    pub r_min: f64,
    #[arg(long = "r-max")]
    pub r_max: f64,
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    /// Space the radii geometrically.
    #[arg(long)]
    pub log: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Emit JSON instead of the default format.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long)]
    pub r: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    /// Also evaluate the quadrature oracle and report the gap.
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// One or more methods, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "auto")]
    pub method: Vec<MethodArg>,
    /// Add the oracle to the methods.
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Methods to compare; defaults to every method applicable to the kernel.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub method: Vec<MethodArg>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EnvelopeArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Method for the kernel values; auto for stable kernels, oracle for --symbol.
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SymbolsArgs {
    #[command(flatten)]
    pub output: OutputArgs,
}
