use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "kpz-lab", version, about = "Exact KPZ distributions, ASEP and polymer simulation")]
pub struct Cli {
    /// Plain-text `key=value` file mirroring the long flags; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate an exact CDF to CSV.
    Dist(DistArgs),
    /// Run a simulation and write samples or their ECDF.
    Simulate(SimulateArgs),
    /// Distance between two CSV files.
    Compare(CompareArgs),
    /// Run the reduced invariant suites of every module.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistKind {
    TwGue,
    KpzCrossover,
    KpzEdge,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GueMethod {
    Fredholm,
    Painleve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CrossoverRoute {
    Theorem,
    Csc,
}

#[derive(Debug, Clone, Args)]
pub struct DistArgs {
    pub kind: DistKind,
    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    pub s_min: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub s_max: f64,
    #[arg(long, default_value_t = 0.25)]
    pub step: f64,
    /// F_GUE route.
    #[arg(long, value_enum, default_value_t = GueMethod::Fredholm)]
    pub method: GueMethod,
    /// F_T route.
    #[arg(long, value_enum, default_value_t = CrossoverRoute::Theorem)]
    pub route: CrossoverRoute,
    /// KPZ time T.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Spatial point X (edge distribution).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x: f64,
    /// Nyström node count override.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Output file (stdout when absent).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimKind {
    Asep,
    Polymer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Observable {
    /// ASEP: `h(t, x)`.
    Height,
    /// ASEP: `−(h(t/γ, x) − t/2)/(2^{−1/3}t^{1/3})`, whose law tends to F_GUE for the wedge.
    Fluctuation,
    /// Polymer: point-to-line `W_n`.
    Martingale,
    /// Polymer: `log Z̃(n, y)`.
    LogPartition,
    /// Polymer: maximal path sum to `(n, y)`.
    LastPassage,
    /// Polymer: `Z̃/E Z̃` under the weak-noise scaling.
    Intermediate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Disorder {
    Normal,
    Exponential,
    Zero,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    pub kind: SimKind,
    #[arg(long)]
    pub observable: Option<Observable>,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Write the ECDF (`s,ecdf`) instead of the samples.
    #[arg(long)]
    pub ecdf: bool,
    /// ASEP geometry.
    #[arg(long, default_value = "wedge")]
    pub geometry: String,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// ASEP time, or the macroscopic T of the intermediate-disorder scaling.
    #[arg(long, default_value_t = 10.0)]
    pub t: f64,
    /// ASEP site, or the macroscopic X of the intermediate-disorder scaling.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x: f64,
    #[arg(long, value_enum, default_value_t = Disorder::Normal)]
    pub distribution: Disorder,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub y: i64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.25)]
    pub epsilon: f64,
    /// Divide each weight factor by its mean.
    #[arg(long)]
    pub recenter: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    pub file_a: PathBuf,
    pub file_b: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SelftestArgs {
    /// Add this to λ_ε before the Gärtner identity check (sensitivity canary).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub perturb_lambda: f64,
}
