//! Command-line flags.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use uniapprox::StrategyMode;

#[derive(Debug, Parser)]
#[command(name = "uniapprox", version, about = "Unitary best rational approximation of exp(i*omega*x) on [-1, 1]")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the unitary best approximant by corrected interpolation.
    Best(BestArgs),
    /// Estimate the frequency at which the best approximant reaches an error.
    EstimateOmega(EstimateArgs),
    /// Run AAA, optionally followed by Lawson iterations.
    Aaa(AaaArgs),
    /// Reproduce a table of results.
    Sweep(SweepArgs),
    /// Evaluate a stored approximant.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Combined,
    Brasil,
    Maehly,
}

impl From<Strategy> for StrategyMode {
    fn from(s: Strategy) -> Self {
        match s {
            Strategy::Combined => StrategyMode::Combined,
            Strategy::Brasil => StrategyMode::BrasilOnly,
            Strategy::Maehly => StrategyMode::MaehlyOnly,
        }
    }
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("target").required(true).args(["omega", "eps"]))]
pub struct BestArgs {
    /// Degree of the rational approximant.
    #[arg(long)]
    pub n: usize,
    /// Frequency.
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    /// Target error; the frequency is then estimated.
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    /// Stop once the error in uniformity is below this value.
    #[arg(long)]
    pub tol_delta: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long, value_enum, default_value_t = Strategy::Combined)]
    pub strategy: Strategy,
    /// Output document; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-iteration trace as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Initial nodes: a document with `interp_nodes`, a JSON array, or
    /// numbers separated by whitespace or commas.
    #[arg(long)]
    pub seed_nodes: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimateMethod {
    Auto,
    Experimental,
    Asymptotic,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = EstimateMethod::Auto)]
    pub method: EstimateMethod,
}

#[derive(Debug, Args)]
pub struct AaaArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub omega: f64,
    /// Number of equispaced test nodes, or `adaptive`.
    #[arg(long, default_value = "4900")]
    pub test_nodes: String,
    /// Refinement rounds for adaptive test nodes.
    #[arg(long)]
    pub rounds: Option<usize>,
    /// Lawson iterations after AAA; 0 runs AAA only.
    #[arg(long, default_value_t = 0)]
    pub lawson: usize,
    /// The result counts as converged when its error in uniformity is at
    /// most this value.
    #[arg(long, default_value_t = 1e-6)]
    pub tol_delta: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Lawson error history as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    #[value(name = "table2-n32")]
    Table2N32,
    #[value(name = "table2-n256")]
    Table2N256,
    Table3,
    OmegaGrid,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub preset: Preset,
    /// Output CSV; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("where").required(true).args(["points", "grid"]))]
pub struct EvalArgs {
    /// Approximant document written by `best` or `aaa`.
    #[arg(long)]
    pub approx: PathBuf,
    /// Points in [-1, 1], one per line or in the first CSV column.
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// Number of equispaced points on [-1, 1].
    #[arg(long)]
    pub grid: Option<usize>,
    /// Output CSV; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
