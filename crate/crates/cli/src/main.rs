//! `geolip`: reproducible experiments on point-set metrics, invariant
//! models and matching.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "geolip",
    version,
    about = "Point-set metrics, invariant models and matching"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a planar matching dataset as newline-delimited JSON.
    GenData(GenDataArgs),
    /// Check the metric inequalities on seeded random pairs.
    VerifyTheorems(VerifyArgs),
    /// Match every pair of a dataset and report accuracy per noise level.
    MatchBench(MatchBenchArgs),
    /// Measure the distortion of a model against a metric.
    Distort(DistortArgs),
    /// Compute one metric between two point-set files.
    Metric(MetricArgs),
    /// Convert a report into whitespace-separated columns for gnuplot.
    PlotData(PlotDataArgs),
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum NoiseArg {
    Fixed,
    Gaussian,
}

#[derive(Args, Debug, Serialize)]
pub struct GenDataArgs {
    /// Points per cloud.
    #[arg(long, default_value_t = 90)]
    pub n: usize,
    /// Number of pairs, or pairs per level with `--levels`.
    #[arg(long, default_value_t = 1000)]
    pub pairs: usize,
    #[arg(long, default_value_t = 0.01)]
    pub noise_start: f64,
    #[arg(long, default_value_t = 0.1)]
    pub noise_end: f64,
    /// Fixed noise levels instead of a linear schedule, e.g. `0,0.005,0.01`.
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = NoiseArg::Fixed)]
    pub noise_model: NoiseArg,
    /// Mixture components per cloud.
    #[arg(long, default_value_t = 3)]
    pub components: usize,
    /// Draw the held-out split of the same seed.
    #[arg(long)]
    pub test_split: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 200)]
    pub pairs: usize,
    #[arg(long, default_value_t = 4)]
    pub nmin: usize,
    #[arg(long, default_value_t = 7)]
    pub nmax: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [2, 3])]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Break one inequality on purpose; for testing the harness.
    #[arg(long, hide = true)]
    pub sabotage: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct MatchBenchArgs {
    /// Dataset written by `gen-data`.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    pub reg: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Seed of the feature model.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory for `pairs.csv` and `summary.csv`.
    #[arg(long)]
    pub out: PathBuf,
    /// Fail unless mean accuracy is non-increasing in the noise level.
    #[arg(long)]
    pub check_monotone: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelArg {
    Wl1,
    Bilip2d,
    Bilipgen,
    Sym,
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
pub enum MetricArg {
    #[value(name = "pm")]
    #[serde(rename = "pm")]
    Pm,
    #[value(name = "pm+")]
    #[serde(rename = "pm+")]
    PmProper,
    #[value(name = "hgw")]
    #[serde(rename = "hgw")]
    Hgw,
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SamplerArg {
    Random,
    Epsilon,
}

#[derive(Args, Debug, Serialize)]
pub struct DistortArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long, value_enum)]
    pub metric: MetricArg,
    #[arg(long, value_enum, default_value_t = SamplerArg::Random)]
    pub sampler: SamplerArg,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 4)]
    pub n_min: usize,
    /// Largest point count; the ε sampler uses exactly this many points.
    #[arg(long, default_value_t = 6)]
    pub n_max: usize,
    #[arg(long, default_value_t = 100)]
    pub pairs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Keep only pairs inside `Ω_c`.
    #[arg(long)]
    pub omega_c: Option<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = geolip::analysis::DEFAULT_EPSILONS)]
    pub epsilons: Vec<f64>,
    /// Message-passing rounds of the 1-WL model.
    #[arg(long, default_value_t = 2)]
    pub iterations: usize,
    /// Hidden width of the 1-WL model.
    #[arg(long, default_value_t = 8)]
    pub hidden: usize,
    /// Output width of the outer embedding of the bi-Lipschitz models.
    #[arg(long)]
    pub phi_dim: Option<usize>,
    /// Output directory for `report.json` and `pairs.csv`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
pub enum MetricKindArg {
    #[value(name = "pm")]
    #[serde(rename = "pm")]
    Pm,
    #[value(name = "pm+")]
    #[serde(rename = "pm+")]
    PmProper,
    #[value(name = "hgw")]
    #[serde(rename = "hgw")]
    Hgw,
    #[value(name = "winf")]
    #[serde(rename = "winf")]
    Winf,
}

#[derive(Args, Debug, Serialize)]
pub struct MetricArgs {
    #[arg(long, value_enum)]
    pub kind: MetricKindArg,
    /// Point set as JSON, or the binary form when the name ends in `.bin`.
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct PlotDataArgs {
    /// A `distort` or `verify-theorems` JSON report, or a `match-bench` summary.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

/// Outcome of a command that ran to completion.
pub enum Outcome {
    Pass,
    CheckFailed,
}

fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("GEOLIP_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| anyhow::anyhow!("GEOLIP_THREADS must be a positive integer, got '{v}'"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    init_threads()?;
    match cli.command {
        Command::GenData(a) => commands::gen_data(&a),
        Command::VerifyTheorems(a) => commands::verify(&a),
        Command::MatchBench(a) => commands::match_bench(&a),
        Command::Distort(a) => commands::distort(&a),
        Command::Metric(a) => commands::metric(&a),
        Command::PlotData(a) => commands::plot_data(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
