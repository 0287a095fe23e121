use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nsmop::{InitialStep, SolverConfig};

#[derive(Debug, Parser)]
#[command(name = "nsmop", version, about = "Descent method for nonsmooth multiobjective problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the descent method from one starting point.
    Solve(SolveArgs),
    /// Run every grid start of the benchmark suite and aggregate counters.
    Bench(BenchArgs),
    /// Cover the Pareto set with boxes by subdivision.
    Pareto(ParetoArgs),
    /// Print the problem catalog as JSON.
    Catalog(CatalogArgs),
    /// Recompute reference values with the validation oracles.
    #[command(hide = true)]
    Validate(ValidateArgs),
}

fn parse_t0(s: &str) -> Result<InitialStep, String> {
    if s.eq_ignore_ascii_case("adaptive") {
        return Ok(InitialStep::Adaptive);
    }
    match s.parse::<f64>() {
        Ok(t) if t > 0.0 && t.is_finite() => Ok(InitialStep::Fixed(t)),
        _ => Err(format!("expected `adaptive` or a positive number, got `{s}`")),
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolverFlags {
    /// Radius of the epsilon-ball.
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    /// Criticality threshold on the direction norm.
    #[arg(long, default_value_t = 1e-3)]
    pub delta: f64,
    /// Armijo constant in (0, 1).
    #[arg(long, default_value_t = 0.25)]
    pub c: f64,
    /// Initial Armijo step: `adaptive` (max(1/||v||, 1)) or a fixed value.
    #[arg(long, default_value = "adaptive", value_parser = parse_t0)]
    pub t0: InitialStep,
    /// Strictly decreasing radii, e.g. 0.1,0.01,0.001.
    #[arg(long, value_delimiter = ',')]
    pub eps_schedule: Option<Vec<f64>>,
    /// Outer iteration guard per run (per stage with a schedule).
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
}

impl SolverFlags {
    pub fn config(&self) -> SolverConfig {
        let mut config = SolverConfig::default()
            .with_epsilon(self.eps)
            .with_delta(self.delta)
            .with_initial_step(self.t0)
            .with_max_outer_iterations(self.max_iter);
        config.armijo_c = self.c;
        config.epsilon_schedule = self.eps_schedule.clone();
        config
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Problem selector (see `nsmop catalog`).
    #[arg(long)]
    pub problem: String,
    /// Comma-separated starting point.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub start: Vec<f64>,
    #[command(flatten)]
    pub flags: SolverFlags,
    #[arg(long, default_value = "nsmop-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchMode {
    SingleEps,
    EpsDecreasing,
}

impl BenchMode {
    pub fn label(&self) -> &'static str {
        match self {
            BenchMode::SingleEps => "single-eps",
            BenchMode::EpsDecreasing => "eps-decreasing",
        }
    }
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// `all` or a comma-separated list of suite numbers.
    #[arg(long, default_value = "all")]
    pub problem: String,
    #[arg(long, value_enum, default_value_t = BenchMode::SingleEps)]
    pub mode: BenchMode,
    #[command(flatten)]
    pub flags: SolverFlags,
    #[arg(long, default_value = "nsmop-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ParetoArgs {
    #[arg(long, default_value = "crescent-mifflin2")]
    pub problem: String,
    /// `lo,hi` for a cube or `lo1,hi1,lo2,hi2,...` per axis.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-3.1,3")]
    pub root: Vec<f64>,
    #[arg(long, default_value_t = 9)]
    pub subdiv_iters: usize,
    /// Outer iterations of the descent method per application of the map.
    #[arg(long, default_value_t = 15)]
    pub inner_m: usize,
    #[arg(long, default_value_t = 5)]
    pub samples_per_axis: usize,
    #[command(flatten)]
    pub flags: SolverFlags,
    #[arg(long, default_value = "nsmop-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 512)]
    pub disk_facets: usize,
}
