use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "lamella",
    version,
    about = "Stripe patterns of the nonlocal isoperimetric energy on thin domains"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One-dimensional phase diagram: optimal stripe count against gamma.
    Phase1d(Phase1dArgs),
    /// Samples of u_k, its potential v_k and v_k'.
    Potential(PotentialArgs),
    /// Linear stability of u_k on the rectangle, at one width or over a (k, gamma) grid.
    Stability(StabilityArgs),
    /// Anneal one or more chains on a thin rectangle.
    Minimize2d(MinimizeArgs),
    /// Observed against predicted stripe counts over a list of gamma values.
    Cascade(CascadeArgs),
    /// Anneal on widths a/j and compare with u_k.
    GammaLimit(GammaLimitArgs),
    /// Energy of a field file.
    Energy(EnergyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write results here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// `NXxNY` or `NXxNYxNZ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridArg(pub Vec<usize>);

impl FromStr for GridArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let counts = s
            .split(['x', 'X'])
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| format!("bad grid {s:?}, expected NXxNY"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if !(2..=3).contains(&counts.len()) || counts.contains(&0) {
            return Err(format!(
                "bad grid {s:?}, expected NXxNY with positive counts"
            ));
        }
        Ok(GridArg(counts))
    }
}

#[derive(Debug, Args)]
pub struct Phase1dArgs {
    /// A single gamma instead of a range.
    #[arg(long, conflicts_with_all = ["gamma_min", "gamma_max", "steps"])]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub gamma_min: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub gamma_max: f64,
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct PotentialArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 1001)]
    pub samples: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[arg(long, required_unless_present = "scan")]
    pub k: Option<usize>,
    #[arg(long, required_unless_present = "scan")]
    pub gamma: Option<f64>,
    /// Width of the rectangle for a single verdict; omitted, only thresholds are reported.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Tabulate eps* and the sufficient bound for k = 1..=k-max over a gamma range.
    #[arg(long, conflicts_with_all = ["k", "gamma", "eps"])]
    pub scan: bool,
    #[arg(long, default_value_t = 4)]
    pub k_max: usize,
    #[arg(long, default_value_t = 10.0)]
    pub gamma_min: f64,
    #[arg(long, default_value_t = 10000.0)]
    pub gamma_max: f64,
    /// Number of gamma values, spaced geometrically.
    #[arg(long, default_value_t = 10)]
    pub gamma_steps: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    /// Initial temperature; defaults to 2 eps.
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long, default_value_t = 1e-4)]
    pub tf: f64,
    #[arg(long, default_value_t = 0.95)]
    pub cooling: f64,
    #[arg(long, default_value_t = 200)]
    pub sweeps: usize,
    /// Keep the potential exact after every move instead of refreshing it each sweep.
    #[arg(long)]
    pub exact: bool,
    /// Base seed; omitted, one is drawn and printed to standard error.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitArg {
    Random,
    Lamellar(usize),
}

impl FromStr for InitArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(InitArg::Random),
            _ => s
                .strip_prefix("lamellar:")
                .and_then(|k| k.parse().ok())
                .filter(|&k| k > 0)
                .map(InitArg::Lamellar)
                .ok_or_else(|| format!("bad init {s:?}, expected random or lamellar:K")),
        }
    }
}

#[derive(Debug, Args)]
pub struct MinimizeArgs {
    #[arg(long)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub m: f64,
    #[arg(long)]
    pub eps: f64,
    /// Defaults to max(8, round(eps*240)) x 240.
    #[arg(long)]
    pub grid: Option<GridArg>,
    /// Number of chains, seeded seed, seed+1, ...
    #[arg(long, default_value_t = 1)]
    pub chains: usize,
    #[arg(long, default_value = "random")]
    pub init: InitArg,
    /// Dump the best field of the lowest-energy chain in the field text format.
    #[arg(long)]
    pub field: Option<PathBuf>,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct CascadeArgs {
    #[arg(long, value_delimiter = ',', default_value = "5,50,150,400,800")]
    pub gammas: Vec<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    #[arg(long, default_value = "8x60")]
    pub grid: GridArg,
    #[arg(long, default_value_t = 3)]
    pub chains: usize,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct GammaLimitArgs {
    #[arg(long)]
    pub gamma: f64,
    #[arg(long)]
    pub a: f64,
    #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
    pub js: Vec<usize>,
    /// Cells along y; x uses max(8, round(eps*ny)).
    #[arg(long, default_value_t = 120)]
    pub ny: usize,
    #[arg(long, default_value = "random")]
    pub init: InitArg,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    /// Field file; its header supplies the grid, the widths and m.
    #[arg(long)]
    pub field: PathBuf,
    #[arg(long)]
    pub gamma: f64,
    /// Overrides the mass recorded in the file header.
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}
