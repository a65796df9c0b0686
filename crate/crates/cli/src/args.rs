use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use robusttest_core::divergences::{Metric, Route};
use robusttest_core::experiments::Arm;
use robusttest_core::{Distribution, TestKind};
use serde::{Serialize, Serializer};

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "robusttest",
    version,
    about = "Simple hypothesis tests, distances and Monte-Carlo experiments",
    args_override_self = true
)]
pub struct Cli {
    #[command(subcommand)]
    #[serde(flatten)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Distances between two laws.
    Distance(DistanceArgs),
    /// One decision on one sample.
    Test(TestArgs),
    /// Type-I and type-II error frequencies over a grid of sample sizes.
    Simulate(SimulateArgs),
    /// Smallest sample size reaching a target error.
    Complexity(ComplexityArgs),
    /// Correct-decision rates when samples come from other laws.
    Sweep(SweepArgs),
    /// Counterexample constructions.
    Repro(ReproArgs),
    /// Inequality checks over a random corpus of finite laws.
    Bounds(BoundsArgs),
    /// Round-robin selection among candidate laws.
    Tournament(TournamentArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Distance(_) => "distance",
            Command::Test(_) => "test",
            Command::Simulate(_) => "simulate",
            Command::Complexity(_) => "complexity",
            Command::Sweep(_) => "sweep",
            Command::Repro(_) => "repro",
            Command::Bounds(_) => "bounds",
            Command::Tournament(_) => "tournament",
        }
    }

    pub fn output(&self) -> &OutputArgs {
        match self {
            Command::Distance(a) => &a.output,
            Command::Test(a) => &a.output,
            Command::Simulate(a) => &a.output,
            Command::Complexity(a) => &a.output,
            Command::Sweep(a) => &a.output,
            Command::Repro(a) => &a.output,
            Command::Bounds(a) => &a.output,
            Command::Tournament(a) => &a.output,
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Command::Distance(_) => None,
            Command::Test(a) => Some(a.seed),
            Command::Simulate(a) => Some(a.spec.seed),
            Command::Complexity(a) => Some(a.spec.seed),
            Command::Sweep(a) => Some(a.spec.seed),
            Command::Repro(a) => Some(a.seed),
            Command::Bounds(a) => Some(a.seed),
            Command::Tournament(a) => Some(a.seed),
        }
    }
}

fn parse_distribution(s: &str) -> Result<Distribution, String> {
    s.parse().map_err(|e: robusttest_core::Error| e.to_string())
}

fn literal<S: Serializer>(d: &Distribution, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(d)
}

fn literal_opt<S: Serializer>(d: &Option<Distribution>, s: S) -> Result<S::Ok, S::Error> {
    match d {
        Some(d) => s.collect_str(d),
        None => s.serialize_none(),
    }
}

fn literals<S: Serializer>(ds: &[Distribution], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(ds.iter().map(|d| d.to_string()))
}

#[derive(Debug, Args, Serialize)]
pub struct OutputArgs {
    /// CSV destination. Defaults to `$ROBUSTTEST_OUT_DIR/<command>.csv` when
    /// that variable is set, else stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// File of `key = value` lines read as flags; command-line flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct PairArgs {
    #[arg(long, value_parser = parse_distribution)]
    #[serde(serialize_with = "literal")]
    pub p: Distribution,
    #[arg(long, value_parser = parse_distribution)]
    #[serde(serialize_with = "literal")]
    pub q: Distribution,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricArg {
    All,
    Hellinger,
    Tv,
    Chi2,
    Kl,
    Delta,
}

impl MetricArg {
    pub fn metrics(self) -> Vec<Metric> {
        match self {
            MetricArg::All => Metric::ALL.to_vec(),
            MetricArg::Hellinger => vec![Metric::Hellinger],
            MetricArg::Tv => vec![Metric::TotalVariation],
            MetricArg::Chi2 => vec![Metric::Chi2Symmetric],
            MetricArg::Kl => vec![Metric::Kl],
            MetricArg::Delta => vec![Metric::DeltaMax],
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RouteArg {
    Auto,
    Quadrature,
}

impl From<RouteArg> for Route {
    fn from(r: RouteArg) -> Self {
        match r {
            RouteArg::Auto => Route::Auto,
            RouteArg::Quadrature => Route::Quadrature,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct DistanceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub pair: PairArgs,
    #[arg(long, value_enum, default_value = "all")]
    pub metric: MetricArg,
    /// `quadrature` skips exact sums and closed forms.
    #[arg(long, value_enum, default_value = "auto")]
    pub route: RouteArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestArg {
    Hellinger,
    NeymanPearson,
    Scheffe,
    DpHellinger,
}

impl From<TestArg> for TestKind {
    fn from(t: TestArg) -> Self {
        match t {
            TestArg::Hellinger => TestKind::Hellinger,
            TestArg::NeymanPearson => TestKind::NeymanPearson,
            TestArg::Scheffe => TestKind::Scheffe,
            TestArg::DpHellinger => TestKind::DpHellinger,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct PrivacyArgs {
    /// Privacy budget of `dp-hellinger`.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// `unknown` (use 1), `auto` (exact for finite supports, else 1), or a
    /// number in [0, 1].
    #[arg(long, default_value = "unknown")]
    pub delta_pq: String,
}

#[derive(Debug, Args, Serialize)]
pub struct TestArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub pair: PairArgs,
    #[arg(long, value_enum, default_value = "hellinger")]
    pub test: TestArg,
    /// Law the sample is drawn from; defaults to `p`.
    #[arg(long, value_parser = parse_distribution)]
    #[serde(serialize_with = "literal_opt")]
    pub source: Option<Distribution>,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Comma-separated observations; replaces the drawn sample.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub samples: Option<Vec<f64>>,
    /// Decision threshold (a log threshold for `neyman-pearson`).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub threshold: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub privacy: PrivacyArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyArg {
    Zero,
    Calibrated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArmArg {
    Null,
    Alt,
}

impl From<ArmArg> for Arm {
    fn from(a: ArmArg) -> Self {
        match a {
            ArmArg::Null => Arm::Null,
            ArmArg::Alt => Arm::Alt,
        }
    }
}

/// Flags shared by the Monte-Carlo commands.
#[derive(Debug, Args, Serialize)]
pub struct SpecArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub pair: PairArgs,
    #[arg(long, value_enum, default_value = "hellinger")]
    pub test: TestArg,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "zero")]
    pub threshold_policy: PolicyArg,
    #[arg(long, default_value_t = 0.05)]
    pub type1_target: f64,
    #[arg(long, default_value_t = 1000)]
    pub calib_trials: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub privacy: PrivacyArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub spec: SpecArgs,
    /// Comma-separated, strictly increasing sample sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Perturbed source for the arm named by `--r-arm`.
    #[arg(long, value_parser = parse_distribution)]
    #[serde(serialize_with = "literal_opt")]
    pub r: Option<Distribution>,
    #[arg(long, value_enum, default_value = "null")]
    pub r_arm: ArmArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct ComplexityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub spec: SpecArgs,
    /// Target maximum error.
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, default_value_t = robusttest_core::experiments::DEFAULT_N_CAP)]
    pub n_cap: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub spec: SpecArgs,
    /// Sample source; repeat for each law in the sweep.
    #[arg(long = "r", value_parser = parse_distribution, required = true)]
    #[serde(rename = "r", serialize_with = "literals")]
    pub r_family: Vec<Distribution>,
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReproArg {
    NpCounterexample,
    ScheffeGap,
    ZeroMean,
}

#[derive(Debug, Args, Serialize)]
pub struct ReproArgs {
    #[arg(long, value_enum)]
    pub which: ReproArg,
    #[arg(long, default_value_t = 2.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long, default_value_t = 10.0)]
    pub k: f64,
    /// Comma-separated epsilons for `zero-mean`.
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.001,0.0001")]
    pub eps: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 1000)]
    pub pairs: usize,
    #[arg(long, default_value_t = 10)]
    pub max_support: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct TournamentArgs {
    /// Candidate law; repeat for each.
    #[arg(long = "candidate", value_parser = parse_distribution, required = true)]
    #[serde(rename = "candidate", serialize_with = "literals")]
    pub candidates: Vec<Distribution>,
    #[arg(long, value_parser = parse_distribution)]
    #[serde(serialize_with = "literal")]
    pub source: Distribution,
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}
