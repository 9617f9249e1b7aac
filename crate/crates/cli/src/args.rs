use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use probscore::tournament::MissingPolicy;
use probscore::verification::Binning;
use probscore::{LogZero, ScoringRule};

#[derive(Debug, Parser)]
#[command(name = "probscore", version, about = "Score probability forecasts and analyse forecasting tournaments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output style
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,

    /// Write the report here instead of stdout. For `score`, a directory
    /// that also receives leaderboard.csv and trajectories.csv.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Aligned tables, two decimals
    Human,
    /// Comma-separated, full precision
    Delimited,
    /// JSON, full precision
    Structured,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score a tournament and write the leaderboard
    Score(ScoreArgs),
    /// Murphy (and optionally climatology) decomposition of a binary record
    Decompose(DecomposeArgs),
    /// Paired Δ comparison of two forecast streams
    Compare(CompareArgs),
    /// Monte Carlo tournament of simulated forecasters
    Simulate(SimulateArgs),
    /// Kelly betting on a biased coin at even odds
    Kelly(KellyArgs),
    /// Entropy, exposure and penalty of the scoring rules on a grid
    Rules(RulesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleName {
    Brier,
    Log,
    Spherical,
    Elliptical,
    Poisson,
}

impl RuleName {
    fn as_str(self) -> &'static str {
        match self {
            RuleName::Brier => "brier",
            RuleName::Log => "log",
            RuleName::Spherical => "spherical",
            RuleName::Elliptical => "elliptical",
            RuleName::Poisson => "poisson",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RuleArgs {
    #[arg(long, value_enum, default_value_t = RuleName::Brier)]
    pub rule: RuleName,

    /// Centre of the elliptical rule, strictly between 0 and 1
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Log score of a zero probability on the outcome: inf, floor or reject
    #[arg(long)]
    pub log_zero: Option<LogZero>,
}

impl RuleArgs {
    pub fn resolve(&self) -> anyhow::Result<ScoringRule> {
        if self.log_zero.is_some() && self.rule != RuleName::Log {
            anyhow::bail!("--log-zero only applies to the log rule");
        }
        Ok(ScoringRule::from_name(self.rule.as_str(), self.alpha, self.log_zero.unwrap_or_default())?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct TournamentFiles {
    /// Events file: event_id,round,k,outcome
    #[arg(long, requires = "forecasts", conflicts_with = "input")]
    pub events: Option<PathBuf>,

    /// Forecasts file: forecaster_id,event_id,p_0;p_1;...
    #[arg(long, requires = "events")]
    pub forecasts: Option<PathBuf>,

    /// Single file of JSON lines holding both events and forecasts
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub files: TournamentFiles,

    #[command(flatten)]
    pub rule: RuleArgs,

    /// Forecasters who skipped an event: `uniform` imputes 1/K, `strict` leaves it out
    #[arg(long, default_value = "uniform")]
    pub missing: MissingPolicy,

    /// Score the rows that did load even if others were rejected
    #[arg(long)]
    pub skip_invalid: bool,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Binary record with header forecast,outcome (outcome 1/0 or true/false)
    #[arg(long, conflicts_with_all = ["events", "input"])]
    pub record: Option<PathBuf>,

    #[command(flatten)]
    pub files: TournamentFiles,

    /// Forecaster to decompose when reading tournament files
    #[arg(long)]
    pub forecaster: Option<String>,

    /// `by-value` or `edges:0,0.2,0.4,0.6,0.8,1`
    #[arg(long, default_value = "by-value")]
    pub binning: Binning,

    /// Historical frequency for the climatology decomposition
    #[arg(long)]
    pub base_frequency: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Streams file with header q,q_prime,outcome and an optional fourth column p
    #[arg(long)]
    pub streams: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML configuration; overrides the quick-setup flags below
    #[arg(long, conflicts_with_all = ["n", "delta", "p", "replicates"])]
    pub config: Option<PathBuf>,

    /// Questions per replicate
    #[arg(long, default_value_t = 100)]
    pub n: usize,

    /// Offset of the off-target forecaster from the truth
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,

    /// True probability of every question
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,

    #[arg(long, default_value_t = 10_000)]
    pub replicates: usize,

    /// Master seed; defaults to the config's seed, or 0
    #[arg(long)]
    pub seed: Option<u64>,

    /// Scoring rule; defaults to the config's rule, or brier
    #[arg(long, value_enum)]
    pub rule: Option<RuleName>,

    #[arg(long)]
    pub alpha: Option<f64>,

    #[arg(long)]
    pub log_zero: Option<LogZero>,

    /// Also write each replicate's mean scores to this CSV file
    #[arg(long)]
    pub raw: Option<PathBuf>,
}

impl SimulateArgs {
    pub fn rule(&self) -> anyhow::Result<Option<ScoringRule>> {
        match self.rule {
            Some(rule) => RuleArgs { rule, alpha: self.alpha, log_zero: self.log_zero }.resolve().map(Some),
            None if self.alpha.is_some() || self.log_zero.is_some() => {
                anyhow::bail!("--alpha and --log-zero need --rule")
            }
            None => Ok(None),
        }
    }
}

#[derive(Debug, Args)]
pub struct KellyArgs {
    /// Probability of winning each even-odds play
    #[arg(long)]
    pub p: f64,

    /// Stake this fraction instead of the Kelly fraction
    #[arg(long, conflicts_with = "multiple")]
    pub fraction: Option<f64>,

    /// Stake this multiple of the Kelly fraction, e.g. 0.5 for half-Kelly
    #[arg(long)]
    pub multiple: Option<f64>,

    /// Simulate this many plays
    #[arg(long)]
    pub plays: Option<usize>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Write the simulated bank trajectory to this CSV file
    #[arg(long, requires = "plays")]
    pub trajectory: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RulesArgs {
    /// Only this rule; by default brier, log, spherical and poisson, plus
    /// elliptical when --alpha is given
    #[arg(long, value_enum)]
    pub rule: Option<RuleName>,

    #[arg(long)]
    pub alpha: Option<f64>,

    /// Grid points p = 1/steps, ..., (steps-1)/steps
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
}
