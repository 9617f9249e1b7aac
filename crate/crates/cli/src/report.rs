//! Reports produced by the subcommands.
//!
//! Every report serializes losslessly: structured output parsed back with
//! `serde_json` reproduces the in-memory value bit for bit.

use probscore::luck_skill::ComparisonReport;
use probscore::simulate::{SimConfig, SimResult};
use probscore::tournament::{IngestReport, Leaderboard, MissingPolicy, PairVerdict, RankInterval};
use probscore::verification::{ClimatologyReport, MurphyReport};
use probscore::ScoringRule;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub rule: ScoringRule,
    pub missing: MissingPolicy,
    pub ingest: IngestReport,
    pub leaderboard: Leaderboard,
    /// Adjacent-pair verdicts; absent when some adjacent pair shares no events.
    pub margins: Option<Vec<PairVerdict>>,
    /// Plausible rank ranges; Brier leaderboards only.
    pub rank_confidence: Option<Vec<RankInterval>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecomposeReport {
    pub events: usize,
    pub murphy: MurphyReport,
    pub climatology: Option<ClimatologyReport>,
}

pub type CompareReport = ComparisonReport;

/// Off-target forecaster against the savant under the normal approximation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Headline {
    pub forecaster: String,
    pub against: String,
    /// Ties counted as half a win.
    pub beat_probability: f64,
    pub strict_beat_probability: f64,
    pub tie_probability: f64,
    pub standard_error: f64,
    pub theoretical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub config: SimConfig,
    pub result: SimResult,
    pub headline: Option<Headline>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KellySimulation {
    pub plays: usize,
    pub seed: u64,
    pub final_log_multiplier: f64,
    pub mean_log_growth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KellyReport {
    pub p: f64,
    pub kelly_fraction: f64,
    /// The stake actually evaluated.
    pub fraction: f64,
    pub expected_log_growth: f64,
    pub growth_at_kelly: f64,
    pub simulation: Option<KellySimulation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleRow {
    pub rule: String,
    pub p: f64,
    #[serde(with = "probscore::num::extended")]
    pub entropy: f64,
    #[serde(with = "probscore::num::extended")]
    pub exposure: f64,
    #[serde(with = "probscore::num::extended")]
    pub penalty: f64,
    #[serde(with = "probscore::num::extended")]
    pub score_if_true: f64,
    #[serde(with = "probscore::num::extended")]
    pub score_if_false: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RulesReport {
    pub rows: Vec<RuleRow>,
}
