//! Seeded Monte Carlo tournaments.
//!
//! Each replicate draws a true probability `p_i` and an outcome
//! `X_i ~ Bernoulli(p_i)` for every question, then scores every forecaster on
//! those same outcomes. The replicate's result is each forecaster's mean
//! score; across replicates we count how often one forecaster strictly
//! beats another and how often they tie.
//!
//! # Seeding
//!
//! Replicate `r` uses two ChaCha8 generators, both on stream `r`: one seeded
//! with the master seed (true probabilities and outcomes) and one seeded with
//! `master ^ FORECASTER_SEED_MIX` (forecaster noise and offset signs).
//! Results therefore do not depend on thread scheduling, and adding a noisy
//! forecaster does not change the outcomes the others are scored on.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::rules::ScoringRule;

/// Mean scores closer than this are counted as ties.
pub const TIE_TOLERANCE: f64 = 1e-12;

pub const FORECASTER_SEED_MIX: u64 = 0x9E37_79B9_7F4A_7C15;

/// Source of per-question true probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TruthGenerator {
    Constant { p: f64 },
    /// Drawn afresh per question and replicate.
    Uniform { low: f64, high: f64 },
    /// One value per question, the same in every replicate.
    Fixed { values: Vec<f64> },
}

impl TruthGenerator {
    fn validate(&self, n_questions: usize) -> Result<()> {
        match self {
            TruthGenerator::Constant { p } => check_probability(*p).map(drop),
            TruthGenerator::Uniform { low, high } => {
                check_probability(*low)?;
                check_probability(*high)?;
                if low > high {
                    return Err(Error::InvalidParameter(format!("uniform truth has low {low} > high {high}")));
                }
                Ok(())
            }
            TruthGenerator::Fixed { values } => {
                if values.len() != n_questions {
                    return Err(Error::LengthMismatch { left: n_questions, right: values.len() });
                }
                values.iter().try_for_each(|&p| check_probability(p).map(drop))
            }
        }
    }

    fn draw(&self, question: usize, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            TruthGenerator::Constant { p } => *p,
            TruthGenerator::Uniform { low, high } => {
                if low == high {
                    *low
                } else {
                    rng.random_range(*low..=*high)
                }
            }
            TruthGenerator::Fixed { values } => values[question],
        }
    }
}

/// How a simulated forecaster turns the true probability into a forecast.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ForecasterSpec {
    /// Forecasts the true probability.
    Savant,
    /// Forecasts `p + δ`, or `p ± δ` with a fair random sign.
    Offset {
        delta: f64,
        #[serde(default)]
        random_sign: bool,
    },
    /// Always 0.5; under the Brier rule scores -0.25 whatever happens.
    Uniform,
    Constant { q: f64 },
    /// `p` plus Gaussian noise with standard deviation `sd`.
    Noise { sd: f64 },
}

impl ForecasterSpec {
    fn validate(&self) -> Result<()> {
        match self {
            ForecasterSpec::Offset { delta, .. } if !delta.is_finite() => {
                Err(Error::InvalidParameter(format!("offset {delta} is not finite")))
            }
            ForecasterSpec::Constant { q } => check_probability(*q).map(drop),
            ForecasterSpec::Noise { sd } if !(sd.is_finite() && *sd >= 0.0) => {
                Err(Error::InvalidParameter(format!("noise sd {sd} must be finite and nonnegative")))
            }
            _ => Ok(()),
        }
    }

    /// Unclipped forecast.
    fn raw(&self, p: f64, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            ForecasterSpec::Savant => p,
            ForecasterSpec::Offset { delta, random_sign } => {
                if *random_sign && rng.random_bool(0.5) {
                    p - delta
                } else {
                    p + delta
                }
            }
            ForecasterSpec::Uniform => 0.5,
            ForecasterSpec::Constant { q } => *q,
            ForecasterSpec::Noise { sd } => {
                if *sd == 0.0 {
                    p
                } else {
                    p + Normal::new(0.0, *sd).expect("validated sd").sample(rng)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecasterEntry {
    pub name: String,
    #[serde(flatten)]
    pub spec: ForecasterSpec,
}

impl ForecasterEntry {
    pub fn new(name: impl Into<String>, spec: ForecasterSpec) -> Self {
        ForecasterEntry { name: name.into(), spec }
    }
}

fn default_rule() -> ScoringRule {
    ScoringRule::Brier
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_questions: usize,
    pub n_replicates: usize,
    pub truth: TruthGenerator,
    pub forecasters: Vec<ForecasterEntry>,
    #[serde(default = "default_rule")]
    pub rule: ScoringRule,
    #[serde(default)]
    pub seed: u64,
}

impl SimConfig {
    /// Savant, `p + δ` offset and uniform forecasters on constant truth `p`.
    pub fn savant_versus_offset(p: f64, delta: f64, n_questions: usize, n_replicates: usize, seed: u64) -> Self {
        SimConfig {
            n_questions,
            n_replicates,
            truth: TruthGenerator::Constant { p },
            forecasters: vec![
                ForecasterEntry::new("savant", ForecasterSpec::Savant),
                ForecasterEntry::new("offset", ForecasterSpec::Offset { delta, random_sign: false }),
                ForecasterEntry::new("uniform", ForecasterSpec::Uniform),
            ],
            rule: ScoringRule::Brier,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_questions == 0 {
            return Err(Error::InvalidParameter("n_questions must be at least 1".into()));
        }
        if self.n_replicates == 0 {
            return Err(Error::InvalidParameter("n_replicates must be at least 1".into()));
        }
        if self.forecasters.is_empty() {
            return Err(Error::InvalidParameter("no forecasters configured".into()));
        }
        for (i, f) in self.forecasters.iter().enumerate() {
            if self.forecasters[..i].iter().any(|g| g.name == f.name) {
                return Err(Error::InvalidParameter(format!("duplicate forecaster name `{}`", f.name)));
            }
            f.spec.validate()?;
        }
        self.truth.validate(self.n_questions)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecasterSummary {
    pub name: String,
    /// Mean over replicates of the per-replicate mean score.
    #[serde(with = "crate::num::extended")]
    pub mean: f64,
    /// Sample standard deviation of the per-replicate mean score; infinite
    /// when some replicates are infinite and others are not.
    #[serde(with = "crate::num::extended")]
    pub sd: f64,
    #[serde(with = "crate::num::extended")]
    pub min: f64,
    #[serde(with = "crate::num::extended")]
    pub max: f64,
    /// Average of `(1/N^2) Σ_i (2q_i - 1)^2 p_i(1 - p_i)`: the exposure
    /// variance of the mean score.
    pub exposure_variance: f64,
    /// Forecasts that fell outside [0, 1] and were clipped.
    pub clipped: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub n_questions: usize,
    pub n_replicates: usize,
    pub seed: u64,
    pub rule: ScoringRule,
    pub forecasters: Vec<ForecasterSummary>,
    /// `beats[i][j]`: replicates where `i`'s mean strictly exceeds `j`'s.
    pub beats: Vec<Vec<u64>>,
    /// `ties[i][j]`: replicates where the means agree within [`TIE_TOLERANCE`].
    pub ties: Vec<Vec<u64>>,
    /// Per-replicate mean score of each forecaster, in replicate order.
    #[serde(skip)]
    pub replicate_means: Vec<Vec<f64>>,
}

impl SimResult {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.forecasters.iter().position(|f| f.name == name)
    }

    pub fn beat_probability(&self, i: usize, j: usize) -> f64 {
        self.beats[i][j] as f64 / self.n_replicates as f64
    }

    pub fn tie_probability(&self, i: usize, j: usize) -> f64 {
        self.ties[i][j] as f64 / self.n_replicates as f64
    }

    /// `P(beat) + P(tie)/2`, the discrete counterpart of a continuous tail
    /// probability.
    pub fn split_beat_probability(&self, i: usize, j: usize) -> f64 {
        (self.beats[i][j] as f64 + 0.5 * self.ties[i][j] as f64) / self.n_replicates as f64
    }

    /// Binomial standard error of a probability estimated from the replicates.
    pub fn standard_error(&self, probability: f64) -> f64 {
        (probability * (1.0 - probability) / self.n_replicates as f64).sqrt()
    }

    /// Header `replicate,<name>...`, then one row of mean scores per replicate.
    pub fn write_replicates_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["replicate".to_string()];
        header.extend(self.forecasters.iter().map(|f| f.name.clone()));
        w.write_record(&header).map_err(csv_err)?;
        for (r, means) in self.replicate_means.iter().enumerate() {
            let mut row = vec![r.to_string()];
            row.extend(means.iter().map(|&m| crate::num::format_score(m)));
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

struct Replicate {
    means: Vec<f64>,
    exposure_variance: Vec<f64>,
    clipped: Vec<u64>,
}

fn run_replicate(config: &SimConfig, index: usize) -> Result<Replicate> {
    let mut world = ChaCha8Rng::seed_from_u64(config.seed);
    world.set_stream(index as u64);
    let mut noise = ChaCha8Rng::seed_from_u64(config.seed ^ FORECASTER_SEED_MIX);
    noise.set_stream(index as u64);

    let k = config.forecasters.len();
    let mut sums = vec![0.0; k];
    let mut exposure = vec![0.0; k];
    let mut clipped = vec![0u64; k];
    for question in 0..config.n_questions {
        let p = config.truth.draw(question, &mut world);
        let x = world.random_bool(p);
        for (j, f) in config.forecasters.iter().enumerate() {
            let raw = f.spec.raw(p, &mut noise);
            let q = raw.clamp(0.0, 1.0);
            if q != raw {
                clipped[j] += 1;
            }
            sums[j] += config.rule.binary_score(q, x)?;
            exposure[j] += (2.0 * q - 1.0).powi(2) * p * (1.0 - p);
        }
    }
    let n = config.n_questions as f64;
    Ok(Replicate {
        means: sums.into_iter().map(|s| s / n).collect(),
        exposure_variance: exposure.into_iter().map(|e| e / (n * n)).collect(),
        clipped,
    })
}

fn beats(a: f64, b: f64) -> Option<bool> {
    // None means tie
    if a == b || (a - b).abs() <= TIE_TOLERANCE {
        None
    } else {
        Some(a > b)
    }
}

pub fn run_simulation(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let replicates: Vec<Replicate> = (0..config.n_replicates)
        .into_par_iter()
        .map(|r| run_replicate(config, r))
        .collect::<Result<_>>()?;

    let k = config.forecasters.len();
    let reps = config.n_replicates as f64;
    let mut beat_counts = vec![vec![0u64; k]; k];
    let mut tie_counts = vec![vec![0u64; k]; k];
    for rep in &replicates {
        for i in 0..k {
            for j in 0..k {
                match beats(rep.means[i], rep.means[j]) {
                    None => tie_counts[i][j] += 1,
                    Some(true) => beat_counts[i][j] += 1,
                    Some(false) => {}
                }
            }
        }
    }

    let forecasters = config
        .forecasters
        .iter()
        .enumerate()
        .map(|(j, f)| {
            let values = replicates.iter().map(|r| r.means[j]);
            let mean = values.clone().sum::<f64>() / reps;
            let first = replicates[0].means[j];
            let sd = if replicates.len() < 2 || values.clone().all(|v| v == first) {
                0.0
            } else if mean.is_finite() {
                (values.clone().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1.0)).sqrt()
            } else {
                f64::INFINITY
            };
            ForecasterSummary {
                name: f.name.clone(),
                mean,
                sd,
                min: values.clone().fold(f64::INFINITY, f64::min),
                max: values.fold(f64::NEG_INFINITY, f64::max),
                exposure_variance: replicates.iter().map(|r| r.exposure_variance[j]).sum::<f64>() / reps,
                clipped: replicates.iter().map(|r| r.clipped[j]).sum(),
            }
        })
        .collect();

    Ok(SimResult {
        n_questions: config.n_questions,
        n_replicates: config.n_replicates,
        seed: config.seed,
        rule: config.rule,
        forecasters,
        beats: beat_counts,
        ties: tie_counts,
        replicate_means: replicates.into_iter().map(|r| r.means).collect(),
    })
}

pub fn standard_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Normal-approximation probability that a forecaster offset by `delta`
/// from the truth `p` outscores the savant over `n` questions.
///
/// The score gap `S(p + δ) - S(p)` has mean `-δ^2` (the penalty) and
/// variance `4δ^2 p(1 - p) / n`, which at `p = 1/2` is the offset
/// forecaster's exposure variance `(2q - 1)^2 p(1 - p) / n`. The result is
/// `Φ(-δ^2 / σ_N)`.
pub fn theoretical_beat_probability(delta: f64, p: f64, n: usize) -> Result<f64> {
    check_probability(p)?;
    if !delta.is_finite() || !(0.0..=1.0).contains(&(p + delta)) {
        return Err(Error::InvalidParameter(format!("p + delta = {} is outside [0, 1]", p + delta)));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if delta == 0.0 {
        return Ok(0.5);
    }
    let sigma = 2.0 * delta.abs() * (p * (1.0 - p) / n as f64).sqrt();
    if sigma == 0.0 {
        // deterministic outcomes: the penalty is never recovered
        return Ok(0.0);
    }
    Ok(standard_normal_cdf(-delta * delta / sigma))
}
