//! Decompositions of the mean binary Brier score of a forecast record.
//!
//! The binary Brier score here is `-(X - q)^2` per event, which is the
//! halved categorical score of the pair `(q, 1 - q)`.
//!
//! Scores from different tournaments are not comparable: rescaling by a
//! baseline also rescales the skill penalty. No cross-tournament comparator
//! is provided.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::rules::{brier_binary, Forecast};

/// One binary forecast and its outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryEvent {
    pub id: String,
    pub forecast: f64,
    pub outcome: bool,
}

/// A nonempty sequence of binary forecasts with outcomes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinaryRecord {
    events: Vec<BinaryEvent>,
}

impl BinaryRecord {
    pub fn new(events: Vec<BinaryEvent>) -> Result<Self> {
        if events.is_empty() {
            return Err(Error::EmptyRecord);
        }
        for e in &events {
            check_probability(e.forecast)?;
        }
        Ok(BinaryRecord { events })
    }

    /// Record with ids `0, 1, 2, ...`.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, bool)>) -> Result<Self> {
        Self::new(
            pairs
                .into_iter()
                .enumerate()
                .map(|(i, (forecast, outcome))| BinaryEvent {
                    id: i.to_string(),
                    forecast,
                    outcome,
                })
                .collect(),
        )
    }

    pub fn events(&self) -> &[BinaryEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Fraction of events that happened.
    pub fn frequency(&self) -> f64 {
        self.events.iter().filter(|e| e.outcome).count() as f64 / self.len() as f64
    }

    pub fn mean_brier(&self) -> f64 {
        self.events
            .iter()
            .map(|e| brier_binary(e.forecast, e.outcome))
            .sum::<f64>()
            / self.len() as f64
    }
}

/// How forecasts are grouped for the Murphy decomposition.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Binning {
    /// One bin per distinct forecast value. The decomposition is then exact.
    #[default]
    ByValue,
    /// Bins `[e_0, e_1), [e_1, e_2), ..., [e_{n-1}, e_n]` with the mean
    /// forecast in each bin as its representative.
    Edges(Vec<f64>),
}

impl Binning {
    pub fn edges(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::InvalidBinning("need at least two edges".into()));
        }
        if edges.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidBinning("edges must be strictly increasing".into()));
        }
        Ok(Binning::Edges(edges))
    }
}

impl std::str::FromStr for Binning {
    type Err = Error;

    /// `by-value` or `edges:0,0.2,0.4,...`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "by-value" {
            return Ok(Binning::ByValue);
        }
        let list = s
            .strip_prefix("edges:")
            .ok_or_else(|| Error::InvalidBinning(format!("expected `by-value` or `edges:<list>`, got `{s}`")))?;
        let edges = list
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidBinning(format!("bad edge `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Binning::edges(edges)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinStats {
    pub label: String,
    /// Representative forecast `q_μ`.
    pub forecast: f64,
    pub count: usize,
    pub trues: usize,
    /// Observed frequency `f_μ = trues / count`.
    pub frequency: f64,
}

/// Mean Brier = −uncertainty + resolution − reliability (+ residual).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MurphyReport {
    pub uncertainty: f64,
    pub resolution: f64,
    pub reliability: f64,
    /// Overall frequency `f` of true outcomes.
    pub base_rate: f64,
    pub mean_score: f64,
    /// `mean_score - reconstruction()`. Zero up to rounding under by-value binning.
    pub residual: f64,
    pub bins: Vec<BinStats>,
}

impl MurphyReport {
    pub fn reconstruction(&self) -> f64 {
        -self.uncertainty + self.resolution - self.reliability
    }
}

struct Acc {
    first: f64,
    count: usize,
    trues: usize,
    forecast_sum: f64,
}

pub fn murphy_decompose(record: &BinaryRecord, binning: &Binning) -> Result<MurphyReport> {
    if record.is_empty() {
        return Err(Error::EmptyRecord);
    }
    // key -> (label, accumulator); BTreeMap keeps bins in forecast order
    let mut bins: BTreeMap<u64, (String, Acc)> = BTreeMap::new();
    for e in record.events() {
        let (key, label) = match binning {
            // forecasts are nonnegative, so bit patterns sort like values
            Binning::ByValue => ((e.forecast + 0.0).to_bits(), format!("{}", e.forecast)),
            Binning::Edges(edges) => {
                let idx = edge_bin(edges, e.forecast).ok_or_else(|| {
                    Error::InvalidBinning(format!("forecast {} lies outside the bin edges", e.forecast))
                })?;
                let close = if idx + 2 == edges.len() { ']' } else { ')' };
                (idx as u64, format!("[{}, {}{close}", edges[idx], edges[idx + 1]))
            }
        };
        let slot = bins.entry(key).or_insert_with(|| {
            (label, Acc { first: e.forecast, count: 0, trues: 0, forecast_sum: 0.0 })
        });
        slot.1.count += 1;
        slot.1.trues += usize::from(e.outcome);
        slot.1.forecast_sum += e.forecast;
    }

    let n = record.len() as f64;
    let f = record.frequency();
    let bins: Vec<BinStats> = bins
        .into_values()
        .map(|(label, acc)| {
            let forecast = match binning {
                Binning::ByValue => acc.first,
                Binning::Edges(_) => acc.forecast_sum / acc.count as f64,
            };
            BinStats {
                label,
                forecast,
                count: acc.count,
                trues: acc.trues,
                frequency: acc.trues as f64 / acc.count as f64,
            }
        })
        .collect();

    let resolution = bins
        .iter()
        .map(|b| b.count as f64 * (f - b.frequency).powi(2))
        .sum::<f64>()
        / n;
    let reliability = bins
        .iter()
        .map(|b| b.count as f64 * (b.forecast - b.frequency).powi(2))
        .sum::<f64>()
        / n;
    let uncertainty = f * (1.0 - f);
    let mean_score = record.mean_brier();
    let residual = mean_score - (-uncertainty + resolution - reliability);
    Ok(MurphyReport {
        uncertainty,
        resolution,
        reliability,
        base_rate: f,
        mean_score,
        residual,
        bins,
    })
}

fn edge_bin(edges: &[f64], q: f64) -> Option<usize> {
    let last = edges.len() - 1;
    if q < edges[0] || q > edges[last] {
        return None;
    }
    if q == edges[last] {
        return Some(last - 1);
    }
    // index of the last edge <= q
    Some(edges.partition_point(|&e| e <= q) - 1)
}

/// Decomposition of forecasts `q_i = f + ε_i` around a training frequency `f`.
///
/// `base + frequency_mismatch + gain - stake` equals the mean Brier score.
/// `frequency_mismatch = -(f̄ - f)(1 - 2f)` vanishes when `f` is the record's
/// own frequency `f̄`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClimatologyReport {
    pub base_frequency: f64,
    pub record_frequency: f64,
    pub epsilons: Vec<f64>,
    /// `-f(1 - f)`
    pub base: f64,
    pub frequency_mismatch: f64,
    /// `(2/N) Σ ε_i (X_i - f)`
    pub gain: f64,
    /// `(1/N) Σ ε_i^2`
    pub stake: f64,
    pub mean_score: f64,
    /// `R = sqrt(Σ ε_i^2)`, the scale actually used.
    pub scale: f64,
    /// Unit-norm directions `γ_i = ε_i / R`; absent when every ε is zero.
    pub directions: Option<Vec<f64>>,
    /// `R* = Σ γ_i (X_i - f)`; absent when every ε is zero.
    pub optimal_scale: Option<f64>,
}

impl ClimatologyReport {
    pub fn reconstruction(&self) -> f64 {
        self.base + self.frequency_mismatch + self.gain - self.stake
    }

    /// The forecast departures point away from what happened.
    pub fn is_anticorrelated(&self) -> bool {
        self.optimal_scale.is_some_and(|r| r < 0.0)
    }
}

pub fn climatology_decompose(record: &BinaryRecord, f: f64) -> Result<ClimatologyReport> {
    check_probability(f)?;
    if record.is_empty() {
        return Err(Error::EmptyRecord);
    }
    let n = record.len() as f64;
    let epsilons: Vec<f64> = record.events().iter().map(|e| e.forecast - f).collect();
    let residuals: Vec<f64> = record.events().iter().map(|e| outcome_value(e.outcome) - f).collect();
    let gain = 2.0 / n * dot(&epsilons, &residuals);
    let norm2: f64 = epsilons.iter().map(|e| e * e).sum();
    let stake = norm2 / n;
    let record_frequency = record.frequency();
    let scale = norm2.sqrt();
    let directions = (norm2 > 0.0).then(|| epsilons.iter().map(|e| e / scale).collect::<Vec<_>>());
    let optimal_scale = directions.as_ref().map(|g| dot(g, &residuals));
    Ok(ClimatologyReport {
        base_frequency: f,
        record_frequency,
        base: -f * (1.0 - f),
        frequency_mismatch: -(record_frequency - f) * (1.0 - 2.0 * f),
        gain,
        stake,
        mean_score: record.mean_brier(),
        scale,
        directions,
        optimal_scale,
        epsilons,
    })
}

/// `R* = Σ γ_i (X_i - f)`: the scale maximising the mean Brier score of
/// `q_i = f + R γ_i` for unit-norm directions `γ`.
pub fn optimal_backing(record: &BinaryRecord, f: f64, gammas: &[f64]) -> Result<f64> {
    check_probability(f)?;
    if gammas.len() != record.len() {
        return Err(Error::LengthMismatch {
            left: record.len(),
            right: gammas.len(),
        });
    }
    let norm2: f64 = gammas.iter().map(|g| g * g).sum();
    if (norm2 - 1.0).abs() > 1e-9 {
        return Err(Error::NonUnitDirection(norm2));
    }
    Ok(record
        .events()
        .iter()
        .zip(gammas)
        .map(|(e, g)| g * (outcome_value(e.outcome) - f))
        .sum())
}

/// `(score - baseline) / |baseline|`: positive iff `score` beats the baseline.
pub fn skill_score(score: f64, baseline: f64) -> Result<f64> {
    if !(baseline < 0.0) {
        return Err(Error::NonNegativeBaseline(baseline));
    }
    Ok((score - baseline) / baseline.abs())
}

/// Expected binary Brier score `-f(1 - f)` of always forecasting `f` when
/// the event frequency really is `f`.
pub fn climatology_baseline_binary(f: f64) -> Result<f64> {
    check_probability(f)?;
    Ok(-f * (1.0 - f))
}

/// Expected halved Brier score `-(1 - Σ p_k^2) / 2` of forecasting the
/// climatological frequencies when they are true.
pub fn climatology_baseline_multicat(freqs: &Forecast) -> f64 {
    -0.5 * (1.0 - freqs.probs().iter().map(|p| p * p).sum::<f64>())
}

fn outcome_value(x: bool) -> f64 {
    if x {
        1.0
    } else {
        0.0
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
