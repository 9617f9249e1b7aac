//! Luck versus skill in binary Brier scores.
//!
//! Given a true probability `p`, a forecast `q` and an outcome `X`,
//!
//! ```text
//! -(X - q)^2 = -p(1 - p) + (2q - 1)(X - p) - (p - q)^2
//!              entropy     exposure (luck)   penalty (skill)
//! ```
//!
//! Only the exposure term depends on the outcome; it has mean zero and
//! variance `(2q - 1)^2 p(1 - p)`. The penalty is the expected shortfall
//! against the savant who forecasts `p`.
//!
//! Two forecasters are compared through
//! `Δ = (1/N) Σ (q'_i - q_i)(q'_i + q_i - 2X_i)`, which is
//! `mean S(q) - mean S(q')`, so `Δ > 0` means the unprimed forecaster won.
//! Its standard deviation is at most `δ/√N`, where `δ` is the
//! root-mean-square forecast difference, whatever the true probabilities.

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::rules::{brier_score, Forecast, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LuckSkillSplit {
    /// `-p(1 - p)`
    pub entropy: f64,
    /// `(2q - 1)(X - p)`
    pub exposure: f64,
    /// `-(p - q)^2`, never positive
    pub penalty: f64,
    pub total: f64,
}

pub fn split_score(p: f64, q: f64, x: bool) -> Result<LuckSkillSplit> {
    check_probability(p)?;
    check_probability(q)?;
    let x = if x { 1.0 } else { 0.0 };
    let entropy = -p * (1.0 - p);
    let exposure = (2.0 * q - 1.0) * (x - p);
    let penalty = -(p - q) * (p - q);
    Ok(LuckSkillSplit {
        entropy,
        exposure,
        penalty,
        total: entropy + exposure + penalty,
    })
}

/// Variance of the exposure term, `(2q - 1)^2 p(1 - p)`.
pub fn exposure_variance(p: f64, q: f64) -> Result<f64> {
    check_probability(p)?;
    check_probability(q)?;
    Ok((2.0 * q - 1.0).powi(2) * p * (1.0 - p))
}

/// Which bound `sigma_bound` is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// The binary bound `sqrt(Σ (q' - q)^2) / N`.
    Binary,
    /// Multicategory events, bounded through the per-category flattening
    /// `sqrt(Σ_i Σ_k (q'_ik - q_ik)^2 / 2) / N`.
    Flattened,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// `mean S(q) - mean S(q')`; positive when the first forecaster wins.
    pub delta: f64,
    /// Upper bound on the standard deviation of `delta`.
    pub sigma_bound: f64,
    /// `delta / sigma_bound`; absent when the bound is zero. The true
    /// standard deviation may be smaller, so this understates significance.
    pub z_bound: Option<f64>,
    pub n: usize,
    /// Root-mean-square forecast difference δ.
    pub rms_diff: f64,
    pub bound_kind: BoundKind,
    /// Moments under hypothesised true probabilities, when supplied.
    pub exact: Option<DeltaMoments>,
}

impl ComparisonReport {
    /// `|Δ| > 2σ`: the gap is more than two (bounding) standard deviations.
    /// Exactly two counts as not separated.
    pub fn separated(&self) -> bool {
        two_sigma_separated(self.delta, self.sigma_bound)
    }
}

pub fn two_sigma_separated(delta: f64, sigma_bound: f64) -> bool {
    delta.abs() > 2.0 * sigma_bound
}

/// Mean and variance of Δ when the true probabilities are known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaMoments {
    pub mean: f64,
    pub variance: f64,
}

impl DeltaMoments {
    pub fn sd(&self) -> f64 {
        self.variance.sqrt()
    }
}

fn check_streams(qs: &[f64], qs2: &[f64], n_other: usize) -> Result<()> {
    if qs.len() != qs2.len() {
        return Err(Error::LengthMismatch { left: qs.len(), right: qs2.len() });
    }
    if qs.len() != n_other {
        return Err(Error::LengthMismatch { left: qs.len(), right: n_other });
    }
    if qs.is_empty() {
        return Err(Error::EmptyRecord);
    }
    for &q in qs.iter().chain(qs2) {
        check_probability(q)?;
    }
    Ok(())
}

fn report(delta: f64, sum_sq: f64, n: usize, bound_kind: BoundKind) -> ComparisonReport {
    let nf = n as f64;
    let sigma_bound = sum_sq.sqrt() / nf;
    ComparisonReport {
        delta,
        sigma_bound,
        z_bound: (sigma_bound > 0.0).then(|| delta / sigma_bound),
        n,
        rms_diff: (sum_sq / nf).sqrt(),
        bound_kind,
        exact: None,
    }
}

/// Paired comparison of binary forecast streams `qs` and `qs2` on outcomes `xs`.
pub fn compare_forecasters(qs: &[f64], qs2: &[f64], xs: &[bool]) -> Result<ComparisonReport> {
    check_streams(qs, qs2, xs.len())?;
    let n = qs.len();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for ((&q, &q2), &x) in qs.iter().zip(qs2).zip(xs) {
        let x = if x { 1.0 } else { 0.0 };
        sum += (q2 - q) * (q2 + q - 2.0 * x);
        sum_sq += (q2 - q) * (q2 - q);
    }
    Ok(report(sum / n as f64, sum_sq, n, BoundKind::Binary))
}

/// [`compare_forecasters`] plus the exact moments under hypothesised `ps`.
pub fn compare_with_truth(qs: &[f64], qs2: &[f64], xs: &[bool], ps: &[f64]) -> Result<ComparisonReport> {
    let mut r = compare_forecasters(qs, qs2, xs)?;
    r.exact = Some(comparison_mean_variance(qs, qs2, ps)?);
    Ok(r)
}

/// Mean `(1/N) Σ (q' - q)(q' + q - 2p)` and variance
/// `(1/N^2) Σ 4p(1 - p)(q' - q)^2` of Δ.
pub fn comparison_mean_variance(qs: &[f64], qs2: &[f64], ps: &[f64]) -> Result<DeltaMoments> {
    check_streams(qs, qs2, ps.len())?;
    for &p in ps {
        check_probability(p)?;
    }
    let n = qs.len() as f64;
    let (mut mean, mut variance) = (0.0, 0.0);
    for ((&q, &q2), &p) in qs.iter().zip(qs2).zip(ps) {
        mean += (q2 - q) * (q2 + q - 2.0 * p);
        variance += 4.0 * p * (1.0 - p) * (q2 - q) * (q2 - q);
    }
    Ok(DeltaMoments {
        mean: mean / n,
        variance: variance / (n * n),
    })
}

/// Paired comparison of categorical forecasts under the halved Brier score.
///
/// Δ is exact. For two categories the bound is the binary one; for more it
/// uses the flattening and is labelled [`BoundKind::Flattened`].
pub fn compare_multicategory(a: &[Forecast], b: &[Forecast], outcomes: &[Outcome]) -> Result<ComparisonReport> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    if a.len() != outcomes.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: outcomes.len() });
    }
    if a.is_empty() {
        return Err(Error::EmptyRecord);
    }
    let mut diff = 0.0;
    let mut sum_sq = 0.0;
    let mut widest = 2;
    for ((fa, fb), &o) in a.iter().zip(b).zip(outcomes) {
        if fa.categories() != fb.categories() {
            return Err(Error::DimensionMismatch { expected: fa.categories(), got: fb.categories() });
        }
        widest = widest.max(fa.categories());
        diff += brier_score(fa, o)? - brier_score(fb, o)?;
        sum_sq += 0.5
            * fa.probs()
                .iter()
                .zip(fb.probs())
                .map(|(x, y)| (y - x) * (y - x))
                .sum::<f64>();
    }
    let kind = if widest == 2 { BoundKind::Binary } else { BoundKind::Flattened };
    Ok(report(diff / a.len() as f64, sum_sq, a.len(), kind))
}
