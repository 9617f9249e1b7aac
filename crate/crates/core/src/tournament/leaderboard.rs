use std::cmp::Ordering;
use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::Tournament;
use crate::error::{Error, Result};
use crate::luck_skill::{compare_multicategory, two_sigma_separated, BoundKind, ComparisonReport};
use crate::num::format_score;
use crate::rules::{Forecast, Outcome, ScoringRule};

/// What to do when a forecaster skipped a resolved event.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MissingPolicy {
    /// Score the uniform forecast in their place, marked as imputed.
    #[default]
    Uniform,
    /// Leave the event out of that forecaster's record.
    Strict,
}

impl std::str::FromStr for MissingPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(MissingPolicy::Uniform),
            "strict" => Ok(MissingPolicy::Strict),
            other => Err(Error::InvalidParameter(format!("unknown missing-forecast policy `{other}`"))),
        }
    }
}

/// One resolved event in a forecaster's trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredCell {
    pub event: String,
    pub round: u32,
    pub forecast: Forecast,
    pub outcome: Outcome,
    #[serde(with = "crate::num::extended")]
    pub score: f64,
    /// Mean score over this and all earlier cells.
    #[serde(with = "crate::num::extended")]
    pub cumulative_mean: f64,
    pub imputed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardEntry {
    pub forecaster: String,
    /// Competition rank: equal means share a rank and the next rank skips.
    pub rank: usize,
    pub events_scored: usize,
    pub imputed: usize,
    #[serde(with = "crate::num::extended")]
    pub mean_score: f64,
    /// Gap to the next entry down; absent for the last entry.
    #[serde(with = "crate::num::extended::option", default)]
    pub margin_to_next: Option<f64>,
    /// Twice the Brier Δ standard deviation bound against the next entry
    /// down, on their common events. Brier leaderboards only.
    #[serde(with = "crate::num::extended::option", default)]
    pub two_sigma_to_next: Option<f64>,
    pub trajectory: Vec<ScoredCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leaderboard {
    pub rule: ScoringRule,
    pub missing: MissingPolicy,
    /// Resolved event ids in resolution order.
    pub resolved_events: Vec<String>,
    /// Entries in rank order, ties broken by forecaster id.
    pub entries: Vec<LeaderboardEntry>,
}

impl Leaderboard {
    pub fn entry(&self, forecaster: &str) -> Option<&LeaderboardEntry> {
        self.entries.iter().find(|e| e.forecaster == forecaster)
    }

    pub fn ranking(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.forecaster.as_str()).collect()
    }
}

fn score_order(a: f64, b: f64) -> Ordering {
    // descending; -inf last
    b.partial_cmp(&a).unwrap_or(Ordering::Equal)
}

fn gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        a - b
    }
}

pub fn score_tournament(tournament: &Tournament, rule: &ScoringRule, missing: MissingPolicy) -> Result<Leaderboard> {
    let forecasters = tournament.forecasters();
    if forecasters.is_empty() {
        return Err(Error::NoSubmissions);
    }
    let resolved = tournament.resolved_events();
    if resolved.is_empty() {
        return Err(Error::NoResolvedEvents);
    }
    if let Some(e) = resolved.iter().find(|e| !rule.supports(e.categories)) {
        return Err(Error::BinaryOnly {
            rule: rule.name().to_string(),
            categories: e.categories,
        });
    }

    let mut entries = Vec::with_capacity(forecasters.len());
    for forecaster in forecasters {
        let mut trajectory: Vec<ScoredCell> = Vec::new();
        let mut total = 0.0;
        for event in &resolved {
            let outcome = event.outcome.expect("resolved");
            let (forecast, imputed) = match tournament.submission(&forecaster, &event.id) {
                Some(s) => (s.forecast.clone(), false),
                None => match missing {
                    MissingPolicy::Uniform => (Forecast::uniform(event.categories)?, true),
                    MissingPolicy::Strict => continue,
                },
            };
            let score = rule.score(&forecast, outcome)?;
            total += score;
            trajectory.push(ScoredCell {
                event: event.id.clone(),
                round: event.round,
                forecast,
                outcome,
                score,
                cumulative_mean: total / (trajectory.len() + 1) as f64,
                imputed,
            });
        }
        let Some(last) = trajectory.last() else {
            continue;
        };
        entries.push(LeaderboardEntry {
            forecaster,
            rank: 0,
            events_scored: trajectory.len(),
            imputed: trajectory.iter().filter(|c| c.imputed).count(),
            mean_score: last.cumulative_mean,
            margin_to_next: None,
            two_sigma_to_next: None,
            trajectory,
        });
    }

    entries.sort_by(|a, b| score_order(a.mean_score, b.mean_score).then_with(|| a.forecaster.cmp(&b.forecaster)));
    let means: Vec<f64> = entries.iter().map(|e| e.mean_score).collect();
    for (i, entry) in entries.iter_mut().enumerate() {
        entry.rank = 1 + means.iter().filter(|&&m| m > means[i]).count();
        entry.margin_to_next = means.get(i + 1).map(|&next| gap(means[i], next));
    }
    let mut board = Leaderboard {
        rule: *rule,
        missing,
        resolved_events: resolved.iter().map(|e| e.id.clone()).collect(),
        entries,
    };
    if !matches!(rule, ScoringRule::Brier) {
        return Ok(board);
    }
    for i in 0..board.entries.len().saturating_sub(1) {
        let (a, b) = (&board.entries[i].forecaster, &board.entries[i + 1].forecaster);
        board.entries[i].two_sigma_to_next = pair_comparison(&board, a, b).ok().map(|c| 2.0 * c.sigma_bound);
    }
    Ok(board)
}

/// Brier Δ of `a` against `b` on the events both were scored on.
///
/// Δ uses the halved Brier score whatever the leaderboard's rule, since the
/// σ bound is specific to it.
pub fn pair_comparison(board: &Leaderboard, a: &str, b: &str) -> Result<ComparisonReport> {
    let find = |name: &str| {
        board
            .entry(name)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown forecaster `{name}`")))
    };
    let (ea, eb) = (find(a)?, find(b)?);
    let by_event: HashMap<&str, &ScoredCell> = eb.trajectory.iter().map(|c| (c.event.as_str(), c)).collect();
    let (mut fa, mut fb, mut outcomes) = (Vec::new(), Vec::new(), Vec::new());
    for cell in &ea.trajectory {
        if let Some(other) = by_event.get(cell.event.as_str()) {
            fa.push(cell.forecast.clone());
            fb.push(other.forecast.clone());
            outcomes.push(cell.outcome);
        }
    }
    if outcomes.is_empty() {
        return Err(Error::NoCommonEvents {
            a: a.to_string(),
            b: b.to_string(),
        });
    }
    compare_multicategory(&fa, &fb, &outcomes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub higher: String,
    pub lower: String,
    /// Brier Δ, positive when `higher` did better on the common events.
    pub delta: f64,
    pub sigma_bound: f64,
    pub n_common: usize,
    pub bound_kind: BoundKind,
    /// `|Δ| > 2σ`.
    pub separated: bool,
}

/// Two-σ verdicts for each pair of adjacent leaderboard entries.
pub fn margin_significance(board: &Leaderboard) -> Result<Vec<PairVerdict>> {
    board
        .entries
        .windows(2)
        .map(|pair| {
            let (higher, lower) = (&pair[0].forecaster, &pair[1].forecaster);
            let c = pair_comparison(board, higher, lower)?;
            Ok(PairVerdict {
                higher: higher.clone(),
                lower: lower.clone(),
                delta: c.delta,
                sigma_bound: c.sigma_bound,
                n_common: c.n,
                bound_kind: c.bound_kind,
                separated: two_sigma_separated(c.delta, c.sigma_bound),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankInterval {
    pub forecaster: String,
    pub rank: usize,
    pub best: usize,
    pub worst: usize,
}

/// Ranks reachable by each competitor when every pairwise gap may move by
/// up to twice its σ bound.
///
/// Rival `j` stays above `i` only if `s_j - s_i > 2σ_ij`, and can end up
/// above unless `s_i - s_j > 2σ_ij`. A gap of exactly 2σ is not separated.
/// Unknown bounds should be passed as infinity.
pub fn rank_intervals(means: &[f64], sigma: &[Vec<f64>]) -> Vec<(usize, usize)> {
    (0..means.len())
        .map(|i| {
            let rivals = (0..means.len()).filter(|&j| j != i);
            let best = 1 + rivals.clone().filter(|&j| gap(means[j], means[i]) > 2.0 * sigma[i][j]).count();
            let worst = 1 + rivals.filter(|&j| gap(means[j], means[i]) >= -2.0 * sigma[i][j]).count();
            (best, worst)
        })
        .collect()
}

/// Rank intervals of a Brier leaderboard; other rules have no σ bound on
/// the same scale as their means.
pub fn rank_confidence(board: &Leaderboard) -> Result<Vec<RankInterval>> {
    if !matches!(board.rule, ScoringRule::Brier) {
        return Err(Error::InvalidParameter(format!(
            "rank intervals need the Brier rule, not {}",
            board.rule
        )));
    }
    let n = board.entries.len();
    let mut sigma = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let s = pair_comparison(board, &board.entries[i].forecaster, &board.entries[j].forecaster)
                .map_or(f64::INFINITY, |c| c.sigma_bound);
            sigma[i][j] = s;
            sigma[j][i] = s;
        }
    }
    let means: Vec<f64> = board.entries.iter().map(|e| e.mean_score).collect();
    Ok(rank_intervals(&means, &sigma)
        .into_iter()
        .zip(&board.entries)
        .map(|((best, worst), e)| RankInterval {
            forecaster: e.forecaster.clone(),
            rank: e.rank,
            best,
            worst,
        })
        .collect())
}

fn opt_score(v: Option<f64>) -> String {
    v.map(format_score).unwrap_or_default()
}

/// `rank,forecaster,events_scored,imputed,mean_score,margin_to_next,two_sigma_to_next`
pub fn write_leaderboard_csv<W: Write>(board: &Leaderboard, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record([
        "rank",
        "forecaster",
        "events_scored",
        "imputed",
        "mean_score",
        "margin_to_next",
        "two_sigma_to_next",
    ])
    .map_err(io)?;
    for e in &board.entries {
        w.write_record([
            e.rank.to_string(),
            e.forecaster.clone(),
            e.events_scored.to_string(),
            e.imputed.to_string(),
            format_score(e.mean_score),
            opt_score(e.margin_to_next),
            opt_score(e.two_sigma_to_next),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// One row per forecaster per scored event:
/// `forecaster,step,event_id,round,score,cumulative_mean,imputed`.
pub fn write_trajectories_csv<W: Write>(board: &Leaderboard, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["forecaster", "step", "event_id", "round", "score", "cumulative_mean", "imputed"])
        .map_err(io)?;
    for e in &board.entries {
        for (step, c) in e.trajectory.iter().enumerate() {
            w.write_record([
                e.forecaster.clone(),
                (step + 1).to_string(),
                c.event.clone(),
                c.round.to_string(),
                format_score(c.score),
                format_score(c.cumulative_mean),
                c.imputed.to_string(),
            ])
            .map_err(io)?;
        }
    }
    w.flush()?;
    Ok(())
}
