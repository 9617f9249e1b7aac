//! Tournament records, leaderboards and margin-of-victory checks.
//!
//! Events are resolved in `(round, event id)` order; that order defines each
//! forecaster's trajectory of cumulative average scores. Every forecaster
//! may submit at most one forecast per event.

mod ingest;
mod leaderboard;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rules::{Forecast, Outcome};

pub use ingest::{ingest, ingest_delimited, ingest_json_lines, IngestReport, InputFormat, Rejection};
pub use leaderboard::{
    margin_significance, pair_comparison, rank_confidence, rank_intervals, score_tournament, write_leaderboard_csv,
    write_trajectories_csv, Leaderboard, LeaderboardEntry, MissingPolicy, PairVerdict, RankInterval, ScoredCell,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub id: String,
    pub round: u32,
    pub categories: usize,
    /// Absent until the event resolves.
    pub outcome: Option<Outcome>,
}

impl EventRecord {
    pub fn new(id: impl Into<String>, round: u32, categories: usize, outcome: Option<usize>) -> Result<Self> {
        if categories < 2 {
            return Err(Error::TooFewCategories(categories));
        }
        if let Some(index) = outcome {
            if index >= categories {
                return Err(Error::OutcomeOutOfRange { index, categories });
            }
        }
        Ok(EventRecord {
            id: id.into(),
            round,
            categories,
            outcome: outcome.map(Outcome),
        })
    }

    pub fn is_resolved(&self) -> bool {
        self.outcome.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastSubmission {
    pub forecaster: String,
    pub event: String,
    pub forecast: Forecast,
    pub round: u32,
}

/// Orders event ids numerically when both are integers, otherwise as text.
pub fn compare_event_ids(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        _ => a.cmp(b),
    }
}

/// Validated events and submissions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Tournament {
    events: BTreeMap<String, EventRecord>,
    submissions: BTreeMap<(String, String), ForecastSubmission>,
}

impl Tournament {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_event(&mut self, event: EventRecord) -> Result<()> {
        if self.events.contains_key(&event.id) {
            return Err(Error::InvalidParameter(format!("duplicate event `{}`", event.id)));
        }
        self.events.insert(event.id.clone(), event);
        Ok(())
    }

    /// Adds a forecast. Unknown events, wrong dimensions and a second
    /// forecast for the same (forecaster, event) are refused.
    pub fn add_submission(&mut self, submission: ForecastSubmission) -> Result<()> {
        let event = self
            .events
            .get(&submission.event)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown event `{}`", submission.event)))?;
        if submission.forecast.categories() != event.categories {
            return Err(Error::DimensionMismatch {
                expected: event.categories,
                got: submission.forecast.categories(),
            });
        }
        let key = (submission.forecaster.clone(), submission.event.clone());
        if self.submissions.contains_key(&key) {
            return Err(Error::InvalidParameter(format!(
                "duplicate forecast from `{}` for event `{}`",
                key.0, key.1
            )));
        }
        self.submissions.insert(key, submission);
        Ok(())
    }

    /// Convenience for building tournaments in code.
    pub fn submit(&mut self, forecaster: &str, event: &str, probs: Vec<f64>) -> Result<()> {
        let round = self
            .events
            .get(event)
            .map(|e| e.round)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown event `{event}`")))?;
        self.add_submission(ForecastSubmission {
            forecaster: forecaster.to_string(),
            event: event.to_string(),
            forecast: Forecast::new(probs)?,
            round,
        })
    }

    pub fn event(&self, id: &str) -> Option<&EventRecord> {
        self.events.get(id)
    }

    pub fn events(&self) -> impl Iterator<Item = &EventRecord> {
        self.events.values()
    }

    pub fn submission(&self, forecaster: &str, event: &str) -> Option<&ForecastSubmission> {
        self.submissions.get(&(forecaster.to_string(), event.to_string()))
    }

    pub fn submissions(&self) -> impl Iterator<Item = &ForecastSubmission> {
        self.submissions.values()
    }

    /// Forecaster ids in sorted order.
    pub fn forecasters(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.submissions.keys().map(|(f, _)| f.clone()).collect();
        ids.dedup();
        ids
    }

    /// Resolved events in resolution order.
    pub fn resolved_events(&self) -> Vec<&EventRecord> {
        let mut events: Vec<&EventRecord> = self.events.values().filter(|e| e.is_resolved()).collect();
        events.sort_by(|a, b| a.round.cmp(&b.round).then_with(|| compare_event_ids(&a.id, &b.id)));
        events
    }
}
