//! Proper scoring rules and forecast verification for prediction tournaments.
//!
//! The crate is organised by task:
//!
//! - [`rules`]: Brier, log, spherical, elliptical and Poisson-type scores, plus
//!   the Savage construction that turns a convex entropy into a proper score.
//! - [`verification`]: Murphy and climatology decompositions of a binary
//!   forecast record, skill scores and climatological baselines.
//! - [`luck_skill`]: uncertainty/luck/skill split of a Brier score and the
//!   paired comparison statistic Δ with its p-free standard deviation bound.
//! - [`kelly`]: Kelly betting on an even-odds biased coin.
//! - [`simulate`]: seeded Monte Carlo tournaments (how often does a worse
//!   forecaster beat a better one?).
//! - [`tournament`]: ingestion of forecast files, leaderboards, trajectories
//!   and margin-of-victory checks.
//!
//! All scores are positively oriented: higher is better.

pub mod error;
pub mod kelly;
pub mod luck_skill;
pub mod num;
pub mod rules;
pub mod simulate;
pub mod tournament;
pub mod verification;

pub use error::{Error, Result};
pub use rules::{Forecast, LogZero, Outcome, RuleTriple, ScoringRule};
