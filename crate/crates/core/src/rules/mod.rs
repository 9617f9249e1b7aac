//! Scoring rules for categorical and binary forecasts.
//!
//! Closed-form scorers live here; the entropy/exposure/penalty view of the
//! same rules (and the general Savage construction) lives in [`triple`].
//! Brier and log accept any number of categories. Spherical, elliptical and
//! the Poisson-type score are defined for Bernoulli trials only.

mod triple;

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};

pub use triple::{
    brier_triple, builtin_triples, elliptical_triple, induced_score, log_triple, poisson_triple,
    spherical_triple, Domain, RuleTriple,
};

/// Largest deviation of a probability vector's sum from 1 that is silently
/// renormalised.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

/// Probability used in place of zero by [`LogZero::Floor`].
pub const LOG_FLOOR: f64 = 1e-12;

/// A probability vector over `K >= 2` categories.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Forecast(Vec<f64>);

impl Forecast {
    /// Validates a probability vector.
    ///
    /// Sums within [`NORMALIZATION_TOLERANCE`] of 1 are rescaled to sum to 1;
    /// anything further off is rejected.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::TooFewCategories(probs.len()));
        }
        for (index, &value) in probs.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::ProbabilityOutOfRange { index, value });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized { sum });
        }
        let probs = if sum == 1.0 {
            probs
        } else {
            probs.into_iter().map(|p| p / sum).collect()
        };
        Ok(Forecast(probs))
    }

    pub fn uniform(categories: usize) -> Result<Self> {
        if categories < 2 {
            return Err(Error::TooFewCategories(categories));
        }
        Ok(Forecast(vec![1.0 / categories as f64; categories]))
    }

    /// The binary forecast `(q, 1 - q)`: category 0 is the event.
    pub fn binary(q: f64) -> Result<Self> {
        check_probability(q)?;
        Ok(Forecast(vec![q, 1.0 - q]))
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn categories(&self) -> usize {
        self.0.len()
    }

    pub fn prob(&self, outcome: Outcome) -> Result<f64> {
        self.check(outcome)?;
        Ok(self.0[outcome.0])
    }

    fn check(&self, outcome: Outcome) -> Result<()> {
        if outcome.0 < self.0.len() {
            Ok(())
        } else {
            Err(Error::OutcomeOutOfRange {
                index: outcome.0,
                categories: self.0.len(),
            })
        }
    }
}

impl<'de> Deserialize<'de> for Forecast {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let probs = Vec::<f64>::deserialize(deserializer)?;
        Forecast::new(probs).map_err(serde::de::Error::custom)
    }
}

/// Index of the realised category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Outcome(pub usize);

impl Outcome {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Handling of a zero probability on the realised outcome under the log score.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogZero {
    /// Score `-inf`.
    #[default]
    Infinite,
    /// Score `log(LOG_FLOOR)`.
    Floor,
    /// Refuse the forecast (Cromwell's rule).
    Reject,
}

impl std::str::FromStr for LogZero {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "infinite" => Ok(LogZero::Infinite),
            "floor" => Ok(LogZero::Floor),
            "reject" => Ok(LogZero::Reject),
            other => Err(Error::InvalidParameter(format!("unknown log-zero policy `{other}`"))),
        }
    }
}

fn guarded_log(q: f64, policy: LogZero) -> Result<f64> {
    if q > 0.0 {
        return Ok(q.ln());
    }
    match policy {
        LogZero::Infinite => Ok(f64::NEG_INFINITY),
        LogZero::Floor => Ok(LOG_FLOOR.ln()),
        LogZero::Reject => Err(Error::CromwellViolation(q)),
    }
}

/// Halved quadratic score `-(1/2) Σ_k (X_k - q_k)^2`, in `[-1, 0]`.
pub fn brier_score(forecast: &Forecast, outcome: Outcome) -> Result<f64> {
    forecast.check(outcome)?;
    let sum: f64 = forecast
        .probs()
        .iter()
        .enumerate()
        .map(|(k, &q)| {
            let x = if k == outcome.0 { 1.0 } else { 0.0 };
            (x - q) * (x - q)
        })
        .sum();
    Ok(-0.5 * sum)
}

/// Natural log of the probability given to the realised outcome.
pub fn log_score(forecast: &Forecast, outcome: Outcome, zero: LogZero) -> Result<f64> {
    guarded_log(forecast.prob(outcome)?, zero)
}

/// Binary Brier score `-(X - q)^2`; equals [`brier_score`] on `(q, 1 - q)`.
pub fn brier_binary(q: f64, x: bool) -> f64 {
    let x = if x { 1.0 } else { 0.0 };
    -(x - q) * (x - q)
}

/// Binary log score: `log q` if the event happened, else `log(1 - q)`.
pub fn log_binary(q: f64, x: bool, zero: LogZero) -> Result<f64> {
    check_probability(q)?;
    guarded_log(if x { q } else { 1.0 - q }, zero)
}

/// `q / r` if the event happened, `(1 - q) / r` otherwise, with
/// `r = sqrt(q^2 + (1 - q)^2)`.
pub fn spherical_score(q: f64, x: bool) -> Result<f64> {
    check_probability(q)?;
    let r = (q * q + (1.0 - q) * (1.0 - q)).sqrt();
    Ok(if x { q / r } else { (1.0 - q) / r })
}

/// Sensitivity centre of the elliptical score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct EllipticalParams {
    alpha: f64,
}

impl EllipticalParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(EllipticalParams { alpha })
        } else {
            Err(Error::InvalidAlpha(alpha))
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `r` with `r^2 = (1 - α) p^2 + α (1 - p)^2`.
    pub fn radius(&self, p: f64) -> f64 {
        let a = self.alpha;
        ((1.0 - a) * p * p + a * (1.0 - p) * (1.0 - p)).sqrt()
    }
}

impl TryFrom<f64> for EllipticalParams {
    type Error = Error;

    fn try_from(alpha: f64) -> Result<Self> {
        EllipticalParams::new(alpha)
    }
}

impl From<EllipticalParams> for f64 {
    fn from(params: EllipticalParams) -> f64 {
        params.alpha
    }
}

/// Asymmetric generalisation of the spherical score, most sensitive near α.
///
/// A forecast `q = α` scores exactly 1 whatever happens. At `α = 1/2` the
/// score is `√2` times the spherical score.
pub fn elliptical_score(params: EllipticalParams, q: f64, x: bool) -> Result<f64> {
    check_probability(q)?;
    let a = params.alpha;
    let r = params.radius(q);
    Ok(if x {
        ((1.0 - a) / a).sqrt() * (q / r)
    } else {
        (a / (1.0 - a)).sqrt() * ((1.0 - q) / r)
    })
}

/// `X log q + 1 - q`, a proper score for rare events.
///
/// `q = 0` is refused outright (Cromwell's rule), whatever the outcome.
pub fn poisson_asymmetric_score(q: f64, x: bool) -> Result<f64> {
    check_probability(q)?;
    if q == 0.0 {
        return Err(Error::CromwellViolation(q));
    }
    Ok(if x { q.ln() } else { 0.0 } + 1.0 - q)
}

/// A closed-form scoring rule, selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum ScoringRule {
    Brier,
    Log {
        #[serde(default)]
        zero: LogZero,
    },
    Spherical,
    Elliptical {
        alpha: EllipticalParams,
    },
    Poisson,
}

impl ScoringRule {
    pub const NAMES: [&'static str; 5] = ["brier", "log", "spherical", "elliptical", "poisson"];

    /// Builds a rule from its name. `alpha` must be given exactly when the
    /// rule is elliptical.
    pub fn from_name(name: &str, alpha: Option<f64>, zero: LogZero) -> Result<Self> {
        let rule = match name {
            "brier" => ScoringRule::Brier,
            "log" => ScoringRule::Log { zero },
            "spherical" => ScoringRule::Spherical,
            "poisson" => ScoringRule::Poisson,
            "elliptical" => {
                let alpha = alpha.ok_or_else(|| {
                    Error::InvalidParameter("the elliptical rule needs --alpha".into())
                })?;
                return Ok(ScoringRule::Elliptical {
                    alpha: EllipticalParams::new(alpha)?,
                });
            }
            other => return Err(Error::UnknownRule(other.to_string())),
        };
        if alpha.is_some() {
            return Err(Error::InvalidParameter(format!(
                "--alpha only applies to the elliptical rule, not `{name}`"
            )));
        }
        Ok(rule)
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScoringRule::Brier => "brier",
            ScoringRule::Log { .. } => "log",
            ScoringRule::Spherical => "spherical",
            ScoringRule::Elliptical { .. } => "elliptical",
            ScoringRule::Poisson => "poisson",
        }
    }

    pub fn is_binary_only(&self) -> bool {
        !matches!(self, ScoringRule::Brier | ScoringRule::Log { .. })
    }

    pub fn supports(&self, categories: usize) -> bool {
        categories >= 2 && (!self.is_binary_only() || categories == 2)
    }

    /// Score of a binary forecast `q` for the event when the event did
    /// (`x = true`) or did not happen.
    pub fn binary_score(&self, q: f64, x: bool) -> Result<f64> {
        match *self {
            ScoringRule::Brier => {
                check_probability(q)?;
                Ok(brier_binary(q, x))
            }
            ScoringRule::Log { zero } => log_binary(q, x, zero),
            ScoringRule::Spherical => spherical_score(q, x),
            ScoringRule::Elliptical { alpha } => elliptical_score(alpha, q, x),
            ScoringRule::Poisson => poisson_asymmetric_score(q, x),
        }
    }

    /// Score of a categorical forecast. Binary-only rules treat category 0
    /// as the event.
    pub fn score(&self, forecast: &Forecast, outcome: Outcome) -> Result<f64> {
        match *self {
            ScoringRule::Brier => brier_score(forecast, outcome),
            ScoringRule::Log { zero } => log_score(forecast, outcome, zero),
            _ => {
                if forecast.categories() != 2 {
                    return Err(Error::BinaryOnly {
                        rule: self.name().to_string(),
                        categories: forecast.categories(),
                    });
                }
                forecast.check(outcome)?;
                self.binary_score(forecast.probs()[0], outcome.0 == 0)
            }
        }
    }

    /// Entropy/exposure/penalty triple that induces the binary form of this rule.
    pub fn triple(&self) -> RuleTriple {
        match *self {
            ScoringRule::Brier => brier_triple(),
            ScoringRule::Log { .. } => log_triple(),
            ScoringRule::Spherical => spherical_triple(),
            ScoringRule::Elliptical { alpha } => elliptical_triple(alpha),
            ScoringRule::Poisson => poisson_triple(),
        }
    }
}

impl std::fmt::Display for ScoringRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScoringRule::Elliptical { alpha } => write!(f, "elliptical(alpha={})", alpha.alpha()),
            other => f.write_str(other.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fc(p: &[f64]) -> Forecast {
        Forecast::new(p.to_vec()).unwrap()
    }

    const WIN: Outcome = Outcome(0);

    #[test]
    fn brier_six_forecaster_rows() {
        assert_eq!(brier_score(&fc(&[1.0, 0.0, 0.0]), WIN).unwrap(), 0.0);
        // -0.1875 belongs to (0.5, 0.25, 0.25), not (0.5, 0.3, 0.2)
        assert!((brier_score(&fc(&[0.5, 0.3, 0.2]), WIN).unwrap() + 0.19).abs() < 1e-12);
        assert!((brier_score(&fc(&[0.5, 0.25, 0.25]), WIN).unwrap() + 0.1875).abs() < 1e-15);
        let third = 1.0 / 3.0;
        assert!((brier_score(&fc(&[third; 3]), Outcome(2)).unwrap() + third).abs() < 1e-15);
        assert_eq!(brier_score(&fc(&[0.0, 1.0, 0.0]), WIN).unwrap(), -1.0);
    }

    #[test]
    fn brier_outcome_out_of_range() {
        assert!(matches!(
            brier_score(&fc(&[0.5, 0.5]), Outcome(2)),
            Err(Error::OutcomeOutOfRange { index: 2, categories: 2 })
        ));
    }

    #[test]
    fn log_six_forecaster_rows() {
        let d = log_score(&fc(&[0.55, 0.45, 0.0]), WIN, LogZero::Infinite).unwrap();
        assert!((d - 0.55f64.ln()).abs() < 1e-15);
        assert_eq!(format!("{d:.2}"), "-0.60");
        assert_eq!(log_score(&fc(&[1.0, 0.0, 0.0]), WIN, LogZero::Infinite).unwrap(), 0.0);
        let f = fc(&[0.0, 1.0, 0.0]);
        assert_eq!(log_score(&f, WIN, LogZero::Infinite).unwrap(), f64::NEG_INFINITY);
        assert_eq!(log_score(&f, WIN, LogZero::Floor).unwrap(), LOG_FLOOR.ln());
        assert!(matches!(log_score(&f, WIN, LogZero::Reject), Err(Error::CromwellViolation(_))));
    }

    #[test]
    fn normalization_policy() {
        // rounded thirds are too far off; full-precision thirds are rescaled
        assert!(matches!(
            Forecast::new(vec![0.33, 0.33, 0.33]),
            Err(Error::NotNormalized { .. })
        ));
        let f = fc(&[0.333_333_333_3, 0.333_333_333_3, 0.333_333_333_3]);
        assert!((f.probs().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(matches!(Forecast::new(vec![0.5, 0.3]), Err(Error::NotNormalized { .. })));
        assert!(matches!(Forecast::new(vec![1.0]), Err(Error::TooFewCategories(1))));
        assert!(matches!(
            Forecast::new(vec![1.2, -0.2]),
            Err(Error::ProbabilityOutOfRange { index: 0, .. })
        ));
    }

    #[test]
    fn spherical_examples() {
        assert!((spherical_score(0.5, true).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(spherical_score(1.0, true).unwrap(), 1.0);
        assert!((spherical_score(0.8, false).unwrap() - 0.242_535_625_036_333).abs() < 1e-12);
    }

    #[test]
    fn elliptical_examples() {
        for alpha in [0.1, 0.37, 0.5, 0.9] {
            let p = EllipticalParams::new(alpha).unwrap();
            assert!((elliptical_score(p, alpha, true).unwrap() - 1.0).abs() < 1e-14);
            assert!((elliptical_score(p, alpha, false).unwrap() - 1.0).abs() < 1e-14);
        }
        let half = EllipticalParams::new(0.5).unwrap();
        let ratio = elliptical_score(half, 0.8, true).unwrap() / spherical_score(0.8, true).unwrap();
        assert!((ratio - 2f64.sqrt()).abs() < 1e-14);
        assert!(matches!(EllipticalParams::new(0.0), Err(Error::InvalidAlpha(_))));
        assert!(matches!(EllipticalParams::new(1.0), Err(Error::InvalidAlpha(_))));
    }

    #[test]
    fn poisson_examples() {
        assert_eq!(poisson_asymmetric_score(1.0, true).unwrap(), 0.0);
        assert_eq!(poisson_asymmetric_score(1e-6, false).unwrap(), 1.0 - 1e-6);
        assert!((poisson_asymmetric_score(0.1, true).unwrap() - (0.1f64.ln() + 0.9)).abs() < 1e-15);
        assert!((poisson_asymmetric_score(0.1, true).unwrap() + 1.402_585_092_994_045_7).abs() < 1e-12);
        assert!(matches!(poisson_asymmetric_score(0.0, false), Err(Error::CromwellViolation(_))));
    }

    #[test]
    fn rule_names_and_alpha() {
        assert_eq!(ScoringRule::from_name("brier", None, LogZero::Infinite).unwrap(), ScoringRule::Brier);
        assert!(ScoringRule::from_name("elliptical", None, LogZero::Infinite).is_err());
        assert!(ScoringRule::from_name("brier", Some(0.3), LogZero::Infinite).is_err());
        assert!(matches!(
            ScoringRule::from_name("crps", None, LogZero::Infinite),
            Err(Error::UnknownRule(_))
        ));
        let e = ScoringRule::from_name("elliptical", Some(0.3), LogZero::Infinite).unwrap();
        assert_eq!(e.to_string(), "elliptical(alpha=0.3)");
    }

    #[test]
    fn binary_only_rules_reject_three_categories() {
        let f = fc(&[0.5, 0.3, 0.2]);
        assert!(matches!(
            ScoringRule::Spherical.score(&f, WIN),
            Err(Error::BinaryOnly { categories: 3, .. })
        ));
        assert!(ScoringRule::Brier.score(&f, WIN).is_ok());
        // two-category forecasts score category 0 as the event
        let b = fc(&[0.8, 0.2]);
        assert_eq!(
            ScoringRule::Spherical.score(&b, Outcome(1)).unwrap(),
            spherical_score(0.8, false).unwrap()
        );
    }

    #[test]
    fn binary_brier_matches_categorical_form() {
        for i in 0..=100 {
            let q = i as f64 / 100.0;
            let f = Forecast::binary(q).unwrap();
            for x in [true, false] {
                let cat = brier_score(&f, Outcome(if x { 0 } else { 1 })).unwrap();
                assert!((cat - brier_binary(q, x)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rule_serde_round_trip() {
        let rule = ScoringRule::Elliptical { alpha: EllipticalParams::new(0.2).unwrap() };
        let json = serde_json::to_string(&rule).unwrap();
        assert_eq!(json, r#"{"name":"elliptical","alpha":0.2}"#);
        assert_eq!(serde_json::from_str::<ScoringRule>(&json).unwrap(), rule);
        assert!(serde_json::from_str::<ScoringRule>(r#"{"name":"elliptical","alpha":1.5}"#).is_err());
    }
}
