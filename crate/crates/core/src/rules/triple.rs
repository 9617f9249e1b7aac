//! Savage representation: a convex entropy `F` induces the proper score
//! `F(q) + F'(q) (X - q)`.
//!
//! Entropies are stored convex and (for Brier and log) negative-valued, so
//! the induced scores are positively oriented.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::EllipticalParams;
use crate::error::{Error, Result};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Interval on which an entropy and its derivatives are finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
    pub open_lo: bool,
    pub open_hi: bool,
}

impl Domain {
    pub const CLOSED_UNIT: Domain = Domain { lo: 0.0, hi: 1.0, open_lo: false, open_hi: false };
    pub const OPEN_UNIT: Domain = Domain { lo: 0.0, hi: 1.0, open_lo: true, open_hi: true };

    pub fn contains(&self, p: f64) -> bool {
        let above = if self.open_lo { p > self.lo } else { p >= self.lo };
        let below = if self.open_hi { p < self.hi } else { p <= self.hi };
        above && below
    }
}

/// Entropy `F`, exposure `F'` and penalty `F''` of a binary scoring rule.
#[derive(Clone)]
pub struct RuleTriple {
    name: String,
    entropy: RealFn,
    exposure: RealFn,
    penalty: RealFn,
    domain: Domain,
}

impl RuleTriple {
    pub fn new(
        name: impl Into<String>,
        entropy: impl Fn(f64) -> f64 + Send + Sync + 'static,
        exposure: impl Fn(f64) -> f64 + Send + Sync + 'static,
        penalty: impl Fn(f64) -> f64 + Send + Sync + 'static,
        domain: Domain,
    ) -> Self {
        RuleTriple {
            name: name.into(),
            entropy: Arc::new(entropy),
            exposure: Arc::new(exposure),
            penalty: Arc::new(penalty),
            domain,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn entropy(&self, p: f64) -> f64 {
        (self.entropy)(p)
    }

    pub fn exposure(&self, p: f64) -> f64 {
        (self.exposure)(p)
    }

    pub fn penalty(&self, p: f64) -> f64 {
        (self.penalty)(p)
    }

    /// Realised score `F(q) + F'(q) (X - q)`.
    pub fn score(&self, q: f64, x: bool) -> Result<f64> {
        if !self.domain.contains(q) {
            return Err(Error::OutsideDomain {
                rule: self.name.clone(),
                value: q,
            });
        }
        let x = if x { 1.0 } else { 0.0 };
        Ok(self.entropy(q) + self.exposure(q) * (x - q))
    }
}

impl fmt::Debug for RuleTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RuleTriple")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

/// Score induced by `triple` for forecast `q` and binary outcome `x`.
pub fn induced_score(triple: &RuleTriple, q: f64, x: bool) -> Result<f64> {
    triple.score(q, x)
}

fn xlogx(p: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        p * p.ln()
    }
}

pub fn brier_triple() -> RuleTriple {
    RuleTriple::new("brier", |p| p * (p - 1.0), |p| 2.0 * p - 1.0, |_| 2.0, Domain::CLOSED_UNIT)
}

pub fn log_triple() -> RuleTriple {
    RuleTriple::new(
        "log",
        |p| xlogx(p) + xlogx(1.0 - p),
        |p| (p / (1.0 - p)).ln(),
        |p| 1.0 / (p * (1.0 - p)),
        Domain::OPEN_UNIT,
    )
}

fn unit_radius(p: f64) -> f64 {
    (p * p + (1.0 - p) * (1.0 - p)).sqrt()
}

pub fn spherical_triple() -> RuleTriple {
    RuleTriple::new(
        "spherical",
        unit_radius,
        |p| (2.0 * p - 1.0) / unit_radius(p),
        |p| unit_radius(p).powi(-3),
        Domain::CLOSED_UNIT,
    )
}

pub fn elliptical_triple(params: EllipticalParams) -> RuleTriple {
    let a = params.alpha();
    let scale = (a * (1.0 - a)).sqrt();
    RuleTriple::new(
        format!("elliptical(alpha={a})"),
        move |p| params.radius(p) / scale,
        move |p| (p - a) / (scale * params.radius(p)),
        move |p| scale / params.radius(p).powi(3),
        Domain::CLOSED_UNIT,
    )
}

/// Entropy `p log p + 1 - p` of the Poisson-type score `X log q + 1 - q`.
pub fn poisson_triple() -> RuleTriple {
    RuleTriple::new(
        "poisson",
        |p| xlogx(p) + 1.0 - p,
        f64::ln,
        |p| 1.0 / p,
        Domain { lo: 0.0, hi: 1.0, open_lo: true, open_hi: false },
    )
}

/// Brier, log and spherical triples keyed by name.
pub fn builtin_triples() -> BTreeMap<&'static str, RuleTriple> {
    BTreeMap::from([
        ("brier", brier_triple()),
        ("log", log_triple()),
        ("spherical", spherical_triple()),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_triple_values() {
        let t = builtin_triples();
        for p in [0.05, 0.3, 0.5, 0.77] {
            assert_eq!(t["brier"].penalty(p), 2.0);
        }
        assert_eq!(t["log"].exposure(0.5), 0.0);
        assert!((t["spherical"].entropy(0.5) - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn elliptical_triple_at_half() {
        let t = elliptical_triple(EllipticalParams::new(0.5).unwrap());
        assert!((t.entropy(0.5) - 1.0).abs() < 1e-15);
        assert_eq!(t.exposure(0.5), 0.0);
        assert!((t.penalty(0.5) - 4.0).abs() < 1e-12);
        let t = elliptical_triple(EllipticalParams::new(0.2).unwrap());
        assert_eq!(t.exposure(0.2), 0.0);
    }

    #[test]
    fn induced_examples() {
        let t = builtin_triples();
        assert!((induced_score(&t["brier"], 0.7, true).unwrap() + 0.09).abs() < 1e-15);
        assert!((induced_score(&t["log"], 0.7, true).unwrap() - 0.7f64.ln()).abs() < 1e-15);
        assert!(
            (induced_score(&t["spherical"], 0.5, false).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs()
                < 1e-15
        );
    }

    #[test]
    fn outside_domain_is_an_error() {
        let log = log_triple();
        assert!(matches!(log.score(0.0, true), Err(Error::OutsideDomain { .. })));
        assert!(matches!(log.score(1.0, false), Err(Error::OutsideDomain { .. })));
        assert!(brier_triple().score(1.2, true).is_err());
        assert!(poisson_triple().score(1.0, true).is_ok());
    }
}
