//! Kelly betting on a biased coin at even odds.
//!
//! Staking a fraction `f` of the bank on heads (probability `p`) each play
//! multiplies the bank by `1 + f` or `1 - f`. Expected log growth per play is
//! `p log(1 + f) + (1 - p) log(1 - f)`, maximised at `f = 2p - 1`, where it
//! equals `p log p + (1 - p) log(1 - p) + log 2`: the Kullback-Leibler
//! divergence between the bettor's coin and the house's fair one.
//!
//! Only the double-or-nothing game is modelled. Short positions are not
//! offered, so without an edge the optimal stake is zero.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};

/// `max(0, 2p - 1)`.
pub fn kelly_fraction(p: f64) -> Result<f64> {
    check_probability(p)?;
    Ok((2.0 * p - 1.0).max(0.0))
}

pub fn expected_log_growth(p: f64, f: f64) -> Result<f64> {
    check_probability(p)?;
    check_fraction(f)?;
    Ok(weighted_ln(p, 1.0 + f) + weighted_ln(1.0 - p, 1.0 - f))
}

/// Growth at the Kelly stake for `p >= 1/2`: `p log p + (1-p) log(1-p) + log 2`.
pub fn kelly_growth(p: f64) -> Result<f64> {
    check_probability(p)?;
    Ok(weighted_ln(p, p) + weighted_ln(1.0 - p, 1.0 - p) + std::f64::consts::LN_2)
}

// w * ln(x) with 0 * ln(0) = 0
fn weighted_ln(w: f64, x: f64) -> f64 {
    if w == 0.0 {
        0.0
    } else {
        w * x.ln()
    }
}

fn check_fraction(f: f64) -> Result<f64> {
    if (0.0..1.0).contains(&f) {
        Ok(f)
    } else {
        Err(Error::InvalidFraction(f))
    }
}

/// A bettor who knows `p` and stakes the fraction `f` every play.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KellyGame {
    p: f64,
    f: f64,
}

impl KellyGame {
    pub fn new(p: f64, f: f64) -> Result<Self> {
        Ok(KellyGame {
            p: check_probability(p)?,
            f: check_fraction(f)?,
        })
    }

    /// Stakes the Kelly fraction scaled by `multiple` (e.g. 0.5 for half-Kelly).
    pub fn fractional_kelly(p: f64, multiple: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&multiple) {
            return Err(Error::InvalidParameter(format!("Kelly multiple {multiple} outside [0, 1]")));
        }
        KellyGame::new(p, kelly_fraction(p)? * multiple)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn fraction(&self) -> f64 {
        self.f
    }

    pub fn expected_log_growth(&self) -> f64 {
        weighted_ln(self.p, 1.0 + self.f) + weighted_ln(1.0 - self.p, 1.0 - self.f)
    }

    pub fn simulate(&self, n_plays: usize, seed: u64) -> Result<BankTrajectory> {
        if n_plays == 0 {
            return Err(Error::InvalidParameter("n_plays must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (up, down) = ((1.0 + self.f).ln(), (1.0 - self.f).ln());
        let mut log_bank = 0.0;
        let log_multipliers = (0..n_plays)
            .map(|_| {
                log_bank += if rng.random_bool(self.p) { up } else { down };
                log_bank
            })
            .collect();
        Ok(BankTrajectory { log_multipliers })
    }
}

/// Log of the bank multiplier after each play.
///
/// Kept in log space: a long winning run overflows `f64` quickly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BankTrajectory {
    pub log_multipliers: Vec<f64>,
}

impl BankTrajectory {
    pub fn len(&self) -> usize {
        self.log_multipliers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_multipliers.is_empty()
    }

    pub fn multipliers(&self) -> impl Iterator<Item = f64> + '_ {
        self.log_multipliers.iter().map(|l| l.exp())
    }

    pub fn final_multiplier(&self) -> f64 {
        self.log_multipliers.last().map_or(1.0, |l| l.exp())
    }

    /// Realised log growth per play.
    pub fn mean_log_growth(&self) -> f64 {
        self.log_multipliers.last().map_or(0.0, |l| l / self.len() as f64)
    }
}

pub fn simulate_bank(p: f64, f: f64, n_plays: usize, seed: u64) -> Result<BankTrajectory> {
    KellyGame::new(p, f)?.simulate(n_plays, seed)
}
