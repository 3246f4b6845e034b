//! Binomial log-likelihood, the profile log-likelihood of SVE and the
//! likelihood-ratio statistic used to invert profile intervals.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SveError};
use crate::estimands::{empirical_risks, RiskPair, TwoArmCounts};
use crate::numerics::{maximize_scalar, OptimizerConfig};

/// Inner optimization runs on `(NUISANCE_EDGE, 1 - NUISANCE_EDGE)`.
pub const NUISANCE_EDGE: f64 = 1e-12;

/// Negative LRT values above this are optimizer noise and clamp to zero.
pub const LAMBDA_NOISE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub s: f64,
    pub loglik: f64,
    /// The maximizing p0 when `s >= 0`, or the maximizing p1 when `s < 0`.
    pub nuisance: f64,
}

impl ProfilePoint {
    /// The risk pair attaining the profile maximum.
    pub fn risks(&self) -> RiskPair {
        constrained_risks(self.s, self.nuisance)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrtStatistic {
    pub lambda: f64,
    pub s: f64,
}

// x * ln(p) with 0 * ln(0) = 0
#[inline]
fn xlogy(x: f64, p: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if p <= 0.0 {
        f64::NEG_INFINITY
    } else {
        x * p.ln()
    }
}

#[inline]
fn arm_loglik(x: u64, n: u64, p: f64) -> f64 {
    let (x, f) = (x as f64, (n - x) as f64);
    xlogy(x, p) + xlogy(f, 1.0 - p)
}

/// Two-arm binomial log-likelihood (without the binomial coefficients).
///
/// Returns `-inf` when a risk of 0 or 1 is incompatible with the counts.
pub fn log_likelihood(counts: &TwoArmCounts, risks: &RiskPair) -> f64 {
    arm_loglik(counts.x0(), counts.n0(), risks.p0) + arm_loglik(counts.x1(), counts.n1(), risks.p1)
}

/// Unconstrained maximum, attained at the empirical risks.
pub fn max_log_likelihood(counts: &TwoArmCounts) -> f64 {
    log_likelihood(counts, &empirical_risks(counts))
}

/// Risk pair on the SVE = `s` constraint with free parameter `t`.
#[inline]
fn constrained_risks(s: f64, t: f64) -> RiskPair {
    if s >= 0.0 {
        RiskPair {
            p0: t,
            p1: t * (1.0 - s),
        }
    } else {
        RiskPair {
            p0: t * (1.0 + s),
            p1: t,
        }
    }
}

/// Profile likelihood of one data set; caches the unconstrained maximum.
#[derive(Debug, Clone)]
pub struct ProfileLikelihood {
    counts: TwoArmCounts,
    max_loglik: f64,
    cfg: OptimizerConfig,
}

impl ProfileLikelihood {
    pub fn new(counts: TwoArmCounts) -> Self {
        Self::with_config(counts, OptimizerConfig::default())
    }

    pub fn with_config(counts: TwoArmCounts, cfg: OptimizerConfig) -> Self {
        Self {
            counts,
            max_loglik: max_log_likelihood(&counts),
            cfg,
        }
    }

    pub fn counts(&self) -> &TwoArmCounts {
        &self.counts
    }

    pub fn max_loglik(&self) -> f64 {
        self.max_loglik
    }

    pub fn profile(&self, s: f64) -> Result<ProfilePoint> {
        if !(s > -1.0 && s < 1.0) {
            return Err(SveError::Domain(format!(
                "profile likelihood needs s in (-1, 1), got {s}"
            )));
        }
        let counts = self.counts;
        let objective = |t: f64| log_likelihood(&counts, &constrained_risks(s, t));
        let m = maximize_scalar(objective, NUISANCE_EDGE, 1.0 - NUISANCE_EDGE, &self.cfg)
            .map_err(|e| {
                SveError::Numeric(format!("profile maximization failed at s = {s} for {counts:?}: {e}"))
            })?;
        Ok(ProfilePoint {
            s,
            loglik: m.value,
            nuisance: m.argmax,
        })
    }

    pub fn lrt(&self, s: f64) -> Result<LrtStatistic> {
        if self.counts.total_events() == 0 {
            return Err(SveError::UndefinedEffect(
                "the likelihood ratio needs at least one event".into(),
            ));
        }
        let point = self.profile(s)?;
        let raw = 2.0 * (self.max_loglik - point.loglik);
        if raw < -LAMBDA_NOISE {
            return Err(SveError::Numeric(format!(
                "profile log-likelihood exceeds the unconstrained maximum at s = {s} \
                 (lambda = {raw:e}) for {:?}",
                self.counts
            )));
        }
        Ok(LrtStatistic {
            lambda: raw.max(0.0),
            s,
        })
    }
}

/// Profile log-likelihood of SVE at `s`, maximizing over p0 (s >= 0) or p1 (s < 0).
pub fn profile_loglik(counts: &TwoArmCounts, s: f64) -> Result<ProfilePoint> {
    ProfileLikelihood::new(*counts).profile(s)
}

/// Likelihood-ratio statistic `2 (l(p0_hat, p1_hat) - l_p(s))`.
pub fn lrt_statistic(counts: &TwoArmCounts, s: f64) -> Result<LrtStatistic> {
    ProfileLikelihood::new(*counts).lrt(s)
}
