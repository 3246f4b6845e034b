//! Trial data types and point estimators for VE and SVE.
//!
//! Arm 0 is the unvaccinated (placebo) arm and arm 1 the vaccinated arm.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SveError};

/// Event counts and sizes of a two-arm trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwoArmCounts {
    x0: u64,
    n0: u64,
    x1: u64,
    n1: u64,
}

impl TwoArmCounts {
    pub fn new(x0: u64, n0: u64, x1: u64, n1: u64) -> Result<Self> {
        if n0 == 0 || n1 == 0 {
            return Err(SveError::InvalidCounts(format!(
                "arm sizes must be positive (n0 = {n0}, n1 = {n1})"
            )));
        }
        if x0 > n0 || x1 > n1 {
            return Err(SveError::InvalidCounts(format!(
                "event counts exceed arm sizes (x0 = {x0}/{n0}, x1 = {x1}/{n1})"
            )));
        }
        Ok(Self { x0, n0, x1, n1 })
    }

    pub fn x0(&self) -> u64 {
        self.x0
    }

    pub fn n0(&self) -> u64 {
        self.n0
    }

    pub fn x1(&self) -> u64 {
        self.x1
    }

    pub fn n1(&self) -> u64 {
        self.n1
    }

    /// Exchanges the two arms.
    pub fn swapped(&self) -> Self {
        Self {
            x0: self.x1,
            n0: self.n1,
            x1: self.x0,
            n1: self.n0,
        }
    }

    pub fn total_events(&self) -> u64 {
        self.x0 + self.x1
    }
}

/// True or empirical infection risks `(p0, p1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskPair {
    pub p0: f64,
    pub p1: f64,
}

impl RiskPair {
    pub fn new(p0: f64, p1: f64) -> Result<Self> {
        let ok = |p: f64| (0.0..=1.0).contains(&p);
        if !ok(p0) || !ok(p1) {
            return Err(SveError::Domain(format!(
                "risks must lie in [0, 1] (p0 = {p0}, p1 = {p1})"
            )));
        }
        Ok(Self { p0, p1 })
    }

    pub fn swapped(&self) -> Self {
        Self {
            p0: self.p1,
            p1: self.p0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectKind {
    Ve,
    Sve,
    SveBiasCorrected,
    SveFromTheta,
}

/// A point estimate together with how it was produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectEstimate {
    pub value: f64,
    pub kind: EffectKind,
    /// Set when an SVE estimate is pinned at -1 or +1 by a zero-event arm.
    pub boundary: bool,
}

impl EffectEstimate {
    fn sve_like(value: f64, kind: EffectKind) -> Self {
        Self {
            value,
            kind,
            boundary: value.abs() >= 1.0,
        }
    }
}

/// A multiplicative relative effect (hazard ratio, rate ratio, ...) with the
/// standard error of its logarithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativeEffect {
    pub theta_hat: f64,
    pub se_log_theta: f64,
}

impl RelativeEffect {
    pub fn new(theta_hat: f64, se_log_theta: f64) -> Result<Self> {
        if !(theta_hat > 0.0 && theta_hat.is_finite()) {
            return Err(SveError::Domain(format!(
                "relative effect must be positive and finite, got {theta_hat}"
            )));
        }
        if !(se_log_theta >= 0.0 && se_log_theta.is_finite()) {
            return Err(SveError::Domain(format!(
                "standard error of log(theta) must be nonnegative, got {se_log_theta}"
            )));
        }
        Ok(Self {
            theta_hat,
            se_log_theta,
        })
    }
}

pub fn empirical_risks(counts: &TwoArmCounts) -> RiskPair {
    RiskPair {
        p0: counts.x0 as f64 / counts.n0 as f64,
        p1: counts.x1 as f64 / counts.n1 as f64,
    }
}

/// Traditional vaccine efficacy `1 - p1/p0`.
///
/// Evaluated as `(p0 - p1) / p0` so that it agrees bit-for-bit with
/// [`sve_point`] whenever `p0 >= p1`.
pub fn ve_point(risks: &RiskPair) -> Result<EffectEstimate> {
    if risks.p0 <= 0.0 {
        return Err(SveError::UndefinedEffect(
            "VE requires a positive risk in the unvaccinated arm".into(),
        ));
    }
    Ok(EffectEstimate {
        value: (risks.p0 - risks.p1) / risks.p0,
        kind: EffectKind::Ve,
        boundary: false,
    })
}

/// Symmetric vaccine efficacy `(p0 - p1) / max(p0, p1)`, bounded in [-1, 1].
pub fn sve_point(risks: &RiskPair) -> Result<EffectEstimate> {
    let denom = risks.p0.max(risks.p1);
    if denom <= 0.0 {
        return Err(SveError::UndefinedEffect(
            "SVE is 0/0 when both risks are zero".into(),
        ));
    }
    Ok(EffectEstimate::sve_like(
        (risks.p0 - risks.p1) / denom,
        EffectKind::Sve,
    ))
}

/// Plug-in SVE with the second-order bias approximation subtracted.
///
/// The corrected value is clamped to [-1, 1].
pub fn sve_bias_corrected(counts: &TwoArmCounts) -> Result<EffectEstimate> {
    let r = empirical_risks(counts);
    let sve = sve_point(&r)?.value;
    let (p0, p1) = (r.p0, r.p1);
    let corrected = if p0 > p1 {
        sve + p1 * (1.0 - p0) / (counts.n0 as f64 * p0 * p0)
    } else if p1 > p0 {
        sve - p0 * (1.0 - p1) / (counts.n1 as f64 * p1 * p1)
    } else {
        sve
    };
    Ok(EffectEstimate::sve_like(
        corrected.clamp(-1.0, 1.0),
        EffectKind::SveBiasCorrected,
    ))
}

/// Maps a relative effect to SVE: `(1 - theta) / max(1, theta)`.
pub fn sve_from_theta(effect: &RelativeEffect) -> Result<EffectEstimate> {
    Ok(EffectEstimate::sve_like(
        sve_of_theta(effect.theta_hat)?,
        EffectKind::SveFromTheta,
    ))
}

pub(crate) fn sve_of_theta(theta: f64) -> Result<f64> {
    if !(theta > 0.0) || theta.is_infinite() {
        return Err(SveError::Domain(format!(
            "relative effect must be positive and finite, got {theta}"
        )));
    }
    Ok(if theta <= 1.0 {
        1.0 - theta
    } else {
        (1.0 - theta) / theta
    })
}

/// Inverse of [`sve_from_theta`] on (-1, 1).
pub fn theta_from_sve(s: f64) -> Result<f64> {
    if !(s > -1.0 && s < 1.0) {
        return Err(SveError::Domain(format!("SVE must lie in (-1, 1), got {s}")));
    }
    Ok(if s >= 0.0 { 1.0 - s } else { 1.0 / (1.0 + s) })
}
