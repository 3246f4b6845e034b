//! Delta-method variances for SVE on the original, atanh and relative-effect
//! scales.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SveError};
use crate::estimands::{empirical_risks, sve_point, RelativeEffect, TwoArmCounts};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceScale {
    Original,
    Atanh,
    Theta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceEstimate {
    pub value: f64,
    pub scale: VarianceScale,
    /// One arm had zero events (or every subject had an event), so the plug-in
    /// arm variance is zero and coverage guarantees do not hold.
    pub boundary_adjacent: bool,
}

impl VarianceEstimate {
    pub fn se(&self) -> f64 {
        self.value.sqrt()
    }
}

/// Binomial variances of the empirical risks, `p(1 - p)/n` per arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmVariance {
    pub sigma0_sq: f64,
    pub sigma1_sq: f64,
}

impl ArmVariance {
    pub fn from_counts(counts: &TwoArmCounts) -> Self {
        let r = empirical_risks(counts);
        Self {
            sigma0_sq: r.p0 * (1.0 - r.p0) / counts.n0() as f64,
            sigma1_sq: r.p1 * (1.0 - r.p1) / counts.n1() as f64,
        }
    }
}

/// Plug-in variance of the SVE estimator:
/// `(p1^2 s0^2 + p0^2 s1^2) / max(p0, p1)^4`.
pub fn sve_variance(counts: &TwoArmCounts) -> Result<VarianceEstimate> {
    let r = empirical_risks(counts);
    let m = r.p0.max(r.p1);
    if m <= 0.0 {
        return Err(SveError::UndefinedEffect(
            "SVE variance is undefined when both arms have zero events".into(),
        ));
    }
    let arms = ArmVariance::from_counts(counts);
    let m2 = m * m;
    let value = (r.p1 * r.p1 * arms.sigma0_sq + r.p0 * r.p0 * arms.sigma1_sq) / (m2 * m2);
    Ok(VarianceEstimate {
        value,
        scale: VarianceScale::Original,
        boundary_adjacent: arms.sigma0_sq == 0.0 || arms.sigma1_sq == 0.0,
    })
}

/// Variance of `atanh(SVE_hat)`: `Var(SVE_hat) / (1 - SVE_hat^2)^2`.
pub fn atanh_variance(counts: &TwoArmCounts) -> Result<VarianceEstimate> {
    let sve = sve_point(&empirical_risks(counts))?;
    if sve.boundary {
        return Err(SveError::Boundary {
            estimate: sve.value,
            hint: "the atanh-scale variance diverges; use the profile method",
        });
    }
    let base = sve_variance(counts)?;
    let shrink = 1.0 - sve.value * sve.value;
    Ok(VarianceEstimate {
        value: base.value / (shrink * shrink),
        scale: VarianceScale::Atanh,
        boundary_adjacent: base.boundary_adjacent,
    })
}

/// Variance of SVE derived from a relative effect:
/// `Var(log theta) / max(theta, 1/theta)^2`.
pub fn sve_variance_from_theta(effect: &RelativeEffect) -> Result<VarianceEstimate> {
    let theta = effect.theta_hat;
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(SveError::Domain(format!(
            "relative effect must be positive and finite, got {theta}"
        )));
    }
    let var_log = effect.se_log_theta * effect.se_log_theta;
    let scale = theta.max(1.0 / theta);
    Ok(VarianceEstimate {
        value: if theta == 1.0 { var_log } else { var_log / (scale * scale) },
        scale: VarianceScale::Theta,
        boundary_adjacent: false,
    })
}
