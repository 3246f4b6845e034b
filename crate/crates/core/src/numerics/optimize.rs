//! Derivative-free scalar maximization on a bracket.

use crate::error::{Result, SveError};

/// Stopping rules for [`maximize_scalar`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub arg_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            arg_tolerance: 1e-10,
            max_iterations: 500,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.arg_tolerance > 0.0) || self.max_iterations == 0 {
            return Err(SveError::Config(format!(
                "optimizer needs a positive tolerance and at least one iteration, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Result of a scalar maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub argmax: f64,
    pub value: f64,
    pub iterations: usize,
}

const GOLDEN: f64 = 0.381_966_011_250_105_1; // (3 - sqrt 5) / 2
const REL_EPS: f64 = 4.0 * f64::EPSILON;

/// Maximizes `f` on `(lo, hi)` with Brent's parabolic/golden-section method.
///
/// `-inf` (and NaN) values are treated as worse than any finite value; the
/// parabolic step is skipped whenever one of the three retained points is not
/// finite.
pub fn maximize_scalar<F>(mut f: F, lo: f64, hi: f64, cfg: &OptimizerConfig) -> Result<Maximum>
where
    F: FnMut(f64) -> f64,
{
    cfg.validate()?;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(SveError::Domain(format!(
            "maximize_scalar needs a finite bracket lo < hi, got [{lo}, {hi}]"
        )));
    }
    // minimize g = -f
    let mut g = |x: f64| {
        let y = f(x);
        if y.is_nan() {
            f64::INFINITY
        } else {
            -y
        }
    };

    let (mut a, mut b) = (lo, hi);
    let mut x = a + GOLDEN * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = g(x);
    let (mut fw, mut fv) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;

    for iter in 0..cfg.max_iterations {
        let xm = 0.5 * (a + b);
        let tol1 = REL_EPS * x.abs() + cfg.arg_tolerance / 3.0;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            if !fx.is_finite() {
                return Err(SveError::Numeric(format!(
                    "objective was -inf at every evaluated point in [{lo}, {hi}]"
                )));
            }
            return Ok(Maximum {
                argmax: x,
                value: -fx,
                iterations: iter,
            });
        }

        let mut take_golden = true;
        if e.abs() > tol1 && fx.is_finite() && fw.is_finite() && fv.is_finite() {
            let mut r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            } else {
                q = -q;
            }
            r = e;
            e = d;
            if p.abs() < (0.5 * q * r).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if x < xm { tol1 } else { -tol1 };
                }
                take_golden = false;
            }
        }
        if take_golden {
            e = if x < xm { b - x } else { a - x };
            d = GOLDEN * e;
        }

        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + tol1.copysign(d)
        };
        let fu = g(u);

        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }

    Err(SveError::Numeric(format!(
        "maximize_scalar did not converge in {} iterations on [{lo}, {hi}] (best x = {x}, f = {})",
        cfg.max_iterations, -fx
    )))
}
