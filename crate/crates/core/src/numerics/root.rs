use crate::error::{Result, SveError};

const MAX_BISECTIONS: usize = 200;

/// Bisection on a bracket `[lo, hi]` with `g(lo) * g(hi) <= 0`.
///
/// Returns the midpoint of the final bracket once its width is at most `tol`,
/// or an endpoint that is an exact root.
pub fn find_root<G>(mut g: G, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    G: FnMut(f64) -> Result<f64>,
{
    if !(lo <= hi) || !(tol > 0.0) {
        return Err(SveError::Domain(format!(
            "find_root needs lo <= hi and tol > 0, got [{lo}, {hi}], tol = {tol}"
        )));
    }
    let g_lo = g(lo)?;
    if g_lo == 0.0 {
        return Ok(lo);
    }
    let g_hi = g(hi)?;
    if g_hi == 0.0 {
        return Ok(hi);
    }
    if g_lo.is_nan() || g_hi.is_nan() || g_lo.signum() == g_hi.signum() {
        return Err(SveError::Bracketing { lo, hi, g_lo, g_hi });
    }

    let lo_negative = g_lo < 0.0;
    let (mut a, mut b) = (lo, hi);
    for _ in 0..MAX_BISECTIONS {
        if b - a <= tol {
            break;
        }
        let mid = 0.5 * (a + b);
        let gm = g(mid)?;
        if gm == 0.0 {
            return Ok(mid);
        }
        if (gm < 0.0) == lo_negative {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}
