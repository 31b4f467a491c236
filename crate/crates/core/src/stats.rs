//! Student-t quantiles by bisection on the regularized incomplete beta function.

use statrs::function::beta::beta_reg;

use crate::error::{invalid, Result};

/// `Pr(T <= t)` for a Student-t variable with `df` degrees of freedom.
pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    let x = df / (df + t * t);
    let tail = 0.5 * beta_reg(df / 2.0, 0.5, x);
    if t >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Quantile `t` with `Pr(T <= t) = p`, found by bisection to an absolute
/// width of 1e-12.
pub fn student_t_quantile(p: f64, df: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("quantile level must lie in (0, 1), got {p}")));
    }
    if !(df > 0.0) {
        return Err(invalid(format!("degrees of freedom must be positive, got {df}")));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    if p < 0.5 {
        return student_t_quantile(1.0 - p, df).map(|t| -t);
    }
    let mut hi = 1.0;
    while student_t_cdf(hi, df) < p {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(invalid("quantile search diverged"));
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if student_t_cdf(mid, df) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
