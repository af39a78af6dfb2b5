//! Closed-form upper bound on the expected fixed-target runtime of the
//! elitist variant on ONEMAX.

use crate::error::{Error, Result};

/// Upper bound on the expected evaluations for the elitist self-adjusting EA
/// started at fitness `a` with `λ0` to reach fitness at least `b`:
///
/// `λ0 F/(F-1) + (1/e + (1 - F^(-1/s))/ln F^(1/s)) (F^((s+1)/s) - 1)/(F-1) Σ_{i=a}^{b-1} en/(n-i)`.
pub fn fixed_target_evaluation_bound(
    n: usize,
    a: usize,
    b: usize,
    update_strength: f64,
    success_rate: f64,
    lambda0: f64,
) -> Result<f64> {
    if !(a <= b && b <= n) {
        return Err(Error::invalid("a, b", format!("need 0 <= a <= b <= n, got a={a}, b={b}, n={n}")));
    }
    let (f, s) = (update_strength, success_rate);
    if !(f > 1.0 && f.is_finite()) {
        return Err(Error::invalid("F", "update strength must exceed 1"));
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::invalid("s", "success rate must be positive"));
    }
    if !(lambda0 >= 1.0) {
        return Err(Error::invalid("lambda0", "initial lambda must be at least 1"));
    }
    let e = std::f64::consts::E;
    let nf = n as f64;
    let level_sum: f64 = (a..b).map(|i| e * nf / (nf - i as f64)).sum();
    let growth = f.powf(1.0 / s);
    let per_level = 1.0 / e + (1.0 - 1.0 / growth) / growth.ln();
    let cycle = (f.powf((s + 1.0) / s) - 1.0) / (f - 1.0);
    Ok(lambda0 * f / (f - 1.0) + per_level * cycle * level_sum)
}
