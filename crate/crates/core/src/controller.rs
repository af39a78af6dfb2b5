//! The success-based offspring population size controller.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Update strength `F > 1` and success rate `s > 0`, with the derived
/// multiplicative factors for unsuccessful (`F^(1/s)`) and successful (`1/F`)
/// generations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControllerParams {
    update_strength: f64,
    success_rate: f64,
    growth_factor: f64,
    shrink_factor: f64,
}

impl ControllerParams {
    pub fn new(update_strength: f64, success_rate: f64) -> Result<Self> {
        if !(update_strength.is_finite() && update_strength > 1.0) {
            return Err(Error::invalid(
                "F",
                format!("update strength must be > 1, got {update_strength}"),
            ));
        }
        if !(success_rate.is_finite() && success_rate > 0.0) {
            return Err(Error::invalid(
                "s",
                format!("success rate must be > 0, got {success_rate}"),
            ));
        }
        Ok(ControllerParams {
            update_strength,
            success_rate,
            growth_factor: update_strength.powf(1.0 / success_rate),
            shrink_factor: 1.0 / update_strength,
        })
    }

    pub fn update_strength(&self) -> f64 {
        self.update_strength
    }

    pub fn success_rate(&self) -> f64 {
        self.success_rate
    }

    /// `F^(1/s)`.
    pub fn growth_factor(&self) -> f64 {
        self.growth_factor
    }

    /// `1/F`.
    pub fn shrink_factor(&self) -> f64 {
        self.shrink_factor
    }
}

/// Nearest integer, with a fractional part of exactly one half rounding up.
pub fn round_lambda(lambda_real: f64) -> u64 {
    debug_assert!(lambda_real >= 1.0, "lambda must be at least 1, got {lambda_real}");
    let floor = lambda_real.floor();
    let up = if lambda_real - floor >= 0.5 { 1.0 } else { 0.0 };
    (floor + up) as u64
}

/// Success divides by `F` (never below 1); failure multiplies by `F^(1/s)`.
pub fn update_lambda(lambda_real: f64, success: bool, params: &ControllerParams) -> f64 {
    if success {
        (lambda_real * params.shrink_factor).max(1.0)
    } else {
        lambda_real * params.growth_factor
    }
}
