//! Potential functions combining fitness with a λ-dependent term.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PotentialSpec {
    /// `f - (2s/(s+1)) log_F(max(e n F^(1/s) / λ, 1))`, penalising small λ.
    G1 {
        update_strength: f64,
        success_rate: f64,
        n: usize,
    },
    /// `f + 2.2 log_F(λ)^2`, rewarding large λ.
    G2 { update_strength: f64 },
}

impl PotentialSpec {
    pub fn g1(update_strength: f64, success_rate: f64, n: usize) -> Result<Self> {
        let spec = PotentialSpec::G1 {
            update_strength,
            success_rate,
            n,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn g2(update_strength: f64) -> Result<Self> {
        let spec = PotentialSpec::G2 { update_strength };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let f = match *self {
            PotentialSpec::G1 {
                update_strength,
                success_rate,
                n,
            } => {
                if !(success_rate > 0.0 && success_rate.is_finite()) {
                    return Err(Error::invalid("s", "success rate must be positive"));
                }
                if n == 0 {
                    return Err(Error::invalid("n", "n must be at least 1"));
                }
                update_strength
            }
            PotentialSpec::G2 { update_strength } => update_strength,
        };
        if !(f > 1.0 && f.is_finite()) {
            return Err(Error::invalid("F", "update strength must exceed 1"));
        }
        Ok(())
    }

    pub fn update_strength(&self) -> f64 {
        match *self {
            PotentialSpec::G1 { update_strength, .. } | PotentialSpec::G2 { update_strength } => {
                update_strength
            }
        }
    }

    /// The λ part `h(λ)` of the potential.
    pub fn lambda_term(&self, lambda_real: f64) -> f64 {
        let ln_f = self.update_strength().ln();
        match *self {
            PotentialSpec::G1 {
                update_strength,
                success_rate: s,
                n,
            } => {
                let cap = std::f64::consts::E * n as f64 * update_strength.powf(1.0 / s);
                let weight = 2.0 * s / (s + 1.0);
                -weight * (cap / lambda_real).max(1.0).ln() / ln_f
            }
            PotentialSpec::G2 { .. } => {
                let log_f = lambda_real.ln() / ln_f;
                2.2 * log_f * log_f
            }
        }
    }

    pub fn value(&self, fitness: f64, lambda_real: f64) -> f64 {
        fitness + self.lambda_term(lambda_real)
    }
}

pub fn potential_value(spec: &PotentialSpec, fitness: f64, lambda_real: f64) -> f64 {
    spec.value(fitness, lambda_real)
}
