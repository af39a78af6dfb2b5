//! Exact one-step drift of a potential on ONEMAX and grid probes over it.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::distribution::{single_offspring_distribution, BestOfLambda};
use super::potential::PotentialSpec;
use crate::controller::{round_lambda, update_lambda, ControllerParams};
use crate::error::{Error, Result};

/// Whether fitness gains above +1 count in full.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GainMode {
    #[default]
    Raw,
    /// Every improvement counts as exactly +1.
    Capped,
}

impl fmt::Display for GainMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GainMode::Raw => "raw",
            GainMode::Capped => "capped",
        })
    }
}

/// Drift from level `i` given `ln Pr(J <= j)` of one offspring.
pub fn drift_from_log_cdf(
    spec: &PotentialSpec,
    params: &ControllerParams,
    log_cdf: &[f64],
    i: usize,
    lambda_real: f64,
    mode: GainMode,
) -> f64 {
    let best = BestOfLambda::new(log_cdf, i, round_lambda(lambda_real));
    let p_plus = best.p_plus();
    let fitness_part = match mode {
        GainMode::Raw => best.forward_gain(),
        GainMode::Capped => p_plus,
    } - best.backward_loss();
    let h_now = spec.lambda_term(lambda_real);
    let h_success = spec.lambda_term(update_lambda(lambda_real, true, params));
    let h_failure = spec.lambda_term(update_lambda(lambda_real, false, params));
    fitness_part + p_plus * (h_success - h_now) + (1.0 - p_plus) * (h_failure - h_now)
}

fn check_drift_state(n: usize, i: usize, lambda_real: f64) -> Result<()> {
    if i >= n {
        return Err(Error::invalid("i", format!("level {i} must be below n = {n}")));
    }
    if !(lambda_real >= 1.0 && lambda_real.is_finite()) {
        return Err(Error::invalid("lambda", "lambda must be a finite value >= 1"));
    }
    Ok(())
}

/// `E[g(X_{t+1}) - g(X_t) | f(x_t) = i, λ_t = lambda_real]`. Offspring are
/// created with the rounded λ, the potential sees the real one.
pub fn exact_potential_drift(
    spec: &PotentialSpec,
    n: usize,
    i: usize,
    lambda_real: f64,
    params: &ControllerParams,
    mode: GainMode,
) -> Result<f64> {
    spec.validate()?;
    check_drift_state(n, i, lambda_real)?;
    let log_cdf = single_offspring_distribution(n, i)?.log_cdf();
    Ok(drift_from_log_cdf(spec, params, &log_cdf, i, lambda_real, mode))
}

/// Which side of the threshold the drift must stay on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftDirection {
    AtLeast,
    AtMost,
}

impl DriftDirection {
    fn holds(self, drift: f64, threshold: f64) -> bool {
        match self {
            DriftDirection::AtLeast => drift >= threshold,
            DriftDirection::AtMost => drift <= threshold,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The grid contained no states; nothing was verified.
    Empty,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Empty => "no states in band",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftRow {
    pub i: usize,
    pub lambda_real: f64,
    pub lambda_int: u64,
    pub potential: f64,
    pub drift: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub spec: PotentialSpec,
    pub n: usize,
    pub threshold: f64,
    pub direction: DriftDirection,
    pub mode: GainMode,
    pub status: CheckStatus,
    /// Minimum drift for `AtLeast`, maximum for `AtMost`.
    pub extreme: Option<DriftRow>,
    pub violations: Vec<DriftRow>,
    pub rows: Vec<DriftRow>,
}

/// Evaluates the exact drift at every `(i, λ_real)` of `grid`.
pub fn drift_grid_check(
    spec: &PotentialSpec,
    params: &ControllerParams,
    n: usize,
    grid: &[(usize, f64)],
    threshold: f64,
    direction: DriftDirection,
    mode: GainMode,
) -> Result<DriftReport> {
    spec.validate()?;
    for &(i, lambda) in grid {
        check_drift_state(n, i, lambda)?;
    }
    let mut by_level: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for &(i, lambda) in grid {
        by_level.entry(i).or_default().push(lambda);
    }
    let levels: Vec<(usize, Vec<f64>)> = by_level.into_iter().collect();
    let rows: Vec<DriftRow> = levels
        .par_iter()
        .flat_map_iter(|(i, lambdas)| {
            let i = *i;
            let log_cdf = single_offspring_distribution(n, i)
                .expect("validated state")
                .log_cdf();
            lambdas
                .iter()
                .map(|&lambda_real| {
                    let drift = drift_from_log_cdf(spec, params, &log_cdf, i, lambda_real, mode);
                    DriftRow {
                        i,
                        lambda_real,
                        lambda_int: round_lambda(lambda_real),
                        potential: spec.value(i as f64, lambda_real),
                        drift,
                        holds: direction.holds(drift, threshold),
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();

    let violations: Vec<DriftRow> = rows.iter().filter(|r| !r.holds).copied().collect();
    let extreme = rows.iter().copied().reduce(|a, b| {
        let b_more_extreme = match direction {
            DriftDirection::AtLeast => b.drift < a.drift,
            DriftDirection::AtMost => b.drift > a.drift,
        };
        if b_more_extreme {
            b
        } else {
            a
        }
    });
    let status = if rows.is_empty() {
        CheckStatus::Empty
    } else if violations.is_empty() {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    Ok(DriftReport {
        spec: *spec,
        n,
        threshold,
        direction,
        mode,
        status,
        extreme,
        violations,
        rows,
    })
}

/// Lower bound `(1-s)/(2e)` on the drift of the penalising potential.
pub fn g1_drift_threshold(success_rate: f64) -> f64 {
    (1.0 - success_rate) / (2.0 * std::f64::consts::E)
}

/// Upper bound on the drift of the rewarding potential inside its band.
pub const G2_DRIFT_THRESHOLD: f64 = -0.0008;

/// λ values `1, 1.25, ..., 10` followed by 30 geometrically spaced values
/// from 10 up to `e n F^(1/s)`.
pub fn g1_probe_lambdas(n: usize, params: &ControllerParams) -> Vec<f64> {
    let mut lambdas: Vec<f64> = (0..=36).map(|k| (4 + k) as f64 / 4.0).collect();
    let cap = std::f64::consts::E * n as f64 * params.growth_factor();
    if cap > 10.0 {
        let ratio = cap / 10.0;
        lambdas.extend((1..30).map(|k| 10.0 * ratio.powf(k as f64 / 29.0)));
    }
    lambdas
}

/// Every level `0..n` crossed with [`g1_probe_lambdas`].
pub fn g1_probe_grid(n: usize, params: &ControllerParams) -> Vec<(usize, f64)> {
    let lambdas = g1_probe_lambdas(n, params);
    (0..n)
        .flat_map(|i| lambdas.iter().map(move |&l| (i, l)))
        .collect()
}

/// Logarithm used for the `log^2(4.5)` offset of the band's lower edge.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandLog {
    #[default]
    Natural,
    Binary,
    UpdateStrength,
}

impl BandLog {
    pub fn log(self, x: f64, update_strength: f64) -> f64 {
        match self {
            BandLog::Natural => x.ln(),
            BandLog::Binary => x.log2(),
            BandLog::UpdateStrength => x.ln() / update_strength.ln(),
        }
    }
}

impl std::str::FromStr for BandLog {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ln" | "natural" => Ok(BandLog::Natural),
            "log2" | "binary" => Ok(BandLog::Binary),
            "logf" | "update_strength" => Ok(BandLog::UpdateStrength),
            other => Err(Error::invalid(
                "band_log",
                format!("unknown logarithm `{other}` (ln, log2, logf)"),
            )),
        }
    }
}

/// Open band `(0.84n + 2.2 log^2(4.5), 0.85n)` on the rewarding potential.
pub fn g2_band(n: usize, update_strength: f64, base: BandLog) -> (f64, f64) {
    let offset = 2.2 * base.log(4.5, update_strength).powi(2);
    (0.84 * n as f64 + offset, 0.85 * n as f64)
}

/// States with potential inside [`g2_band`], λ stepped by 0.05 over `[1, 2.4]`.
pub fn g2_band_grid(n: usize, update_strength: f64, base: BandLog) -> Vec<(usize, f64)> {
    let spec = PotentialSpec::G2 { update_strength };
    let (low, high) = g2_band(n, update_strength, base);
    let lambdas: Vec<f64> = (0..=28).map(|k| (20 + k) as f64 / 20.0).collect();
    (0..n)
        .flat_map(|i| lambdas.iter().map(move |&l| (i, l)))
        .filter(|&(i, l)| {
            let g = spec.value(i as f64, l);
            g > low && g < high
        })
        .collect()
}
