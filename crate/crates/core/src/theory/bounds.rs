//! Checks the exact level quantities against the closed-form ONEMAX bounds
//! on improvement/worsening probabilities and conditional drifts.

use std::f64::consts::E;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::distribution::{single_offspring_distribution, BestOfLambda, LevelQuantities};
use crate::error::{Error, Result};

/// Absolute slack allowed on every comparison.
pub const BOUND_SLACK: f64 = 1e-12;

/// Every bound the checker knows. Lower bounds read `bound <= exact`, upper
/// bounds `exact <= bound`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `1 - en/(en + λ(n-i)) <= p+`.
    PPlusLowerRational,
    /// `1 - (1 - (n-i)/(en))^λ <= p+`.
    PPlusLowerPower,
    /// `p+ <= 1 - (1 - 1.14 ((n-i)/n)(1-1/n)^(n-1))^λ`.
    PPlusUpperSharp,
    /// `p+ <= 1 - (1 - (n-i)/n)^λ`.
    PPlusUpperPower,
    /// `p+ <= 0.069` for one offspring, `n >= 163`, `0.84n <= i <= 0.85n`.
    PPlusSingleBand,
    /// `(i/n - 1/e)^λ <= p-`, for `i/n >= 1/e`.
    PMinusLower,
    /// `p- <= (1 - (n-i)/(en) - (1-1/n)^n)^λ`.
    PMinusUpperSharp,
    /// `p- <= ((e-1)/e)^λ`.
    PMinusUpperPower,
    /// `1 <= Δ-`.
    DeltaMinusLower,
    /// `Δ- <= e/(e-1)`.
    DeltaMinusUpper,
    /// `1 <= Δ+`.
    DeltaPlusLower,
    /// `Δ+ <= Σ_{j>=1} (1 - (1 - 1/j!)^λ)`.
    DeltaPlusUpperSeries,
    /// `Δ+ <= ceil(log2 λ) + 0.413`, for `λ >= 5`.
    DeltaPlusUpperLog,
}

impl BoundKind {
    pub const ALL: [BoundKind; 13] = [
        BoundKind::PPlusLowerRational,
        BoundKind::PPlusLowerPower,
        BoundKind::PPlusUpperSharp,
        BoundKind::PPlusUpperPower,
        BoundKind::PPlusSingleBand,
        BoundKind::PMinusLower,
        BoundKind::PMinusUpperSharp,
        BoundKind::PMinusUpperPower,
        BoundKind::DeltaMinusLower,
        BoundKind::DeltaMinusUpper,
        BoundKind::DeltaPlusLower,
        BoundKind::DeltaPlusUpperSeries,
        BoundKind::DeltaPlusUpperLog,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::PPlusLowerRational => "p_plus_lower_rational",
            BoundKind::PPlusLowerPower => "p_plus_lower_power",
            BoundKind::PPlusUpperSharp => "p_plus_upper_sharp",
            BoundKind::PPlusUpperPower => "p_plus_upper_power",
            BoundKind::PPlusSingleBand => "p_plus_single_band",
            BoundKind::PMinusLower => "p_minus_lower",
            BoundKind::PMinusUpperSharp => "p_minus_upper_sharp",
            BoundKind::PMinusUpperPower => "p_minus_upper_power",
            BoundKind::DeltaMinusLower => "delta_minus_lower",
            BoundKind::DeltaMinusUpper => "delta_minus_upper",
            BoundKind::DeltaPlusLower => "delta_plus_lower",
            BoundKind::DeltaPlusUpperSeries => "delta_plus_upper_series",
            BoundKind::DeltaPlusUpperLog => "delta_plus_upper_log",
        }
    }

    pub fn is_lower(self) -> bool {
        matches!(
            self,
            BoundKind::PPlusLowerRational
                | BoundKind::PPlusLowerPower
                | BoundKind::PMinusLower
                | BoundKind::DeltaMinusLower
                | BoundKind::DeltaPlusLower
        )
    }
}

/// One bound evaluated at one state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub bound: BoundKind,
    pub n: usize,
    pub i: usize,
    pub lambda: u64,
    pub exact: f64,
    pub bound_value: f64,
    /// Positive when the bound holds: `exact - bound` for lower bounds,
    /// `bound - exact` for upper bounds.
    pub margin: f64,
}

impl BoundCheck {
    fn new(bound: BoundKind, n: usize, i: usize, lambda: u64, exact: f64, bound_value: f64) -> Self {
        let margin = if bound.is_lower() {
            exact - bound_value
        } else {
            bound_value - exact
        };
        BoundCheck {
            bound,
            n,
            i,
            lambda,
            exact,
            bound_value,
            margin,
        }
    }

    pub fn holds(&self) -> bool {
        self.margin >= -BOUND_SLACK
    }
}

/// `Σ_{j>=1} (1 - (1 - 1/j!)^λ)`, summed until the terms vanish.
pub fn delta_plus_series_bound(lambda: u64) -> f64 {
    let l = lambda as f64;
    let mut total = 0.0;
    let mut inv_factorial = 1.0;
    for j in 1..200u32 {
        inv_factorial /= j as f64;
        let term = -(l * (-inv_factorial).ln_1p()).exp_m1();
        total += term;
        if term < 1e-18 {
            break;
        }
    }
    total
}

/// Every bound applicable at `(n, i, λ)` evaluated against `q`.
pub fn bound_checks(n: usize, i: usize, lambda: u64, q: &LevelQuantities) -> Vec<BoundCheck> {
    let nf = n as f64;
    let l = lambda as f64;
    let zeros = (nf - i as f64) / nf;
    let mut out = Vec::with_capacity(BoundKind::ALL.len());
    let mut push = |kind, exact, bound| out.push(BoundCheck::new(kind, n, i, lambda, exact, bound));

    let rational = 1.0 - E * nf / (E * nf + l * (nf - i as f64));
    push(BoundKind::PPlusLowerRational, q.p_plus, rational);
    push(BoundKind::PPlusLowerPower, q.p_plus, 1.0 - (1.0 - zeros / E).powf(l));
    let single = 1.14 * zeros * (1.0 - 1.0 / nf).powf(nf - 1.0);
    push(BoundKind::PPlusUpperSharp, q.p_plus, 1.0 - (1.0 - single).powf(l));
    push(BoundKind::PPlusUpperPower, q.p_plus, 1.0 - (1.0 - zeros).powf(l));
    if lambda == 1 && n >= 163 && 100 * i >= 84 * n && 100 * i <= 85 * n {
        push(BoundKind::PPlusSingleBand, q.p_plus, 0.069);
    }

    let ratio = i as f64 / nf;
    if ratio >= 1.0 / E {
        push(BoundKind::PMinusLower, q.p_minus, (ratio - 1.0 / E).powf(l));
    }
    let sharp = 1.0 - zeros / E - (1.0 - 1.0 / nf).powf(nf);
    push(BoundKind::PMinusUpperSharp, q.p_minus, sharp.powf(l));
    push(BoundKind::PMinusUpperPower, q.p_minus, ((E - 1.0) / E).powf(l));

    if let Some(dm) = q.delta_minus {
        push(BoundKind::DeltaMinusLower, dm, 1.0);
        push(BoundKind::DeltaMinusUpper, dm, E / (E - 1.0));
    }
    if let Some(dp) = q.delta_plus {
        push(BoundKind::DeltaPlusLower, dp, 1.0);
        push(BoundKind::DeltaPlusUpperSeries, dp, delta_plus_series_bound(lambda));
        if lambda >= 5 {
            let log_bound = (l.log2()).ceil() + 0.413;
            push(BoundKind::DeltaPlusUpperLog, dp, log_bound);
        }
    }
    out
}

/// Per-bound summary over a grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSummary {
    pub bound: BoundKind,
    pub checks: usize,
    pub violations: usize,
    /// The check with the smallest margin.
    pub worst: Option<BoundCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub states: usize,
    pub summaries: Vec<BoundSummary>,
    pub violations: Vec<BoundCheck>,
    /// Every evaluated check, kept only when requested.
    pub checks: Vec<BoundCheck>,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn summary(&self, bound: BoundKind) -> Option<&BoundSummary> {
        self.summaries.iter().find(|s| s.bound == bound)
    }
}

/// Checks every state `(i, λ)` with `i` in `levels` and `λ` in `lambdas`.
pub fn check_level_bounds(
    n: usize,
    levels: &[usize],
    lambdas: &[u64],
    keep_checks: bool,
) -> Result<BoundReport> {
    if n < 2 {
        return Err(Error::invalid("n", "bounds are checked for n >= 2"));
    }
    if let Some(&i) = levels.iter().find(|&&i| i >= n) {
        return Err(Error::invalid("i", format!("level {i} must be below n = {n}")));
    }
    if lambdas.contains(&0) {
        return Err(Error::invalid("lambda", "offspring count must be at least 1"));
    }
    let per_level: Vec<Vec<BoundCheck>> = levels
        .par_iter()
        .map(|&i| {
            let log_cdf = single_offspring_distribution(n, i)
                .expect("validated state")
                .log_cdf();
            lambdas
                .iter()
                .flat_map(|&lambda| {
                    let q = BestOfLambda::new(&log_cdf, i, lambda).level_quantities();
                    bound_checks(n, i, lambda, &q)
                })
                .collect()
        })
        .collect();

    let mut summaries: Vec<BoundSummary> = BoundKind::ALL
        .iter()
        .map(|&bound| BoundSummary {
            bound,
            checks: 0,
            violations: 0,
            worst: None,
        })
        .collect();
    let mut violations = Vec::new();
    let mut checks = Vec::new();
    for check in per_level.into_iter().flatten() {
        let s = summaries
            .iter_mut()
            .find(|s| s.bound == check.bound)
            .expect("every kind has a summary");
        s.checks += 1;
        if !check.holds() {
            s.violations += 1;
            violations.push(check);
        }
        if s.worst.is_none_or(|w| check.margin < w.margin) {
            s.worst = Some(check);
        }
        if keep_checks {
            checks.push(check);
        }
    }
    Ok(BoundReport {
        n,
        states: levels.len() * lambdas.len(),
        summaries,
        violations,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::distribution::level_quantities;

    #[test]
    fn series_bound_values() {
        // λ = 1: Σ 1/j! = e - 1.
        assert!((delta_plus_series_bound(1) - (E - 1.0)).abs() < 1e-12);
        assert!(delta_plus_series_bound(5) < 3.413);
        assert!(delta_plus_series_bound(64) > delta_plus_series_bound(5));
    }

    #[test]
    fn single_band_case() {
        let q = level_quantities(163, 137, 1).unwrap();
        let checks = bound_checks(163, 137, 1, &q);
        let band = checks
            .iter()
            .find(|c| c.bound == BoundKind::PPlusSingleBand)
            .expect("band case applies");
        assert!(band.holds(), "p+ = {}", band.exact);
        assert!(q.p_plus <= 0.069);
    }

    #[test]
    fn log_case_starts_at_five() {
        let q = level_quantities(50, 30, 4).unwrap();
        assert!(bound_checks(50, 30, 4, &q)
            .iter()
            .all(|c| c.bound != BoundKind::DeltaPlusUpperLog));
        let q = level_quantities(50, 30, 5).unwrap();
        let log = bound_checks(50, 30, 5, &q)
            .into_iter()
            .find(|c| c.bound == BoundKind::DeltaPlusUpperLog)
            .unwrap();
        assert!((log.bound_value - 3.413).abs() < 1e-12);
        assert!(log.holds());
    }

    #[test]
    fn report_collects_worst_margins() {
        let levels: Vec<usize> = (0..10).collect();
        let report = check_level_bounds(10, &levels, &[1, 2, 7], true).unwrap();
        assert_eq!(report.states, 30);
        let total: usize = report.summaries.iter().map(|s| s.checks).sum();
        assert_eq!(total, report.checks.len());
        for s in &report.summaries {
            if let Some(w) = s.worst {
                assert!(report
                    .checks
                    .iter()
                    .filter(|c| c.bound == s.bound)
                    .all(|c| c.margin >= w.margin));
            }
        }
    }
}
