//! Exact fitness-change distributions for ONEMAX under standard bit mutation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Conditional drifts are reported as undefined below this conditioning mass.
pub const CONDITIONING_FLOOR: f64 = 1e-300;

/// `Bin(m, p)` probability masses. Computed by the ratio recurrence in log
/// space; masses that underflow are flushed to zero and the tail is cut.
pub fn binomial_pmf(m: usize, p: f64) -> Vec<f64> {
    debug_assert!((0.0..=1.0).contains(&p));
    let mut out = vec![0.0; m + 1];
    if p == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if p == 1.0 {
        out[m] = 1.0;
        return out;
    }
    let log_ratio = p.ln() - (-p).ln_1p();
    let mut log_mass = m as f64 * (-p).ln_1p();
    let mode = ((m as f64 + 1.0) * p).floor() as usize;
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = log_mass.exp();
        if k > mode && *slot == 0.0 {
            break;
        }
        log_mass += ((m - k) as f64).ln() - ((k + 1) as f64).ln() + log_ratio;
    }
    out
}

/// Distribution of the next fitness value `j` on ONEMAX from a parent with
/// `i` one-bits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitnessChangeDistribution {
    pub n: usize,
    pub i: usize,
    /// `pmf[j]` for `j` in `0..=n`.
    pub pmf: Vec<f64>,
}

impl FitnessChangeDistribution {
    pub fn pmf(&self, j: usize) -> f64 {
        self.pmf.get(j).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.pmf.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.pmf.iter().enumerate().map(|(j, p)| j as f64 * p).sum()
    }

    /// `ln Pr(J <= j)` for every `j`. Near 1 the value is taken from the
    /// upper tail through `ln_1p` so large powers stay accurate.
    pub fn log_cdf(&self) -> Vec<f64> {
        let n = self.pmf.len();
        let mut upper = vec![0.0; n];
        let mut acc = 0.0;
        for j in (0..n).rev() {
            upper[j] = acc;
            acc += self.pmf[j];
        }
        let mut lower = 0.0;
        self.pmf
            .iter()
            .zip(&upper)
            .map(|(&mass, &sf)| {
                lower += mass;
                if lower <= 0.5 {
                    lower.ln()
                } else {
                    (-sf).ln_1p()
                }
            })
            .collect()
    }
}

fn check_state(n: usize, i: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n", "n must be at least 1"));
    }
    if i > n {
        return Err(Error::invalid("i", format!("fitness {i} exceeds n = {n}")));
    }
    Ok(())
}

/// One offspring: losses are `Bin(i, 1/n)`, gains `Bin(n - i, 1/n)`.
pub fn single_offspring_distribution(n: usize, i: usize) -> Result<FitnessChangeDistribution> {
    check_state(n, i)?;
    let p = 1.0 / n as f64;
    let losses = binomial_pmf(i, p);
    let gains = binomial_pmf(n - i, p);
    let gain_support = gains.iter().rposition(|&g| g > 0.0).unwrap_or(0);
    let mut pmf = vec![0.0; n + 1];
    for (a, &la) in losses.iter().enumerate() {
        if la == 0.0 {
            continue;
        }
        for (b, &gb) in gains[..=gain_support].iter().enumerate() {
            pmf[i - a + b] += la * gb;
        }
    }
    Ok(FitnessChangeDistribution { n, i, pmf })
}

/// The maximum of `lambda` independent offspring, described by
/// `Pr(max <= j) = Pr(J <= j)^lambda`.
#[derive(Clone, Debug, PartialEq)]
pub struct BestOfLambda {
    n: usize,
    i: usize,
    lambda: u64,
    /// `Pr(max <= j)`.
    at_most: Vec<f64>,
    /// `Pr(max > j)`, computed separately to keep small values accurate.
    above: Vec<f64>,
}

impl BestOfLambda {
    pub fn new(log_cdf: &[f64], i: usize, lambda: u64) -> Self {
        assert!(lambda >= 1, "lambda must be at least 1");
        let l = lambda as f64;
        let at_most: Vec<f64> = log_cdf.iter().map(|&x| (l * x).exp()).collect();
        let above = log_cdf.iter().map(|&x| -(l * x).exp_m1()).collect();
        BestOfLambda {
            n: log_cdf.len() - 1,
            i,
            lambda,
            at_most,
            above,
        }
    }

    pub fn from_single(single: &FitnessChangeDistribution, lambda: u64) -> Self {
        BestOfLambda::new(&single.log_cdf(), single.i, lambda)
    }

    pub fn lambda(&self) -> u64 {
        self.lambda
    }

    pub fn pmf(&self, j: usize) -> f64 {
        let prev_at_most = if j == 0 { 0.0 } else { self.at_most[j - 1] };
        let mass = if prev_at_most > 0.5 {
            self.above[j - 1] - self.above[j]
        } else {
            self.at_most[j] - prev_at_most
        };
        mass.max(0.0)
    }

    pub fn distribution(&self) -> FitnessChangeDistribution {
        FitnessChangeDistribution {
            n: self.n,
            i: self.i,
            pmf: (0..=self.n).map(|j| self.pmf(j)).collect(),
        }
    }

    pub fn p_plus(&self) -> f64 {
        self.above[self.i]
    }

    pub fn p_minus(&self) -> f64 {
        if self.i == 0 {
            0.0
        } else {
            self.at_most[self.i - 1]
        }
    }

    /// `E[(max - i)^+]`, as a sum of upper tails.
    pub fn forward_gain(&self) -> f64 {
        self.above[self.i..self.n].iter().sum()
    }

    /// `E[(i - max)^+]`, as a sum of lower tails.
    pub fn backward_loss(&self) -> f64 {
        self.at_most[..self.i].iter().sum()
    }

    pub fn level_quantities(&self) -> LevelQuantities {
        let p_plus = self.p_plus();
        let p_minus = self.p_minus();
        let conditional = |mass: f64, p: f64| (p >= CONDITIONING_FLOOR).then(|| mass / p);
        LevelQuantities {
            p_plus,
            p_zero: self.pmf(self.i),
            p_minus,
            delta_plus: conditional(self.forward_gain(), p_plus),
            delta_minus: conditional(self.backward_loss(), p_minus),
        }
    }
}

pub fn best_of_lambda_distribution(
    n: usize,
    i: usize,
    lambda_int: u64,
) -> Result<FitnessChangeDistribution> {
    if lambda_int == 0 {
        return Err(Error::invalid("lambda", "offspring count must be at least 1"));
    }
    let single = single_offspring_distribution(n, i)?;
    Ok(BestOfLambda::from_single(&single, lambda_int).distribution())
}

/// Improvement, stagnation and worsening probabilities with the conditional
/// forward and backward drifts of one generation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelQuantities {
    pub p_plus: f64,
    pub p_zero: f64,
    pub p_minus: f64,
    /// `None` when the improvement probability is below [`CONDITIONING_FLOOR`].
    pub delta_plus: Option<f64>,
    /// `None` when the worsening probability is below [`CONDITIONING_FLOOR`].
    pub delta_minus: Option<f64>,
}

pub fn level_quantities(n: usize, i: usize, lambda_int: u64) -> Result<LevelQuantities> {
    if i >= n {
        return Err(Error::invalid("i", format!("level {i} must be below n = {n}")));
    }
    if lambda_int == 0 {
        return Err(Error::invalid("lambda", "offspring count must be at least 1"));
    }
    let single = single_offspring_distribution(n, i)?;
    Ok(BestOfLambda::from_single(&single, lambda_int).level_quantities())
}

/// `Pr(max of lambda offspring > i)`.
pub fn improvement_probability(n: usize, i: usize, lambda_int: u64) -> Result<f64> {
    Ok(level_quantities(n, i, lambda_int)?.p_plus)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn binomial_matches_direct_formula() {
        let pmf = binomial_pmf(5, 0.2);
        let direct = [0.32768, 0.4096, 0.2048, 0.0512, 0.0064, 0.00032];
        for (a, b) in pmf.iter().zip(direct) {
            assert!(close(*a, b, 1e-15));
        }
        assert_eq!(binomial_pmf(3, 1.0), vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(binomial_pmf(0, 0.5), vec![1.0]);
    }

    #[test]
    fn two_bit_enumeration() {
        let d = single_offspring_distribution(2, 1).unwrap();
        assert!(close(d.pmf(0), 0.25, 1e-15));
        assert!(close(d.pmf(1), 0.5, 1e-15));
        assert!(close(d.pmf(2), 0.25, 1e-15));
        let d = best_of_lambda_distribution(2, 1, 2).unwrap();
        assert!(close(d.pmf(2), 7.0 / 16.0, 1e-15));
    }

    #[test]
    fn forced_flip() {
        let d = single_offspring_distribution(1, 0).unwrap();
        assert_eq!(d.pmf, vec![0.0, 1.0]);
    }

    #[test]
    fn two_bit_level_quantities() {
        let q = level_quantities(2, 1, 1).unwrap();
        assert!(close(q.p_plus, 0.25, 1e-15));
        assert!(close(q.p_zero, 0.5, 1e-15));
        assert!(close(q.p_minus, 0.25, 1e-15));
        assert!(close(q.delta_plus.unwrap(), 1.0, 1e-15));
        assert!(close(q.delta_minus.unwrap(), 1.0, 1e-15));
    }

    #[test]
    fn last_level_improvement() {
        for n in [2usize, 7, 40, 300] {
            let nf = n as f64;
            let q = level_quantities(n, n - 1, 1).unwrap();
            let expected = (1.0 / nf) * (1.0 - 1.0 / nf).powi(n as i32 - 1);
            assert!(close(q.p_plus, expected, 1e-12 * expected), "n={n} {} {expected}", q.p_plus);
        }
    }

    #[test]
    fn lambda_one_is_single_offspring() {
        for (n, i) in [(10, 3), (50, 49), (163, 137), (7, 0)] {
            let a = single_offspring_distribution(n, i).unwrap();
            let b = best_of_lambda_distribution(n, i, 1).unwrap();
            for j in 0..=n {
                assert!(close(a.pmf(j), b.pmf(j), 1e-12));
            }
        }
    }

    #[test]
    fn normalization_and_mean() {
        for n in [3usize, 20, 500] {
            for i in [0, n / 3, n - 1, n] {
                let d = single_offspring_distribution(n, i).unwrap();
                assert!(close(d.total(), 1.0, 1e-12));
                // Expected ones after mutation: i(1 - 1/n) + (n - i)/n.
                let nf = n as f64;
                let mean = i as f64 * (1.0 - 1.0 / nf) + (nf - i as f64) / nf;
                assert!(close(d.mean(), mean, 1e-9));
                for lambda in [2, 17, 64] {
                    let b = best_of_lambda_distribution(n, i, lambda).unwrap();
                    assert!(close(b.total(), 1.0, 1e-12));
                    assert!(b.pmf.iter().all(|&p| p >= 0.0));
                }
            }
        }
    }

    #[test]
    fn minus_probability_is_power_of_single() {
        for n in [5usize, 33, 50] {
            for i in 1..n {
                let one = level_quantities(n, i, 1).unwrap().p_minus;
                for lambda in [2u64, 9, 64] {
                    let many = level_quantities(n, i, lambda).unwrap().p_minus;
                    assert!(close(many, one.powi(lambda as i32), 1e-10));
                }
            }
        }
    }

    #[test]
    fn undefined_conditional_drift() {
        let q = level_quantities(50, 0, 3).unwrap();
        assert_eq!(q.p_minus, 0.0);
        assert!(q.delta_minus.is_none());
        assert!(q.delta_plus.is_some());
    }

    #[test]
    fn rejects_bad_states() {
        assert!(single_offspring_distribution(0, 0).is_err());
        assert!(single_offspring_distribution(4, 5).is_err());
        assert!(level_quantities(4, 4, 1).is_err());
        assert!(level_quantities(4, 1, 0).is_err());
    }
}
