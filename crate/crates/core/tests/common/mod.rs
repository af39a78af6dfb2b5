//! Brute-force reference computations shared by the integration tests. They
//! enumerate mutation masks directly and share no code with the library's
//! closed forms.

#![allow(dead_code)]

use std::f64::consts::E;

/// Probability of flipping exactly the bits in `mask` (rate 1/n each).
pub fn mask_probability(n: usize, mask: u32) -> f64 {
    let k = mask.count_ones() as i32;
    let p = 1.0 / n as f64;
    p.powi(k) * (1.0 - p).powi(n as i32 - k)
}

/// Parent with `i` one-bits at the low positions.
pub fn parent_bits(i: usize) -> u32 {
    if i == 0 {
        0
    } else {
        (1u32 << i) - 1
    }
}

/// Exact single-offspring pmf over the new ONEMAX value.
pub fn single_pmf_by_masks(n: usize, i: usize) -> Vec<f64> {
    let x = parent_bits(i);
    let mut pmf = vec![0.0; n + 1];
    for mask in 0u32..(1 << n) {
        pmf[(x ^ mask).count_ones() as usize] += mask_probability(n, mask);
    }
    pmf
}

/// Exact pmf of the best of `lambda` offspring by joint enumeration of all
/// `2^(n lambda)` mask tuples.
pub fn best_pmf_by_joint_masks(n: usize, i: usize, lambda: u32) -> Vec<f64> {
    let x = parent_bits(i);
    let masks = 1u64 << n;
    let total = masks.pow(lambda);
    let mut pmf = vec![0.0; n + 1];
    for code in 0..total {
        let mut rest = code;
        let mut prob = 1.0;
        let mut best = 0u32;
        for _ in 0..lambda {
            let mask = (rest % masks) as u32;
            rest /= masks;
            prob *= mask_probability(n, mask);
            best = best.max((x ^ mask).count_ones());
        }
        pmf[best as usize] += prob;
    }
    pmf
}

/// Round half up.
pub fn round_half_up(x: f64) -> u32 {
    let f = x.floor();
    (if x - f >= 0.5 { f + 1.0 } else { f }) as u32
}

#[derive(Clone, Copy, Debug)]
pub enum Potential {
    /// `(F, s, n)`.
    G1(f64, f64, usize),
    /// `F`.
    G2(f64),
}

impl Potential {
    pub fn h(&self, lambda: f64) -> f64 {
        match *self {
            Potential::G1(f, s, n) => {
                let inner = E * n as f64 * f.powf(1.0 / s) / lambda;
                let inner = if inner > 1.0 { inner } else { 1.0 };
                -(2.0 * s / (s + 1.0)) * inner.ln() / f.ln()
            }
            Potential::G2(f) => 2.2 * (lambda.ln() / f.ln()).powi(2),
        }
    }
}

/// `E[g(X_{t+1}) - g(X_t)]` by joint enumeration over all offspring masks.
pub fn drift_by_joint_masks(
    potential: Potential,
    f: f64,
    s: f64,
    n: usize,
    i: usize,
    lambda_real: f64,
    cap_gain: bool,
) -> f64 {
    let lambda_int = round_half_up(lambda_real);
    let pmf = best_pmf_by_joint_masks(n, i, lambda_int);
    let mut drift = 0.0;
    for (j, &p) in pmf.iter().enumerate() {
        let success = j > i;
        let next_lambda = if success {
            let shrunk = lambda_real / f;
            if shrunk < 1.0 {
                1.0
            } else {
                shrunk
            }
        } else {
            lambda_real * f.powf(1.0 / s)
        };
        let mut gain = j as f64 - i as f64;
        if cap_gain && gain > 1.0 {
            gain = 1.0;
        }
        drift += p * (gain + potential.h(next_lambda) - potential.h(lambda_real));
    }
    drift
}
