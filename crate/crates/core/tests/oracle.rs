mod common;

use common::{best_pmf_by_joint_masks, drift_by_joint_masks, single_pmf_by_masks, Potential};
use selfadj_core::theory::{
    best_of_lambda_distribution, exact_potential_drift, level_quantities,
    single_offspring_distribution, GainMode, PotentialSpec,
};
use selfadj_core::ControllerParams;

#[test]
fn single_offspring_matches_mask_enumeration() {
    for n in 1..=10 {
        for i in 0..=n {
            let exact = single_offspring_distribution(n, i).unwrap();
            let brute = single_pmf_by_masks(n, i);
            for j in 0..=n {
                assert!((exact.pmf(j) - brute[j]).abs() < 1e-14, "n={n} i={i} j={j}");
            }
        }
    }
}

#[test]
fn best_of_lambda_matches_joint_enumeration() {
    for n in 1..=5 {
        for i in 0..=n {
            for lambda in 1..=3u32 {
                let exact = best_of_lambda_distribution(n, i, lambda as u64).unwrap();
                let brute = best_pmf_by_joint_masks(n, i, lambda);
                for j in 0..=n {
                    assert!((exact.pmf(j) - brute[j]).abs() < 1e-13, "n={n} i={i} λ={lambda}");
                }
            }
        }
    }
}

#[test]
fn two_bit_drift_by_hand() {
    // n = 2, i = 1, λ = 1: new fitness 0, 1, 2 with mass 1/4, 1/2, 1/4.
    let (f, s) = (1.5f64, 0.5f64);
    let e = std::f64::consts::E;
    let h = |l: f64| -(2.0 * s / (s + 1.0)) * (e * 2.0 * f.powf(1.0 / s) / l).max(1.0).ln() / f.ln();
    let grow = f.powf(1.0 / s);
    let by_hand = 0.25 * (-1.0 + h(grow) - h(1.0)) + 0.5 * (h(grow) - h(1.0)) + 0.25 * (1.0 + h(1.0) - h(1.0));
    let params = ControllerParams::new(f, s).unwrap();
    let spec = PotentialSpec::g1(f, s, 2).unwrap();
    let exact = exact_potential_drift(&spec, 2, 1, 1.0, &params, GainMode::Raw).unwrap();
    assert!((exact - by_hand).abs() < 1e-12);
}

#[test]
fn drift_matches_joint_enumeration() {
    let lambdas = [1.0, 1.3, 1.5, 2.0, 2.49, 2.5, 3.0];
    for (f, s) in [(1.5, 0.5), (1.5, 1.0), (2.0, 3.0), (1.2, 18.0)] {
        let params = ControllerParams::new(f, s).unwrap();
        for n in 1..=6usize {
            let specs = [
                (PotentialSpec::g1(f, s, n).unwrap(), Potential::G1(f, s, n)),
                (PotentialSpec::g2(f).unwrap(), Potential::G2(f)),
            ];
            for i in 0..n {
                for &lambda in &lambdas {
                    for (spec, reference) in specs {
                        for (mode, cap) in [(GainMode::Raw, false), (GainMode::Capped, true)] {
                            let exact = exact_potential_drift(&spec, n, i, lambda, &params, mode).unwrap();
                            let brute = drift_by_joint_masks(reference, f, s, n, i, lambda, cap);
                            assert!(
                                (exact - brute).abs() < 1e-9,
                                "{spec:?} n={n} i={i} λ={lambda}: {exact} vs {brute}"
                            );
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn level_quantities_agree_with_pmf() {
    for (n, i, lambda) in [(10, 4, 3), (50, 40, 7), (163, 137, 1), (30, 0, 2)] {
        let q = level_quantities(n, i, lambda).unwrap();
        let d = best_of_lambda_distribution(n, i, lambda).unwrap();
        let p_plus: f64 = (i + 1..=n).map(|j| d.pmf(j)).sum();
        let p_minus: f64 = (0..i).map(|j| d.pmf(j)).sum();
        assert!((q.p_plus - p_plus).abs() < 1e-12);
        assert!((q.p_minus - p_minus).abs() < 1e-12);
        assert!((q.p_zero - d.pmf(i)).abs() < 1e-12);
        assert!((q.p_plus + q.p_zero + q.p_minus - 1.0).abs() < 1e-12);
        if let Some(dp) = q.delta_plus {
            let gain: f64 = (i + 1..=n).map(|j| (j - i) as f64 * d.pmf(j)).sum();
            assert!((dp - gain / p_plus).abs() < 1e-9);
        }
    }
}
