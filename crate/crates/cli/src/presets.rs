//! Parameterisations of the five experiment figures.

use selfadj_core::experiments::AlgorithmSpec;
use selfadj_core::{AlgorithmKind, FunctionKind, TraceLevel};

use crate::config::{Config, OneOrMany};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

/// Success rates shared by the fixed-target and λ-per-level figures.
const LEVEL_SUCCESS_RATES: [f64; 6] = [0.5, 1.0, 2.0, 3.0, 3.4, 4.0];
const SWEEP_SUCCESS_RATES: [f64; 9] = [0.5, 1.0, 2.0, 3.0, 3.4, 4.0, 5.0, 10.0, 20.0];
const HISTOGRAM_SUCCESS_RATES: [f64; 8] = [1.0, 2.0, 3.0, 3.4, 4.0, 5.0, 10.0, 20.0];

impl Preset {
    /// `full` selects the full run counts and problem sizes.
    pub fn config(self, full: bool) -> Config {
        let base = Config {
            function: Some(FunctionKind::OneMax),
            update_strength: Some(1.5),
            lambda0: Some(1.0),
            stop_on_optimum: Some(true),
            algorithm: Some(OneOrMany::One(AlgorithmSpec::Fixed(
                AlgorithmKind::SelfAdjustingComma,
            ))),
            ..Config::default()
        };
        match self {
            Preset::Fig2 => Config {
                algorithm: Some(OneOrMany::Many(vec![
                    AlgorithmSpec::Fixed(AlgorithmKind::SelfAdjustingComma),
                    AlgorithmSpec::Fixed(AlgorithmKind::SelfAdjustingPlus),
                    AlgorithmSpec::StaticAuto,
                ])),
                n: Some(OneOrMany::Many(vec![100, 200, 500, 1000])),
                s: Some(OneOrMany::One(1.0)),
                runs: Some(if full { 1000 } else { 100 }),
                gen_cap_multiplier: Some(500),
                trace: Some(TraceLevel::Summary),
                ..base
            },
            Preset::Fig3 => Config {
                n: Some(OneOrMany::Many(if full {
                    vec![100, 200, 500, 1000]
                } else {
                    vec![100, 200]
                })),
                s: Some(OneOrMany::Many(SWEEP_SUCCESS_RATES.to_vec())),
                runs: Some(100),
                gen_cap_multiplier: Some(500),
                trace: Some(TraceLevel::Summary),
                ..base
            },
            Preset::Fig4 | Preset::Fig5 => Config {
                n: Some(OneOrMany::One(1000)),
                s: Some(OneOrMany::Many(LEVEL_SUCCESS_RATES.to_vec())),
                runs: Some(if full { 100 } else { 20 }),
                gen_cap_multiplier: Some(500),
                trace: Some(TraceLevel::Levels),
                ..base
            },
            Preset::Fig6 => Config {
                n: Some(OneOrMany::One(100)),
                s: Some(OneOrMany::Many(HISTOGRAM_SUCCESS_RATES.to_vec())),
                runs: Some(if full { 100 } else { 30 }),
                gen_cap_multiplier: Some(0),
                eval_cap: Some(1_500_000),
                trace: Some(TraceLevel::Levels),
                ..base
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_scale_only_changes_sizes() {
        for preset in [
            Preset::Fig2,
            Preset::Fig3,
            Preset::Fig4,
            Preset::Fig5,
            Preset::Fig6,
        ] {
            let (small, full) = (preset.config(false), preset.config(true));
            assert_eq!(small.s, full.s);
            assert_eq!(small.eval_cap, full.eval_cap);
            assert!(small.runs <= full.runs);
            assert!(small.ns().unwrap().iter().all(|&n| n <= 1000));
        }
        assert_eq!(Preset::Fig2.config(true).runs, Some(1000));
        assert_eq!(Preset::Fig6.config(true).eval_cap, Some(1_500_000));
    }
}
