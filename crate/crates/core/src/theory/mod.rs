//! Exact finite-n computations for ONEMAX: offspring distributions, level
//! quantities, bound checks, potential drift and the runtime bound.

pub mod bounds;
pub mod distribution;
pub mod drift;
pub mod potential;
pub mod runtime;

pub use bounds::{bound_checks, check_level_bounds, BoundCheck, BoundKind, BoundReport, BoundSummary};
pub use distribution::{
    best_of_lambda_distribution, improvement_probability, level_quantities,
    single_offspring_distribution, BestOfLambda, FitnessChangeDistribution, LevelQuantities,
};
pub use drift::{
    drift_grid_check, exact_potential_drift, g1_drift_threshold, g1_probe_grid, g2_band,
    g2_band_grid, BandLog, CheckStatus, DriftDirection, DriftReport, DriftRow, GainMode,
    G2_DRIFT_THRESHOLD,
};
pub use potential::{potential_value, PotentialSpec};
pub use runtime::fixed_target_evaluation_bound;
