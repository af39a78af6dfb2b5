//! Aggregations over finished batches. None of these re-run simulations.

use serde::{Deserialize, Serialize};

use super::batch::{run_batch_with_progress, AlgorithmSpec, BatchConfig, BatchResult, CellResult, ParamPair};
use super::stats::{bootstrap_mean_ci, mean, FiveNumber, BOOTSTRAP_RESAMPLES};
use crate::ea::{AlgorithmKind, StopCause};
use crate::error::{Error, Result};
use crate::fitness::{Fitness, FunctionKind};
use crate::rng::derive_seed;
use crate::trace::{LevelProfile, TraceLevel};

/// Runtime normaliser `n log2 n`.
pub fn n_log2_n(n: usize) -> f64 {
    let nf = n as f64;
    nf * nf.log2().max(1.0)
}

fn profiles(cell: &CellResult) -> Result<Vec<&LevelProfile>> {
    cell.runs
        .iter()
        .map(|r| {
            r.profile.as_ref().ok_or_else(|| {
                Error::invalid("trace", "per-level statistics need trace = levels or full")
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuntimeStatsRow {
    pub algorithm: String,
    pub n: usize,
    pub update_strength: f64,
    pub success_rate: f64,
    pub runs: usize,
    /// Runs excluded because they did not stop on the optimum.
    pub censored: usize,
    pub min: Option<f64>,
    pub q1: Option<f64>,
    pub median: Option<f64>,
    pub q3: Option<f64>,
    pub max: Option<f64>,
    pub mean: Option<f64>,
}

/// Five-number summary and mean of `evaluations / (n log2 n)` over the runs
/// of each cell that reached the optimum.
pub fn normalized_runtime_stats(batch: &BatchResult) -> Vec<RuntimeStatsRow> {
    batch
        .cells
        .iter()
        .map(|cell| {
            let norm = n_log2_n(cell.n());
            let values: Vec<f64> = cell
                .runs
                .iter()
                .filter(|r| r.stop_cause == StopCause::Optimum)
                .map(|r| r.evaluations as f64 / norm)
                .collect();
            let s = FiveNumber::of(&values);
            RuntimeStatsRow {
                algorithm: cell.setup.algorithm.to_string(),
                n: cell.n(),
                update_strength: cell.update_strength(),
                success_rate: cell.success_rate(),
                runs: cell.runs.len(),
                censored: cell.runs.len() - values.len(),
                min: s.map(|s| s.min),
                q1: s.map(|s| s.q1),
                median: s.map(|s| s.median),
                q3: s.map(|s| s.q3),
                max: s.map(|s| s.max),
                mean: s.map(|s| s.mean),
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub update_strength: f64,
    pub success_rate: f64,
    pub runs: usize,
    pub reached_optimum: usize,
    pub capped: usize,
    /// Mean of `min(generations, cap) / n`.
    pub mean_generations_per_n: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

pub const SWEEP_CI_LEVEL: f64 = 0.99;

/// Mean capped generations per `n` for every cell, with a seeded percentile
/// bootstrap interval.
pub fn success_rate_table(batch: &BatchResult, bootstrap_seed: u64) -> Vec<SweepRow> {
    batch
        .cells
        .iter()
        .enumerate()
        .map(|(idx, cell)| {
            let nf = cell.n() as f64;
            let cap = cell.setup.stop.max_generations.unwrap_or(u64::MAX);
            let values: Vec<f64> = cell
                .runs
                .iter()
                .map(|r| r.generations.min(cap) as f64 / nf)
                .collect();
            let (ci_low, ci_high) = if values.len() >= 2 {
                bootstrap_mean_ci(
                    &values,
                    BOOTSTRAP_RESAMPLES,
                    SWEEP_CI_LEVEL,
                    derive_seed(bootstrap_seed, idx as u64),
                )
            } else {
                (f64::NAN, f64::NAN)
            };
            let reached = cell.runs.iter().filter(|r| r.stop_cause == StopCause::Optimum).count();
            SweepRow {
                n: cell.n(),
                update_strength: cell.update_strength(),
                success_rate: cell.success_rate(),
                runs: cell.runs.len(),
                reached_optimum: reached,
                capped: cell.censored(),
                mean_generations_per_n: mean(&values),
                ci_low,
                ci_high,
            }
        })
        .collect()
}

/// Batch configuration of the success-rate sweep: self-adjusting comma
/// selection on ONEMAX, capped at `500n` generations.
pub fn sweep_config(ns: &[usize], ss: &[f64], update_strength: f64, runs: usize, master_seed: u64) -> BatchConfig {
    let mut config = BatchConfig::new(
        AlgorithmSpec::Fixed(AlgorithmKind::SelfAdjustingComma),
        FunctionKind::OneMax,
        ns.to_vec(),
        ss.iter().map(|&s| ParamPair::new(update_strength, s)).collect(),
    );
    config.runs = runs;
    config.master_seed = master_seed;
    config.gen_cap_multiplier = Some(500);
    config.trace = TraceLevel::Summary;
    config
}

pub fn success_rate_sweep(
    ns: &[usize],
    ss: &[f64],
    update_strength: f64,
    runs: usize,
    master_seed: u64,
    workers: Option<usize>,
) -> Result<(BatchResult, Vec<SweepRow>)> {
    let config = sweep_config(ns, ss, update_strength, runs, master_seed);
    let batch = run_batch_with_progress(&config, workers, |_, _| {})?;
    let rows = success_rate_table(&batch, master_seed);
    Ok((batch, rows))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedTargetRow {
    pub n: usize,
    pub success_rate: f64,
    pub target: f64,
    pub runs_reached: usize,
    /// Mean over the runs that reached the target; `None` if none did.
    pub mean_evaluations: Option<f64>,
}

/// Mean evaluations until the fitness first reaches each target.
pub fn fixed_target_table(cell: &CellResult, targets: &[f64]) -> Result<Vec<FixedTargetRow>> {
    let profiles = profiles(cell)?;
    let f = cell.setup.function;
    Ok(targets
        .iter()
        .map(|&target| {
            let level = f.fitness_at_least(target);
            let hits: Vec<f64> = if level > f.optimum() {
                Vec::new()
            } else {
                profiles
                    .iter()
                    .filter_map(|p| p.first_hit_evaluations[level.raw().max(0) as usize])
                    .map(|e| e as f64)
                    .collect()
            };
            FixedTargetRow {
                n: cell.n(),
                success_rate: cell.success_rate(),
                target,
                runs_reached: hits.len(),
                mean_evaluations: (!hits.is_empty()).then(|| mean(&hits)),
            }
        })
        .collect())
}

/// Every fitness value `0..=optimum` as a target.
pub fn all_targets(cell: &CellResult) -> Vec<f64> {
    let f = cell.setup.function;
    (0..=f.optimum().raw()).map(|v| f.value(Fitness(v))).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaLevelRow {
    pub n: usize,
    pub success_rate: f64,
    pub fitness: f64,
    pub generations: u64,
    pub mean_lambda: f64,
}

/// Average `λ_int` over all generations started at each visited fitness.
pub fn lambda_per_fitness(cell: &CellResult) -> Result<Vec<LambdaLevelRow>> {
    let profiles = profiles(cell)?;
    let f = cell.setup.function;
    let len = f.optimum().raw() as usize + 1;
    Ok((0..len)
        .filter_map(|v| {
            let generations: u64 = profiles.iter().map(|p| p.generations_at[v]).sum();
            let lambda_sum: u64 = profiles.iter().map(|p| p.lambda_int_sum_at[v]).sum();
            (generations > 0).then(|| LambdaLevelRow {
                n: cell.n(),
                success_rate: cell.success_rate(),
                fitness: f.value(Fitness(v as i64)),
                generations,
                mean_lambda: lambda_sum as f64 / generations as f64,
            })
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub n: usize,
    pub success_rate: f64,
    pub fitness: f64,
    pub evaluations: u64,
    pub percent: f64,
}

/// Share of all evaluations spent in generations started at each visited
/// fitness value.
pub fn evals_per_fitness_histogram(cell: &CellResult) -> Result<Vec<HistogramRow>> {
    let profiles = profiles(cell)?;
    let f = cell.setup.function;
    let len = f.optimum().raw() as usize + 1;
    let total: u64 = profiles.iter().map(|p| p.total_evaluations()).sum();
    Ok((0..len)
        .filter_map(|v| {
            let evaluations: u64 = profiles.iter().map(|p| p.lambda_int_sum_at[v]).sum();
            (evaluations > 0).then(|| HistogramRow {
                n: cell.n(),
                success_rate: cell.success_rate(),
                fitness: f.value(Fitness(v as i64)),
                evaluations,
                percent: 100.0 * evaluations as f64 / total as f64,
            })
        })
        .collect())
}

/// Fitness value with the largest share; the lowest such value on ties.
pub fn histogram_mode(rows: &[HistogramRow]) -> Option<f64> {
    rows.iter()
        .fold(None::<&HistogramRow>, |best, r| match best {
            Some(b) if b.evaluations >= r.evaluations => Some(b),
            _ => Some(r),
        })
        .map(|r| r.fitness)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatchetRow {
    pub n: usize,
    pub success_rate: f64,
    pub runs: usize,
    pub drop_threshold: f64,
    pub eligible_generations: u64,
    pub eligible_drops: u64,
    pub drop_fraction: f64,
    pub r: f64,
    /// `r log2 n` in fitness units.
    pub max_gap: f64,
    pub gap_violations: u64,
    pub runs_with_gap_violations: usize,
}

/// Counts fitness drops in generations with `λ_int >= 4 log2 n` and, for
/// each `r`, generations that fall more than `r log2 n` below the best so far.
pub fn ratchet_monitor(cell: &CellResult, rs: &[f64]) -> Result<Vec<RatchetRow>> {
    let profiles = profiles(cell)?;
    let f = cell.setup.function;
    let log_n = (cell.n() as f64).log2();
    let eligible: u64 = profiles.iter().map(|p| p.eligible_generations).sum();
    let drops: u64 = profiles.iter().map(|p| p.eligible_drops).sum();
    let drop_threshold = profiles.first().map_or(4.0 * log_n, |p| p.drop_threshold);
    Ok(rs
        .iter()
        .map(|&r| {
            let max_gap = r * log_n;
            let internal_gap = max_gap * f.scale() as f64;
            let per_run: Vec<u64> = profiles.iter().map(|p| p.gap_violations(internal_gap)).collect();
            RatchetRow {
                n: cell.n(),
                success_rate: cell.success_rate(),
                runs: profiles.len(),
                drop_threshold,
                eligible_generations: eligible,
                eligible_drops: drops,
                drop_fraction: if eligible == 0 { 0.0 } else { drops as f64 / eligible as f64 },
                r,
                max_gap,
                gap_violations: per_run.iter().sum(),
                runs_with_gap_violations: per_run.iter().filter(|&&c| c > 0).count(),
            }
        })
        .collect())
}
