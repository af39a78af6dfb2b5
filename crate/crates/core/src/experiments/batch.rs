//! Batch configuration and parallel execution of independent seeded runs.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::controller::ControllerParams;
use crate::ea::{run, AlgorithmKind, RunRecord, RunSetup, StoppingCondition};
use crate::error::{Error, Result};
use crate::fitness::{FitnessFunction, FunctionKind};
use crate::rng::derive_seed;
use crate::trace::TraceLevel;

/// `ceil(ln n / ln(e/(e-1)))`, the static offspring population size used as
/// the baseline.
pub fn best_static_lambda(n: usize) -> u64 {
    let e = std::f64::consts::E;
    ((n as f64).ln() / (e / (e - 1.0)).ln()).ceil().max(1.0) as u64
}

/// Algorithm as configured; `StaticAuto` resolves per problem size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum AlgorithmSpec {
    Fixed(AlgorithmKind),
    /// Static (1,λ) EA with λ = [`best_static_lambda`].
    StaticAuto,
}

impl AlgorithmSpec {
    pub fn resolve(self, n: usize) -> AlgorithmKind {
        match self {
            AlgorithmSpec::Fixed(kind) => kind,
            AlgorithmSpec::StaticAuto => AlgorithmKind::StaticComma(best_static_lambda(n)),
        }
    }
}

impl From<AlgorithmKind> for AlgorithmSpec {
    fn from(kind: AlgorithmKind) -> Self {
        AlgorithmSpec::Fixed(kind)
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgorithmSpec::Fixed(kind) => kind.fmt(f),
            AlgorithmSpec::StaticAuto => f.write_str("static:auto"),
        }
    }
}

impl FromStr for AlgorithmSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "static" | "static:auto" => Ok(AlgorithmSpec::StaticAuto),
            other => other.parse().map(AlgorithmSpec::Fixed),
        }
    }
}

impl TryFrom<String> for AlgorithmSpec {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        value.parse()
    }
}

impl From<AlgorithmSpec> for String {
    fn from(spec: AlgorithmSpec) -> String {
        spec.to_string()
    }
}

/// One `(F, s)` pair of a batch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamPair {
    pub update_strength: f64,
    pub success_rate: f64,
}

impl ParamPair {
    pub fn new(update_strength: f64, success_rate: f64) -> Self {
        ParamPair {
            update_strength,
            success_rate,
        }
    }

    pub fn controller(&self) -> Result<ControllerParams> {
        ControllerParams::new(self.update_strength, self.success_rate)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchConfig {
    pub algorithm: AlgorithmSpec,
    pub function: FunctionKind,
    pub ns: Vec<usize>,
    pub params: Vec<ParamPair>,
    pub runs: usize,
    pub master_seed: u64,
    /// Generation cap as a multiple of n.
    pub gen_cap_multiplier: Option<u64>,
    pub eval_cap: Option<u64>,
    pub stop_on_optimum: bool,
    pub lambda0: f64,
    pub trace: TraceLevel,
}

impl BatchConfig {
    pub fn new(algorithm: AlgorithmSpec, function: FunctionKind, ns: Vec<usize>, params: Vec<ParamPair>) -> Self {
        BatchConfig {
            algorithm,
            function,
            ns,
            params,
            runs: 1,
            master_seed: 0,
            gen_cap_multiplier: Some(500),
            eval_cap: None,
            stop_on_optimum: true,
            lambda0: 1.0,
            trace: TraceLevel::Summary,
        }
    }

    pub fn cell_count(&self) -> usize {
        self.ns.len() * self.params.len()
    }

    /// Run setups in cell order: `n` major, `(F, s)` minor.
    pub fn setups(&self) -> Result<Vec<RunSetup>> {
        if self.runs == 0 {
            return Err(Error::invalid("runs", "runs per cell must be at least 1"));
        }
        if self.ns.is_empty() {
            return Err(Error::invalid("n", "at least one problem size is required"));
        }
        if self.params.is_empty() {
            return Err(Error::invalid("s", "at least one (F, s) pair is required"));
        }
        let mut setups = Vec::with_capacity(self.cell_count());
        for &n in &self.ns {
            let function = FitnessFunction::new(self.function, n)?;
            for pair in &self.params {
                let params = pair.controller()?;
                let max_generations = self.gen_cap_multiplier.map(|m| m.saturating_mul(n as u64));
                let stop = StoppingCondition::new(
                    max_generations,
                    self.eval_cap,
                    self.stop_on_optimum,
                    n,
                    &params,
                )?;
                let setup = RunSetup::new(self.algorithm.resolve(n), function, params, stop)
                    .with_initial_lambda(self.lambda0)
                    .with_trace(self.trace);
                setup.validate()?;
                setups.push(setup);
            }
        }
        Ok(setups)
    }
}

/// All runs of one `(n, F, s)` cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub setup: RunSetup,
    pub runs: Vec<RunRecord>,
}

impl CellResult {
    pub fn n(&self) -> usize {
        self.setup.function.n()
    }

    pub fn update_strength(&self) -> f64 {
        self.setup.params.update_strength()
    }

    pub fn success_rate(&self) -> f64 {
        self.setup.params.success_rate()
    }

    pub fn censored(&self) -> usize {
        self.runs.iter().filter(|r| r.stop_cause.is_censored()).count()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchResult {
    pub config: BatchConfig,
    pub cells: Vec<CellResult>,
}

impl BatchResult {
    pub fn total_runs(&self) -> usize {
        self.cells.iter().map(|c| c.runs.len()).sum()
    }
}

/// Seed of run `run` in cell `cell`.
pub fn run_seed(master_seed: u64, runs_per_cell: usize, cell: usize, run: usize) -> u64 {
    derive_seed(master_seed, (cell * runs_per_cell + run) as u64)
}

pub fn run_batch(config: &BatchConfig) -> Result<BatchResult> {
    run_batch_with_progress(config, None, |_, _| {})
}

/// Runs every cell of `config` on `workers` threads (all available when
/// `None`). `progress(done, total)` is called after each finished run.
pub fn run_batch_with_progress<P>(
    config: &BatchConfig,
    workers: Option<usize>,
    progress: P,
) -> Result<BatchResult>
where
    P: Fn(usize, usize) + Sync,
{
    let setups = config.setups()?;
    let runs = config.runs;
    let total = setups.len() * runs;
    let done = AtomicUsize::new(0);
    let execute = || -> Vec<RunRecord> {
        (0..total)
            .into_par_iter()
            .map(|job| {
                let (cell, run_idx) = (job / runs, job % runs);
                let seed = run_seed(config.master_seed, runs, cell, run_idx);
                let record = run(&setups[cell], seed, job as u64);
                progress(done.fetch_add(1, Ordering::Relaxed) + 1, total);
                record
            })
            .collect()
    };
    let records = match workers {
        Some(0) => return Err(Error::invalid("workers", "worker count must be at least 1")),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::invalid("workers", e.to_string()))?
            .install(execute),
        None => execute(),
    };
    let mut records = records.into_iter();
    let cells = setups
        .into_iter()
        .map(|setup| CellResult {
            setup,
            runs: records.by_ref().take(runs).collect(),
        })
        .collect();
    Ok(BatchResult {
        config: config.clone(),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn small_config() -> BatchConfig {
        let mut config = BatchConfig::new(
            AlgorithmSpec::Fixed(AlgorithmKind::SelfAdjustingComma),
            FunctionKind::OneMax,
            vec![20, 30],
            vec![ParamPair::new(1.5, 1.0)],
        );
        config.runs = 3;
        config.master_seed = 11;
        config
    }

    #[test]
    fn static_baseline_sizes() {
        assert_eq!(best_static_lambda(100), 11);
        assert_eq!(best_static_lambda(1000), 16);
        assert_eq!(best_static_lambda(1), 1);
    }

    #[test]
    fn cells_and_seeds() {
        let batch = run_batch(&small_config()).unwrap();
        assert_eq!(batch.cells.len(), 2);
        assert_eq!(batch.total_runs(), 6);
        let seeds: HashSet<u64> = batch.cells.iter().flat_map(|c| c.runs.iter().map(|r| r.seed)).collect();
        assert_eq!(seeds.len(), 6);
        assert_eq!(batch.cells[1].n(), 30);
        assert!(batch.cells[1].runs.iter().all(|r| r.n == 30));
    }

    #[test]
    fn deterministic_across_worker_counts() {
        let config = small_config();
        let a = run_batch_with_progress(&config, Some(1), |_, _| {}).unwrap();
        let b = run_batch_with_progress(&config, Some(3), |_, _| {}).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn algorithm_spec_names() {
        assert_eq!("static".parse::<AlgorithmSpec>().unwrap(), AlgorithmSpec::StaticAuto);
        assert_eq!(AlgorithmSpec::StaticAuto.resolve(100), AlgorithmKind::StaticComma(11));
        assert_eq!("plus".parse::<AlgorithmSpec>().unwrap().to_string(), "plus");
    }

    #[test]
    fn invalid_configs() {
        let mut c = small_config();
        c.runs = 0;
        assert!(run_batch(&c).is_err());
        let mut c = small_config();
        c.params = vec![ParamPair::new(0.5, 1.0)];
        assert!(run_batch(&c).is_err());
        let mut c = small_config();
        c.gen_cap_multiplier = None;
        c.stop_on_optimum = false;
        assert!(run_batch(&c).is_err());
    }
}
