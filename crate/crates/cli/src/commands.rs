use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::Serialize;

use selfadj_core::experiments::{
    all_targets, evals_per_fitness_histogram, fixed_target_table, lambda_per_fitness,
    normalized_runtime_stats, ratchet_monitor, run_batch_with_progress, success_rate_table,
    write_csv, AlgorithmSpec, BatchConfig, BatchResult, ParamPair, ReportHeader, FIG2_FILE,
    FIG3_FILE, FIG4_FILE, FIG5_FILE, FIG6_FILE, LOG_BASE_NOTE, RATCHET_FILE, SWEEP_NOTE,
};
use selfadj_core::experiments::{summary_row, trace_rows, SWEEP_CI_LEVEL};
use selfadj_core::theory::{
    check_level_bounds, drift_grid_check, fixed_target_evaluation_bound, g1_drift_threshold,
    g1_probe_grid, g2_band, g2_band_grid, BandLog, DriftDirection, PotentialSpec,
    G2_DRIFT_THRESHOLD,
};
use selfadj_core::{ControllerParams, StopCause, TraceLevel};

use crate::config::{Config, GainChoice, PotentialKind};
use crate::error::CliError;

pub const RUN_SUMMARY_FILE: &str = "run_summary.csv";
pub const RUN_TRACE_FILE: &str = "run_trace.csv";
pub const RUNS_FILE: &str = "runs.csv";
pub const DRIFT_FILE: &str = "drift_report.csv";
pub const BOUNDS_FILE: &str = "bounds_report.csv";

const DEFAULT_RS: [f64; 4] = [1.0, 2.0, 5.0, 10.0];
const DEFAULT_MAX_LAMBDA: u64 = 64;

pub struct Context {
    pub config: Config,
    pub workers: Option<usize>,
    pub timestamp: bool,
}

impl Context {
    /// Copy with subcommand-specific defaults filled in, so headers show them.
    fn with_config(&self, config: Config) -> Context {
        Context {
            config,
            workers: self.workers,
            timestamp: self.timestamp,
        }
    }

    fn with_rs(&self) -> Context {
        let mut config = self.config.clone();
        config.r.get_or_insert_with(|| DEFAULT_RS.to_vec());
        self.with_config(config)
    }

    fn rs(&self) -> Vec<f64> {
        self.config.r.clone().unwrap_or_else(|| DEFAULT_RS.to_vec())
    }

    fn out_dir(&self) -> PathBuf {
        self.config.out_dir()
    }

    fn seed(&self) -> u64 {
        self.config.seed.unwrap_or(0)
    }

    fn update_strength(&self) -> Result<f64, CliError> {
        Config::require(&self.config.update_strength, "F")
    }

    fn header(&self, kind: &str) -> Result<ReportHeader, CliError> {
        Ok(ReportHeader::new(kind, &self.config.to_json())?
            .with_seed(self.seed())
            .with_note(LOG_BASE_NOTE)
            .with_timestamp(self.timestamp))
    }

    fn write<T: Serialize>(
        &self,
        dir: &Path,
        file: &str,
        header: &ReportHeader,
        rows: &[T],
    ) -> Result<PathBuf, CliError> {
        let path = dir.join(file);
        write_csv(&path, header, rows)?;
        Ok(path)
    }

    fn batch_config(
        &self,
        algorithm: AlgorithmSpec,
        trace: TraceLevel,
    ) -> Result<BatchConfig, CliError> {
        let c = &self.config;
        let f = self.update_strength()?;
        let params = c.ss()?.into_iter().map(|s| ParamPair::new(f, s)).collect();
        let mut batch = BatchConfig::new(
            algorithm,
            Config::require(&c.function, "function")?,
            c.ns()?,
            params,
        );
        batch.runs = Config::require(&c.runs, "runs")?;
        batch.master_seed = self.seed();
        batch.gen_cap_multiplier = c.gen_cap_multiplier.filter(|&m| m > 0);
        batch.eval_cap = c.eval_cap;
        batch.stop_on_optimum = c.stop_on_optimum.unwrap_or(true);
        batch.lambda0 = Config::require(&c.lambda0, "lambda0")?;
        batch.trace = trace;
        Ok(batch)
    }

    fn execute(&self, label: &str, batch: &BatchConfig) -> Result<BatchResult, CliError> {
        let last_decile = AtomicUsize::new(0);
        let result = run_batch_with_progress(batch, self.workers, |done, total| {
            let decile = done * 10 / total;
            if last_decile.fetch_max(decile, Ordering::Relaxed) < decile {
                eprintln!("[selfadj] {label}: {done}/{total} runs");
            }
        })?;
        Ok(result)
    }

    fn trace_level(&self) -> TraceLevel {
        self.config.trace.unwrap_or_default()
    }

    fn single_algorithm(&self) -> Result<AlgorithmSpec, CliError> {
        match self.config.algorithms()?.as_slice() {
            [a] => Ok(*a),
            _ => Err(CliError::Config(
                "`algorithm` must be a single value for this subcommand".into(),
            )),
        }
    }
}

fn count_optimum(batch: &BatchResult) -> usize {
    batch
        .cells
        .iter()
        .flat_map(|c| &c.runs)
        .filter(|r| r.stop_cause == StopCause::Optimum)
        .count()
}

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let algorithm = ctx.single_algorithm()?;
    ctx.config.first_n()?;
    ctx.config.first_s()?;
    let batch = ctx.batch_config(algorithm, ctx.trace_level())?;
    let result = ctx.execute("run", &batch)?;
    let cell = &result.cells[0];
    let scale = cell.setup.function.scale();
    let dir = ctx.out_dir();
    let rows: Vec<_> = cell.runs.iter().map(|r| summary_row(r, scale)).collect();
    ctx.write(&dir, RUN_SUMMARY_FILE, &ctx.header("run")?, &rows)?;
    if ctx.trace_level() == TraceLevel::Full {
        let trace: Vec<_> = cell
            .runs
            .iter()
            .flat_map(|r| trace_rows(r, scale))
            .collect();
        ctx.write(&dir, RUN_TRACE_FILE, &ctx.header("run trace")?, &trace)?;
    }
    if let [r] = rows.as_slice() {
        println!(
            "run {} {} n={} F={} s={} seed={}: stop={} generations={} evaluations={} final_fitness={} max_lambda={}",
            r.algorithm,
            cell.setup.function.kind(),
            r.n,
            r.update_strength,
            r.success_rate,
            r.seed,
            r.stop_cause,
            r.generations,
            r.evaluations,
            r.final_fitness,
            r.max_lambda
        );
    } else {
        let mean_evals = rows.iter().map(|r| r.evaluations as f64).sum::<f64>() / rows.len() as f64;
        println!(
            "run {} runs={} optimum={} mean_evaluations={mean_evals} out={}",
            algorithm,
            rows.len(),
            count_optimum(&result),
            dir.display()
        );
    }
    Ok(())
}

/// Fixed-target, λ-per-level, histogram and ratchet tables of one batch.
fn write_level_tables(
    ctx: &Context,
    dir: &Path,
    result: &BatchResult,
    targets: Option<&[f64]>,
) -> Result<(), CliError> {
    let mut fixed = Vec::new();
    let mut levels = Vec::new();
    let mut histogram = Vec::new();
    let mut ratchet = Vec::new();
    let rs = ctx.rs();
    for cell in &result.cells {
        let cell_targets = targets.map_or_else(|| all_targets(cell), <[f64]>::to_vec);
        fixed.extend(fixed_target_table(cell, &cell_targets)?);
        levels.extend(lambda_per_fitness(cell)?);
        histogram.extend(evals_per_fitness_histogram(cell)?);
        ratchet.extend(ratchet_monitor(cell, &rs)?);
    }
    ctx.write(dir, FIG4_FILE, &ctx.header("fixed-target")?, &fixed)?;
    ctx.write(dir, FIG5_FILE, &ctx.header("lambda-levels")?, &levels)?;
    ctx.write(dir, FIG6_FILE, &ctx.header("eval-histogram")?, &histogram)?;
    ctx.write(dir, RATCHET_FILE, &ctx.header("ratchet")?, &ratchet)?;
    Ok(())
}

fn dir_name(algorithm: &AlgorithmSpec) -> String {
    algorithm.to_string().replace(':', "_")
}

pub fn batch(ctx: &Context) -> Result<(), CliError> {
    let ctx = &if ctx.trace_level() == TraceLevel::Summary {
        ctx.with_config(ctx.config.clone())
    } else {
        ctx.with_rs()
    };
    let algorithms = ctx.config.algorithms()?;
    let trace = ctx.trace_level();
    let dir = ctx.out_dir();
    let mut runs = Vec::new();
    let mut stats = Vec::new();
    let (mut total, mut optimum) = (0, 0);
    for algorithm in &algorithms {
        let config = ctx.batch_config(*algorithm, trace)?;
        let result = ctx.execute(&format!("batch {algorithm}"), &config)?;
        let offset = runs.len() as u64;
        for cell in &result.cells {
            let scale = cell.setup.function.scale();
            runs.extend(cell.runs.iter().map(|r| {
                let mut row = summary_row(r, scale);
                row.run_id += offset;
                row
            }));
        }
        stats.extend(normalized_runtime_stats(&result));
        total += result.total_runs();
        optimum += count_optimum(&result);
        if trace != TraceLevel::Summary {
            let sub = if algorithms.len() > 1 {
                dir.join(dir_name(algorithm))
            } else {
                dir.clone()
            };
            write_level_tables(ctx, &sub, &result, ctx.config.targets.as_deref())?;
        }
    }
    ctx.write(&dir, RUNS_FILE, &ctx.header("runs")?, &runs)?;
    let fig2 = ctx
        .header("runtime-stats")?
        .with_note("evaluations / (n log2 n) over runs that reached the optimum; censored runs are counted, not summarised");
    ctx.write(&dir, FIG2_FILE, &fig2, &stats)?;
    println!(
        "batch algorithms={} runs={total} optimum={optimum} censored={} out={}",
        algorithms.len(),
        total - optimum,
        dir.display()
    );
    Ok(())
}

pub fn sweep(ctx: &Context) -> Result<(), CliError> {
    let algorithm = ctx.single_algorithm()?;
    let config = ctx.batch_config(algorithm, TraceLevel::Summary)?;
    let result = ctx.execute("sweep", &config)?;
    let rows = success_rate_table(&result, ctx.seed());
    let header = ctx
        .header("sweep")?
        .with_note(SWEEP_NOTE)
        .with_note(&format!(
            "{}% percentile bootstrap interval of the mean",
            SWEEP_CI_LEVEL * 100.0
        ));
    let dir = ctx.out_dir();
    ctx.write(&dir, FIG3_FILE, &header, &rows)?;
    let capped: usize = rows.iter().map(|r| r.capped).sum();
    println!(
        "sweep cells={} runs={} capped={capped} out={}",
        rows.len(),
        result.total_runs(),
        dir.display()
    );
    Ok(())
}

pub fn fixed_target(ctx: &Context) -> Result<(), CliError> {
    let mut ctx = ctx.with_rs();
    if ctx.trace_level() == TraceLevel::Summary {
        ctx.config.trace = Some(TraceLevel::Levels);
    }
    let ctx = &ctx;
    let algorithm = ctx.single_algorithm()?;
    let trace = ctx.trace_level();
    let config = ctx.batch_config(algorithm, trace)?;
    let result = ctx.execute("fixed-target", &config)?;
    let rs = ctx.rs();
    let mut fixed = Vec::new();
    let mut levels = Vec::new();
    let mut ratchet = Vec::new();
    for cell in &result.cells {
        let targets = ctx
            .config
            .targets
            .clone()
            .unwrap_or_else(|| all_targets(cell));
        fixed.extend(fixed_target_table(cell, &targets)?);
        levels.extend(lambda_per_fitness(cell)?);
        ratchet.extend(ratchet_monitor(cell, &rs)?);
    }
    let dir = ctx.out_dir();
    let header = ctx
        .header("fixed-target")?
        .with_note("mean over runs that reached the target; empty when none did");
    ctx.write(&dir, FIG4_FILE, &header, &fixed)?;
    ctx.write(&dir, FIG5_FILE, &ctx.header("lambda-levels")?, &levels)?;
    ctx.write(&dir, RATCHET_FILE, &ctx.header("ratchet")?, &ratchet)?;
    println!(
        "fixed-target cells={} runs={} targets={} out={}",
        result.cells.len(),
        result.total_runs(),
        fixed.len(),
        dir.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct DriftCsvRow {
    n: usize,
    i: usize,
    lambda_real: f64,
    lambda_int: u64,
    potential: f64,
    gain: String,
    drift: f64,
    threshold: f64,
    margin: f64,
    pass: bool,
}

pub fn drift_check(ctx: &Context) -> Result<(), CliError> {
    let mut config = ctx.config.clone();
    config.potential.get_or_insert(PotentialKind::G1);
    config.gain.get_or_insert(GainChoice::Both);
    if config.potential == Some(PotentialKind::G2) {
        config.band_log.get_or_insert(BandLog::Natural);
    }
    let ctx = &ctx.with_config(config);
    let c = &ctx.config;
    let n = c.first_n()?;
    let (f, s) = (ctx.update_strength()?, c.first_s()?);
    let params = ControllerParams::new(f, s)?;
    let kind = Config::require(&c.potential, "potential")?;
    let (spec, grid, threshold, direction) = match kind {
        PotentialKind::G1 => (
            PotentialSpec::g1(f, s, n)?,
            g1_probe_grid(n, &params),
            g1_drift_threshold(s),
            DriftDirection::AtLeast,
        ),
        PotentialKind::G2 => {
            let base = Config::require(&c.band_log, "band_log")?;
            (
                PotentialSpec::g2(f)?,
                g2_band_grid(n, f, base),
                G2_DRIFT_THRESHOLD,
                DriftDirection::AtMost,
            )
        }
    };
    let mut header = ctx.header("drift-check")?;
    if kind == PotentialKind::G2 {
        let (low, high) = g2_band(n, f, Config::require(&c.band_log, "band_log")?);
        header = header.with_note(&format!("band {low} < g2 < {high}"));
    }
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for mode in Config::require(&c.gain, "gain")?.modes() {
        let report = drift_grid_check(&spec, &params, n, &grid, threshold, direction, mode)?;
        let extreme_name = match direction {
            DriftDirection::AtLeast => "min",
            DriftDirection::AtMost => "max",
        };
        let summary = match report.extreme {
            Some(e) => format!(
                "gain={mode} {extreme_name} drift {} at i={} lambda={} over {} states, {} violations, {}",
                e.drift,
                e.i,
                e.lambda_real,
                report.rows.len(),
                report.violations.len(),
                report.status
            ),
            None => format!("gain={mode} {}", report.status),
        };
        header = header.with_note(&summary);
        summaries.push(summary);
        rows.extend(report.rows.iter().map(|r| DriftCsvRow {
            n,
            i: r.i,
            lambda_real: r.lambda_real,
            lambda_int: r.lambda_int,
            potential: r.potential,
            gain: mode.to_string(),
            drift: r.drift,
            threshold,
            margin: match direction {
                DriftDirection::AtLeast => r.drift - threshold,
                DriftDirection::AtMost => threshold - r.drift,
            },
            pass: r.holds,
        }));
    }
    ctx.write(&ctx.out_dir(), DRIFT_FILE, &header, &rows)?;
    let kind = match kind {
        PotentialKind::G1 => "g1",
        PotentialKind::G2 => "g2",
    };
    println!(
        "drift-check {kind} n={n} threshold={threshold}: {}",
        summaries.join("; ")
    );
    Ok(())
}

#[derive(Serialize)]
struct BoundCsvRow {
    n: usize,
    i: usize,
    lambda_real: f64,
    lambda_int: u64,
    bound: &'static str,
    exact: f64,
    bound_value: f64,
    margin: f64,
    pass: bool,
}

pub fn bounds_check(ctx: &Context) -> Result<(), CliError> {
    let mut config = ctx.config.clone();
    config
        .lambdas
        .get_or_insert_with(|| (1..=DEFAULT_MAX_LAMBDA).collect());
    let ctx = &ctx.with_config(config);
    let c = &ctx.config;
    let lambdas = Config::require(&c.lambdas, "lambdas")?;
    let mut header = ctx.header("bounds-check")?;
    let mut rows = Vec::new();
    let (mut checks, mut violations) = (0, 0);
    for n in c.ns()? {
        let levels: Vec<usize> = (0..n).collect();
        let report = check_level_bounds(n, &levels, &lambdas, true)?;
        for summary in &report.summaries {
            checks += summary.checks;
            violations += summary.violations;
            if summary.violations > 0 {
                header = header.with_note(&format!(
                    "n={n} {}: {} of {} checks violated",
                    summary.bound.name(),
                    summary.violations,
                    summary.checks
                ));
            }
        }
        rows.extend(report.checks.iter().map(|b| BoundCsvRow {
            n: b.n,
            i: b.i,
            lambda_real: b.lambda as f64,
            lambda_int: b.lambda,
            bound: b.bound.name(),
            exact: b.exact,
            bound_value: b.bound_value,
            margin: b.margin,
            pass: b.holds(),
        }));
    }
    ctx.write(&ctx.out_dir(), BOUNDS_FILE, &header, &rows)?;
    println!(
        "bounds-check checks={checks} violations={violations} out={}",
        ctx.out_dir().display()
    );
    Ok(())
}

pub fn bound(ctx: &Context) -> Result<(), CliError> {
    let c = &ctx.config;
    let n = c.first_n()?;
    let value = fixed_target_evaluation_bound(
        n,
        c.a.unwrap_or(0),
        c.b.unwrap_or(n),
        ctx.update_strength()?,
        c.first_s()?,
        Config::require(&c.lambda0, "lambda0")?,
    )?;
    println!("{value}");
    Ok(())
}
