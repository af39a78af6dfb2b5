//! Batch execution and the aggregations behind the figure reproductions.

pub mod batch;
pub mod figures;
pub mod report;
pub mod stats;

pub use batch::{
    best_static_lambda, run_batch, run_batch_with_progress, run_seed, AlgorithmSpec, BatchConfig,
    BatchResult, CellResult, ParamPair,
};
pub use figures::{
    all_targets, evals_per_fitness_histogram, fixed_target_table, histogram_mode,
    lambda_per_fitness, n_log2_n, normalized_runtime_stats, ratchet_monitor, success_rate_sweep,
    success_rate_table, sweep_config, FixedTargetRow, HistogramRow, LambdaLevelRow, RatchetRow,
    RuntimeStatsRow, SweepRow,
};
pub use figures::SWEEP_CI_LEVEL;
pub use report::{
    summary_row, trace_rows, write_csv, ReportHeader, RunSummaryRow, TraceCsvRow, FIG2_FILE,
    FIG3_FILE, FIG4_FILE, FIG5_FILE, FIG6_FILE, LOG_BASE_NOTE, RATCHET_FILE, SWEEP_NOTE,
};
