//! `selfadj`: simulations, exact drift and bound checks, and figure tables
//! for the self-adjusting (1,λ) EA.

mod commands;
mod config;
mod error;
mod presets;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use selfadj_core::experiments::AlgorithmSpec;
use selfadj_core::theory::BandLog;
use selfadj_core::{FunctionKind, TraceLevel};

use crate::config::{Config, GainChoice, OneOrMany, PotentialKind};
use crate::error::CliError;
use crate::presets::Preset;

#[derive(Debug, Parser)]
#[command(name = "selfadj", version, about)]
struct Cli {
    /// Flat JSON config file; flags override its keys.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Load the parameters of one experiment figure.
    #[arg(long, global = true, value_enum, value_name = "FIG")]
    paper_preset: Option<Preset>,

    /// With --paper-preset: use the full run counts and sizes.
    #[arg(long, global = true)]
    full_scale: bool,

    /// Worker threads for batches (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Omit the generation timestamp from output headers.
    #[arg(long, global = true)]
    no_timestamp: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate runs of one configuration and write per-run records.
    Run(Keys),
    /// Run every (n, s) cell and write run records and figure tables.
    Batch(Keys),
    /// Success-rate sweep: mean capped generations per n with bootstrap CIs.
    Sweep(Keys),
    /// Mean evaluations to reach each fitness target, and mean λ per level.
    FixedTarget(Keys),
    /// Exact potential drift over a grid of states.
    DriftCheck(Keys),
    /// Exact improvement quantities against their closed-form bounds.
    BoundsCheck(Keys),
    /// Closed-form evaluation bound of the elitist variant.
    Bound(Keys),
}

/// Flags mirroring the config keys. Unset flags leave the key alone.
#[derive(Debug, Args)]
struct Keys {
    /// comma, plus, static, static:L (comma-separated list)
    #[arg(long = "algo", visible_alias = "algorithm", value_delimiter = ',')]
    algorithm: Vec<AlgorithmSpec>,
    /// onemax, zeromax, twomax, jump:k, cliff:d, ridge
    #[arg(long = "fn", visible_alias = "function")]
    function: Option<FunctionKind>,
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Update strength
    #[arg(long = "F", visible_alias = "update-strength")]
    update_strength: Option<f64>,
    /// Success rate (comma-separated list)
    #[arg(long, visible_alias = "success-rate", value_delimiter = ',')]
    s: Vec<f64>,
    #[arg(long)]
    lambda0: Option<f64>,
    #[arg(long)]
    static_lambda: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    runs: Option<usize>,
    /// Generation cap in multiples of n; 0 disables it.
    #[arg(long)]
    gen_cap_multiplier: Option<u64>,
    #[arg(long)]
    eval_cap: Option<u64>,
    #[arg(long)]
    stop_on_optimum: Option<bool>,
    /// summary, levels or full
    #[arg(long)]
    trace: Option<TraceLevel>,
    /// Output directory (default: $SELFADJ_OUT_DIR or ./results)
    #[arg(long, short = 'o', visible_alias = "out-dir")]
    output: Option<PathBuf>,
    /// Fitness targets for fixed-target tables (default: every value)
    #[arg(long, value_delimiter = ',')]
    targets: Vec<f64>,
    /// Gap multipliers r for the ratchet monitor
    #[arg(long, value_delimiter = ',')]
    r: Vec<f64>,
    #[arg(long, value_enum)]
    potential: Option<PotentialKind>,
    #[arg(long, value_enum)]
    gain: Option<GainChoice>,
    /// ln, log2 or logf
    #[arg(long)]
    band_log: Option<BandLog>,
    /// Offspring counts for bounds-check (default 1..=64)
    #[arg(long, value_delimiter = ',')]
    lambdas: Vec<u64>,
    /// Start fitness for `bound`
    #[arg(long)]
    a: Option<usize>,
    /// Target fitness for `bound` (default n)
    #[arg(long)]
    b: Option<usize>,
}

fn list<T>(v: Vec<T>) -> Option<OneOrMany<T>> {
    (!v.is_empty()).then(|| v.into())
}

fn nonempty<T>(v: Vec<T>) -> Option<Vec<T>> {
    (!v.is_empty()).then_some(v)
}

impl Keys {
    fn into_config(self) -> Config {
        Config {
            algorithm: list(self.algorithm),
            function: self.function,
            n: list(self.n),
            update_strength: self.update_strength,
            s: list(self.s),
            lambda0: self.lambda0,
            static_lambda: self.static_lambda,
            seed: self.seed,
            runs: self.runs,
            gen_cap_multiplier: self.gen_cap_multiplier,
            eval_cap: self.eval_cap,
            stop_on_optimum: self.stop_on_optimum,
            trace: self.trace,
            output: self.output,
            targets: nonempty(self.targets),
            r: nonempty(self.r),
            potential: self.potential,
            gain: self.gain,
            band_log: self.band_log,
            lambdas: nonempty(self.lambdas),
            a: self.a,
            b: self.b,
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let (name, keys) = match cli.command {
        Command::Run(k) => ("run", k),
        Command::Batch(k) => ("batch", k),
        Command::Sweep(k) => ("sweep", k),
        Command::FixedTarget(k) => ("fixed-target", k),
        Command::DriftCheck(k) => ("drift-check", k),
        Command::BoundsCheck(k) => ("bounds-check", k),
        Command::Bound(k) => ("bound", k),
    };
    if cli.full_scale && cli.paper_preset.is_none() {
        return Err(CliError::Config(
            "`--full-scale` requires `--paper-preset`".into(),
        ));
    }
    let mut config = cli
        .paper_preset
        .map(|p| p.config(cli.full_scale))
        .unwrap_or_default();
    if let Some(path) = &cli.config {
        config = config.overlay(Config::from_file(path)?);
    }
    let config = config.overlay(keys.into_config()).with_defaults();
    let ctx = commands::Context {
        config,
        workers: cli.workers,
        timestamp: !cli.no_timestamp,
    };
    match name {
        "run" => commands::run(&ctx),
        "batch" => commands::batch(&ctx),
        "sweep" => commands::sweep(&ctx),
        "fixed-target" => commands::fixed_target(&ctx),
        "drift-check" => commands::drift_check(&ctx),
        "bounds-check" => commands::bounds_check(&ctx),
        _ => commands::bound(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("selfadj: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
