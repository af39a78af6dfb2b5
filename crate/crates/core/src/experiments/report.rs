//! CSV emission. Every file starts with `#` comment lines carrying the
//! config hash, the master seed, notes on logarithm bases and the full
//! effective configuration.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::ea::RunRecord;
use crate::error::Result;

pub const FIG2_FILE: &str = "fig2_boxstats.csv";
pub const FIG3_FILE: &str = "fig3_sweep.csv";
pub const FIG4_FILE: &str = "fig4_fixed_target.csv";
pub const FIG5_FILE: &str = "fig5_lambda_levels.csv";
pub const FIG6_FILE: &str = "fig6_eval_histogram.csv";
pub const RATCHET_FILE: &str = "ratchet_report.csv";

/// Base-2 note attached to every experiment file.
pub const LOG_BASE_NOTE: &str =
    "log n is log2 n in runtime normalisation (n log2 n) and in the 4 log2 n / r log2 n monitors";
pub const SWEEP_NOTE: &str = "generations are capped at the cap and normalised by n";

#[derive(Clone, Debug)]
pub struct ReportHeader {
    pub kind: String,
    pub config: serde_json::Value,
    pub master_seed: Option<u64>,
    pub notes: Vec<String>,
    pub timestamp: bool,
}

impl ReportHeader {
    pub fn new<C: Serialize>(kind: &str, config: &C) -> Result<Self> {
        Ok(ReportHeader {
            kind: kind.to_string(),
            config: serde_json::to_value(config)?,
            master_seed: None,
            notes: Vec::new(),
            timestamp: false,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = Some(seed);
        self
    }

    pub fn with_note(mut self, note: &str) -> Self {
        self.notes.push(note.to_string());
        self
    }

    pub fn with_timestamp(mut self, timestamp: bool) -> Self {
        self.timestamp = timestamp;
        self
    }

    pub fn config_hash(&self) -> String {
        config_hash(&self.config)
    }

    pub fn render(&self) -> String {
        let mut out = format!("# selfadj {}\n# config_hash: {}\n", self.kind, self.config_hash());
        if let Some(seed) = self.master_seed {
            out.push_str(&format!("# master_seed: {seed}\n"));
        }
        for note in &self.notes {
            out.push_str(&format!("# note: {note}\n"));
        }
        out.push_str(&format!("# config: {}\n", self.config));
        if self.timestamp {
            let secs = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_secs());
            out.push_str(&format!("# generated_unix: {secs}\n"));
        }
        out
    }
}

/// SHA-256 of the compact JSON form, hex encoded.
pub fn config_hash(config: &serde_json::Value) -> String {
    let digest = Sha256::digest(config.to_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn csv_string<T: Serialize>(header: &ReportHeader, rows: &[T]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).map_err(std::io::Error::other)?;
    }
    let body = writer.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    let mut out = header.render();
    out.push_str(&String::from_utf8(body).map_err(std::io::Error::other)?);
    Ok(out)
}

/// Writes `rows` below the header, creating parent directories.
pub fn write_csv<T: Serialize>(path: &Path, header: &ReportHeader, rows: &[T]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let mut file = fs::File::create(path)?;
    file.write_all(csv_string(header, rows)?.as_bytes())?;
    Ok(())
}

/// One row per generation of a traced run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceCsvRow {
    pub run_id: u64,
    pub generation: u64,
    pub fitness: f64,
    pub lambda_real: f64,
    pub lambda_int: u64,
    pub evaluations: u64,
    pub best_so_far: f64,
}

pub fn trace_rows(record: &RunRecord, scale: i64) -> Vec<TraceCsvRow> {
    let s = scale as f64;
    record
        .trace
        .iter()
        .map(|row| TraceCsvRow {
            run_id: record.run_id,
            generation: row.generation,
            fitness: row.fitness.raw() as f64 / s,
            lambda_real: row.lambda_real,
            lambda_int: row.lambda_int,
            evaluations: row.evaluations,
            best_so_far: row.best_so_far.raw() as f64 / s,
        })
        .collect()
}

/// One row per run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummaryRow {
    pub run_id: u64,
    pub seed: u64,
    pub algorithm: String,
    pub n: usize,
    pub update_strength: f64,
    pub success_rate: f64,
    pub stop_cause: String,
    pub generations: u64,
    pub evaluations: u64,
    pub initial_fitness: f64,
    pub final_fitness: f64,
    pub best_so_far: f64,
    pub final_lambda: f64,
    pub max_lambda: f64,
}

pub fn summary_row(record: &RunRecord, scale: i64) -> RunSummaryRow {
    let s = scale as f64;
    RunSummaryRow {
        run_id: record.run_id,
        seed: record.seed,
        algorithm: record.algorithm.to_string(),
        n: record.n,
        update_strength: record.update_strength,
        success_rate: record.success_rate,
        stop_cause: record.stop_cause.to_string(),
        generations: record.generations,
        evaluations: record.evaluations,
        initial_fitness: record.initial_fitness.raw() as f64 / s,
        final_fitness: record.final_fitness.raw() as f64 / s,
        best_so_far: record.best_so_far.raw() as f64 / s,
        final_lambda: record.final_lambda,
        max_lambda: record.max_lambda,
    }
}
