//! Per-generation trace rows and the compact per-fitness-level profile that
//! the figure aggregations consume.
//!
//! Row `t = 0` describes the initial point (no offspring, zero evaluations).
//! Row `t >= 1` describes generation `t`: `lambda_real`/`lambda_int` are the
//! values used to create that generation's offspring, while `fitness`,
//! `evaluations` and `best_so_far` are the values after the generation.

use serde::{Deserialize, Serialize};

use crate::fitness::Fitness;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub generation: u64,
    pub fitness: Fitness,
    pub lambda_real: f64,
    pub lambda_int: u64,
    pub evaluations: u64,
    pub best_so_far: Fitness,
}

/// How much per-generation information a run keeps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceLevel {
    /// Final counters only.
    #[default]
    Summary,
    /// Final counters plus a [`LevelProfile`].
    Levels,
    /// Every [`TraceRow`] plus a [`LevelProfile`].
    Full,
}

impl std::str::FromStr for TraceLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "summary" => Ok(TraceLevel::Summary),
            "levels" => Ok(TraceLevel::Levels),
            "full" => Ok(TraceLevel::Full),
            other => Err(format!("unknown trace level `{other}` (summary, levels, full)")),
        }
    }
}

/// Threshold `4 log2 n` above which a generation is eligible for the
/// no-fallback monitor.
pub fn drop_monitor_threshold(n: usize) -> f64 {
    4.0 * (n as f64).log2()
}

/// Statistics indexed by internal fitness value, accumulated over one run.
///
/// "At fitness v" always refers to the parent's fitness when the generation
/// started.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelProfile {
    pub initial_fitness: Fitness,
    /// Evaluations counter after the first generation whose resulting
    /// fitness is at least `v` (0 for `v <= f(x_0)`).
    pub first_hit_evaluations: Vec<Option<u64>>,
    pub generations_at: Vec<u64>,
    pub lambda_int_sum_at: Vec<u64>,
    /// Count of generations `t >= 1` with `best_so_far - f(x_t) == g`.
    pub gap_counts: Vec<u64>,
    pub drop_threshold: f64,
    /// Generations with `lambda_int >= drop_threshold`.
    pub eligible_generations: u64,
    /// Eligible generations in which the fitness decreased.
    pub eligible_drops: u64,
}

impl LevelProfile {
    pub fn new(max_fitness: Fitness, initial_fitness: Fitness, drop_threshold: f64) -> Self {
        let len = max_fitness.raw() as usize + 1;
        let mut first_hit_evaluations = vec![None; len];
        for slot in first_hit_evaluations
            .iter_mut()
            .take(initial_fitness.raw() as usize + 1)
        {
            *slot = Some(0);
        }
        LevelProfile {
            initial_fitness,
            first_hit_evaluations,
            generations_at: vec![0; len],
            lambda_int_sum_at: vec![0; len],
            gap_counts: vec![0; len],
            drop_threshold,
            eligible_generations: 0,
            eligible_drops: 0,
        }
    }

    /// Accounts for one completed generation.
    pub fn record(
        &mut self,
        parent: Fitness,
        child: Fitness,
        lambda_int: u64,
        evaluations: u64,
        best_before: Fitness,
        best_after: Fitness,
    ) {
        let p = parent.raw() as usize;
        self.generations_at[p] += 1;
        self.lambda_int_sum_at[p] += lambda_int;
        if lambda_int as f64 >= self.drop_threshold {
            self.eligible_generations += 1;
            if child < parent {
                self.eligible_drops += 1;
            }
        }
        self.gap_counts[(best_after.raw() - child.raw()) as usize] += 1;
        for v in (best_before.raw() + 1)..=best_after.raw() {
            self.first_hit_evaluations[v as usize] = Some(evaluations);
        }
    }

    /// Recomputes a profile from raw trace rows.
    pub fn from_rows(rows: &[TraceRow], max_fitness: Fitness, drop_threshold: f64) -> Self {
        let first = rows.first().expect("trace contains the initial row");
        let mut profile = LevelProfile::new(max_fitness, first.fitness, drop_threshold);
        for pair in rows.windows(2) {
            let (prev, cur) = (&pair[0], &pair[1]);
            profile.record(
                prev.fitness,
                cur.fitness,
                cur.lambda_int,
                cur.evaluations,
                prev.best_so_far,
                cur.best_so_far,
            );
        }
        profile
    }

    pub fn total_generations(&self) -> u64 {
        self.generations_at.iter().sum()
    }

    pub fn total_evaluations(&self) -> u64 {
        self.lambda_int_sum_at.iter().sum()
    }

    /// Number of generations whose fitness gap to the best-so-far exceeds
    /// `max_gap` internal units.
    pub fn gap_violations(&self, max_gap: f64) -> u64 {
        self.gap_counts
            .iter()
            .enumerate()
            .filter(|(g, _)| *g as f64 > max_gap)
            .map(|(_, c)| c)
            .sum()
    }
}
