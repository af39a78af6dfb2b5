//! The (1,λ) / (1+λ) engine with the success-based λ controller.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::controller::{round_lambda, update_lambda, ControllerParams};
use crate::error::{Error, Result};
use crate::fitness::{Fitness, FitnessFunction, SearchPoint};
use crate::mutation::Mutator;
use crate::rng::rng_from_seed;
use crate::trace::{drop_monitor_threshold, LevelProfile, TraceLevel, TraceRow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum AlgorithmKind {
    /// Self-adjusting (1,λ) EA: the best offspring always replaces the parent.
    SelfAdjustingComma,
    /// Elitist self-adjusting (1+λ) EA.
    SelfAdjustingPlus,
    /// (1,λ) EA with a fixed offspring population size.
    StaticComma(u64),
}

impl AlgorithmKind {
    pub fn validate(&self) -> Result<()> {
        match self {
            AlgorithmKind::StaticComma(0) => Err(Error::invalid(
                "static_lambda",
                "static offspring population size must be at least 1",
            )),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgorithmKind::SelfAdjustingComma => write!(f, "comma"),
            AlgorithmKind::SelfAdjustingPlus => write!(f, "plus"),
            AlgorithmKind::StaticComma(l) => write!(f, "static:{l}"),
        }
    }
}

impl FromStr for AlgorithmKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "comma" => Ok(AlgorithmKind::SelfAdjustingComma),
            None if s == "plus" => Ok(AlgorithmKind::SelfAdjustingPlus),
            Some(("static", l)) => {
                let l = l
                    .parse()
                    .map_err(|_| Error::invalid("algo", format!("bad static size in `{s}`")))?;
                let kind = AlgorithmKind::StaticComma(l);
                kind.validate()?;
                Ok(kind)
            }
            _ => Err(Error::invalid(
                "algo",
                format!("unknown algorithm `{s}` (comma, plus, static:<lambda>)"),
            )),
        }
    }
}

impl TryFrom<String> for AlgorithmKind {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        value.parse()
    }
}

impl From<AlgorithmKind> for String {
    fn from(kind: AlgorithmKind) -> String {
        kind.to_string()
    }
}

/// Why a run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StopCause {
    Optimum,
    GenerationCap,
    EvaluationCap,
    LambdaAbort,
}

impl StopCause {
    /// Every cause except reaching the optimum censors the runtime.
    pub fn is_censored(self) -> bool {
        self != StopCause::Optimum
    }
}

impl fmt::Display for StopCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StopCause::Optimum => "optimum",
            StopCause::GenerationCap => "generation_cap",
            StopCause::EvaluationCap => "evaluation_cap",
            StopCause::LambdaAbort => "lambda_abort",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoppingCondition {
    pub max_generations: Option<u64>,
    pub max_evaluations: Option<u64>,
    pub stop_on_optimum: bool,
    /// The run is aborted once λ exceeds this value.
    pub lambda_abort_threshold: f64,
}

impl StoppingCondition {
    /// One growth step past `e F^(1/s) n^3`, the value λ exceeds before the
    /// optimum only with probability `exp(-Ω(n^2))`.
    pub fn default_lambda_abort_threshold(n: usize, params: &ControllerParams) -> f64 {
        let g = params.growth_factor();
        std::f64::consts::E * g * (n as f64).powi(3) * g
    }

    pub fn new(
        max_generations: Option<u64>,
        max_evaluations: Option<u64>,
        stop_on_optimum: bool,
        n: usize,
        params: &ControllerParams,
    ) -> Result<Self> {
        let stop = StoppingCondition {
            max_generations,
            max_evaluations,
            stop_on_optimum,
            lambda_abort_threshold: Self::default_lambda_abort_threshold(n, params),
        };
        stop.validate()?;
        Ok(stop)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_generations.is_none() && self.max_evaluations.is_none() && !self.stop_on_optimum {
            return Err(Error::invalid(
                "stop",
                "enable at least one of max_generations, max_evaluations, stop_on_optimum",
            ));
        }
        if !(self.lambda_abort_threshold >= 1.0) {
            return Err(Error::invalid(
                "lambda_abort_threshold",
                "threshold must be at least 1",
            ));
        }
        Ok(())
    }

    fn check(&self, f: &FitnessFunction, state: &AlgoState) -> Option<StopCause> {
        if self.stop_on_optimum && f.is_optimum(state.fitness) {
            return Some(StopCause::Optimum);
        }
        if state.lambda_real > self.lambda_abort_threshold {
            return Some(StopCause::LambdaAbort);
        }
        if self.max_generations.is_some_and(|g| state.generation >= g) {
            return Some(StopCause::GenerationCap);
        }
        if self.max_evaluations.is_some_and(|e| state.evaluations >= e) {
            return Some(StopCause::EvaluationCap);
        }
        None
    }
}

/// Current search point, real-valued λ and counters.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgoState {
    pub x: SearchPoint,
    pub fitness: Fitness,
    pub lambda_real: f64,
    pub generation: u64,
    pub evaluations: u64,
    pub best_so_far: Fitness,
}

impl AlgoState {
    pub fn new(x: SearchPoint, f: &FitnessFunction, initial_lambda: f64) -> Self {
        assert!(initial_lambda >= 1.0, "initial lambda must be at least 1");
        let fitness = f.evaluate(&x);
        AlgoState {
            x,
            fitness,
            lambda_real: initial_lambda,
            generation: 0,
            evaluations: 0,
            best_so_far: fitness,
        }
    }
}

/// What happened in one generation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenerationOutcome {
    pub parent_fitness: Fitness,
    /// Best offspring fitness.
    pub offspring_fitness: Fitness,
    /// Fitness of the current point after selection.
    pub fitness: Fitness,
    /// λ used to create the offspring.
    pub lambda_real: f64,
    pub lambda_int: u64,
    /// Strict improvement over the parent.
    pub success: bool,
}

/// Offspring creation and selection for a fixed fitness function. Holds the
/// mutation distribution and scratch buffers so generations do not allocate.
#[derive(Clone, Debug)]
pub struct Generator {
    function: FitnessFunction,
    mutator: Mutator,
    flips: Vec<usize>,
    best_flips: Vec<usize>,
}

impl Generator {
    pub fn new(function: FitnessFunction) -> Self {
        Generator {
            function,
            mutator: Mutator::new(function.n()),
            flips: Vec::new(),
            best_flips: Vec::new(),
        }
    }

    pub fn function(&self) -> &FitnessFunction {
        &self.function
    }

    fn offspring_fitness(&mut self, x: &mut SearchPoint) -> Fitness {
        if self.function.depends_only_on_ones() {
            let ones = x.ones_after_flips(&self.flips);
            self.function.from_ones(ones).expect("ones-based kind")
        } else {
            x.apply_flips(&self.flips);
            let fitness = self.function.evaluate(x);
            x.apply_flips(&self.flips);
            fitness
        }
    }

    /// Creates `lambda_int` offspring of `x` and remembers a uniformly random
    /// fitness-maximal one in `best_flips`. Returns its fitness.
    fn best_offspring<R: Rng + ?Sized>(
        &mut self,
        x: &mut SearchPoint,
        lambda_int: u64,
        rng: &mut R,
    ) -> Fitness {
        debug_assert!(lambda_int >= 1);
        let mut best = Fitness(i64::MIN);
        let mut ties = 0u64;
        for _ in 0..lambda_int {
            self.mutator.sample_flips(rng, &mut self.flips);
            let fitness = self.offspring_fitness(x);
            if fitness > best {
                best = fitness;
                ties = 1;
                std::mem::swap(&mut self.flips, &mut self.best_flips);
            } else if fitness == best {
                ties += 1;
                if rng.random_range(0..ties) == 0 {
                    std::mem::swap(&mut self.flips, &mut self.best_flips);
                }
            }
        }
        best
    }

    fn generation<R: Rng + ?Sized>(
        &mut self,
        state: &mut AlgoState,
        lambda_int: u64,
        elitist: bool,
        rng: &mut R,
    ) -> GenerationOutcome {
        let parent_fitness = state.fitness;
        let lambda_real = state.lambda_real;
        let offspring_fitness = self.best_offspring(&mut state.x, lambda_int, rng);
        if !elitist || offspring_fitness >= parent_fitness {
            state.x.apply_flips(&self.best_flips);
            state.fitness = offspring_fitness;
        }
        state.generation += 1;
        state.evaluations += lambda_int;
        state.best_so_far = state.best_so_far.max(state.fitness);
        GenerationOutcome {
            parent_fitness,
            offspring_fitness,
            fitness: state.fitness,
            lambda_real,
            lambda_int,
            success: offspring_fitness > parent_fitness,
        }
    }

    /// One generation of the self-adjusting (1,λ) EA.
    pub fn comma_step<R: Rng + ?Sized>(
        &mut self,
        state: &mut AlgoState,
        params: &ControllerParams,
        rng: &mut R,
    ) -> GenerationOutcome {
        let lambda_int = round_lambda(state.lambda_real);
        let outcome = self.generation(state, lambda_int, false, rng);
        state.lambda_real = update_lambda(state.lambda_real, outcome.success, params);
        outcome
    }

    /// One generation of the elitist self-adjusting (1+λ) EA. Ties replace
    /// the parent; only strict improvements count as successes.
    pub fn plus_step<R: Rng + ?Sized>(
        &mut self,
        state: &mut AlgoState,
        params: &ControllerParams,
        rng: &mut R,
    ) -> GenerationOutcome {
        let lambda_int = round_lambda(state.lambda_real);
        let outcome = self.generation(state, lambda_int, true, rng);
        state.lambda_real = update_lambda(state.lambda_real, outcome.success, params);
        outcome
    }

    /// One generation of the (1,λ) EA with fixed λ.
    pub fn static_step<R: Rng + ?Sized>(
        &mut self,
        state: &mut AlgoState,
        lambda: u64,
        rng: &mut R,
    ) -> GenerationOutcome {
        self.generation(state, lambda, false, rng)
    }

    pub fn step<R: Rng + ?Sized>(
        &mut self,
        kind: AlgorithmKind,
        state: &mut AlgoState,
        params: &ControllerParams,
        rng: &mut R,
    ) -> GenerationOutcome {
        match kind {
            AlgorithmKind::SelfAdjustingComma => self.comma_step(state, params, rng),
            AlgorithmKind::SelfAdjustingPlus => self.plus_step(state, params, rng),
            AlgorithmKind::StaticComma(lambda) => self.static_step(state, lambda, rng),
        }
    }
}

pub fn generation_comma<R: Rng + ?Sized>(
    state: &mut AlgoState,
    f: &FitnessFunction,
    params: &ControllerParams,
    rng: &mut R,
) -> GenerationOutcome {
    Generator::new(*f).comma_step(state, params, rng)
}

pub fn generation_plus<R: Rng + ?Sized>(
    state: &mut AlgoState,
    f: &FitnessFunction,
    params: &ControllerParams,
    rng: &mut R,
) -> GenerationOutcome {
    Generator::new(*f).plus_step(state, params, rng)
}

/// Everything that defines a single run apart from its seed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSetup {
    pub algorithm: AlgorithmKind,
    pub function: FitnessFunction,
    pub params: ControllerParams,
    pub stop: StoppingCondition,
    pub initial_lambda: f64,
    pub trace: TraceLevel,
}

impl RunSetup {
    pub fn new(
        algorithm: AlgorithmKind,
        function: FitnessFunction,
        params: ControllerParams,
        stop: StoppingCondition,
    ) -> Self {
        RunSetup {
            algorithm,
            function,
            params,
            stop,
            initial_lambda: 1.0,
            trace: TraceLevel::Summary,
        }
    }

    pub fn with_trace(mut self, trace: TraceLevel) -> Self {
        self.trace = trace;
        self
    }

    pub fn with_initial_lambda(mut self, lambda: f64) -> Self {
        self.initial_lambda = lambda;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.algorithm.validate()?;
        self.stop.validate()?;
        if !(self.initial_lambda >= 1.0 && self.initial_lambda.is_finite()) {
            return Err(Error::invalid("lambda0", "initial lambda must be >= 1"));
        }
        Ok(())
    }
}

/// Outcome of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: u64,
    pub seed: u64,
    pub algorithm: AlgorithmKind,
    pub n: usize,
    pub update_strength: f64,
    pub success_rate: f64,
    pub stop_cause: StopCause,
    pub generations: u64,
    pub evaluations: u64,
    pub initial_fitness: Fitness,
    pub final_fitness: Fitness,
    pub best_so_far: Fitness,
    pub final_lambda: f64,
    pub max_lambda: f64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub trace: Vec<TraceRow>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub profile: Option<LevelProfile>,
}

/// Runs one seeded simulation from a uniformly random initial point.
pub fn run(setup: &RunSetup, seed: u64, run_id: u64) -> RunRecord {
    let mut rng = rng_from_seed(seed);
    let f = setup.function;
    let x0 = SearchPoint::random(f.n(), &mut rng);
    let initial_lambda = match setup.algorithm {
        AlgorithmKind::StaticComma(l) => l as f64,
        _ => setup.initial_lambda,
    };
    let mut state = AlgoState::new(x0, &f, initial_lambda);
    let initial_fitness = state.fitness;
    let mut generator = Generator::new(f);

    let keep_rows = setup.trace == TraceLevel::Full;
    let mut trace = Vec::new();
    if keep_rows {
        trace.push(TraceRow {
            generation: 0,
            fitness: state.fitness,
            lambda_real: state.lambda_real,
            lambda_int: 0,
            evaluations: 0,
            best_so_far: state.best_so_far,
        });
    }
    let mut profile = (setup.trace != TraceLevel::Summary)
        .then(|| LevelProfile::new(f.optimum(), initial_fitness, drop_monitor_threshold(f.n())));
    let mut max_lambda = state.lambda_real;

    let stop_cause = loop {
        if let Some(cause) = setup.stop.check(&f, &state) {
            break cause;
        }
        let best_before = state.best_so_far;
        let outcome = generator.step(setup.algorithm, &mut state, &setup.params, &mut rng);
        max_lambda = max_lambda.max(state.lambda_real);
        if let Some(p) = profile.as_mut() {
            p.record(
                outcome.parent_fitness,
                outcome.fitness,
                outcome.lambda_int,
                state.evaluations,
                best_before,
                state.best_so_far,
            );
        }
        if keep_rows {
            trace.push(TraceRow {
                generation: state.generation,
                fitness: state.fitness,
                lambda_real: outcome.lambda_real,
                lambda_int: outcome.lambda_int,
                evaluations: state.evaluations,
                best_so_far: state.best_so_far,
            });
        }
    };

    RunRecord {
        run_id,
        seed,
        algorithm: setup.algorithm,
        n: f.n(),
        update_strength: setup.params.update_strength(),
        success_rate: setup.params.success_rate(),
        stop_cause,
        generations: state.generation,
        evaluations: state.evaluations,
        initial_fitness,
        final_fitness: state.fitness,
        best_so_far: state.best_so_far,
        final_lambda: state.lambda_real,
        max_lambda,
        trace,
        profile,
    }
}
