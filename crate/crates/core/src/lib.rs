//! Simulation of the self-adjusting (1,λ) EA, exact transition oracles for
//! ONEMAX and the experiment aggregations built on top of them.

pub mod controller;
pub mod ea;
pub mod error;
pub mod experiments;
pub mod fitness;
pub mod mutation;
pub mod rng;
pub mod theory;
pub mod trace;

pub use controller::{round_lambda, update_lambda, ControllerParams};
pub use ea::{
    generation_comma, generation_plus, run, AlgoState, AlgorithmKind, GenerationOutcome,
    Generator, RunRecord, RunSetup, StopCause, StoppingCondition,
};
pub use error::{Error, Result};
pub use fitness::{Fitness, FitnessFunction, FunctionKind, SearchPoint};
pub use mutation::{mutate, Mutator};
pub use rng::{derive_seed, rng_from_seed, SimRng};
pub use trace::{LevelProfile, TraceLevel, TraceRow};
