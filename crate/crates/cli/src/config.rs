//! Flat JSON configuration merged from presets, a config file and flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use selfadj_core::experiments::AlgorithmSpec;
use selfadj_core::theory::{BandLog, GainMode};
use selfadj_core::{FunctionKind, TraceLevel};

use crate::error::CliError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "SELFADJ_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "results";

/// A single value or a list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

impl<T> From<Vec<T>> for OneOrMany<T> {
    fn from(mut v: Vec<T>) -> Self {
        if v.len() == 1 {
            OneOrMany::One(v.pop().expect("one element"))
        } else {
            OneOrMany::Many(v)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PotentialKind {
    G1,
    G2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GainChoice {
    Raw,
    Capped,
    Both,
}

impl GainChoice {
    pub fn modes(self) -> Vec<GainMode> {
        match self {
            GainChoice::Raw => vec![GainMode::Raw],
            GainChoice::Capped => vec![GainMode::Capped],
            GainChoice::Both => vec![GainMode::Raw, GainMode::Capped],
        }
    }
}

/// Every configurable key. Absent keys fall back to the next layer.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<OneOrMany<AlgorithmSpec>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub function: Option<FunctionKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<OneOrMany<usize>>,
    #[serde(
        rename = "F",
        alias = "update_strength",
        skip_serializing_if = "Option::is_none"
    )]
    pub update_strength: Option<f64>,
    #[serde(alias = "success_rate", skip_serializing_if = "Option::is_none")]
    pub s: Option<OneOrMany<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub static_lambda: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runs: Option<usize>,
    /// Generation cap as a multiple of n; 0 disables it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gen_cap_multiplier: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eval_cap: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stop_on_optimum: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceLevel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gain: Option<GainChoice>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub band_log: Option<BandLog>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($field:ident),*) => {
        $(if $top.$field.is_some() { $base.$field = $top.$field; })*
    };
}

impl Config {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config `{}`: {e}", path.display()))
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("config `{}`: {e}", path.display())))
    }

    /// Keys set in `top` replace those in `self`.
    pub fn overlay(mut self, top: Config) -> Self {
        overlay!(
            self,
            top,
            algorithm,
            function,
            n,
            update_strength,
            s,
            lambda0,
            static_lambda,
            seed,
            runs,
            gen_cap_multiplier,
            eval_cap,
            stop_on_optimum,
            trace,
            output,
            targets,
            r,
            potential,
            gain,
            band_log,
            lambdas,
            a,
            b
        );
        self
    }

    /// Fills the documented defaults.
    pub fn with_defaults(self) -> Self {
        let defaults = Config {
            algorithm: Some(OneOrMany::One(AlgorithmSpec::Fixed(
                selfadj_core::AlgorithmKind::SelfAdjustingComma,
            ))),
            function: Some(FunctionKind::OneMax),
            update_strength: Some(1.5),
            lambda0: Some(1.0),
            seed: Some(0),
            runs: Some(1),
            gen_cap_multiplier: Some(500),
            stop_on_optimum: Some(true),
            trace: Some(TraceLevel::Summary),
            output: Some(default_out_dir()),
            ..Config::default()
        };
        defaults.overlay(self)
    }

    pub fn require<T: Clone>(value: &Option<T>, key: &str) -> Result<T, CliError> {
        value
            .clone()
            .ok_or_else(|| CliError::Config(format!("missing required key `{key}`")))
    }

    pub fn ns(&self) -> Result<Vec<usize>, CliError> {
        Ok(Self::require(&self.n, "n")?.to_vec())
    }

    pub fn ss(&self) -> Result<Vec<f64>, CliError> {
        Ok(Self::require(&self.s, "s")?.to_vec())
    }

    pub fn first_n(&self) -> Result<usize, CliError> {
        single(self.ns()?, "n")
    }

    pub fn first_s(&self) -> Result<f64, CliError> {
        single(self.ss()?, "s")
    }

    /// Configured algorithms with `static_lambda` applied to `static`.
    pub fn algorithms(&self) -> Result<Vec<AlgorithmSpec>, CliError> {
        let algos = Self::require(&self.algorithm, "algorithm")?.to_vec();
        Ok(algos
            .into_iter()
            .map(|a| match (a, self.static_lambda) {
                (AlgorithmSpec::StaticAuto, Some(l)) => {
                    AlgorithmSpec::Fixed(selfadj_core::AlgorithmKind::StaticComma(l))
                }
                (a, _) => a,
            })
            .collect())
    }

    pub fn out_dir(&self) -> PathBuf {
        self.output.clone().unwrap_or_else(default_out_dir)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serialises")
    }
}

fn single<T: Copy>(values: Vec<T>, key: &str) -> Result<T, CliError> {
    match values.as_slice() {
        [v] => Ok(*v),
        _ => Err(CliError::Config(format!(
            "`{key}` must be a single value for this subcommand"
        ))),
    }
}

pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let err = serde_json::from_str::<Config>(r#"{"n": 10, "colour": 3}"#).unwrap_err();
        assert!(err.to_string().contains("colour"));
    }

    #[test]
    fn scalars_and_lists() {
        let c: Config =
            serde_json::from_str(r#"{"n": [10, 20], "s": 1, "F": 2.0, "algorithm": "static"}"#)
                .unwrap();
        assert_eq!(c.ns().unwrap(), vec![10, 20]);
        assert_eq!(c.first_s().unwrap(), 1.0);
        assert_eq!(c.update_strength, Some(2.0));
        assert!(c.first_n().is_err());
    }

    #[test]
    fn overlay_and_defaults() {
        let file: Config = serde_json::from_str(r#"{"n": 10, "runs": 4}"#).unwrap();
        let flags = Config {
            runs: Some(9),
            ..Config::default()
        };
        let c = file.overlay(flags).with_defaults();
        assert_eq!(c.runs, Some(9));
        assert_eq!(c.update_strength, Some(1.5));
        assert_eq!(c.gen_cap_multiplier, Some(500));
        assert_eq!(c.trace, Some(TraceLevel::Summary));
        assert_eq!(c.lambda0, Some(1.0));
        assert_eq!(c.stop_on_optimum, Some(true));
    }

    #[test]
    fn static_lambda_overrides_auto() {
        let c: Config =
            serde_json::from_str(r#"{"algorithm": ["static", "comma"], "static_lambda": 7}"#)
                .unwrap();
        let algos = c.algorithms().unwrap();
        assert_eq!(algos[0].to_string(), "static:7");
        assert_eq!(algos[1].to_string(), "comma");
    }
}
