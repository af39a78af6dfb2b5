//! Pseudo-Boolean benchmark functions.
//!
//! Every function maps a [`SearchPoint`] to an exact integer [`Fitness`]. CLIFF
//! takes half-integer values, so its fitness is stored doubled; the other
//! functions use a scale of one. [`FitnessFunction::value`] converts back to
//! the real-valued fitness for reporting.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A fixed-length bit string that caches its number of one-bits.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SearchPoint {
    bits: Vec<bool>,
    ones: usize,
}

impl SearchPoint {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        let ones = bits.iter().filter(|&&b| b).count();
        SearchPoint { bits, ones }
    }

    pub fn all_zeros(n: usize) -> Self {
        SearchPoint {
            bits: vec![false; n],
            ones: 0,
        }
    }

    pub fn all_ones(n: usize) -> Self {
        SearchPoint {
            bits: vec![true; n],
            ones: n,
        }
    }

    /// `1^ones 0^(n - ones)`.
    pub fn prefix_ones(n: usize, ones: usize) -> Self {
        assert!(ones <= n, "prefix length {ones} exceeds n = {n}");
        let bits = (0..n).map(|k| k < ones).collect();
        SearchPoint { bits, ones }
    }

    /// Uniformly random point of length `n`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let bits: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
        Self::from_bits(bits)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.ones
    }

    pub fn count_zeros(&self) -> usize {
        self.bits.len() - self.ones
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, index: usize) -> bool {
        self.bits[index]
    }

    pub fn flip(&mut self, index: usize) {
        let bit = &mut self.bits[index];
        *bit = !*bit;
        if *bit {
            self.ones += 1;
        } else {
            self.ones -= 1;
        }
    }

    /// Flips every listed position. Positions must be distinct.
    pub fn apply_flips(&mut self, positions: &[usize]) {
        for &p in positions {
            self.flip(p);
        }
    }

    /// Number of ones after flipping `positions`, without modifying `self`.
    pub fn ones_after_flips(&self, positions: &[usize]) -> usize {
        let mut ones = self.ones as isize;
        for &p in positions {
            ones += if self.bits[p] { -1 } else { 1 };
        }
        ones as usize
    }

    /// Whether the point has the shape `1^i 0^(n-i)` for some `i` in `0..=n`.
    pub fn is_prefix_of_ones(&self) -> bool {
        self.bits[..self.ones].iter().all(|&b| b)
    }

    pub fn hamming_distance(&self, other: &SearchPoint) -> usize {
        assert_eq!(self.len(), other.len());
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
    }
}

impl FromStr for SearchPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::invalid(
                    "search point",
                    format!("unexpected character {other:?}"),
                )),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SearchPoint::from_bits(bits))
    }
}

impl fmt::Display for SearchPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Exact fitness in the owning function's internal units (see
/// [`FitnessFunction::scale`]).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fitness(pub i64);

impl Fitness {
    pub fn raw(self) -> i64 {
        self.0
    }
}

/// Which benchmark, with its parameter, independent of `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FunctionKind {
    OneMax,
    ZeroMax,
    TwoMax,
    Jump(usize),
    Cliff(usize),
    Ridge,
}

impl FromStr for FunctionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let parse_param = |p: &str| {
            p.parse::<usize>()
                .map_err(|_| Error::UnknownFunction(s.to_string()))
        };
        match lower.split_once(':') {
            None => match lower.as_str() {
                "onemax" => Ok(FunctionKind::OneMax),
                "zeromax" => Ok(FunctionKind::ZeroMax),
                "twomax" => Ok(FunctionKind::TwoMax),
                "ridge" => Ok(FunctionKind::Ridge),
                _ => Err(Error::UnknownFunction(s.to_string())),
            },
            Some(("jump", k)) => Ok(FunctionKind::Jump(parse_param(k)?)),
            Some(("cliff", d)) => Ok(FunctionKind::Cliff(parse_param(d)?)),
            Some(_) => Err(Error::UnknownFunction(s.to_string())),
        }
    }
}

impl TryFrom<String> for FunctionKind {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        value.parse()
    }
}

impl From<FunctionKind> for String {
    fn from(kind: FunctionKind) -> String {
        kind.to_string()
    }
}

impl fmt::Display for FunctionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionKind::OneMax => write!(f, "onemax"),
            FunctionKind::ZeroMax => write!(f, "zeromax"),
            FunctionKind::TwoMax => write!(f, "twomax"),
            FunctionKind::Jump(k) => write!(f, "jump:{k}"),
            FunctionKind::Cliff(d) => write!(f, "cliff:{d}"),
            FunctionKind::Ridge => write!(f, "ridge"),
        }
    }
}

/// A benchmark instantiated for a problem size `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitnessFunction {
    kind: FunctionKind,
    n: usize,
    optimum: Fitness,
}

impl FitnessFunction {
    pub fn new(kind: FunctionKind, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "problem size must be at least 1"));
        }
        match kind {
            FunctionKind::Jump(k) if k == 0 || k >= n => {
                return Err(Error::invalid(
                    "jump",
                    format!("gap size k = {k} must satisfy 1 <= k < n = {n}"),
                ))
            }
            FunctionKind::Cliff(d) if d == 0 || d >= n => {
                return Err(Error::invalid(
                    "cliff",
                    format!("cliff position d = {d} must satisfy 1 <= d < n = {n}"),
                ))
            }
            _ => {}
        }
        let mut function = FitnessFunction {
            kind,
            n,
            optimum: Fitness(0),
        };
        function.optimum = match kind {
            FunctionKind::Ridge => Fitness(2 * n as i64),
            // For cliff with d >= n/2 the local optimum at |x|_1 = d beats 1^n,
            // so the maximum is taken over all ones-counts.
            _ => (0..=n)
                .map(|ones| function.from_ones(ones).expect("ones-based kind"))
                .max()
                .expect("n >= 1"),
        };
        Ok(function)
    }

    pub fn onemax(n: usize) -> Self {
        Self::new(FunctionKind::OneMax, n).expect("n >= 1")
    }

    pub fn kind(&self) -> FunctionKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Internal units per fitness unit: 2 for CLIFF, 1 otherwise.
    pub fn scale(&self) -> i64 {
        match self.kind {
            FunctionKind::Cliff(_) => 2,
            _ => 1,
        }
    }

    /// Whether the fitness is a function of `|x|_1` alone.
    pub fn depends_only_on_ones(&self) -> bool {
        !matches!(self.kind, FunctionKind::Ridge)
    }

    /// Fitness of any point with `ones` one-bits; `None` for RIDGE, which
    /// also depends on bit positions.
    pub fn from_ones(&self, ones: usize) -> Option<Fitness> {
        let n = self.n as i64;
        let ones = ones as i64;
        let raw = match self.kind {
            FunctionKind::OneMax => ones,
            FunctionKind::ZeroMax => n - ones,
            FunctionKind::TwoMax => ones.max(n - ones),
            FunctionKind::Jump(k) => {
                let k = k as i64;
                if n - k < ones && ones < n {
                    n - ones
                } else {
                    k + ones
                }
            }
            FunctionKind::Cliff(d) => {
                let d = d as i64;
                if ones <= d {
                    2 * ones
                } else {
                    2 * (ones - d) + 1
                }
            }
            FunctionKind::Ridge => return None,
        };
        Some(Fitness(raw))
    }

    pub fn evaluate(&self, x: &SearchPoint) -> Fitness {
        debug_assert_eq!(x.len(), self.n);
        match self.kind {
            FunctionKind::Ridge => {
                if x.is_prefix_of_ones() {
                    Fitness((self.n + x.count_ones()) as i64)
                } else {
                    Fitness(x.count_zeros() as i64)
                }
            }
            _ => self.from_ones(x.count_ones()).expect("ones-based kind"),
        }
    }

    pub fn optimum(&self) -> Fitness {
        self.optimum
    }

    pub fn is_optimum(&self, fitness: Fitness) -> bool {
        fitness >= self.optimum
    }

    /// Real-valued fitness.
    pub fn value(&self, fitness: Fitness) -> f64 {
        fitness.0 as f64 / self.scale() as f64
    }

    /// Smallest internal fitness whose value is at least `target`.
    pub fn fitness_at_least(&self, target: f64) -> Fitness {
        Fitness((target * self.scale() as f64 - 1e-9).ceil() as i64)
    }
}

pub fn one_max(x: &SearchPoint) -> i64 {
    x.count_ones() as i64
}

pub fn zero_max(x: &SearchPoint) -> i64 {
    x.count_zeros() as i64
}

pub fn two_max(x: &SearchPoint) -> i64 {
    one_max(x).max(zero_max(x))
}

pub fn jump(x: &SearchPoint, k: usize) -> Result<i64> {
    let f = FitnessFunction::new(FunctionKind::Jump(k), x.len())?;
    Ok(f.evaluate(x).raw())
}

/// CLIFF value as a real number (half-integers past the cliff).
pub fn cliff(x: &SearchPoint, d: usize) -> Result<f64> {
    let f = FitnessFunction::new(FunctionKind::Cliff(d), x.len())?;
    Ok(f.value(f.evaluate(x)))
}

pub fn ridge(x: &SearchPoint) -> i64 {
    FitnessFunction::new(FunctionKind::Ridge, x.len().max(1))
        .map(|f| f.evaluate(x).raw())
        .unwrap_or(0)
}
