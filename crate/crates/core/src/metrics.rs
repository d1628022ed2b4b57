//! Bias, entropy and most-probable-state metrics and the diagnostic decision
//! tree built on them.
//!
//! Given the desired states `DS` of a correct program (its most probable
//! outcomes without noise), an observed distribution is summarized by
//!
//! * bias `β = Σ_{i ∉ DS} p_i`,
//! * Shannon entropy `S = −Σ p_i log2 p_i` in bits,
//! * `MPS(r)`, the outcomes within `r`% of the most likely one.
//!
//! Below the threshold noise level, noise spreads probability mass without
//! changing `MPS`, while a bug moves `MPS` away from `DS`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::Circuit;
use crate::sim::{self, parse_outcome, Distribution, Histogram, SimError};

/// Default `r` for [`mps`], in percent.
pub const DEFAULT_MPS_PERCENT: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("state length {found} does not match outcome width {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("state set is empty")]
    EmptyStateSet,
    #[error("`{0}` is not a bit string")]
    InvalidState(String),
    #[error("{0} must be at least 1")]
    ZeroArgument(&'static str),
    #[error("|DS| = {ds_size} exceeds 2^{n}")]
    DsExceedsSpace { ds_size: usize, n: usize },
    #[error("{name} must be positive and finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// A set of outcome bit strings of one common width.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct StateSet {
    states: BTreeSet<String>,
}

impl StateSet {
    pub fn new<I, S>(states: I) -> Result<Self, MetricsError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let states: BTreeSet<String> = states.into_iter().map(Into::into).collect();
        let mut width = None;
        for s in &states {
            if parse_outcome(s).is_none() {
                return Err(MetricsError::InvalidState(s.clone()));
            }
            match width {
                None => width = Some(s.len()),
                Some(w) if w != s.len() => {
                    return Err(MetricsError::LengthMismatch {
                        expected: w,
                        found: s.len(),
                    })
                }
                _ => {}
            }
        }
        Ok(StateSet { states })
    }

    /// Parses a comma-separated list such as `000,110`.
    pub fn parse_list(list: &str) -> Result<Self, MetricsError> {
        Self::new(list.split(',').map(str::trim).filter(|s| !s.is_empty()))
    }

    pub fn width(&self) -> Option<usize> {
        self.states.iter().next().map(String::len)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn contains(&self, state: &str) -> bool {
        self.states.contains(state)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.states.iter().map(String::as_str)
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.states.is_subset(&other.states)
    }
}

impl TryFrom<Vec<String>> for StateSet {
    type Error = MetricsError;

    fn try_from(v: Vec<String>) -> Result<Self, Self::Error> {
        StateSet::new(v)
    }
}

impl From<StateSet> for Vec<String> {
    fn from(s: StateSet) -> Self {
        s.states.into_iter().collect()
    }
}

impl fmt::Display for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.states.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            f.write_str(s)?;
        }
        write!(f, "}}")
    }
}

pub fn to_distribution(h: &Histogram) -> Distribution {
    let shots = h.shots() as f64;
    let probs = h
        .counts()
        .iter()
        .filter(|(_, &c)| c > 0)
        .map(|(k, &c)| (k.clone(), c as f64 / shots))
        .collect();
    Distribution::new(h.num_qubits_measured(), probs).expect("a valid histogram normalizes")
}

/// Shannon entropy in bits; zero-probability outcomes contribute nothing.
pub fn entropy(d: &Distribution) -> f64 {
    let s: f64 = d
        .iter()
        .filter(|&(_, p)| p > 0.0)
        .map(|(_, p)| -p * p.log2())
        .sum();
    // normalizes -0.0 from a point mass
    s + 0.0
}

/// Probability mass outside `ds`.
pub fn bias(d: &Distribution, ds: &StateSet) -> Result<f64, MetricsError> {
    check_width(d, ds)?;
    let outside: f64 = d
        .iter()
        .filter(|(k, _)| !ds.contains(k))
        .map(|(_, p)| p)
        .sum();
    Ok(outside.clamp(0.0, 1.0) + 0.0)
}

fn check_width(d: &Distribution, ds: &StateSet) -> Result<(), MetricsError> {
    match ds.width() {
        Some(w) if w != d.num_qubits_measured() => Err(MetricsError::LengthMismatch {
            expected: d.num_qubits_measured(),
            found: w,
        }),
        _ => Ok(()),
    }
}

/// Outcomes with `p_i ≥ (1 − r/100)·max_j p_j`; boundary states included.
pub fn mps(d: &Distribution, r: f64) -> StateSet {
    let max = d.iter().map(|(_, p)| p).fold(0.0, f64::max);
    let cutoff = (1.0 - r / 100.0) * max;
    let states = d
        .iter()
        .filter(|&(_, p)| p > 0.0 && p >= cutoff)
        .map(|(k, _)| k.to_string());
    StateSet {
        states: states.collect(),
    }
}

/// `MPS(5)` of the noise-free output of a reference circuit.
pub fn desired_states(circuit: &Circuit) -> Result<StateSet, MetricsError> {
    Ok(mps(
        &sim::exact_probabilities(circuit)?,
        DEFAULT_MPS_PERCENT,
    ))
}

/// Pessimistic threshold noise level `1 / ((|DS| + 1)·|G|)`.
pub fn threshold_pessimistic(ds_size: usize, gate_count: usize) -> Result<f64, MetricsError> {
    if ds_size == 0 {
        return Err(MetricsError::ZeroArgument("|DS|"));
    }
    if gate_count == 0 {
        return Err(MetricsError::ZeroArgument("|G|"));
    }
    Ok(1.0 / ((ds_size + 1) as f64 * gate_count as f64))
}

/// Average-case threshold noise level `(1 − |DS|/2^n) / |G|`.
///
/// `gate_count` may be fractional when averaged over a family of oracles.
pub fn threshold_average(n: usize, ds_size: usize, gate_count: f64) -> Result<f64, MetricsError> {
    if ds_size == 0 {
        return Err(MetricsError::ZeroArgument("|DS|"));
    }
    if !(gate_count.is_finite() && gate_count > 0.0) {
        return Err(MetricsError::InvalidParameter {
            name: "|G|",
            value: gate_count,
        });
    }
    let space = 2f64.powi(n as i32);
    if ds_size as f64 > space {
        return Err(MetricsError::DsExceedsSpace { ds_size, n });
    }
    Ok((1.0 - ds_size as f64 / space) / gate_count)
}

/// Both threshold estimates for one circuit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub pessimistic: f64,
    pub average: f64,
}

impl Thresholds {
    /// The pessimistic estimate needs an integral gate count; a fractional
    /// average is rounded up, which only lowers it.
    pub fn compute(n: usize, ds_size: usize, gate_count: f64) -> Result<Self, MetricsError> {
        let average = threshold_average(n, ds_size, gate_count)?;
        let pessimistic = threshold_pessimistic(ds_size, gate_count.ceil() as usize)?;
        Ok(Thresholds {
            pessimistic,
            average,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "No bugs, No noise")]
    NoBugsNoNoise,
    #[serde(rename = "No bugs, Noise Present")]
    NoBugsNoisePresent,
    #[serde(rename = "Bugs present")]
    BugsPresent,
    #[serde(rename = "Noise too high")]
    NoiseTooHigh,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::NoBugsNoNoise => "No bugs, No noise",
            Verdict::NoBugsNoisePresent => "No bugs, Noise Present",
            Verdict::BugsPresent => "Bugs present",
            Verdict::NoiseTooHigh => "Noise too high",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How "β ≈ 0", "S ≈ log2|DS|" and MPS closeness are operationalized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub tol_beta: f64,
    pub tol_entropy: f64,
    /// MPS window in percent.
    pub r: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_beta: 0.05,
            tol_entropy: 0.1,
            r: DEFAULT_MPS_PERCENT,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<(), MetricsError> {
        for (name, value) in [
            ("tol_beta", self.tol_beta),
            ("tol_entropy", self.tol_entropy),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(MetricsError::InvalidParameter { name, value });
            }
        }
        if !(0.0..=100.0).contains(&self.r) {
            return Err(MetricsError::InvalidParameter {
                name: "r",
                value: self.r,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub beta: f64,
    pub entropy: f64,
    pub mps: StateSet,
    pub ds: StateSet,
    pub noise_level: f64,
    pub threshold: f64,
    pub verdict: Verdict,
    pub tolerances: Tolerances,
    pub version: String,
}

impl DiagnosticReport {
    /// Re-derives the verdict from the stored fields alone.
    pub fn recompute_verdict(&self) -> Verdict {
        decide(
            self.noise_level,
            self.threshold,
            self.beta,
            self.entropy,
            self.mps == self.ds,
            self.ds.len(),
            &self.tolerances,
        )
    }
}

fn decide(
    noise_level: f64,
    threshold: f64,
    beta: f64,
    entropy: f64,
    mps_equals_ds: bool,
    ds_size: usize,
    tol: &Tolerances,
) -> Verdict {
    if noise_level >= threshold {
        Verdict::NoiseTooHigh
    } else if beta <= tol.tol_beta && (entropy - (ds_size as f64).log2()).abs() <= tol.tol_entropy {
        Verdict::NoBugsNoNoise
    } else if mps_equals_ds {
        Verdict::NoBugsNoisePresent
    } else {
        Verdict::BugsPresent
    }
}

/// Classifies an observed distribution against the desired states.
pub fn diagnose(
    d: &Distribution,
    ds: &StateSet,
    noise_level: f64,
    threshold: f64,
    tol: &Tolerances,
) -> Result<DiagnosticReport, MetricsError> {
    if ds.is_empty() {
        return Err(MetricsError::EmptyStateSet);
    }
    tol.validate()?;
    let beta = bias(d, ds)?;
    let entropy = entropy(d);
    let mps = mps(d, tol.r);
    let verdict = decide(
        noise_level,
        threshold,
        beta,
        entropy,
        mps == *ds,
        ds.len(),
        tol,
    );
    Ok(DiagnosticReport {
        beta,
        entropy,
        mps,
        ds: ds.clone(),
        noise_level,
        threshold,
        verdict,
        tolerances: *tol,
        version: env!("CARGO_PKG_VERSION").to_string(),
    })
}
