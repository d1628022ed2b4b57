//! Statevector simulation with shot sampling and depolarizing noise.
//!
//! The noisy path unravels the depolarizing channels into Pauli trajectories:
//! after each single-qubit gate one of X, Y, Z is applied with probability
//! `p1/3` each, and after each CX one of the 15 non-identity two-qubit Paulis
//! with probability `p2/15` each. The [`density`] module evolves the channels
//! exactly and serves as the reference for small registers.

pub mod density;
mod outcome;
mod statevector;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, GateKind};
use crate::rng::shot_rng;

pub use density::DensityMatrix;
pub use outcome::{outcome_label, parse_outcome, round_sig12, Distribution, Histogram};
pub use statevector::StateVector;

/// Largest register [`exact_probabilities`] and the samplers accept.
pub const MAX_STATEVECTOR_QUBITS: usize = 24;
/// Largest register [`exact_noisy_probabilities`] accepts.
pub const MAX_DENSITY_QUBITS: usize = 6;

const SHOT_CHUNK: u64 = 512;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("{qubits} qubits exceeds the simulator limit of {limit}")]
    TooManyQubits { qubits: usize, limit: usize },
    #[error("shot count must be positive")]
    ZeroShots,
    #[error("noise probability {0} outside [0, 1]")]
    InvalidNoise(f64),
    #[error("invalid histogram: {0}")]
    InvalidHistogram(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("measured width {found} differs from expected {expected}")]
    WidthMismatch { expected: usize, found: usize },
}

/// Per-arity total Pauli-error probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    p1: f64,
    p2: f64,
}

impl NoiseModel {
    pub fn new(p1: f64, p2: f64) -> Result<Self, SimError> {
        for p in [p1, p2] {
            if !(0.0..=1.0).contains(&p) {
                return Err(SimError::InvalidNoise(p));
            }
        }
        Ok(NoiseModel { p1, p2 })
    }

    /// Same error probability for single- and two-qubit gates.
    pub fn uniform(p: f64) -> Result<Self, SimError> {
        Self::new(p, p)
    }

    pub fn ideal() -> Self {
        NoiseModel { p1: 0.0, p2: 0.0 }
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    /// Single-qubit depolarizing parameter, `4·p1/3`.
    pub fn lambda1(&self) -> f64 {
        4.0 * self.p1 / 3.0
    }

    /// Two-qubit depolarizing parameter, `16·p2/15`.
    pub fn lambda2(&self) -> f64 {
        16.0 * self.p2 / 15.0
    }

    /// The largest per-gate error probability.
    pub fn noise_level(&self) -> f64 {
        self.p1.max(self.p2)
    }

    pub fn is_ideal(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0
    }
}

fn check_size(circuit: &Circuit, limit: usize) -> Result<(), SimError> {
    if circuit.num_qubits() > limit {
        return Err(SimError::TooManyQubits {
            qubits: circuit.num_qubits(),
            limit,
        });
    }
    circuit.require_measured()?;
    Ok(())
}

fn ideal_state(circuit: &Circuit) -> StateVector {
    let mut state = StateVector::zero(circuit.num_qubits());
    for op in circuit.ops() {
        state.apply(op);
    }
    state
}

/// Noise-free Born probabilities of the measured qubits.
///
/// Accepts undecomposed circuits: every gate kind has exact semantics here.
pub fn exact_probabilities(circuit: &Circuit) -> Result<Distribution, SimError> {
    check_size(circuit, MAX_STATEVECTOR_QUBITS)?;
    let dense = ideal_state(circuit).marginal_probabilities(circuit.measured());
    Distribution::from_dense(circuit.measured().len(), &dense)
}

/// Exact noisy output distribution by density-matrix evolution.
pub fn exact_noisy_probabilities(
    circuit: &Circuit,
    noise: &NoiseModel,
) -> Result<Distribution, SimError> {
    check_size(circuit, MAX_DENSITY_QUBITS)?;
    require_elementary(circuit)?;
    let mut rho = DensityMatrix::zero(circuit.num_qubits());
    for op in circuit.ops() {
        rho.apply_gate(op);
        if op.kind == GateKind::CX {
            rho.depolarize_2q(noise.lambda2(), op.controls[0], op.target);
        } else {
            rho.depolarize_1q(noise.lambda1(), op.target);
        }
    }
    let dense: Vec<f64> = rho
        .marginal_probabilities(circuit.measured())
        .into_iter()
        .map(|p| p.max(0.0))
        .collect();
    Distribution::from_dense(circuit.measured().len(), &dense)
}

fn require_elementary(circuit: &Circuit) -> Result<(), SimError> {
    circuit.gate_count()?;
    Ok(())
}

/// Samples single shots of one circuit under one noise model.
///
/// Every shot consumes one uniform draw per noisy gate (the same draw picks
/// whether a fault occurs and which Pauli) followed by one draw for the
/// measurement. Gates whose arity has zero error probability consume
/// nothing, so an ideal model reproduces [`run_ideal`] exactly. Shots without
/// any fault sample from the cached ideal distribution.
pub struct TrajectorySampler<'a> {
    circuit: &'a Circuit,
    noise: NoiseModel,
    ideal_cdf: OnceLock<Vec<(u64, f64)>>,
}

impl<'a> TrajectorySampler<'a> {
    pub fn new(circuit: &'a Circuit, noise: NoiseModel) -> Result<Self, SimError> {
        check_size(circuit, MAX_STATEVECTOR_QUBITS)?;
        if !noise.is_ideal() {
            require_elementary(circuit)?;
        }
        Ok(TrajectorySampler {
            circuit,
            noise,
            ideal_cdf: OnceLock::new(),
        })
    }

    pub fn circuit(&self) -> &Circuit {
        self.circuit
    }

    /// One shot; returns the outcome index over the measured qubits.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let faults = self.draw_faults(rng);
        let u: f64 = rng.gen();
        if faults.is_empty() {
            let cdf = self.ideal_cdf.get_or_init(|| {
                cumulative(
                    &ideal_state(self.circuit).marginal_probabilities(self.circuit.measured()),
                )
            });
            return pick(cdf, u);
        }
        let mut state = StateVector::zero(self.circuit.num_qubits());
        let mut next_fault = faults.iter().peekable();
        for (i, op) in self.circuit.ops().iter().enumerate() {
            state.apply(op);
            while let Some(&&(gate, code)) = next_fault.peek() {
                if gate != i {
                    break;
                }
                next_fault.next();
                if op.kind == GateKind::CX {
                    if let Some(m) = statevector::pauli(code & 3) {
                        state.apply_matrix(&m, op.controls[0]);
                    }
                    if let Some(m) = statevector::pauli(code >> 2) {
                        state.apply_matrix(&m, op.target);
                    }
                } else if let Some(m) = statevector::pauli(code) {
                    state.apply_matrix(&m, op.target);
                }
            }
        }
        pick(
            &cumulative(&state.marginal_probabilities(self.circuit.measured())),
            u,
        )
    }

    /// `(gate index, Pauli code)` for every injected fault of one shot.
    fn draw_faults<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<(usize, usize)> {
        let mut faults = Vec::new();
        for (i, op) in self.circuit.ops().iter().enumerate() {
            let (p, choices) = if op.kind == GateKind::CX {
                (self.noise.p2, 15)
            } else {
                (self.noise.p1, 3)
            };
            if p == 0.0 {
                continue;
            }
            let u: f64 = rng.gen();
            if u < p {
                let k = ((u / p * choices as f64) as usize).min(choices - 1);
                faults.push((i, k + 1));
            }
        }
        faults
    }
}

fn cumulative(dense: &[f64]) -> Vec<(u64, f64)> {
    let mut acc = 0.0;
    dense
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(i, &p)| {
            acc += p;
            (i as u64, acc)
        })
        .collect()
}

fn pick(cdf: &[(u64, f64)], u: f64) -> u64 {
    let total = cdf.last().map_or(1.0, |&(_, c)| c);
    let idx = cdf.partition_point(|&(_, c)| c <= u * total);
    cdf[idx.min(cdf.len() - 1)].0
}

/// Runs `shots` shots in parallel chunks; shot `i` always uses
/// `shot_rng(seed, i)`, so the result is independent of scheduling.
fn sample_shots<F>(width: usize, shots: u64, seed: u64, shot: F) -> Result<Histogram, SimError>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng, u64) -> Result<u64, SimError> + Sync,
{
    if shots == 0 {
        return Err(SimError::ZeroShots);
    }
    let chunks = shots.div_ceil(SHOT_CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut local: BTreeMap<u64, u64> = BTreeMap::new();
            let end = ((chunk + 1) * SHOT_CHUNK).min(shots);
            for i in chunk * SHOT_CHUNK..end {
                let mut rng = shot_rng(seed, i);
                *local.entry(shot(&mut rng, i)?).or_default() += 1;
            }
            Ok::<_, SimError>(local)
        })
        .try_reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            Ok(a)
        })?;
    Histogram::from_indexed(width, &counts)
}

/// Samples shots from the exact noise-free distribution.
pub fn run_ideal(circuit: &Circuit, shots: u64, seed: u64) -> Result<Histogram, SimError> {
    run_noisy(circuit, &NoiseModel::ideal(), shots, seed)
}

/// Samples shots with Pauli-trajectory depolarizing noise.
pub fn run_noisy(
    circuit: &Circuit,
    noise: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<Histogram, SimError> {
    let sampler = TrajectorySampler::new(circuit, *noise)?;
    let width = circuit.measured().len();
    sample_shots(width, shots, seed, |rng, _| Ok(sampler.sample(rng)))
}

/// Samples one shot from each of a family of circuits, shot `i` running
/// `build(i)`. Used for random-oracle aggregation where every shot sees a
/// fresh problem instance.
pub fn run_ensemble<F>(
    width: usize,
    build: F,
    noise: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<Histogram, SimError>
where
    F: Fn(u64) -> Result<Circuit, SimError> + Sync,
{
    sample_shots(width, shots, seed, |rng, i| {
        let circuit = build(i)?;
        if circuit.measured().len() != width {
            return Err(SimError::WidthMismatch {
                expected: width,
                found: circuit.measured().len(),
            });
        }
        Ok(TrajectorySampler::new(&circuit, *noise)?.sample(rng))
    })
}
