//! Reference circuits with known desired states.
//!
//! Qubit `q` of a register maps to character `n − 1 − q` of outcome strings,
//! so a marked state `"110"` has qubits 1 and 2 set.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, GateKind, GateOp};
use crate::metrics::{MetricsError, StateSet};
use crate::sim::{outcome_label, parse_outcome};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgorithmError {
    #[error("invalid marked set: {0}")]
    InvalidMarked(String),
    #[error("invalid oracle: {0}")]
    InvalidOracle(String),
    #[error("{name} = {value} outside {min}..={max}")]
    OutOfRange {
        name: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Problem instance for the promise-problem builders. Bit `i` of an input
/// or mask is qubit `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleSpec {
    n: usize,
    kind: OracleKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleKind {
    /// `f(x) = bit` for all x.
    DjConstant(bool),
    /// `f(x) = 1` exactly on the onset, which holds half of all inputs.
    DjBalanced(BTreeSet<u64>),
    /// `f(x) = f(x')` iff `x' = x ⊕ mask`.
    Simon(u64),
}

impl OracleSpec {
    pub fn dj_constant(n: usize, bit: bool) -> Result<Self, AlgorithmError> {
        check_width(n)?;
        Ok(OracleSpec {
            n,
            kind: OracleKind::DjConstant(bit),
        })
    }

    pub fn dj_balanced(n: usize, onset: BTreeSet<u64>) -> Result<Self, AlgorithmError> {
        check_width(n)?;
        if onset.len() != 1 << (n - 1) {
            return Err(AlgorithmError::InvalidOracle(format!(
                "balanced onset has {} of the required {} inputs",
                onset.len(),
                1u64 << (n - 1)
            )));
        }
        if let Some(x) = onset.iter().find(|&&x| x >> n != 0) {
            return Err(AlgorithmError::InvalidOracle(format!(
                "input {x} exceeds {n} bits"
            )));
        }
        Ok(OracleSpec {
            n,
            kind: OracleKind::DjBalanced(onset),
        })
    }

    pub fn simon(n: usize, mask: u64) -> Result<Self, AlgorithmError> {
        check_width(n)?;
        if mask == 0 || mask >> n != 0 {
            return Err(AlgorithmError::InvalidOracle(format!(
                "Simon mask must be a non-zero {n}-bit string"
            )));
        }
        Ok(OracleSpec {
            n,
            kind: OracleKind::Simon(mask),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &OracleKind {
        &self.kind
    }
}

fn check_width(n: usize) -> Result<(), AlgorithmError> {
    if !(1..=20).contains(&n) {
        return Err(AlgorithmError::OutOfRange {
            name: "n",
            value: n,
            min: 1,
            max: 20,
        });
    }
    Ok(())
}

/// Phase flip of `|1…1>` on the given qubits.
fn push_mcz(qubits: &[usize], ops: &mut Vec<GateOp>) {
    match qubits {
        [] => {}
        [q] => ops.push(GateOp::z(*q)),
        [a, b] => ops.push(GateOp::cz(*a, *b)),
        [a, b, c] => ops.push(GateOp::ccz(*a, *b, *c)),
        [controls @ .., t] => {
            ops.push(GateOp::h(*t));
            ops.push(GateOp::mcx(controls.to_vec(), *t));
            ops.push(GateOp::h(*t));
        }
    }
}

/// Standard iteration count `⌊(π/4)·√(2^n / M)⌋`, at least 1.
pub fn grover_iterations(n: usize, marked: usize) -> usize {
    let ratio = (1u64 << n) as f64 / marked as f64;
    ((std::f64::consts::FRAC_PI_4 * ratio.sqrt()).floor() as usize).max(1)
}

/// Grover search over `n` qubits for the `marked` outcomes.
///
/// Returns the circuit (all qubits measured) and `DS = marked`.
pub fn grover_circuit(
    n: usize,
    marked: &StateSet,
    iterations: Option<usize>,
) -> Result<(Circuit, StateSet), AlgorithmError> {
    check_width(n)?;
    if marked.is_empty() || marked.len() >= 1 << n {
        return Err(AlgorithmError::InvalidMarked(format!(
            "need between 1 and {} marked states, got {}",
            (1u64 << n) - 1,
            marked.len()
        )));
    }
    if marked.width() != Some(n) {
        return Err(AlgorithmError::InvalidMarked(format!(
            "marked states must have {n} bits"
        )));
    }
    let iterations = iterations.unwrap_or_else(|| grover_iterations(n, marked.len()));
    if iterations == 0 {
        return Err(AlgorithmError::OutOfRange {
            name: "iterations",
            value: 0,
            min: 1,
            max: usize::MAX,
        });
    }
    let qubits: Vec<usize> = (0..n).collect();
    let targets: Vec<u64> = marked.iter().filter_map(parse_outcome).collect();

    let mut ops: Vec<GateOp> = qubits.iter().map(|&q| GateOp::h(q)).collect();
    for _ in 0..iterations {
        for &m in &targets {
            let zeros: Vec<usize> = qubits.iter().copied().filter(|q| m >> q & 1 == 0).collect();
            ops.extend(zeros.iter().map(|&q| GateOp::x(q)));
            push_mcz(&qubits, &mut ops);
            ops.extend(zeros.iter().map(|&q| GateOp::x(q)));
        }
        ops.extend(qubits.iter().map(|&q| GateOp::h(q)));
        ops.extend(qubits.iter().map(|&q| GateOp::x(q)));
        push_mcz(&qubits, &mut ops);
        ops.extend(qubits.iter().map(|&q| GateOp::x(q)));
        ops.extend(qubits.iter().map(|&q| GateOp::h(q)));
    }
    let circuit = Circuit::from_parts(n, ops, qubits)?;
    Ok((circuit, marked.clone()))
}

/// Deutsch-Jozsa with inputs on qubits `0..n` and the ancilla on qubit `n`.
///
/// The oracle acts by phase kickback on the ancilla prepared in `|->`. A
/// balanced onset is synthesized minterm by minterm: each member `x` is one
/// multi-controlled X conjugated by X on the inputs where `x` is 0.
/// Only the inputs are measured.
pub fn dj_circuit(oracle: &OracleSpec) -> Result<(Circuit, StateSet), AlgorithmError> {
    let n = oracle.n;
    let ancilla = n;
    let inputs: Vec<usize> = (0..n).collect();

    let mut ops = vec![GateOp::x(ancilla), GateOp::h(ancilla)];
    ops.extend(inputs.iter().map(|&q| GateOp::h(q)));
    let ds = match &oracle.kind {
        OracleKind::DjConstant(bit) => {
            if *bit {
                ops.push(GateOp::x(ancilla));
            }
            StateSet::new([outcome_label(0, n)])?
        }
        OracleKind::DjBalanced(onset) => {
            for &x in onset {
                let zeros: Vec<usize> =
                    inputs.iter().copied().filter(|q| x >> q & 1 == 0).collect();
                ops.extend(zeros.iter().map(|&q| GateOp::x(q)));
                ops.push(GateOp::mcx(inputs.clone(), ancilla));
                ops.extend(zeros.iter().map(|&q| GateOp::x(q)));
            }
            StateSet::new((1..1u64 << n).map(|y| outcome_label(y, n)))?
        }
        OracleKind::Simon(_) => {
            return Err(AlgorithmError::InvalidOracle(
                "Simon oracle given to Deutsch-Jozsa".into(),
            ))
        }
    };
    ops.extend(inputs.iter().map(|&q| GateOp::h(q)));
    Ok((Circuit::from_parts(n + 1, ops, inputs)?, ds))
}

/// Uniformly random balanced function on `n` inputs.
pub fn random_balanced_onset(n: usize, seed: u64) -> Result<OracleSpec, AlgorithmError> {
    check_width(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let onset = rand::seq::index::sample(&mut rng, 1 << n, 1 << (n - 1))
        .into_iter()
        .map(|x| x as u64)
        .collect();
    OracleSpec::dj_balanced(n, onset)
}

/// Outcomes `y` with `y·s ≡ 0 (mod 2)`.
pub fn simon_desired_states(n: usize, mask: u64) -> Result<StateSet, AlgorithmError> {
    let ds = (0..1u64 << n)
        .filter(|y| (y & mask).count_ones().is_multiple_of(2))
        .map(|y| outcome_label(y, n));
    Ok(StateSet::new(ds)?)
}

/// Simon's algorithm for a mask given as a bit string (qubit 0 rightmost).
///
/// Inputs live on qubits `0..n` and outputs on `n..2n`. The oracle copies
/// the input into the output register and then, controlled on the lowest set
/// bit `j` of the mask, XORs the mask into the output, so that
/// `f(x) = x ⊕ (x_j · s)`.
pub fn simon_circuit(mask: &str) -> Result<(Circuit, StateSet), AlgorithmError> {
    let bits = parse_outcome(mask)
        .ok_or_else(|| AlgorithmError::InvalidOracle(format!("`{mask}` is not a bit string")))?;
    let n = mask.len();
    let spec = OracleSpec::simon(n, bits)?;
    simon_from_spec(&spec)
}

pub fn simon_from_spec(spec: &OracleSpec) -> Result<(Circuit, StateSet), AlgorithmError> {
    let OracleKind::Simon(s) = spec.kind else {
        return Err(AlgorithmError::InvalidOracle(
            "expected a Simon oracle".into(),
        ));
    };
    let n = spec.n;
    let inputs: Vec<usize> = (0..n).collect();
    let mut ops: Vec<GateOp> = inputs.iter().map(|&q| GateOp::h(q)).collect();
    ops.extend(inputs.iter().map(|&q| GateOp::cx(q, n + q)));
    let j = s.trailing_zeros() as usize;
    ops.extend(
        (0..n)
            .filter(|k| s >> k & 1 == 1)
            .map(|k| GateOp::cx(j, n + k)),
    );
    ops.extend(inputs.iter().map(|&q| GateOp::h(q)));
    let circuit = Circuit::from_parts(2 * n, ops, inputs)?;
    Ok((circuit, simon_desired_states(n, s)?))
}

/// Random layered circuit over the elementary set, all qubits measured.
///
/// Each layer covers every qubit once: qubits are shuffled, then consumed
/// one at a time (a random single-qubit gate) or two at a time (a CX), the
/// choice being a fair coin while two or more qubits remain.
pub fn random_circuit(n: usize, depth: usize, seed: u64) -> Result<Circuit, AlgorithmError> {
    if !(2..=15).contains(&n) {
        return Err(AlgorithmError::OutOfRange {
            name: "qubits",
            value: n,
            min: 2,
            max: 15,
        });
    }
    if !(1..=5).contains(&depth) {
        return Err(AlgorithmError::OutOfRange {
            name: "depth",
            value: depth,
            min: 1,
            max: 5,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut ops = Vec::new();
    for _ in 0..depth {
        order.shuffle(&mut rng);
        let mut rest = order.as_slice();
        while let Some((&q, tail)) = rest.split_first() {
            if !tail.is_empty() && rng.gen_bool(0.5) {
                ops.push(GateOp::cx(q, tail[0]));
                rest = &tail[1..];
            } else {
                let kind = *GateKind::SINGLE_QUBIT.choose(&mut rng).expect("non-empty");
                ops.push(GateOp::single(kind, q));
                rest = tail;
            }
        }
    }
    Ok(Circuit::from_parts(n, ops, (0..n).collect())?)
}
