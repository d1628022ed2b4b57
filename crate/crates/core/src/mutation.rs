//! Single-edit mutants (add, remove or replace one gate) and corpus studies
//! of how those edits move bias and entropy.

use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{decompose, Circuit, CircuitError, GateKind, GateOp};
use crate::metrics::{self, MetricsError, StateSet};
use crate::rng::derive_seed;
use crate::sim::{self, NoiseModel, SimError};

/// Pauli, Hadamard, phase gates and CX.
pub const DEFAULT_POOL: [GateKind; 7] = [
    GateKind::X,
    GateKind::Y,
    GateKind::Z,
    GateKind::H,
    GateKind::S,
    GateKind::T,
    GateKind::CX,
];

/// Entropy-histogram bin width, in bits.
pub const ENTROPY_BIN_WIDTH: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MutationError {
    #[error("{0} cannot be used in a mutation pool; only one- and two-qubit gates are allowed")]
    UnsupportedPoolGate(GateKind),
    #[error("mutation pool is empty")]
    EmptyPool,
    #[error("edit position {position} invalid for a circuit of {len} gates")]
    BadPosition { position: usize, len: usize },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MutationEdit {
    /// Insert `gate` so that it becomes op number `position`.
    Add {
        position: usize,
        gate: GateOp,
    },
    Remove {
        position: usize,
    },
    Replace {
        position: usize,
        gate: GateOp,
    },
}

impl MutationEdit {
    pub fn kind_name(&self) -> &'static str {
        match self {
            MutationEdit::Add { .. } => "add",
            MutationEdit::Remove { .. } => "remove",
            MutationEdit::Replace { .. } => "replace",
        }
    }

    pub fn position(&self) -> usize {
        match self {
            MutationEdit::Add { position, .. }
            | MutationEdit::Remove { position }
            | MutationEdit::Replace { position, .. } => *position,
        }
    }

    pub fn gate(&self) -> Option<&GateOp> {
        match self {
            MutationEdit::Add { gate, .. } | MutationEdit::Replace { gate, .. } => Some(gate),
            MutationEdit::Remove { .. } => None,
        }
    }

    pub fn apply(&self, circuit: &Circuit) -> Result<Circuit, MutationError> {
        let len = circuit.len();
        let mut ops = circuit.ops().to_vec();
        match self {
            MutationEdit::Add { position, gate } if *position <= len => {
                ops.insert(*position, gate.clone())
            }
            MutationEdit::Remove { position } if *position < len => {
                ops.remove(*position);
            }
            MutationEdit::Replace { position, gate } if *position < len => {
                if ops[*position].arity() != gate.arity() {
                    return Err(MutationError::BadPosition {
                        position: *position,
                        len,
                    });
                }
                ops[*position] = gate.clone();
            }
            other => {
                return Err(MutationError::BadPosition {
                    position: other.position(),
                    len,
                })
            }
        }
        Ok(circuit.with_ops(ops)?)
    }
}

impl fmt::Display for MutationEdit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.gate() {
            Some(g) => write!(f, "{}@{} {}", self.kind_name(), self.position(), g),
            None => write!(f, "{}@{}", self.kind_name(), self.position()),
        }
    }
}

fn validate_pool(pool: &[GateKind]) -> Result<(), MutationError> {
    if pool.is_empty() {
        return Err(MutationError::EmptyPool);
    }
    match pool
        .iter()
        .find(|k| k.fixed_controls().is_none_or(|c| c > 1))
    {
        Some(k) => Err(MutationError::UnsupportedPoolGate(*k)),
        None => Ok(()),
    }
}

/// Every placement of `kind` on the register.
fn placements(kind: GateKind, num_qubits: usize) -> Vec<GateOp> {
    if kind.is_single_qubit() {
        (0..num_qubits).map(|q| GateOp::single(kind, q)).collect()
    } else {
        let mut out = Vec::new();
        for c in 0..num_qubits {
            for t in (0..num_qubits).filter(|&t| t != c) {
                out.push(GateOp {
                    kind,
                    controls: vec![c],
                    target: t,
                });
            }
        }
        out
    }
}

/// The full single-edit space in canonical order: adds, removes, replaces.
///
/// Replacements keep the arity and the qubit set of the replaced gate (both
/// orientations for two-qubit gates); replacing a gate by itself is excluded.
pub fn enumerate_edits(
    circuit: &Circuit,
    pool: &[GateKind],
) -> Result<Vec<MutationEdit>, MutationError> {
    validate_pool(pool)?;
    let n = circuit.num_qubits();
    let mut edits = Vec::new();
    for position in 0..=circuit.len() {
        for &kind in pool {
            for gate in placements(kind, n) {
                edits.push(MutationEdit::Add { position, gate });
            }
        }
    }
    edits.extend((0..circuit.len()).map(|position| MutationEdit::Remove { position }));
    for (position, op) in circuit.ops().iter().enumerate() {
        for &kind in pool
            .iter()
            .filter(|k| k.fixed_controls() == Some(op.controls.len()))
        {
            let candidates = match op.controls.as_slice() {
                [] => vec![GateOp::single(kind, op.target)],
                [c] => vec![
                    GateOp {
                        kind,
                        controls: vec![*c],
                        target: op.target,
                    },
                    GateOp {
                        kind,
                        controls: vec![op.target],
                        target: *c,
                    },
                ],
                _ => vec![],
            };
            edits.extend(
                candidates
                    .into_iter()
                    .filter(|g| g != op)
                    .map(|gate| MutationEdit::Replace { position, gate }),
            );
        }
    }
    Ok(edits)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mutant {
    pub id: usize,
    pub edit: MutationEdit,
    pub circuit: Circuit,
}

/// Samples `count` distinct single-edit mutants uniformly from the edit
/// space; returns the whole space when it has at most `count` edits.
pub fn generate_mutants(
    circuit: &Circuit,
    count: usize,
    pool: &[GateKind],
    seed: u64,
) -> Result<Vec<Mutant>, MutationError> {
    if circuit.is_empty() {
        log::warn!("circuit has no gates; only add mutants can be generated");
    }
    let edits = enumerate_edits(circuit, pool)?;
    let chosen: Vec<usize> = if count >= edits.len() {
        (0..edits.len()).collect()
    } else {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut idx = rand::seq::index::sample(&mut rng, edits.len(), count).into_vec();
        idx.sort_unstable();
        idx
    };
    chosen
        .into_iter()
        .enumerate()
        .map(|(id, i)| {
            let edit = edits[i].clone();
            Ok(Mutant {
                id,
                circuit: edit.apply(circuit)?,
                edit,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutantRecord {
    pub id: usize,
    pub edit: MutationEdit,
    pub circuit: Circuit,
    pub bias: f64,
    /// `bias` minus the unmutated circuit's bias under the same noise.
    pub delta_bias: f64,
    pub entropy: f64,
    pub mps_equals_ds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineRow {
    pub bias: f64,
    pub entropy: f64,
    pub mps_equals_ds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyHistogram {
    pub bin_width: f64,
    /// `counts[k]` mutants had entropy in `[k·w, (k+1)·w)`; the last bin is
    /// closed on the right.
    pub counts: Vec<usize>,
}

impl EntropyHistogram {
    fn build(max_entropy: f64, values: impl Iterator<Item = f64>) -> Self {
        let bins = ((max_entropy / ENTROPY_BIN_WIDTH).round() as usize).max(1);
        let mut counts = vec![0; bins];
        for v in values {
            let k = ((v / ENTROPY_BIN_WIDTH).floor().max(0.0) as usize).min(bins - 1);
            counts[k] += 1;
        }
        EntropyHistogram {
            bin_width: ENTROPY_BIN_WIDTH,
            counts,
        }
    }

    pub fn bin_center(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.bin_width
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub baseline: BaselineRow,
    pub records: Vec<MutantRecord>,
    pub entropy_histogram: EntropyHistogram,
}

impl StudyReport {
    /// Bias table with a leading baseline row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "mutant_id,edit_kind,position,gate,bias,delta_bias,entropy,mps_equals_ds\n",
        );
        let b = &self.baseline;
        let _ = writeln!(
            out,
            "baseline,none,,,{},0,{},{}",
            b.bias, b.entropy, b.mps_equals_ds
        );
        for r in &self.records {
            let gate = r.edit.gate().map(ToString::to_string).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.id,
                r.edit.kind_name(),
                r.edit.position(),
                gate,
                r.bias,
                r.delta_bias,
                r.entropy,
                r.mps_equals_ds
            );
        }
        out
    }
}

struct Measured {
    bias: f64,
    entropy: f64,
    mps_equals_ds: bool,
}

fn measure(
    circuit: &Circuit,
    ds: &StateSet,
    noise: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<Measured, MutationError> {
    let hist = sim::run_noisy(&decompose(circuit), noise, shots, seed)?;
    let d = metrics::to_distribution(&hist);
    Ok(Measured {
        bias: metrics::bias(&d, ds)?,
        entropy: metrics::entropy(&d),
        mps_equals_ds: metrics::mps(&d, metrics::DEFAULT_MPS_PERCENT) == *ds,
    })
}

/// Runs the unmutated circuit and every mutant under `noise`.
///
/// The baseline uses `derive_seed(seed, 0)` and mutant `i` of the slice uses
/// `derive_seed(seed, i + 1)`; mutants are evaluated in parallel.
pub fn mutant_study(
    circuit: &Circuit,
    ds: &StateSet,
    noise: &NoiseModel,
    mutants: &[Mutant],
    shots: u64,
    seed: u64,
) -> Result<StudyReport, MutationError> {
    let base = measure(circuit, ds, noise, shots, derive_seed(seed, 0))?;
    let records = mutants
        .par_iter()
        .enumerate()
        .map(|(i, m)| {
            let r = measure(
                &m.circuit,
                ds,
                noise,
                shots,
                derive_seed(seed, i as u64 + 1),
            )?;
            Ok(MutantRecord {
                id: m.id,
                edit: m.edit.clone(),
                circuit: m.circuit.clone(),
                bias: r.bias,
                delta_bias: r.bias - base.bias,
                entropy: r.entropy,
                mps_equals_ds: r.mps_equals_ds,
            })
        })
        .collect::<Result<Vec<_>, MutationError>>()?;
    let width = circuit.measured().len() as f64;
    let entropy_histogram = EntropyHistogram::build(width, records.iter().map(|r| r.entropy));
    Ok(StudyReport {
        baseline: BaselineRow {
            bias: base.bias,
            entropy: base.entropy,
            mps_equals_ds: base.mps_equals_ds,
        },
        records,
        entropy_histogram,
    })
}
