//! Gate-level circuit representation.
//!
//! A [`Circuit`] is an immutable value: every edit produces a new circuit, so
//! circuits can be shared freely between threads and mutant corpora without
//! any bookkeeping. Measurement is terminal and is recorded as the ordered
//! list of measured qubits rather than as an operation.

mod decompose;
mod text;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use decompose::decompose;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("a circuit needs at least one qubit")]
    ZeroQubits,
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit circuit")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("qubit {qubit} appears more than once in a single gate")]
    DuplicateQubit { qubit: usize },
    #[error("{kind} does not accept {controls} control qubit(s)")]
    ArityMismatch { kind: GateKind, controls: usize },
    #[error("circuit contains non-elementary gate {kind}; decompose it first")]
    NotDecomposed { kind: GateKind },
    #[error("circuit has no measured qubits")]
    NoMeasuredQubits,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Gate kinds understood by the IR.
///
/// `MCX` carries its control count implicitly in [`GateOp::controls`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    CX,
    CZ,
    CCX,
    CCZ,
    MCX,
}

impl GateKind {
    pub const ALL: [GateKind; 13] = [
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::CX,
        GateKind::CZ,
        GateKind::CCX,
        GateKind::CCZ,
        GateKind::MCX,
    ];

    /// Single-qubit kinds of the elementary set.
    pub const SINGLE_QUBIT: [GateKind; 8] = [
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
    ];

    /// Member of the elementary set {H, X, Y, Z, S, Sdg, T, Tdg, CX}.
    pub fn is_elementary(self) -> bool {
        !matches!(
            self,
            GateKind::CZ | GateKind::CCX | GateKind::CCZ | GateKind::MCX
        )
    }

    pub fn is_single_qubit(self) -> bool {
        self.fixed_controls() == Some(0)
    }

    /// Number of controls a kind requires, `None` for `MCX`.
    pub fn fixed_controls(self) -> Option<usize> {
        match self {
            GateKind::CX | GateKind::CZ => Some(1),
            GateKind::CCX | GateKind::CCZ => Some(2),
            GateKind::MCX => None,
            _ => Some(0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::S => "S",
            GateKind::Sdg => "SDG",
            GateKind::T => "T",
            GateKind::Tdg => "TDG",
            GateKind::CX => "CX",
            GateKind::CZ => "CZ",
            GateKind::CCX => "CCX",
            GateKind::CCZ => "CCZ",
            GateKind::MCX => "MCX",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        let upper = name.to_ascii_uppercase();
        GateKind::ALL.into_iter().find(|k| k.name() == upper)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One gate application. Every kind has exactly one target.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GateOp {
    pub kind: GateKind,
    pub controls: Vec<usize>,
    pub target: usize,
}

impl GateOp {
    pub fn single(kind: GateKind, qubit: usize) -> Self {
        GateOp {
            kind,
            controls: Vec::new(),
            target: qubit,
        }
    }

    pub fn h(q: usize) -> Self {
        Self::single(GateKind::H, q)
    }

    pub fn x(q: usize) -> Self {
        Self::single(GateKind::X, q)
    }

    pub fn y(q: usize) -> Self {
        Self::single(GateKind::Y, q)
    }

    pub fn z(q: usize) -> Self {
        Self::single(GateKind::Z, q)
    }

    pub fn s(q: usize) -> Self {
        Self::single(GateKind::S, q)
    }

    pub fn sdg(q: usize) -> Self {
        Self::single(GateKind::Sdg, q)
    }

    pub fn t(q: usize) -> Self {
        Self::single(GateKind::T, q)
    }

    pub fn tdg(q: usize) -> Self {
        Self::single(GateKind::Tdg, q)
    }

    pub fn cx(control: usize, target: usize) -> Self {
        GateOp {
            kind: GateKind::CX,
            controls: vec![control],
            target,
        }
    }

    pub fn cz(control: usize, target: usize) -> Self {
        GateOp {
            kind: GateKind::CZ,
            controls: vec![control],
            target,
        }
    }

    pub fn ccx(c0: usize, c1: usize, target: usize) -> Self {
        GateOp {
            kind: GateKind::CCX,
            controls: vec![c0, c1],
            target,
        }
    }

    pub fn ccz(c0: usize, c1: usize, target: usize) -> Self {
        GateOp {
            kind: GateKind::CCZ,
            controls: vec![c0, c1],
            target,
        }
    }

    /// Multi-controlled X, normalized to the smallest fitting kind
    /// (no controls is a plain X, one is CX, two is CCX).
    pub fn mcx(controls: Vec<usize>, target: usize) -> Self {
        let kind = match controls.len() {
            0 => GateKind::X,
            1 => GateKind::CX,
            2 => GateKind::CCX,
            _ => GateKind::MCX,
        };
        GateOp {
            kind,
            controls,
            target,
        }
    }

    /// Controls followed by the target.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.controls
            .iter()
            .copied()
            .chain(std::iter::once(self.target))
    }

    pub fn arity(&self) -> usize {
        self.controls.len() + 1
    }

    pub fn touches(&self, q: usize) -> bool {
        self.target == q || self.controls.contains(&q)
    }

    /// Checks arity, index range and index distinctness.
    pub fn validate(&self, num_qubits: usize) -> Result<(), CircuitError> {
        let arity_ok = match self.kind.fixed_controls() {
            Some(k) => self.controls.len() == k,
            None => self.controls.len() >= 3,
        };
        if !arity_ok {
            return Err(CircuitError::ArityMismatch {
                kind: self.kind,
                controls: self.controls.len(),
            });
        }
        let mut seen = Vec::with_capacity(self.arity());
        for q in self.qubits() {
            if q >= num_qubits {
                return Err(CircuitError::QubitOutOfRange {
                    qubit: q,
                    num_qubits,
                });
            }
            if seen.contains(&q) {
                return Err(CircuitError::DuplicateQubit { qubit: q });
            }
            seen.push(q);
        }
        Ok(())
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for q in self.qubits() {
            write!(f, " {q}")?;
        }
        Ok(())
    }
}

/// Number of non-measurement elementary gates, `|G|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GateCount(pub usize);

impl GateCount {
    pub fn total(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Circuit {
    num_qubits: usize,
    ops: Vec<GateOp>,
    measured: Vec<usize>,
}

impl Circuit {
    /// An empty circuit with no measured qubits.
    pub fn new(num_qubits: usize) -> Result<Self, CircuitError> {
        if num_qubits == 0 {
            return Err(CircuitError::ZeroQubits);
        }
        Ok(Circuit {
            num_qubits,
            ops: Vec::new(),
            measured: Vec::new(),
        })
    }

    pub fn from_parts(
        num_qubits: usize,
        ops: Vec<GateOp>,
        measured: Vec<usize>,
    ) -> Result<Self, CircuitError> {
        if num_qubits == 0 {
            return Err(CircuitError::ZeroQubits);
        }
        for op in &ops {
            op.validate(num_qubits)?;
        }
        validate_measured(&measured, num_qubits)?;
        Ok(Circuit {
            num_qubits,
            ops,
            measured,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    /// Measured qubits in outcome-bit order: entry `j` is bit `j` of an
    /// outcome, printed `j` characters from the right.
    pub fn measured(&self) -> &[usize] {
        &self.measured
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn append(&self, op: GateOp) -> Result<Circuit, CircuitError> {
        op.validate(self.num_qubits)?;
        let mut next = self.clone();
        next.ops.push(op);
        Ok(next)
    }

    pub fn with_ops(&self, ops: Vec<GateOp>) -> Result<Circuit, CircuitError> {
        Circuit::from_parts(self.num_qubits, ops, self.measured.clone())
    }

    pub fn with_measured(&self, measured: Vec<usize>) -> Result<Circuit, CircuitError> {
        validate_measured(&measured, self.num_qubits)?;
        let mut next = self.clone();
        next.measured = measured;
        Ok(next)
    }

    pub fn measure_all(&self) -> Circuit {
        let mut next = self.clone();
        next.measured = (0..self.num_qubits).collect();
        next
    }

    pub fn is_elementary(&self) -> bool {
        self.ops.iter().all(|op| op.kind.is_elementary())
    }

    /// `|G|` of an already decomposed circuit.
    pub fn gate_count(&self) -> Result<GateCount, CircuitError> {
        if let Some(op) = self.ops.iter().find(|op| !op.kind.is_elementary()) {
            return Err(CircuitError::NotDecomposed { kind: op.kind });
        }
        Ok(GateCount(self.ops.len()))
    }

    pub(crate) fn require_measured(&self) -> Result<(), CircuitError> {
        if self.measured.is_empty() {
            Err(CircuitError::NoMeasuredQubits)
        } else {
            Ok(())
        }
    }
}

fn validate_measured(measured: &[usize], num_qubits: usize) -> Result<(), CircuitError> {
    for (i, &q) in measured.iter().enumerate() {
        if q >= num_qubits {
            return Err(CircuitError::QubitOutOfRange {
                qubit: q,
                num_qubits,
            });
        }
        if measured[..i].contains(&q) {
            return Err(CircuitError::DuplicateQubit { qubit: q });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn append_is_value_semantic() {
        let empty = Circuit::new(3).unwrap();
        let one = empty.append(GateOp::h(0)).unwrap();
        assert_eq!(one.len(), 1);
        assert!(empty.is_empty());
    }

    #[test]
    fn append_rejects_duplicate_index() {
        let c = Circuit::new(3).unwrap();
        assert_eq!(
            c.append(GateOp::cx(0, 0)),
            Err(CircuitError::DuplicateQubit { qubit: 0 })
        );
    }

    #[test]
    fn append_rejects_out_of_range() {
        let c = Circuit::new(3).unwrap();
        assert_eq!(
            c.append(GateOp::x(5)),
            Err(CircuitError::QubitOutOfRange {
                qubit: 5,
                num_qubits: 3
            })
        );
    }

    #[test]
    fn arity_must_match_kind() {
        let c = Circuit::new(4).unwrap();
        let bad = GateOp {
            kind: GateKind::CX,
            controls: vec![0, 1],
            target: 2,
        };
        assert!(matches!(
            c.append(bad),
            Err(CircuitError::ArityMismatch { .. })
        ));
        let short_mcx = GateOp {
            kind: GateKind::MCX,
            controls: vec![0, 1],
            target: 2,
        };
        assert!(matches!(
            c.append(short_mcx),
            Err(CircuitError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn mcx_normalizes_small_control_counts() {
        assert_eq!(GateOp::mcx(vec![], 1).kind, GateKind::X);
        assert_eq!(GateOp::mcx(vec![0], 1).kind, GateKind::CX);
        assert_eq!(GateOp::mcx(vec![0, 2], 1).kind, GateKind::CCX);
        assert_eq!(GateOp::mcx(vec![0, 2, 3], 1).kind, GateKind::MCX);
    }

    #[test]
    fn gate_count_of_xyz_example() {
        let c = Circuit::from_parts(1, vec![GateOp::x(0), GateOp::y(0), GateOp::z(0)], vec![0])
            .unwrap();
        assert_eq!(c.gate_count().unwrap().total(), 3);
        assert_eq!(Circuit::new(2).unwrap().gate_count().unwrap().total(), 0);
    }

    #[test]
    fn gate_count_requires_decomposition() {
        let c = Circuit::new(3)
            .unwrap()
            .append(GateOp::ccx(0, 1, 2))
            .unwrap();
        assert_eq!(
            c.gate_count(),
            Err(CircuitError::NotDecomposed {
                kind: GateKind::CCX
            })
        );
    }

    #[test]
    fn measured_qubits_are_validated() {
        let c = Circuit::new(2).unwrap();
        assert!(c.with_measured(vec![0, 0]).is_err());
        assert!(c.with_measured(vec![2]).is_err());
        assert_eq!(c.with_measured(vec![1, 0]).unwrap().measured(), &[1, 0]);
    }
}
