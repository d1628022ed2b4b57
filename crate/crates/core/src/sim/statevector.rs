use num_complex::Complex64;

use crate::circuit::{GateKind, GateOp};

pub(crate) type Matrix2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub(crate) fn matrix(kind: GateKind) -> Option<Matrix2> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let t = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    Some(match kind {
        GateKind::H => [[ONE * h, ONE * h], [ONE * h, -ONE * h]],
        GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
        GateKind::Y => [[ZERO, -I], [I, ZERO]],
        GateKind::Z => [[ONE, ZERO], [ZERO, -ONE]],
        GateKind::S => [[ONE, ZERO], [ZERO, I]],
        GateKind::Sdg => [[ONE, ZERO], [ZERO, -I]],
        GateKind::T => [[ONE, ZERO], [ZERO, t]],
        GateKind::Tdg => [[ONE, ZERO], [ZERO, t.conj()]],
        _ => return None,
    })
}

/// Pauli by code: 0 = I, 1 = X, 2 = Y, 3 = Z.
pub(crate) fn pauli(code: usize) -> Option<Matrix2> {
    match code {
        1 => matrix(GateKind::X),
        2 => matrix(GateKind::Y),
        3 => matrix(GateKind::Z),
        _ => None,
    }
}

/// Pure state of `n` qubits; amplitude index bit `q` is qubit `q`.
#[derive(Debug, Clone)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(num_qubits: usize) -> Self {
        let mut amps = vec![ZERO; 1usize << num_qubits];
        amps[0] = ONE;
        StateVector { num_qubits, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies any gate kind with its exact semantics, including
    /// undecomposed multi-qubit gates.
    pub fn apply(&mut self, op: &GateOp) {
        let control_mask = op.controls.iter().fold(0usize, |m, &c| m | 1 << c);
        match op.kind {
            GateKind::CX | GateKind::CCX | GateKind::MCX => {
                self.controlled_flip(control_mask, op.target)
            }
            GateKind::CZ | GateKind::CCZ => {
                let mask = control_mask | 1 << op.target;
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *a = -*a;
                    }
                }
            }
            kind => {
                let m = matrix(kind).expect("single-qubit kind");
                self.apply_matrix(&m, op.target);
            }
        }
    }

    pub(crate) fn apply_matrix(&mut self, m: &Matrix2, q: usize) {
        let stride = 1usize << q;
        for base in (0..self.amps.len()).step_by(stride << 1) {
            for i in base..base + stride {
                let a0 = self.amps[i];
                let a1 = self.amps[i + stride];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i + stride] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn controlled_flip(&mut self, control_mask: usize, target: usize) {
        let bit = 1usize << target;
        for i in 0..self.amps.len() {
            if i & control_mask == control_mask && i & bit == 0 {
                self.amps.swap(i, i | bit);
            }
        }
    }

    /// Probabilities over outcomes of the `measured` qubits, bit `j` of the
    /// outcome index being qubit `measured[j]`.
    pub fn marginal_probabilities(&self, measured: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; 1usize << measured.len()];
        for (i, a) in self.amps.iter().enumerate() {
            out[outcome_index(i, measured)] += a.norm_sqr();
        }
        out
    }
}

pub(crate) fn outcome_index(basis: usize, measured: &[usize]) -> usize {
    measured
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &q)| acc | ((basis >> q) & 1) << j)
}
