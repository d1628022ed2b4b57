//! Exact mixed-state evolution for small registers.
//!
//! This is the reference route for noisy simulation: gates act as `UρU†` and
//! noise is applied as the depolarizing channel itself,
//!
//! ```text
//! D1(ρ) = (1 − λ)ρ + λ/4 · Σ_{P ∈ {I,X,Y,Z}} PρP,              λ = 4p/3
//! D2(ρ) = (1 − 15λ/16)ρ + λ/16 · Σ_{P ∈ P2 \ {I⊗I}} PρP†,      λ = 16p/15
//! ```
//!
//! rather than by sampling Pauli faults. Memory is `4^n` amplitudes.

use num_complex::Complex64;

use super::statevector::{matrix, outcome_index, pauli, Matrix2};
use crate::circuit::{GateKind, GateOp};

#[derive(Debug, Clone)]
pub struct DensityMatrix {
    num_qubits: usize,
    dim: usize,
    /// Row-major `dim × dim`.
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn zero(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        data[0] = Complex64::new(1.0, 0.0);
        DensityMatrix {
            num_qubits,
            dim,
            data,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest `|ρ_ij − conj(ρ_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in r..self.dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    pub fn apply_gate(&mut self, op: &GateOp) {
        match op.kind {
            GateKind::CX | GateKind::CCX | GateKind::MCX => {
                let mask = op.controls.iter().fold(0usize, |m, &c| m | 1 << c);
                let bit = 1usize << op.target;
                self.permute(|i| if i & mask == mask { i ^ bit } else { i });
            }
            GateKind::CZ | GateKind::CCZ => {
                let mask = op
                    .controls
                    .iter()
                    .fold(1usize << op.target, |m, &c| m | 1 << c);
                let sign = |i: usize| if i & mask == mask { -1.0 } else { 1.0 };
                for r in 0..self.dim {
                    for c in 0..self.dim {
                        self.data[r * self.dim + c] *= sign(r) * sign(c);
                    }
                }
            }
            kind => self.conjugate(&matrix(kind).expect("single-qubit kind"), op.target),
        }
    }

    /// `ρ ← UρU†` for a single-qubit `U` on qubit `q`.
    fn conjugate(&mut self, u: &Matrix2, q: usize) {
        let dim = self.dim;
        let stride = 1usize << q;
        // left multiply: mix row pairs
        for c in 0..dim {
            for base in (0..dim).step_by(stride << 1) {
                for r in base..base + stride {
                    let a0 = self.data[r * dim + c];
                    let a1 = self.data[(r + stride) * dim + c];
                    self.data[r * dim + c] = u[0][0] * a0 + u[0][1] * a1;
                    self.data[(r + stride) * dim + c] = u[1][0] * a0 + u[1][1] * a1;
                }
            }
        }
        // right multiply by U†: (ρU†)[r,c] = Σ_k ρ[r,k] conj(U[c,k])
        for r in 0..dim {
            let row = &mut self.data[r * dim..(r + 1) * dim];
            for base in (0..dim).step_by(stride << 1) {
                for c in base..base + stride {
                    let a0 = row[c];
                    let a1 = row[c + stride];
                    row[c] = a0 * u[0][0].conj() + a1 * u[0][1].conj();
                    row[c + stride] = a0 * u[1][0].conj() + a1 * u[1][1].conj();
                }
            }
        }
    }

    fn permute(&mut self, f: impl Fn(usize) -> usize) {
        let dim = self.dim;
        let mut next = vec![Complex64::new(0.0, 0.0); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                next[f(r) * dim + f(c)] = self.data[r * dim + c];
            }
        }
        self.data = next;
    }

    fn axpy(&mut self, weight: f64, other: &DensityMatrix) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * weight;
        }
    }

    fn scaled(&self, weight: f64) -> DensityMatrix {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|a| *a *= weight);
        out
    }

    /// Single-qubit depolarizing channel with parameter `lambda` in `[0, 4/3]`.
    pub fn depolarize_1q(&mut self, lambda: f64, q: usize) {
        if lambda == 0.0 {
            return;
        }
        let mut out = self.scaled(1.0 - lambda);
        out.axpy(lambda / 4.0, self);
        for code in 1..4 {
            let mut term = self.clone();
            term.conjugate(&pauli(code).expect("pauli"), q);
            out.axpy(lambda / 4.0, &term);
        }
        *self = out;
    }

    /// Two-qubit depolarizing channel with parameter `lambda` in `[0, 16/15]`.
    pub fn depolarize_2q(&mut self, lambda: f64, a: usize, b: usize) {
        if lambda == 0.0 {
            return;
        }
        let mut out = self.scaled(1.0 - 15.0 * lambda / 16.0);
        for code in 1..16 {
            let mut term = self.clone();
            if let Some(pa) = pauli(code & 3) {
                term.conjugate(&pa, a);
            }
            if let Some(pb) = pauli(code >> 2) {
                term.conjugate(&pb, b);
            }
            out.axpy(lambda / 16.0, &term);
        }
        *self = out;
    }

    pub fn marginal_probabilities(&self, measured: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; 1usize << measured.len()];
        for i in 0..self.dim {
            out[outcome_index(i, measured)] += self.get(i, i).re;
        }
        out
    }
}
