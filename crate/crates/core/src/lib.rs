//! Simulation and diagnostics for telling quantum software bugs apart from
//! hardware noise.
//!
//! The pipeline is: build or parse a [`Circuit`], [`decompose`] it to the
//! elementary gate set, sample it with [`sim::run_noisy`] under a
//! [`NoiseModel`], and classify the resulting histogram with
//! [`metrics::diagnose`] using bias, entropy and the most-probable-state set.

pub mod algorithms;
pub mod circuit;
pub mod metrics;
pub mod mutation;
pub mod rng;
pub mod sim;

pub use circuit::{decompose, Circuit, CircuitError, GateCount, GateKind, GateOp};
pub use metrics::{DiagnosticReport, StateSet, Verdict};
pub use sim::{Distribution, Histogram, NoiseModel, SimError};
