//! Experiment harness around the `qdiag` diagnostics: noise sweeps, the
//! algorithm case studies, mutant studies, run persistence and export.
//!
//! A persisted sweep directory looks like
//!
//! ```text
//! run/
//!   config.toml
//!   histograms/p_000.json ...
//!   rows.csv
//!   rows.json
//!   report.json
//! ```

pub mod casestudy;
pub mod cli;
pub mod config;
pub mod error;
pub mod export;
pub mod persist;
pub mod sweep;
pub mod workload;

pub use casestudy::{run_casestudy, CaseStudy, CaseStudyConfig, Regime, Variant};
pub use config::{Aggregation, CircuitSource, Preset, PresetSpec, SweepConfig};
pub use error::{HarnessError, Result};
pub use export::{export, ExportFormat};
pub use sweep::{sweep_noise, SweepOutcome, SweepRow};
pub use workload::Workload;
