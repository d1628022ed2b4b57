//! Noise sweeps: metrics of one workload over a grid of noise levels.

use std::path::Path;

use qdiag::metrics::{diagnose, to_distribution, StateSet, Thresholds};
use qdiag::sim::{Histogram, NoiseModel};
use qdiag::Verdict;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SweepConfig;
use crate::error::{HarnessError, Result};
use crate::persist::{read_json, write_atomic, write_json};
use crate::workload::Workload;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: f64,
    pub entropy: f64,
    pub bias: f64,
    pub mps_equals_ds: bool,
    pub verdict: Verdict,
}

/// Summary written as `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub ds: StateSet,
    pub num_qubits_measured: usize,
    pub gate_count: f64,
    pub thresholds: Thresholds,
    /// Smallest grid point at which MPS differs from DS.
    pub empirical_threshold: Option<f64>,
    pub points: usize,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub config: SweepConfig,
    pub report: SweepReport,
    pub rows: Vec<SweepRow>,
    pub histograms: Vec<Histogram>,
}

pub fn histogram_file(index: usize) -> String {
    format!("p_{index:03}.json")
}

/// Builds the rows from already sampled histograms.
pub fn rows_from_histograms(
    grid: &[f64],
    histograms: &[Histogram],
    ds: &StateSet,
    threshold: f64,
    config: &SweepConfig,
) -> Result<Vec<SweepRow>> {
    let tol = config.tolerances();
    grid.iter()
        .zip(histograms)
        .map(|(&p, h)| {
            let r = diagnose(&to_distribution(h), ds, p, threshold, &tol)?;
            Ok(SweepRow {
                p,
                entropy: r.entropy,
                bias: r.beta,
                mps_equals_ds: r.mps == *ds,
                verdict: r.verdict,
            })
        })
        .collect()
}

pub fn empirical_threshold(rows: &[SweepRow]) -> Option<f64> {
    rows.iter().find(|r| !r.mps_equals_ds).map(|r| r.p)
}

/// Runs every grid point with uniform depolarizing noise `p1 = p2 = p`.
///
/// All points share the configured seed, so the faults drawn at one noise
/// level are a subset of those drawn at any higher level and the curves are
/// free of point-to-point seed jitter.
pub fn sweep_noise(config: &SweepConfig) -> Result<SweepOutcome> {
    config.validate()?;
    let mut workload = Workload::from_source(&config.source, config.seed)?;
    if let Some(ds) = config.ds_override()? {
        workload = workload.with_ds(ds);
    }
    let ds = workload.ds().clone();
    let n = workload.width();
    let gate_count = match config.gate_count_override {
        Some(g) => g,
        None => workload.gate_count(config.shots)?,
    };
    let thresholds = Thresholds::compute(n, ds.len(), gate_count)?;
    log::info!(
        "sweeping {} noise levels, P* = {:.6}",
        config.grid.len(),
        thresholds.average
    );

    let histograms = config
        .grid
        .par_iter()
        .map(|&p| {
            let noise = NoiseModel::uniform(p)?;
            workload.run(&noise, config.shots, config.seed)
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = rows_from_histograms(&config.grid, &histograms, &ds, thresholds.average, config)?;
    let report = SweepReport {
        ds,
        num_qubits_measured: n,
        gate_count,
        thresholds,
        empirical_threshold: empirical_threshold(&rows),
        points: rows.len(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    Ok(SweepOutcome {
        config: config.clone(),
        report,
        rows,
        histograms,
    })
}

pub fn rows_csv(rows: &[SweepRow]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("in-memory CSV");
    }
    w.into_inner().expect("in-memory CSV")
}

impl SweepOutcome {
    /// Writes `config.toml`, `histograms/p_NNN.json`, `rows.csv`,
    /// `rows.json` and `report.json` under `dir`.
    pub fn persist(&self, dir: &Path) -> Result<()> {
        write_atomic(&dir.join("config.toml"), self.config.to_toml().as_bytes())?;
        for (i, h) in self.histograms.iter().enumerate() {
            let mut text = h.to_json();
            text.push('\n');
            write_atomic(
                &dir.join("histograms").join(histogram_file(i)),
                text.as_bytes(),
            )?;
        }
        write_atomic(&dir.join("rows.csv"), &rows_csv(&self.rows))?;
        write_json(&dir.join("rows.json"), &self.rows)?;
        write_json(&dir.join("report.json"), &self.report)
    }

    /// Reloads a persisted run; rows are taken from `rows.json`.
    pub fn load(dir: &Path) -> Result<Self> {
        if !dir.join("rows.json").is_file() {
            return Err(HarnessError::MissingRun(dir.to_path_buf()));
        }
        let config = SweepConfig::load(&dir.join("config.toml"))?;
        let rows: Vec<SweepRow> = read_json(&dir.join("rows.json"), "sweep rows")?;
        let report: SweepReport = read_json(&dir.join("report.json"), "sweep report")?;
        let histograms = (0..rows.len())
            .map(|i| read_json(&dir.join("histograms").join(histogram_file(i)), "histogram"))
            .collect::<Result<Vec<Histogram>>>()?;
        Ok(SweepOutcome {
            config,
            report,
            rows,
            histograms,
        })
    }
}
