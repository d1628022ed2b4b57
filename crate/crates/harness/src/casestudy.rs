//! The {correct, bugged} × {noise-free, below threshold, at threshold}
//! protocol for the algorithm presets.

use std::fmt;
use std::path::Path;

use qdiag::metrics::{
    diagnose, to_distribution, DiagnosticReport, StateSet, Thresholds, Tolerances,
};
use qdiag::rng::derive_seed;
use qdiag::sim::{Histogram, NoiseModel};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{PresetSpec, DEFAULT_SHOTS};
use crate::error::Result;
use crate::persist::{write_atomic, write_json};
use crate::workload::Workload;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Correct,
    Bugged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    NoiseFree,
    BelowThreshold,
    AtThreshold,
}

impl Regime {
    pub const ALL: [Regime; 3] = [
        Regime::NoiseFree,
        Regime::BelowThreshold,
        Regime::AtThreshold,
    ];
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Correct => "correct",
            Variant::Bugged => "bugged",
        })
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::NoiseFree => "noise-free",
            Regime::BelowThreshold => "below-threshold",
            Regime::AtThreshold => "at-threshold",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseStudyConfig {
    pub preset: PresetSpec,
    pub shots: u64,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub gate_count_override: Option<f64>,
    pub ds_override: Option<StateSet>,
    /// Below-threshold noise as a fraction of P*.
    pub below_fraction: f64,
}

impl CaseStudyConfig {
    pub fn new(preset: PresetSpec) -> Self {
        CaseStudyConfig {
            preset,
            shots: DEFAULT_SHOTS,
            seed: 0,
            tolerances: Tolerances::default(),
            gate_count_override: None,
            ds_override: None,
            below_fraction: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub variant: Variant,
    pub regime: Regime,
    pub p: f64,
    pub histogram: Histogram,
    pub report: DiagnosticReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseStudy {
    pub config: CaseStudyConfig,
    pub ds: StateSet,
    /// Gate count of the correct circuit (mean over oracles for families).
    pub gate_count: f64,
    pub thresholds: Thresholds,
    pub cells: Vec<Cell>,
}

impl CaseStudy {
    pub fn cell(&self, variant: Variant, regime: Regime) -> &Cell {
        self.cells
            .iter()
            .find(|c| c.variant == variant && c.regime == regime)
            .expect("every quadrant is run")
    }

    /// Writes `casestudy.json` and one histogram per cell under `dir`.
    pub fn persist(&self, dir: &Path) -> Result<()> {
        for c in &self.cells {
            let mut text = c.histogram.to_json();
            text.push('\n');
            let name = format!("{}_{}.json", c.variant, c.regime);
            write_atomic(&dir.join("histograms").join(name), text.as_bytes())?;
        }
        write_json(&dir.join("casestudy.json"), self)
    }
}

/// Runs all six cells. Noise is uniform with `p` = 0, `below_fraction·P*`
/// and P*; correct and bugged cells of one regime share a seed.
pub fn run_casestudy(config: &CaseStudyConfig) -> Result<CaseStudy> {
    config.tolerances.validate()?;
    let mut correct = Workload::from_preset(&config.preset, config.seed)?;
    if let Some(ds) = &config.ds_override {
        correct = correct.with_ds(ds.clone());
    }
    let bugged = correct.bugged()?;
    let ds = correct.ds().clone();
    let gate_count = match config.gate_count_override {
        Some(g) => g,
        None => correct.gate_count(config.shots)?,
    };
    let thresholds = Thresholds::compute(correct.width(), ds.len(), gate_count)?;
    let p_star = thresholds.average;

    let plan: Vec<(Variant, Regime, usize)> = [Variant::Correct, Variant::Bugged]
        .into_iter()
        .flat_map(|v| {
            Regime::ALL
                .into_iter()
                .enumerate()
                .map(move |(i, r)| (v, r, i))
        })
        .collect();
    let cells = plan
        .into_par_iter()
        .map(|(variant, regime, i)| {
            let p = match regime {
                Regime::NoiseFree => 0.0,
                Regime::BelowThreshold => config.below_fraction * p_star,
                Regime::AtThreshold => p_star,
            };
            let workload = match variant {
                Variant::Correct => &correct,
                Variant::Bugged => &bugged,
            };
            let histogram = workload.run(
                &NoiseModel::uniform(p)?,
                config.shots,
                derive_seed(config.seed, i as u64),
            )?;
            let report = diagnose(
                &to_distribution(&histogram),
                &ds,
                p,
                p_star,
                &config.tolerances,
            )?;
            Ok(Cell {
                variant,
                regime,
                p,
                histogram,
                report,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CaseStudy {
        config: config.clone(),
        ds,
        gate_count,
        thresholds,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use qdiag::Verdict;

    #[test]
    fn dj_constant_quadrants() {
        let mut config = CaseStudyConfig::new(PresetSpec::named("dj-constant"));
        config.shots = 2000;
        let study = run_casestudy(&config).unwrap();
        assert_eq!(study.cells.len(), 6);
        assert!((study.thresholds.average - 0.875 / study.gate_count).abs() < 1e-12);
        let c = study.cell(Variant::Correct, Regime::NoiseFree);
        assert_eq!(c.report.verdict, Verdict::NoBugsNoNoise);
        let c = study.cell(Variant::Bugged, Regime::NoiseFree);
        assert_eq!(c.report.verdict, Verdict::BugsPresent);
        for v in [Variant::Correct, Variant::Bugged] {
            assert_eq!(
                study.cell(v, Regime::AtThreshold).report.verdict,
                Verdict::NoiseTooHigh
            );
        }
    }
}
