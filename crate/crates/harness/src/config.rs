//! Run configuration, loadable from TOML.
//!
//! ```toml
//! seed = 7
//! shots = 10000
//! grid = [0.0, 0.001, 0.01, 0.1]
//! gate_count_override = 8.0
//!
//! [source]
//! kind = "preset"
//! name = "simon"
//! mask = "110"
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qdiag::metrics::{StateSet, Tolerances, DEFAULT_MPS_PERCENT};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const DEFAULT_SHOTS: u64 = 10_000;
pub const DEFAULT_GRID_POINTS: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Grover,
    DjConstant,
    DjBalanced,
    Simon,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::Grover,
        Preset::DjConstant,
        Preset::DjBalanced,
        Preset::Simon,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Grover => "grover",
            Preset::DjConstant => "dj-constant",
            Preset::DjBalanced => "dj-balanced",
            Preset::Simon => "simon",
        }
    }
}

impl FromStr for Preset {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| HarnessError::PresetNotFound(s.to_string()))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How Deutsch-Jozsa presets spread shots over random oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    /// A freshly drawn oracle for every shot.
    #[default]
    FreshPerShot,
    /// `oracles` oracles sharing the shots equally.
    Batched { oracles: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresetSpec {
    pub name: String,
    /// Input width; defaults to 3. Ignored by `simon`, whose width is the mask length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Grover marked states; defaults to the all-zero string.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marked: Option<Vec<String>>,
    /// Simon hidden string; defaults to `110`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask: Option<String>,
    /// Append the preset bug: X on qubit 1 right before measurement.
    #[serde(default)]
    pub bugged: bool,
    #[serde(default)]
    pub aggregation: Aggregation,
}

impl PresetSpec {
    pub fn named(name: &str) -> Self {
        PresetSpec {
            name: name.to_string(),
            n: None,
            marked: None,
            mask: None,
            bugged: false,
            aggregation: Aggregation::default(),
        }
    }

    pub fn preset(&self) -> Result<Preset> {
        self.name.parse()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CircuitSource {
    Preset(PresetSpec),
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_grid")]
    pub grid: Vec<f64>,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(default = "default_tol_beta")]
    pub tol_beta: f64,
    #[serde(default = "default_tol_entropy")]
    pub tol_entropy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate_count_override: Option<f64>,
    /// Desired states replacing the ones derived from the circuit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ds: Option<Vec<String>>,
    pub source: CircuitSource,
}

fn default_shots() -> u64 {
    DEFAULT_SHOTS
}

fn default_r() -> f64 {
    DEFAULT_MPS_PERCENT
}

fn default_tol_beta() -> f64 {
    Tolerances::default().tol_beta
}

fn default_tol_entropy() -> f64 {
    Tolerances::default().tol_entropy
}

/// 21 points spaced evenly in log10 from 1e-4 to 1.
pub fn default_grid() -> Vec<f64> {
    log_grid(1e-4, 1.0, DEFAULT_GRID_POINTS)
}

pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    let steps = (points.max(2) - 1) as f64;
    (0..points)
        .map(|k| 10f64.powf(a + (b - a) * k as f64 / steps))
        .collect()
}

impl SweepConfig {
    pub fn new(source: CircuitSource) -> Self {
        SweepConfig {
            grid: default_grid(),
            shots: DEFAULT_SHOTS,
            seed: 0,
            r: DEFAULT_MPS_PERCENT,
            tol_beta: default_tol_beta(),
            tol_entropy: default_tol_entropy(),
            gate_count_override: None,
            ds: None,
            source,
        }
    }

    pub fn preset(name: &str) -> Self {
        SweepConfig::new(CircuitSource::Preset(PresetSpec::named(name)))
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            tol_beta: self.tol_beta,
            tol_entropy: self.tol_entropy,
            r: self.r,
        }
    }

    pub fn ds_override(&self) -> Result<Option<StateSet>> {
        self.ds
            .as_ref()
            .map(|states| StateSet::new(states.iter()).map_err(Into::into))
            .transpose()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::InvalidConfig(m));
        if self.grid.is_empty() {
            return bad("noise grid is empty".into());
        }
        if let Some(p) = self.grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return bad(format!("noise grid value {p} outside [0, 1]"));
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad("noise grid must be strictly increasing".into());
        }
        if self.shots == 0 {
            return bad("shots must be at least 1".into());
        }
        if let Some(g) = self.gate_count_override {
            if !(g.is_finite() && g > 0.0) {
                return bad(format!("gate count override {g} must be positive"));
            }
        }
        self.tolerances().validate()?;
        self.ds_override()?;
        if let CircuitSource::Preset(spec) = &self.source {
            spec.preset()?;
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: SweepConfig =
            toml::from_str(text).map_err(|e| HarnessError::InvalidConfig(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(HarnessError::unreadable(path))?;
        SweepConfig::from_toml(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_spans_four_decades() {
        let g = default_grid();
        assert_eq!(g.len(), 21);
        assert!((g[0] - 1e-4).abs() < 1e-18);
        assert!((g[20] - 1.0).abs() < 1e-12);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn toml_round_trip() {
        let mut c = SweepConfig::preset("simon");
        c.gate_count_override = Some(8.0);
        c.ds = Some(vec!["000".into(), "110".into()]);
        if let CircuitSource::Preset(spec) = &mut c.source {
            spec.mask = Some("110".into());
            spec.aggregation = Aggregation::Batched { oracles: 100 };
        }
        let back = SweepConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn minimal_toml_uses_defaults() {
        let c = SweepConfig::from_toml("[source]\nkind = \"file\"\npath = \"a.qc\"\n").unwrap();
        assert_eq!(c.shots, DEFAULT_SHOTS);
        assert_eq!(c.grid, default_grid());
        assert_eq!(
            c.source,
            CircuitSource::File {
                path: "a.qc".into()
            }
        );
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut c = SweepConfig::preset("grover");
        c.grid = vec![0.1, 0.05];
        assert!(matches!(c.validate(), Err(HarnessError::InvalidConfig(_))));
        c.grid = vec![0.0, 1.5];
        assert!(c.validate().is_err());
        c.grid = vec![0.0];
        c.shots = 0;
        assert!(c.validate().is_err());
        let c = SweepConfig::preset("shor");
        assert!(matches!(c.validate(), Err(HarnessError::PresetNotFound(_))));
    }
}
