use std::collections::BTreeMap;

use serde::{Deserialize, Serialize, Serializer};

use super::SimError;

/// Renders outcome index `bits` as a `width`-character string with bit 0
/// rightmost.
pub fn outcome_label(bits: u64, width: usize) -> String {
    (0..width)
        .rev()
        .map(|j| if bits >> j & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Inverse of [`outcome_label`]; `None` for characters other than 0/1.
pub fn parse_outcome(label: &str) -> Option<u64> {
    if label.is_empty() || label.len() > 64 {
        return None;
    }
    label.chars().try_fold(0u64, |acc, ch| match ch {
        '0' => Some(acc << 1),
        '1' => Some(acc << 1 | 1),
        _ => None,
    })
}

fn check_label(label: &str, width: usize) -> Result<(), String> {
    if label.len() != width || parse_outcome(label).is_none() {
        return Err(format!("outcome `{label}` is not a {width}-bit string"));
    }
    Ok(())
}

/// Shot counts per measured outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawHistogram")]
pub struct Histogram {
    num_qubits_measured: usize,
    shots: u64,
    counts: BTreeMap<String, u64>,
}

#[derive(Deserialize)]
struct RawHistogram {
    num_qubits_measured: usize,
    shots: u64,
    counts: BTreeMap<String, u64>,
}

impl TryFrom<RawHistogram> for Histogram {
    type Error = SimError;

    fn try_from(raw: RawHistogram) -> Result<Self, Self::Error> {
        Histogram::new(raw.num_qubits_measured, raw.shots, raw.counts)
    }
}

impl Histogram {
    pub fn new(
        num_qubits_measured: usize,
        shots: u64,
        counts: BTreeMap<String, u64>,
    ) -> Result<Self, SimError> {
        if num_qubits_measured == 0 {
            return Err(SimError::InvalidHistogram("no measured qubits".into()));
        }
        if shots == 0 {
            return Err(SimError::ZeroShots);
        }
        for label in counts.keys() {
            check_label(label, num_qubits_measured).map_err(SimError::InvalidHistogram)?;
        }
        let total: u64 = counts.values().sum();
        if total != shots {
            return Err(SimError::InvalidHistogram(format!(
                "counts sum to {total} but shots is {shots}"
            )));
        }
        Ok(Histogram {
            num_qubits_measured,
            shots,
            counts,
        })
    }

    /// Builds from outcome indices; zero counts are dropped.
    pub fn from_indexed(width: usize, indexed: &BTreeMap<u64, u64>) -> Result<Self, SimError> {
        let counts: BTreeMap<String, u64> = indexed
            .iter()
            .filter(|(_, &c)| c > 0)
            .map(|(&bits, &c)| (outcome_label(bits, width), c))
            .collect();
        let shots = counts.values().sum();
        Histogram::new(width, shots, counts)
    }

    pub fn num_qubits_measured(&self) -> usize {
        self.num_qubits_measured
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn count(&self, label: &str) -> u64 {
        self.counts.get(label).copied().unwrap_or(0)
    }

    /// Multiplies every count (and the shot total) by `factor`.
    pub fn scaled(&self, factor: u64) -> Result<Self, SimError> {
        let counts = self
            .counts
            .iter()
            .map(|(k, v)| (k.clone(), v * factor))
            .collect();
        Histogram::new(self.num_qubits_measured, self.shots * factor, counts)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("histogram serializes")
    }
}

/// Normalized outcome probabilities. Outcomes absent from the map have
/// probability zero.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(try_from = "RawDistribution")]
pub struct Distribution {
    num_qubits_measured: usize,
    probs: BTreeMap<String, f64>,
}

#[derive(Deserialize)]
struct RawDistribution {
    num_qubits_measured: usize,
    probs: BTreeMap<String, f64>,
}

impl TryFrom<RawDistribution> for Distribution {
    type Error = SimError;

    fn try_from(raw: RawDistribution) -> Result<Self, Self::Error> {
        Distribution::new(raw.num_qubits_measured, raw.probs)
    }
}

pub(crate) const NORMALIZATION_TOL: f64 = 1e-9;

impl Distribution {
    pub fn new(num_qubits_measured: usize, probs: BTreeMap<String, f64>) -> Result<Self, SimError> {
        if num_qubits_measured == 0 {
            return Err(SimError::InvalidDistribution("no measured qubits".into()));
        }
        for (label, &p) in &probs {
            check_label(label, num_qubits_measured).map_err(SimError::InvalidDistribution)?;
            if !(0.0..=1.0).contains(&p) {
                return Err(SimError::InvalidDistribution(format!(
                    "probability {p} of `{label}` outside [0, 1]"
                )));
            }
        }
        let total: f64 = probs.values().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(SimError::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Distribution {
            num_qubits_measured,
            probs,
        })
    }

    /// Builds from a dense probability vector over outcome indices, dropping
    /// entries below `1e-15`.
    pub fn from_dense(width: usize, dense: &[f64]) -> Result<Self, SimError> {
        let probs = dense
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 1e-15)
            .map(|(bits, &p)| (outcome_label(bits as u64, width), p.min(1.0)))
            .collect();
        Distribution::new(width, probs)
    }

    pub fn num_qubits_measured(&self) -> usize {
        self.num_qubits_measured
    }

    pub fn probs(&self) -> &BTreeMap<String, f64> {
        &self.probs
    }

    pub fn probability(&self, label: &str) -> f64 {
        self.probs.get(label).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.probs.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Total variation distance, `½ Σ |p_i − q_i|`.
    pub fn tvd(&self, other: &Distribution) -> f64 {
        let mut keys: Vec<&String> = self.probs.keys().chain(other.probs.keys()).collect();
        keys.sort();
        keys.dedup();
        0.5 * keys
            .into_iter()
            .map(|k| (self.probability(k) - other.probability(k)).abs())
            .sum::<f64>()
    }

    /// Equal-weight mixture of several distributions of the same width.
    pub fn mixture(parts: &[Distribution]) -> Result<Self, SimError> {
        let first = parts
            .first()
            .ok_or_else(|| SimError::InvalidDistribution("empty mixture".into()))?;
        let w = 1.0 / parts.len() as f64;
        let mut probs: BTreeMap<String, f64> = BTreeMap::new();
        for d in parts {
            if d.num_qubits_measured != first.num_qubits_measured {
                return Err(SimError::WidthMismatch {
                    expected: first.num_qubits_measured,
                    found: d.num_qubits_measured,
                });
            }
            for (k, p) in d.iter() {
                *probs.entry(k.to_string()).or_default() += w * p;
            }
        }
        Distribution::new(first.num_qubits_measured, probs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("distribution serializes")
    }
}

/// Rounds to 12 significant digits for serialization.
pub fn round_sig12(p: f64) -> f64 {
    if p == 0.0 || !p.is_finite() {
        return p;
    }
    format!("{p:.11e}").parse().unwrap_or(p)
}

impl Serialize for Distribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            num_qubits_measured: usize,
            probs: BTreeMap<&'a str, f64>,
        }
        Out {
            num_qubits_measured: self.num_qubits_measured,
            probs: self
                .probs
                .iter()
                .map(|(k, &v)| (k.as_str(), round_sig12(v)))
                .collect(),
        }
        .serialize(serializer)
    }
}
