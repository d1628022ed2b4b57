//! What a sweep or case study executes: one fixed circuit, or a
//! Deutsch-Jozsa family whose oracle is drawn at random.

use std::collections::BTreeMap;
use std::path::Path;

use qdiag::algorithms::{
    dj_circuit, grover_circuit, random_balanced_onset, simon_circuit, OracleSpec,
};
use qdiag::metrics::{desired_states, StateSet};
use qdiag::rng::derive_seed;
use qdiag::sim::{outcome_label, run_ensemble, run_noisy, Histogram, NoiseModel};
use qdiag::{decompose, Circuit, GateOp};

use crate::config::{Aggregation, CircuitSource, Preset, PresetSpec};
use crate::error::{HarnessError, Result};

/// Qubit receiving the preset bug.
pub const BUG_QUBIT: usize = 1;

const ORACLE_TAG: u64 = 0x0dac1e;

#[derive(Debug, Clone)]
pub enum Workload {
    /// An elementary circuit with its desired states.
    Fixed { circuit: Circuit, ds: StateSet },
    /// Deutsch-Jozsa over random constant or balanced oracles.
    DeutschJozsa {
        n: usize,
        balanced: bool,
        bugged: bool,
        aggregation: Aggregation,
        oracle_seed: u64,
        ds: StateSet,
    },
}

/// Appends X on [`BUG_QUBIT`] after the last gate.
pub fn inject_bug(circuit: &Circuit) -> Result<Circuit> {
    if circuit.num_qubits() <= BUG_QUBIT {
        return Err(HarnessError::InvalidConfig(format!(
            "the preset bug acts on qubit {BUG_QUBIT}; circuit has {} qubit(s)",
            circuit.num_qubits()
        )));
    }
    Ok(circuit.append(GateOp::x(BUG_QUBIT))?)
}

pub fn read_circuit(path: &Path) -> Result<Circuit> {
    let text = std::fs::read_to_string(path).map_err(HarnessError::unreadable(path))?;
    text.parse().map_err(|source| HarnessError::CircuitFile {
        path: path.to_path_buf(),
        source,
    })
}

fn dj_instance(n: usize, balanced: bool, bugged: bool, seed: u64) -> Result<Circuit> {
    let spec = if balanced {
        random_balanced_onset(n, seed)?
    } else {
        OracleSpec::dj_constant(n, seed & 1 == 1)?
    };
    let (circuit, _) = dj_circuit(&spec)?;
    let circuit = if bugged {
        inject_bug(&circuit)?
    } else {
        circuit
    };
    Ok(decompose(&circuit))
}

impl Workload {
    /// `seed` fixes which random oracles a Deutsch-Jozsa workload draws.
    pub fn from_source(source: &CircuitSource, seed: u64) -> Result<Self> {
        match source {
            CircuitSource::File { path } => {
                let circuit = read_circuit(path)?;
                let ds = desired_states(&circuit)?;
                Ok(Workload::Fixed {
                    circuit: decompose(&circuit),
                    ds,
                })
            }
            CircuitSource::Preset(spec) => Workload::from_preset(spec, seed),
        }
    }

    pub fn from_preset(spec: &PresetSpec, seed: u64) -> Result<Self> {
        let n = spec.n.unwrap_or(3);
        let fixed = |(circuit, ds): (Circuit, StateSet)| -> Result<Workload> {
            let circuit = if spec.bugged {
                inject_bug(&circuit)?
            } else {
                circuit
            };
            Ok(Workload::Fixed {
                circuit: decompose(&circuit),
                ds,
            })
        };
        match spec.preset()? {
            Preset::Grover => {
                let marked = match &spec.marked {
                    Some(states) => StateSet::new(states.iter())?,
                    None => StateSet::new([outcome_label(0, n)])?,
                };
                fixed(grover_circuit(n, &marked, None)?)
            }
            Preset::Simon => fixed(simon_circuit(spec.mask.as_deref().unwrap_or("110"))?),
            kind @ (Preset::DjConstant | Preset::DjBalanced) => {
                let balanced = kind == Preset::DjBalanced;
                let ds = if balanced {
                    StateSet::new((1..1u64 << n).map(|y| outcome_label(y, n)))?
                } else {
                    StateSet::new([outcome_label(0, n)])?
                };
                let workload = Workload::DeutschJozsa {
                    n,
                    balanced,
                    bugged: spec.bugged,
                    aggregation: spec.aggregation,
                    oracle_seed: derive_seed(seed, ORACLE_TAG),
                    ds,
                };
                // surface width and bug errors before any sampling
                workload.representative()?;
                Ok(workload)
            }
        }
    }

    pub fn ds(&self) -> &StateSet {
        match self {
            Workload::Fixed { ds, .. } | Workload::DeutschJozsa { ds, .. } => ds,
        }
    }

    pub fn with_ds(mut self, replacement: StateSet) -> Self {
        match &mut self {
            Workload::Fixed { ds, .. } | Workload::DeutschJozsa { ds, .. } => *ds = replacement,
        }
        self
    }

    /// Number of measured qubits.
    pub fn width(&self) -> usize {
        match self {
            Workload::Fixed { circuit, .. } => circuit.measured().len(),
            Workload::DeutschJozsa { n, .. } => *n,
        }
    }

    /// The same workload with the preset bug injected.
    pub fn bugged(&self) -> Result<Workload> {
        match self {
            Workload::Fixed { circuit, ds } => Ok(Workload::Fixed {
                circuit: inject_bug(circuit)?,
                ds: ds.clone(),
            }),
            Workload::DeutschJozsa { bugged: true, .. } => Ok(self.clone()),
            Workload::DeutschJozsa {
                n,
                balanced,
                aggregation,
                oracle_seed,
                ds,
                ..
            } => Ok(Workload::DeutschJozsa {
                n: *n,
                balanced: *balanced,
                bugged: true,
                aggregation: *aggregation,
                oracle_seed: *oracle_seed,
                ds: ds.clone(),
            }),
        }
    }

    /// The circuit itself, or the first oracle instance of a family.
    pub fn representative(&self) -> Result<Circuit> {
        match self {
            Workload::Fixed { circuit, .. } => Ok(circuit.clone()),
            Workload::DeutschJozsa {
                n,
                balanced,
                bugged,
                oracle_seed,
                ..
            } => dj_instance(*n, *balanced, *bugged, derive_seed(*oracle_seed, 0)),
        }
    }

    fn oracle_count(&self, shots: u64) -> Result<u64> {
        match self {
            Workload::DeutschJozsa {
                aggregation: Aggregation::Batched { oracles },
                ..
            } => {
                if *oracles == 0 || !shots.is_multiple_of(*oracles) {
                    return Err(HarnessError::InvalidConfig(format!(
                        "{shots} shots cannot be split evenly over {oracles} oracles"
                    )));
                }
                Ok(*oracles)
            }
            _ => Ok(shots),
        }
    }

    /// Elementary gate count; for oracle families, the mean over the
    /// oracles a run of `shots` shots draws.
    pub fn gate_count(&self, shots: u64) -> Result<f64> {
        match self {
            Workload::Fixed { circuit, .. } => Ok(circuit.gate_count()?.total() as f64),
            Workload::DeutschJozsa {
                n,
                balanced,
                bugged,
                oracle_seed,
                ..
            } => {
                let oracles = self.oracle_count(shots)?;
                let mut total = 0usize;
                for i in 0..oracles {
                    let c = dj_instance(*n, *balanced, *bugged, derive_seed(*oracle_seed, i))?;
                    total += c.gate_count()?.total();
                }
                Ok(total as f64 / oracles as f64)
            }
        }
    }

    pub fn run(&self, noise: &NoiseModel, shots: u64, seed: u64) -> Result<Histogram> {
        match self {
            Workload::Fixed { circuit, .. } => Ok(run_noisy(circuit, noise, shots, seed)?),
            Workload::DeutschJozsa {
                n,
                balanced,
                bugged,
                aggregation,
                oracle_seed,
                ..
            } => {
                let instance = |i: u64| {
                    dj_instance(*n, *balanced, *bugged, derive_seed(*oracle_seed, i))
                        .expect("oracle parameters validated at construction")
                };
                match aggregation {
                    Aggregation::FreshPerShot => {
                        Ok(run_ensemble(*n, |i| Ok(instance(i)), noise, shots, seed)?)
                    }
                    Aggregation::Batched { .. } => {
                        let oracles = self.oracle_count(shots)?;
                        let per = shots / oracles;
                        let mut merged: BTreeMap<String, u64> = BTreeMap::new();
                        for i in 0..oracles {
                            let h = run_noisy(&instance(i), noise, per, derive_seed(seed, i))?;
                            for (label, c) in h.counts() {
                                *merged.entry(label.clone()).or_default() += c;
                            }
                        }
                        Ok(Histogram::new(*n, shots, merged)?)
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qdiag::metrics::{entropy, to_distribution};

    #[test]
    fn constant_family_averages_eight_and_nine() {
        let w = Workload::from_preset(&PresetSpec::named("dj-constant"), 0).unwrap();
        let g = w.gate_count(4000).unwrap();
        assert!((g - 8.5).abs() < 0.05, "{g}");
        let h = w.run(&NoiseModel::ideal(), 2000, 1).unwrap();
        assert_eq!(h.count("000"), 2000);
    }

    #[test]
    fn batched_aggregation_splits_shots() {
        let mut spec = PresetSpec::named("dj-balanced");
        spec.aggregation = Aggregation::Batched { oracles: 10 };
        let w = Workload::from_preset(&spec, 3).unwrap();
        let h = w.run(&NoiseModel::ideal(), 1000, 2).unwrap();
        assert_eq!(h.shots(), 1000);
        assert_eq!(h.count("000"), 0);
        assert!(w.run(&NoiseModel::ideal(), 1001, 2).is_err());
    }

    #[test]
    fn fresh_balanced_oracles_spread_over_seven_states() {
        let w = Workload::from_preset(&PresetSpec::named("dj-balanced"), 0).unwrap();
        let h = w.run(&NoiseModel::ideal(), 4000, 0).unwrap();
        assert_eq!(h.count("000"), 0);
        assert!((entropy(&to_distribution(&h)) - 7f64.log2()).abs() < 0.03);
    }

    #[test]
    fn bug_flips_the_second_qubit() {
        let w = Workload::from_preset(&PresetSpec::named("dj-constant"), 0).unwrap();
        let h = w
            .bugged()
            .unwrap()
            .run(&NoiseModel::ideal(), 100, 0)
            .unwrap();
        assert_eq!(h.count("010"), 100);
    }

    #[test]
    fn unknown_preset_is_reported() {
        let err = Workload::from_preset(&PresetSpec::named("shor"), 0).unwrap_err();
        assert!(matches!(err, HarnessError::PresetNotFound(name) if name == "shor"));
    }
}
