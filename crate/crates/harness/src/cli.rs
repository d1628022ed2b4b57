//! The `qdiag` command line.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 simulation or I/O
//! failure, 3 when `diagnose` returns "Noise too high".

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qdiag::metrics::{desired_states, diagnose, to_distribution, StateSet, Thresholds, Tolerances};
use qdiag::mutation::{generate_mutants, mutant_study, DEFAULT_POOL};
use qdiag::sim::{run_noisy, Histogram, NoiseModel};
use qdiag::{decompose, GateKind, Verdict};
use serde::Serialize;

use crate::casestudy::{run_casestudy, CaseStudyConfig};
use crate::config::{Aggregation, CircuitSource, PresetSpec, SweepConfig};
use crate::error::{HarnessError, Result};
use crate::export::{export, ExportFormat};
use crate::persist::{read_json, write_atomic, write_json};
use crate::sweep::sweep_noise;
use crate::workload::{read_circuit, Workload};

pub const EXIT_NOISE_TOO_HIGH: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qdiag",
    version,
    about = "Separate quantum program bugs from hardware noise"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Shots per simulation (default 10000).
    #[arg(long, global = true)]
    pub shots: Option<u64>,
    /// Base seed (default 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Depolarizing error probability per gate (default 0).
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// MPS window in percent (default 5).
    #[arg(long, global = true)]
    pub r: Option<f64>,
    #[arg(long, global = true)]
    pub tol_beta: Option<f64>,
    #[arg(long, global = true)]
    pub tol_entropy: Option<f64>,
    /// Gate count used for the threshold instead of the circuit's own.
    #[arg(long, global = true)]
    pub gate_count_override: Option<f64>,
    /// Desired states, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub ds: Option<Vec<String>>,
    /// Output file or run directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AggregationArg {
    Fresh,
    Batched,
}

#[derive(Debug, Args)]
pub struct PresetArgs {
    /// Input width (grover, dj-*).
    #[arg(long)]
    pub n: Option<usize>,
    /// Grover marked states, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub marked: Option<Vec<String>>,
    /// Simon hidden string.
    #[arg(long)]
    pub mask: Option<String>,
    /// Inject the preset bug (X on qubit 1 before measurement).
    #[arg(long)]
    pub bugged: bool,
    /// Random-oracle aggregation for dj-* presets.
    #[arg(long, value_enum)]
    pub aggregation: Option<AggregationArg>,
    /// Oracle count for batched aggregation.
    #[arg(long, default_value_t = 100)]
    pub oracles: u64,
}

impl PresetArgs {
    fn spec(&self, name: &str) -> PresetSpec {
        PresetSpec {
            name: name.to_string(),
            n: self.n,
            marked: self.marked.clone(),
            mask: self.mask.clone(),
            bugged: self.bugged,
            aggregation: match self.aggregation {
                Some(AggregationArg::Batched) => Aggregation::Batched {
                    oracles: self.oracles,
                },
                _ => Aggregation::FreshPerShot,
            },
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a circuit file and print the histogram as JSON.
    Simulate { circuit: PathBuf },
    /// Metrics over a grid of noise levels.
    Sweep {
        /// TOML run configuration; command-line flags take precedence.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, conflicts_with = "circuit")]
        preset: Option<String>,
        #[arg(long)]
        circuit: Option<PathBuf>,
        /// Noise levels, comma separated.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
        #[command(flatten)]
        params: PresetArgs,
    },
    /// Correct and bugged runs at zero, below-threshold and threshold noise.
    Casestudy {
        /// grover, dj-constant, dj-balanced or simon.
        preset: String,
        #[command(flatten)]
        params: PresetArgs,
        /// Print the preset circuit (first oracle for dj-*) and exit.
        #[arg(long)]
        emit_circuit: bool,
        /// Below-threshold noise as a fraction of P*.
        #[arg(long, default_value_t = 0.5)]
        below_fraction: f64,
    },
    /// Single-edit mutants of a circuit and their bias and entropy.
    Mutate {
        circuit: PathBuf,
        #[arg(long, default_value_t = 20)]
        count: usize,
        /// Gate kinds to insert or substitute, comma separated.
        #[arg(long, value_delimiter = ',')]
        pool: Option<Vec<String>>,
    },
    /// Classify a measured histogram (JSON) against desired states.
    Diagnose {
        histogram: PathBuf,
        /// Circuit the histogram came from; supplies DS and gate count.
        #[arg(long)]
        circuit: Option<PathBuf>,
    },
    /// Re-export a persisted sweep.
    Export {
        run_dir: PathBuf,
        /// csv, json or svg-data.
        #[arg(long, default_value = "csv")]
        format: String,
    },
}

impl Cli {
    fn shots(&self) -> u64 {
        self.shots.unwrap_or(crate::config::DEFAULT_SHOTS)
    }

    fn tolerances(&self) -> Tolerances {
        let d = Tolerances::default();
        Tolerances {
            tol_beta: self.tol_beta.unwrap_or(d.tol_beta),
            tol_entropy: self.tol_entropy.unwrap_or(d.tol_entropy),
            r: self.r.unwrap_or(d.r),
        }
    }

    fn ds(&self) -> Result<Option<StateSet>> {
        Ok(self
            .ds
            .as_ref()
            .map(|s| StateSet::new(s.iter()))
            .transpose()?)
    }

    fn noise(&self) -> Result<NoiseModel> {
        Ok(NoiseModel::uniform(self.p.unwrap_or(0.0))?)
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(HarnessError::io("<stdout>"))
        }
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Simulate { circuit } => {
            let circuit = decompose(&read_circuit(circuit)?);
            let h = run_noisy(&circuit, &cli.noise()?, cli.shots(), cli.seed.unwrap_or(0))?;
            emit(cli.out.as_deref(), &(h.to_json() + "\n"))?;
            Ok(0)
        }
        Command::Sweep {
            config,
            preset,
            circuit,
            grid,
            params,
        } => {
            let mut cfg = match config {
                Some(path) => SweepConfig::load(path)?,
                None => SweepConfig::preset("grover"),
            };
            if let Some(name) = preset {
                cfg.source = CircuitSource::Preset(params.spec(name));
            } else if let Some(path) = circuit {
                cfg.source = CircuitSource::File { path: path.clone() };
            } else if config.is_none() {
                cfg.source = CircuitSource::Preset(params.spec("grover"));
            }
            if let Some(g) = grid {
                cfg.grid = g.clone();
            }
            cfg.shots = cli.shots.unwrap_or(cfg.shots);
            cfg.seed = cli.seed.unwrap_or(cfg.seed);
            cfg.r = cli.r.unwrap_or(cfg.r);
            cfg.tol_beta = cli.tol_beta.unwrap_or(cfg.tol_beta);
            cfg.tol_entropy = cli.tol_entropy.unwrap_or(cfg.tol_entropy);
            cfg.gate_count_override = cli.gate_count_override.or(cfg.gate_count_override);
            cfg.ds = cli.ds.clone().or(cfg.ds);
            let outcome = sweep_noise(&cfg)?;
            if let Some(dir) = &cli.out {
                outcome.persist(dir)?;
            }
            let r = &outcome.report;
            println!(
                "DS = {}  |G| = {}  P* = {:.6}  P~* = {:.6}",
                r.ds, r.gate_count, r.thresholds.average, r.thresholds.pessimistic
            );
            println!(
                "{:>12} {:>8} {:>8} {:>7}  verdict",
                "p", "entropy", "bias", "mps=ds"
            );
            for row in &outcome.rows {
                println!(
                    "{:>12.6e} {:>8.4} {:>8.4} {:>7}  {}",
                    row.p, row.entropy, row.bias, row.mps_equals_ds, row.verdict
                );
            }
            match r.empirical_threshold {
                Some(p) => println!("empirical threshold: {p:.6}"),
                None => println!("empirical threshold: not reached on this grid"),
            }
            Ok(0)
        }
        Command::Casestudy {
            preset,
            params,
            emit_circuit,
            below_fraction,
        } => {
            let spec = params.spec(preset);
            if *emit_circuit {
                let circuit =
                    Workload::from_preset(&spec, cli.seed.unwrap_or(0))?.representative()?;
                emit(cli.out.as_deref(), &circuit.to_string())?;
                return Ok(0);
            }
            let mut config = CaseStudyConfig::new(PresetSpec {
                bugged: false,
                ..spec
            });
            config.shots = cli.shots();
            config.seed = cli.seed.unwrap_or(0);
            config.tolerances = cli.tolerances();
            config.gate_count_override = cli.gate_count_override;
            config.ds_override = cli.ds()?;
            config.below_fraction = *below_fraction;
            let study = run_casestudy(&config)?;
            if let Some(dir) = &cli.out {
                study.persist(dir)?;
            }
            println!(
                "{}: DS = {}  |G| = {}  P* = {:.6}",
                preset, study.ds, study.gate_count, study.thresholds.average
            );
            for c in &study.cells {
                println!(
                    "{:<8} {:<16} p={:<10.6} bias={:.4} entropy={:.4} MPS={}  {}",
                    c.variant.to_string(),
                    c.regime.to_string(),
                    c.p,
                    c.report.beta,
                    c.report.entropy,
                    c.report.mps,
                    c.report.verdict
                );
            }
            Ok(0)
        }
        Command::Mutate {
            circuit,
            count,
            pool,
        } => {
            let original = decompose(&read_circuit(circuit)?);
            let pool = match pool {
                None => DEFAULT_POOL.to_vec(),
                Some(names) => names
                    .iter()
                    .map(|n| {
                        GateKind::from_name(n).ok_or_else(|| {
                            HarnessError::InvalidConfig(format!("unknown gate `{n}` in pool"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?,
            };
            let ds = match cli.ds()? {
                Some(ds) => ds,
                None => desired_states(&original)?,
            };
            let seed = cli.seed.unwrap_or(0);
            let mutants = generate_mutants(&original, *count, &pool, seed)?;
            let study = mutant_study(&original, &ds, &cli.noise()?, &mutants, cli.shots(), seed)?;
            let csv = study.to_csv();
            match &cli.out {
                Some(dir) => {
                    #[derive(Serialize)]
                    struct Manifest {
                        id: usize,
                        edit: String,
                        circuit: String,
                    }
                    let manifest: Vec<Manifest> = mutants
                        .iter()
                        .map(|m| Manifest {
                            id: m.id,
                            edit: m.edit.to_string(),
                            circuit: m.circuit.to_string(),
                        })
                        .collect();
                    write_atomic(&dir.join("study.csv"), csv.as_bytes())?;
                    write_json(&dir.join("mutants.json"), &manifest)?;
                    write_json(&dir.join("report.json"), &study)?;
                }
                None => print!("{csv}"),
            }
            Ok(0)
        }
        Command::Diagnose { histogram, circuit } => {
            let h: Histogram = read_json(histogram, "histogram")?;
            let circuit = circuit.as_deref().map(read_circuit).transpose()?;
            let ds = match (cli.ds()?, &circuit) {
                (Some(ds), _) => ds,
                (None, Some(c)) => desired_states(c)?,
                (None, None) => {
                    return Err(HarnessError::InvalidConfig(
                        "diagnose needs --ds or --circuit to know the desired states".into(),
                    ))
                }
            };
            let gate_count = match (cli.gate_count_override, &circuit) {
                (Some(g), _) => g,
                (None, Some(c)) => decompose(c).gate_count()?.total() as f64,
                (None, None) => {
                    return Err(HarnessError::InvalidConfig(
                        "diagnose needs --gate-count-override or --circuit for the threshold"
                            .into(),
                    ))
                }
            };
            let thresholds = Thresholds::compute(h.num_qubits_measured(), ds.len(), gate_count)?;
            let noise_level = cli.noise()?.noise_level();
            let report = diagnose(
                &to_distribution(&h),
                &ds,
                noise_level,
                thresholds.average,
                &cli.tolerances(),
            )?;
            let text = serde_json::to_string_pretty(&report).expect("serializable") + "\n";
            emit(cli.out.as_deref(), &text)?;
            Ok(if report.verdict == Verdict::NoiseTooHigh {
                EXIT_NOISE_TOO_HIGH
            } else {
                0
            })
        }
        Command::Export { run_dir, format } => {
            let path = export(run_dir, format.parse::<ExportFormat>()?)?;
            println!("{}", path.display());
            Ok(0)
        }
    }
}
