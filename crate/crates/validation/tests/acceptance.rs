//! Acceptance suite. Every criterion runs, prints one PASS/FAIL line, and
//! the process exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use qdiag::algorithms::random_circuit;
use qdiag::metrics::{
    bias, desired_states, entropy, mps, threshold_average, to_distribution, StateSet,
};
use qdiag::mutation::{generate_mutants, mutant_study, DEFAULT_POOL};
use qdiag::rng::derive_seed;
use qdiag::sim::{exact_noisy_probabilities, run_ideal, run_noisy, Histogram, NoiseModel};
use qdiag::Verdict;
use qdiag_harness::casestudy::{run_casestudy, CaseStudy, CaseStudyConfig, Regime, Variant};
use qdiag_harness::sweep::sweep_noise;
use qdiag_harness::{PresetSpec, SweepConfig, Workload};

const SHOTS: u64 = 10_000;
const SEED: u64 = 0;

type Criterion = (&'static str, &'static str, Duration, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(outcomes: &mut Vec<(bool, String)>, pass: bool, what: String) {
    outcomes.push((pass, what));
}

fn summarize(checks: Vec<(bool, String)>) -> Outcome {
    let pass = checks.iter().all(|(ok, _)| *ok);
    let detail = checks
        .iter()
        .map(|(ok, what)| {
            if *ok {
                what.clone()
            } else {
                format!("NOT {what}")
            }
        })
        .collect::<Vec<_>>()
        .join("; ");
    Outcome { pass, detail }
}

fn casestudy(name: &str, gate_override: Option<f64>) -> CaseStudy {
    let mut config = CaseStudyConfig::new(PresetSpec::named(name));
    config.shots = SHOTS;
    config.seed = SEED;
    config.gate_count_override = gate_override;
    run_casestudy(&config).unwrap()
}

fn states(list: &str) -> StateSet {
    StateSet::parse_list(list).unwrap()
}

fn thresholds() -> Outcome {
    let mut c = Vec::new();
    let a = threshold_average(3, 4, 8.0).unwrap();
    check(&mut c, a == 0.0625, format!("P*(3,4,8) = {a}"));
    let b = threshold_average(3, 1, 8.5).unwrap();
    check(
        &mut c,
        (b - 0.103).abs() <= 0.0005,
        format!("P*(3,1,8.5) = {b:.6}"),
    );
    let d = threshold_average(3, 7, 144.5).unwrap();
    check(
        &mut c,
        (d - 0.00087).abs() <= 0.00001,
        format!("P*(3,7,144.5) = {d:.7}"),
    );
    summarize(c)
}

fn simon() -> Outcome {
    let mut c = Vec::new();
    // reference gate count for s = 110, not the lowered 11
    let study = casestudy("simon", Some(8.0));
    let clean = study.cell(Variant::Correct, Regime::NoiseFree);
    let s = clean.report.entropy;
    check(
        &mut c,
        (1.97..=2.01).contains(&s),
        format!("noiseless S = {s:.4}"),
    );
    check(
        &mut c,
        study.ds == states("000,001,110,111"),
        format!("DS = {}", study.ds),
    );
    check(
        &mut c,
        (study.thresholds.average - 0.0625).abs() < 1e-12,
        "P* = 0.0625".into(),
    );
    let expect = [
        (Variant::Correct, Regime::NoiseFree, Verdict::NoBugsNoNoise),
        (
            Variant::Correct,
            Regime::BelowThreshold,
            Verdict::NoBugsNoisePresent,
        ),
        (Variant::Bugged, Regime::NoiseFree, Verdict::BugsPresent),
        (
            Variant::Bugged,
            Regime::BelowThreshold,
            Verdict::BugsPresent,
        ),
    ];
    for (v, r, want) in expect {
        let got = study.cell(v, r).report.verdict;
        check(&mut c, got == want, format!("{v}/{r}: {got}"));
    }
    // bugged variant at low noise
    let mut spec = PresetSpec::named("simon");
    spec.bugged = true;
    let bugged = Workload::from_preset(&spec, SEED).unwrap();
    let h = bugged
        .run(&NoiseModel::uniform(0.003).unwrap(), SHOTS, SEED)
        .unwrap();
    let beta = bias(&to_distribution(&h), &study.ds).unwrap();
    check(
        &mut c,
        beta >= 0.90,
        format!("bugged beta(p=0.003) = {beta:.4}"),
    );
    summarize(c)
}

fn dj_constant() -> Outcome {
    let mut c = Vec::new();
    let study = casestudy("dj-constant", None);
    let s = study
        .cell(Variant::Correct, Regime::NoiseFree)
        .report
        .entropy;
    check(&mut c, s < 0.01, format!("noiseless S = {s:.4}"));
    let below = study.cell(Variant::Correct, Regime::BelowThreshold);
    check(
        &mut c,
        below.report.mps == states("000"),
        format!("MPS(p={:.4}) = {}", below.p, below.report.mps),
    );
    for r in [Regime::NoiseFree, Regime::BelowThreshold] {
        let got = study.cell(Variant::Bugged, r).report.verdict;
        check(
            &mut c,
            got == Verdict::BugsPresent,
            format!("bugged/{r}: {got}"),
        );
    }
    check(
        &mut c,
        (study.gate_count - 8.5).abs() < 0.05,
        format!("mean |G| = {:.3}", study.gate_count),
    );
    summarize(c)
}

fn dj_balanced() -> Outcome {
    let mut c = Vec::new();
    let study = casestudy("dj-balanced", None);
    let s = study
        .cell(Variant::Correct, Regime::NoiseFree)
        .report
        .entropy;
    check(
        &mut c,
        (2.78..=2.83).contains(&s),
        format!("noiseless aggregate S = {s:.4}"),
    );
    for r in [Regime::NoiseFree, Regime::BelowThreshold] {
        let cell = study.cell(Variant::Bugged, r);
        check(
            &mut c,
            cell.report.mps.contains("000"),
            format!("bugged/{r}: MPS = {}", cell.report.mps),
        );
        let got = cell.report.verdict;
        check(
            &mut c,
            got == Verdict::BugsPresent,
            format!("bugged/{r}: {got}"),
        );
    }
    summarize(c)
}

fn grover_workload() -> (SweepConfig, Workload) {
    let config = SweepConfig::preset("grover");
    let w = Workload::from_source(&config.source, SEED).unwrap();
    (config, w)
}

fn grover_noiseless() -> Outcome {
    let (_, w) = grover_workload();
    let h = w.run(&NoiseModel::ideal(), SHOTS, SEED).unwrap();
    let p = to_distribution(&h).probability("000");
    summarize(vec![(p >= 0.94, format!("P(000) = {p:.4}"))])
}

fn entropy_sigma(h: &Histogram) -> f64 {
    // delta-method standard error of the plug-in entropy
    let d = to_distribution(h);
    let s = entropy(&d);
    let m2: f64 = d.iter().map(|(_, p)| p * p.log2() * p.log2()).sum();
    ((m2 - s * s).max(0.0) / h.shots() as f64).sqrt()
}

fn grover_sweep_shape() -> Outcome {
    let mut c = Vec::new();
    let (mut config, _) = grover_workload();
    config.seed = SEED;
    let out = sweep_noise(&config).unwrap();
    let mut worst = f64::INFINITY;
    for k in 1..out.rows.len() {
        let drop = out.rows[k].entropy - out.rows[k - 1].entropy;
        let sigma = entropy_sigma(&out.histograms[k]).hypot(entropy_sigma(&out.histograms[k - 1]));
        worst = worst.min(drop + 2.0 * sigma);
    }
    check(
        &mut c,
        worst >= 0.0,
        format!("entropy nondecreasing within 2 sigma (min slack {worst:.4})"),
    );
    let last = out.rows.last().unwrap().entropy;
    check(
        &mut c,
        (3.0 - last).abs() <= 0.15,
        format!("saturates at S = {last:.4}"),
    );
    summarize(c)
}

fn grover_threshold() -> Outcome {
    // the default grid steps by 10^0.2 (x1.58); measure on a 0.0025 grid instead
    let (mut config, _) = grover_workload();
    config.grid = (1..=80).map(|k| k as f64 * 0.0025).collect();
    let fine = sweep_noise(&config).unwrap();
    let t = fine.report.empirical_threshold;
    let coarse = sweep_noise(&grover_workload().0)
        .unwrap()
        .report
        .empirical_threshold;
    let p_star = fine.report.thresholds.average;
    summarize(vec![
        (
            t.is_some_and(|t| (0.02..=0.08).contains(&t)),
            format!("empirical threshold = {t:?} (default grid: {coarse:?})"),
        ),
        (
            t.is_some_and(|t| t > p_star),
            format!("exceeds P* = {p_star:.5}"),
        ),
    ])
}

fn grover_backend_bias() -> Outcome {
    let (_, w) = grover_workload();
    let h = w
        .run(&NoiseModel::uniform(0.005).unwrap(), SHOTS, SEED)
        .unwrap();
    let b = bias(&to_distribution(&h), w.ds()).unwrap();
    summarize(vec![(
        (0.01..=0.08).contains(&b),
        format!("bias(p=0.005) = {b:.4} in [0.01, 0.08]"),
    )])
}

fn channel_equivalence() -> Outcome {
    let mut worst: (f64, String) = (0.0, String::new());
    for i in 0..20u64 {
        let n = 2 + (i % 3) as usize;
        let depth = 1 + (i % 5) as usize;
        let circuit = random_circuit(n, depth, derive_seed(SEED, i)).unwrap();
        for p in [0.01, 0.1, 0.5, 1.0] {
            let noise = NoiseModel::uniform(p).unwrap();
            let exact = exact_noisy_probabilities(&circuit, &noise).unwrap();
            let sampled = run_noisy(&circuit, &noise, 50_000, derive_seed(SEED, 100 + i)).unwrap();
            let tvd = exact.tvd(&to_distribution(&sampled));
            if tvd > worst.0 {
                worst = (tvd, format!("circuit {i} ({n}q, depth {depth}), p = {p}"));
            }
        }
    }
    summarize(vec![(
        worst.0 < 0.02,
        format!("max TVD = {:.4} at {}", worst.0, worst.1),
    )])
}

fn mutation_corpus() -> Outcome {
    let noise = NoiseModel::uniform(0.005).unwrap();
    let (mut changed, mut separated, mut near_max, mut parents, mut tag) =
        (0usize, 0usize, 0usize, 0usize, 0u64);
    while parents < 100 {
        tag += 1;
        let seed = derive_seed(SEED, tag);
        let depth = 1 + (tag % 5) as usize;
        let parent = random_circuit(3, depth, seed).unwrap();
        let ds = desired_states(&parent).unwrap();
        if ds.len() == 8 {
            continue;
        }
        parents += 1;
        let mutants = generate_mutants(&parent, 20, &DEFAULT_POOL, seed).unwrap();
        let study = mutant_study(&parent, &ds, &noise, &mutants, SHOTS, seed).unwrap();
        let clean = run_ideal(&parent, SHOTS, derive_seed(seed, 1 << 32)).unwrap();
        let noise_only = study.baseline.bias - bias(&to_distribution(&clean), &ds).unwrap();
        for r in &study.records {
            if !r.mps_equals_ds {
                changed += 1;
                if r.delta_bias > 3.0 * noise_only {
                    separated += 1;
                }
            }
            if (r.entropy - 3.0).abs() <= 0.05 {
                near_max += 1;
            }
        }
    }
    let frac = separated as f64 / changed.max(1) as f64;
    summarize(vec![
        (
            frac >= 0.90,
            format!("(a) {separated}/{changed} = {:.1}% of MPS-changing mutants have dBias > 3x noise-only dBias", 100.0 * frac),
        ),
        (near_max > 0, format!("(b) {near_max} of 2000 mutants within 0.05 of S = 3")),
    ])
}

fn metric_properties() -> Outcome {
    let mut c = Vec::new();
    let point = run_ideal(&qdiag::Circuit::new(3).unwrap().measure_all(), 100, 0).unwrap();
    check(
        &mut c,
        entropy(&to_distribution(&point)) == 0.0,
        "point mass: 0 bits".into(),
    );
    let uniform = qdiag::sim::Distribution::from_dense(3, &[0.125; 8]).unwrap();
    check(
        &mut c,
        (entropy(&uniform) - 3.0).abs() < 1e-12,
        "uniform-8: 3 bits".into(),
    );

    let (mut complement, mut scale, mut argmax) = (true, true, true);
    for i in 0..200u64 {
        let circuit = random_circuit(3, 1 + (i % 5) as usize, derive_seed(7, i)).unwrap();
        let h = run_noisy(&circuit, &NoiseModel::uniform(0.02).unwrap(), 2000, i).unwrap();
        let d = to_distribution(&h);
        let inside: BTreeSet<String> = (0..8u64)
            .filter(|y| derive_seed(i, *y) & 1 == 1)
            .map(|y| qdiag::sim::outcome_label(y, 3))
            .collect();
        if !inside.is_empty() && inside.len() < 8 {
            let rest: Vec<String> = (0..8u64)
                .map(|y| qdiag::sim::outcome_label(y, 3))
                .filter(|s| !inside.contains(s))
                .collect();
            let total = bias(&d, &StateSet::new(inside.iter()).unwrap()).unwrap()
                + bias(&d, &StateSet::new(rest).unwrap()).unwrap();
            complement &= (total - 1.0).abs() < 1e-12;
        }
        scale &= mps(&d, 5.0) == mps(&to_distribution(&h.scaled(7).unwrap()), 5.0);
        let max = h.counts().values().max().unwrap();
        let top =
            StateSet::new(h.counts().iter().filter(|(_, c)| *c == max).map(|(s, _)| s)).unwrap();
        argmax &= mps(&d, 0.0) == top;
    }
    check(&mut c, complement, "bias complement identity".into());
    check(&mut c, scale, "MPS scale invariance".into());
    check(&mut c, argmax, "mps(d, 0) = argmax set".into());
    summarize(c)
}

fn determinism() -> Outcome {
    let mut c = Vec::new();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut config = SweepConfig::preset("dj-balanced");
    config.grid = vec![0.0, 0.001, 0.01];
    config.shots = 2000;
    config.seed = 99;
    for d in &dirs {
        sweep_noise(&config).unwrap().persist(d.path()).unwrap();
    }
    let read = |d: &tempfile::TempDir, name: &str| std::fs::read(d.path().join(name)).unwrap();
    let mut same = true;
    for name in [
        "rows.csv",
        "rows.json",
        "report.json",
        "config.toml",
        "histograms/p_000.json",
        "histograms/p_002.json",
    ] {
        same &= read(&dirs[0], name) == read(&dirs[1], name);
    }
    check(&mut c, same, "sweep run directories byte-identical".into());
    let mut cs = CaseStudyConfig::new(PresetSpec::named("simon"));
    cs.shots = 2000;
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_casestudy(&cs).unwrap().persist(a.path()).unwrap();
    run_casestudy(&cs).unwrap().persist(b.path()).unwrap();
    let file = "casestudy.json";
    check(
        &mut c,
        read(&a, file) == read(&b, file),
        "case-study report byte-identical".into(),
    );
    summarize(c)
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        (
            "1",
            "threshold formulas",
            Duration::from_secs(1),
            thresholds,
        ),
        ("2", "Simon case study", Duration::from_secs(60), simon),
        (
            "3",
            "DJ constant case study",
            Duration::from_secs(60),
            dj_constant,
        ),
        (
            "4",
            "DJ balanced case study",
            Duration::from_secs(120),
            dj_balanced,
        ),
        (
            "5a",
            "Grover noiseless success",
            Duration::from_secs(300),
            grover_noiseless,
        ),
        (
            "5b",
            "Grover entropy sweep",
            Duration::from_secs(300),
            grover_sweep_shape,
        ),
        (
            "5c",
            "Grover empirical threshold",
            Duration::from_secs(300),
            grover_threshold,
        ),
        (
            "5d",
            "Grover bias at p = 0.005",
            Duration::from_secs(300),
            grover_backend_bias,
        ),
        (
            "6",
            "trajectory vs density channel",
            Duration::from_secs(300),
            channel_equivalence,
        ),
        (
            "7",
            "mutation corpus",
            Duration::from_secs(600),
            mutation_corpus,
        ),
        (
            "8",
            "metric properties",
            Duration::from_secs(1),
            metric_properties,
        ),
        ("9", "determinism", Duration::from_secs(10), determinism),
    ];
    let mut failed = Vec::new();
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let pass = outcome.pass && in_time;
        println!(
            "acceptance {id:<3} {name:<32} {}  [{:.2}s] {}{}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            outcome.detail,
            if in_time {
                String::new()
            } else {
                format!("; NOT within {budget:?}")
            }
        );
        if !pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing criteria {}", failed.join(", "));
        std::process::exit(1);
    }
}
