//! The sampled trajectory route against exact density-matrix evolution.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use proptest::prelude::*;
use qdiag::algorithms::random_circuit;
use qdiag::metrics::to_distribution;
use qdiag::sim::{exact_noisy_probabilities, run_noisy, DensityMatrix, NoiseModel};
use qdiag::{Circuit, GateOp};

#[test]
fn trajectories_match_channel_evolution() {
    for seed in 0..3 {
        let c = random_circuit(3, 3, seed).unwrap();
        for p in [0.01, 0.1, 1.0] {
            let noise = NoiseModel::uniform(p).unwrap();
            let exact = exact_noisy_probabilities(&c, &noise).unwrap();
            let sampled = to_distribution(&run_noisy(&c, &noise, 50_000, seed).unwrap());
            let tvd = exact.tvd(&sampled);
            assert!(tvd < 0.02, "seed {seed} p {p}: tvd {tvd}");
        }
    }
}

#[test]
fn separate_single_and_two_qubit_rates() {
    let c = Circuit::from_parts(
        2,
        vec![GateOp::h(0), GateOp::cx(0, 1), GateOp::x(1)],
        vec![0, 1],
    )
    .unwrap();
    let noise = NoiseModel::new(0.0, 0.4).unwrap();
    let exact = exact_noisy_probabilities(&c, &noise).unwrap();
    let sampled = to_distribution(&run_noisy(&c, &noise, 50_000, 3).unwrap());
    assert!(exact.tvd(&sampled) < 0.02);
}

fn eigenvalues(rho: &DensityMatrix) -> Vec<f64> {
    let m = DMatrix::from_fn(rho.dim(), rho.dim(), |r, c| rho.get(r, c));
    SymmetricEigen::new(m).eigenvalues.iter().copied().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn noisy_density_stays_a_state(seed in 0u64..10_000, p1 in 0.0f64..=1.0, p2 in 0.0f64..=1.0) {
        let c = random_circuit(3, 4, seed).unwrap();
        let noise = NoiseModel::new(p1, p2).unwrap();
        let mut rho = DensityMatrix::zero(3);
        for op in c.ops() {
            rho.apply_gate(op);
            if op.controls.is_empty() {
                rho.depolarize_1q(noise.lambda1(), op.target);
            } else {
                rho.depolarize_2q(noise.lambda2(), op.controls[0], op.target);
            }
        }
        prop_assert!((rho.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        prop_assert!(rho.hermiticity_error() < 1e-10);
        for ev in eigenvalues(&rho) {
            prop_assert!(ev > -1e-10, "negative eigenvalue {}", ev);
        }
    }
}
