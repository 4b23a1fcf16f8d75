use num_complex::Complex64 as C;
use proptest::prelude::*;
use toniq::backend::{topology_preset, BackendModel, NoiseParams, Topology};
use toniq::optimize::{nelder_mead, NelderMeadConfig};
use toniq::qaoa::{ansatz_for_matrix, noiseless_distribution, run_once, QaoaParams, RunOptions};
use toniq::qubo::{bits_to_string, builtin_instances, cost_table, QMatrix, QuboInstance};
use toniq::sim::{probabilities, QuantumState, StateVector};

type M4 = [[C; 4]; 4];

fn matmul(a: &M4, b: &M4) -> M4 {
    let mut out = [[C::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn kron(a: [[C; 2]; 2], b: [[C; 2]; 2]) -> M4 {
    // index = 2 * bit1 + bit0, so `a` acts on qubit 1 and `b` on qubit 0
    let mut out = [[C::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[i >> 1][j >> 1] * b[i & 1][j & 1];
        }
    }
    out
}

fn reference_probabilities(q: [[f64; 2]; 2], gammas: &[f64], betas: &[f64]) -> Vec<f64> {
    let cost = |x0: f64, x1: f64| q[0][0] * x0 * x0 + q[1][1] * x1 * x1 + 2.0 * q[0][1] * x0 * x1;
    let costs = [cost(0.0, 0.0), cost(1.0, 0.0), cost(0.0, 1.0), cost(1.0, 1.0)];
    let mut psi = [C::new(0.5, 0.0); 4];
    for (&g, &b) in gammas.iter().zip(betas) {
        let mut phase = [[C::new(0.0, 0.0); 4]; 4];
        for k in 0..4 {
            phase[k][k] = C::from_polar(1.0, -g * costs[k]);
        }
        let rx = [
            [C::new(b.cos(), 0.0), C::new(0.0, -b.sin())],
            [C::new(0.0, -b.sin()), C::new(b.cos(), 0.0)],
        ];
        let layer = matmul(&kron(rx, rx), &phase);
        let mut next = [C::new(0.0, 0.0); 4];
        for i in 0..4 {
            next[i] = (0..4).map(|k| layer[i][k] * psi[k]).sum();
        }
        psi = next;
    }
    psi.iter().map(|a| a.norm_sqr()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn two_qubit_ansatz_matches_dense_reference(
        d0 in -1.0f64..1.0, d1 in -1.0f64..1.0, off in -1.0f64..1.0,
        layers in 1usize..=3,
        angles in prop::collection::vec(-3.0f64..3.0, 6),
    ) {
        let q = QMatrix::from_rows(vec![vec![d0, off], vec![off, d1]]).unwrap();
        let params = QaoaParams::new(angles[..layers].to_vec(), angles[3..3 + layers].to_vec()).unwrap();
        let mut sv = StateVector::zero(2).unwrap();
        for g in ansatz_for_matrix(&q, &params) {
            sv.apply_gate(&g).unwrap();
        }
        let got = probabilities(&sv);
        let want = reference_probabilities([[d0, off], [off, d1]], &params.gammas, &params.betas);
        for (a, b) in got.iter().zip(&want) {
            prop_assert!((a - b).abs() < 1e-8, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn relabeling_qubits_permutes_the_distribution(
        perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle(),
        raw in prop::collection::vec(-1.0f64..1.0, 10),
        angles in prop::collection::vec(-3.0f64..3.0, 4),
    ) {
        let n = 4;
        let mut q = QMatrix::zeros(n);
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                q.set_sym(i, j, raw[k]);
                k += 1;
            }
        }
        let params = QaoaParams::new(angles[..2].to_vec(), angles[2..].to_vec()).unwrap();
        let base = noiseless_distribution(&cost_table(&q), n, &params);
        let moved = noiseless_distribution(&cost_table(&q.permuted(&perm)), n, &params);
        for (y, p) in moved.iter().enumerate() {
            // bit k of y is the value of old variable perm[k]
            let x: usize = (0..n).map(|k| ((y >> k) & 1) << perm[k]).sum();
            prop_assert!((p - base[x]).abs() < 1e-10);
        }
    }
}

#[test]
fn qubit_zero_is_least_significant() {
    let inst = QuboInstance::new("lsb", QMatrix::diag(&[-1.0, 1.0, 1.0]), None).unwrap();
    assert_eq!(inst.dec_states, vec![1]);
    assert_eq!(bits_to_string(&inst.ground_states[0]), "100");
    let costs = cost_table(&inst.q);
    assert_eq!(costs[1], -1.0);
    assert_eq!(costs[2], 1.0);
}

#[test]
fn nelder_mead_finds_quadratic_and_rosenbrock_minima() {
    let quad = |x: &[f64]| Ok((x[0] - 1.5).powi(2) + 3.0 * (x[1] + 0.5).powi(2));
    let cfg = NelderMeadConfig {
        max_evals: 2000,
        xtol: 1e-8,
        ftol: 1e-12,
        ..NelderMeadConfig::default()
    };
    let m = nelder_mead(quad, &[0.0, 0.0], &cfg).unwrap();
    assert!((m.x[0] - 1.5).abs() < 1e-4 && (m.x[1] + 0.5).abs() < 1e-4, "{:?}", m.x);
    assert!(m.converged);

    let rosen = |x: &[f64]| Ok(100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2));
    let m = nelder_mead(rosen, &[-1.2, 1.0], &cfg).unwrap();
    assert!(m.f < 1e-6, "rosenbrock stopped at {:?} with {}", m.x, m.f);
    assert!(m.evals <= 2000);
}

#[test]
fn nelder_mead_respects_budget_and_rejects_nan() {
    let cfg = NelderMeadConfig {
        max_evals: 15,
        ..NelderMeadConfig::default()
    };
    let m = nelder_mead(
        |x: &[f64]| Ok(x.iter().map(|v| (v - 7.0).powi(2)).sum()),
        &[0.3, 0.2, 0.1],
        &cfg,
    )
    .unwrap();
    // the budget is checked once per iteration, which may spend dim + 2 more
    assert!(m.evals <= 15 + 3 + 2);
    assert!(!m.converged);
    assert!(nelder_mead(|_: &[f64]| Ok(f64::NAN), &[1.0], &cfg).is_err());
}

#[test]
fn runs_are_deterministic_per_seed() {
    let inst = builtin_instances(3).unwrap();
    let noisy = topology_preset(Topology::IShape7, &NoiseParams::default());
    let ideal = BackendModel::ideal(3);
    for backend in [&ideal, &noisy] {
        let a = run_once(&inst, backend, 2, &RunOptions::default(), 99).unwrap();
        let b = run_once(&inst, backend, 2, &RunOptions::default(), 99).unwrap();
        let c = run_once(&inst, backend, 2, &RunOptions::default(), 100).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.params, c.params);
        assert!((0.0..=1.0).contains(&a.accuracy));
    }
}

#[test]
fn shot_sampling_is_seeded_and_bad_options_fail() {
    let inst = builtin_instances(3).unwrap();
    let noisy = topology_preset(Topology::IShape7, &NoiseParams::default());
    let opts = RunOptions {
        shots: Some(256),
        ..RunOptions::default()
    };
    assert_eq!(
        run_once(&inst, &noisy, 1, &opts, 5).unwrap(),
        run_once(&inst, &noisy, 1, &opts, 5).unwrap()
    );
    let zero = RunOptions {
        shots: Some(0),
        ..RunOptions::default()
    };
    assert!(run_once(&inst, &noisy, 1, &zero, 5).is_err());
    assert!(run_once(&inst, &noisy, 0, &RunOptions::default(), 5).is_err());
}
