use std::path::Path;

use proptest::prelude::*;
use toniq::backend::{
    mitigate_readout, route_and_compile, select_layout, topology_preset, BackendModel, Executor, NoiseParams, Topology,
};
use toniq::qaoa::{ansatz_for_matrix, QaoaParams};
use toniq::qubo::QMatrix;
use toniq::sim::{apply_readout_error, probabilities, GateKind, GateOp, QuantumState, ReadoutError, StateVector};

fn random_qaoa(n: usize, layers: usize, raw: &[i32], angles: &[f64]) -> Vec<GateOp> {
    let mut q = QMatrix::zeros(n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            q.set_sym(i, j, raw[k % raw.len()] as f64 / 100.0);
            k += 1;
        }
    }
    let params = QaoaParams::new(angles[..layers].to_vec(), angles[layers..2 * layers].to_vec()).unwrap();
    ansatz_for_matrix(&q, &params)
}

fn logical_distribution(n: usize, gates: &[GateOp]) -> Vec<f64> {
    let mut sv = StateVector::zero(n).unwrap();
    for g in gates {
        sv.apply_gate(g).unwrap();
    }
    probabilities(&sv)
}

fn classical_fidelity(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum::<f64>().powi(2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn routing_preserves_semantics(
        n in 3usize..=5,
        layers in 1usize..=2,
        raw in prop::collection::vec(-100i32..=100, 15),
        angles in prop::collection::vec(-3.0f64..3.0, 4),
    ) {
        let circuit = random_qaoa(n, layers, &raw, &angles);
        let expected = logical_distribution(n, &circuit);
        for kind in Topology::ALL {
            let b = topology_preset(kind, &NoiseParams::noiseless());
            let layout = select_layout(&b, n).unwrap();
            let compiled = route_and_compile(&circuit, &b, &layout).unwrap();
            prop_assert!(compiled.gates.iter().all(|g| !matches!(g.kind(), GateKind::RZZ | GateKind::SWAP)));
            for g in &compiled.gates {
                if let [a, c] = g.qubits()[..] {
                    prop_assert!(b.is_adjacent(a, c), "{:?} on {}", g, b.name);
                }
            }
            let got = Executor::new(&b).unwrap().run(&compiled).unwrap().dist;
            prop_assert_eq!(got.len(), expected.len());
            for (x, y) in expected.iter().zip(&got) {
                prop_assert!((x - y).abs() < 1e-8, "{} differs by {}", b.name, (x - y).abs());
            }
        }
    }

    #[test]
    fn mitigation_inverts_readout(
        raw in prop::collection::vec(0.0f64..1.0, 8),
        flips in prop::collection::vec((0.0f64..0.2, 0.0f64..0.2), 3),
    ) {
        let total: f64 = raw.iter().sum::<f64>() + 1e-9;
        let dist: Vec<f64> = raw.iter().map(|v| (v + 1e-9 / 8.0) / total).collect();
        let readout: Vec<ReadoutError> = flips.iter().map(|&(a, b)| ReadoutError::new(a, b)).collect();
        let mut b = topology_preset(Topology::IShape7, &NoiseParams::default());
        let layout = select_layout(&b, 3).unwrap();
        for (l, r) in readout.iter().enumerate() {
            b.readout[layout.physical(l)] = *r;
        }
        let noisy = apply_readout_error(&dist, &readout).unwrap();
        let back = mitigate_readout(&noisy, &b, &layout).unwrap();
        prop_assert_eq!(back.len(), dist.len());
        for (x, y) in dist.iter().zip(&back) {
            prop_assert!((x - y).abs() < 1e-8);
        }
    }
}

#[test]
fn more_two_qubit_noise_never_raises_fidelity() {
    let mut state = 17u64;
    let mut next = || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 33) as f64 / (1u64 << 31) as f64
    };
    for _ in 0..20 {
        let raw: Vec<i32> = (0..6).map(|_| (next() * 200.0) as i32 - 100).collect();
        let angles: Vec<f64> = (0..2).map(|_| next() * 6.0 - 3.0).collect();
        let circuit = random_qaoa(3, 1, &raw, &angles);
        let ideal = logical_distribution(3, &circuit);
        let fidelity = |p2: f64| {
            let b = topology_preset(Topology::IShape7, &NoiseParams::two_qubit_only(p2));
            let layout = select_layout(&b, 3).unwrap();
            let c = route_and_compile(&circuit, &b, &layout).unwrap();
            classical_fidelity(&ideal, &Executor::new(&b).unwrap().run(&c).unwrap().dist)
        };
        let (lo, hi) = (fidelity(0.01), fidelity(0.04));
        assert!(lo >= hi - 1e-12, "p2 0.01 fidelity {lo} below p2 0.04 fidelity {hi}");
    }
}

#[test]
fn shipped_backends_match_presets() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("backends");
    for kind in Topology::ALL {
        let loaded = BackendModel::load(dir.join(format!("{kind}.json"))).unwrap();
        let preset = topology_preset(kind, &NoiseParams::default());
        assert_eq!(loaded.to_json(), preset.to_json(), "{kind}");
    }
}

#[test]
fn backend_json_round_trip_with_edge_overrides() {
    let b = topology_preset(Topology::HeavyHex16, &NoiseParams::default())
        .with_edge_p2(1, 4, 0.02)
        .unwrap()
        .with_name("tweaked");
    let back = BackendModel::from_json(&b.to_json()).unwrap();
    assert_eq!(back.edge_p2(4, 1), 0.02);
    assert_eq!(back.to_json(), b.to_json());
}

#[test]
fn invalid_backends_are_rejected() {
    let mut noise = NoiseParams::default();
    noise.t2 = 3.0 * noise.t1;
    assert!(BackendModel::with_uniform_noise("bad", 2, &[(0, 1)], &noise).is_err());
    assert!(BackendModel::with_uniform_noise("split", 4, &[(0, 1), (2, 3)], &NoiseParams::default()).is_err());
    assert!(BackendModel::from_json("{\"name\": 3}").is_err());
}
