use proptest::prelude::*;
use toniq::backend::{topology_preset, NoiseParams, Topology};
use toniq::error::Error;
use toniq::fleet::{score_fleet, score_fleet_with, Strategy, POOLING};
use toniq::qaoa::RunOptions;
use toniq::qubo::builtin_instances;
use toniq::scoring::{build_reference, h_score, AccuracySamples, RunSampler, ScoringCurve, DEFAULT_BINS};

/// Accuracy `quality * u` with `u` uniform in `[0, 1)` from the seed.
fn graded(quality: f64) -> impl Fn(u64) -> toniq::error::Result<f64> + Sync {
    move |seed| Ok(quality * ((seed >> 11) as f64 / (1u64 << 53) as f64))
}

fn uniform_curve() -> ScoringCurve {
    let values = (0..10_000).map(|i| (i as f64 + 0.5) / 10_000.0).collect();
    ScoringCurve::from_samples(&AccuracySamples::new(values, "inst", 1, "reference", 0), DEFAULT_BINS).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn selections_are_deterministic_and_well_formed(
        qualities in prop::collection::vec(0.2f64..1.0, 2..7),
        k_frac in 0.0f64..1.0,
        seed in any::<u64>(),
    ) {
        let samplers: Vec<_> = qualities.iter().map(|&q| graded(q)).collect();
        let names: Vec<String> = (0..samplers.len()).map(|i| format!("b{i}")).collect();
        let fleet: Vec<(&str, &dyn RunSampler)> =
            names.iter().zip(&samplers).map(|(n, s)| (n.as_str(), s as &dyn RunSampler)).collect();
        let k = 1 + (k_frac * (fleet.len() - 1) as f64) as usize;
        let curve = uniform_curve();
        for strategy in [Strategy::RankedTopK, Strategy::RandomK, Strategy::WorstK] {
            let a = score_fleet_with(&fleet, "inst", 1, 60, seed).unwrap().select(&curve, k, strategy, 20).unwrap();
            let b = score_fleet_with(&fleet, "inst", 1, 60, seed).unwrap().select(&curve, k, strategy, 20).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(a.chosen.len(), k);
            prop_assert!(a.chosen.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(a.chosen.iter().all(|c| names.contains(c)));
            prop_assert_eq!(a.pooling.as_str(), POOLING);
        }
        let ranking = score_fleet_with(&fleet, "inst", 1, 60, seed).unwrap().ranking(&curve).unwrap();
        prop_assert!(ranking.entries.windows(2).all(|w| w[0].h_score >= w[1].h_score));
    }
}

#[test]
fn single_backend_pool_equals_its_own_score() {
    let s = graded(0.7);
    let runs = score_fleet_with(&[("solo", &s as &dyn RunSampler)], "inst", 1, 200, 4).unwrap();
    let curve = uniform_curve();
    let own = h_score(&runs.pooled_samples(&["solo"]).unwrap(), &curve)
        .unwrap()
        .h_score;
    for strategy in [Strategy::RankedTopK, Strategy::RandomK, Strategy::WorstK] {
        let out = runs.select(&curve, 1, strategy, 5).unwrap();
        assert_eq!(out.chosen, vec!["solo".to_string()]);
        assert_eq!(out.pooled_report.h_score, own);
    }
    assert_eq!(runs.ranking(&curve).unwrap().entries[0].h_score, own);
}

#[test]
fn pooling_takes_runs_round_robin_by_name() {
    let a = |_: u64| Ok(0.1);
    let b = |_: u64| Ok(0.2);
    let c = |_: u64| Ok(0.3);
    let fleet: [(&str, &dyn RunSampler); 3] = [("c", &c), ("a", &a), ("b", &b)];
    let runs = score_fleet_with(&fleet, "inst", 1, 7, 0).unwrap();
    let pooled = runs.pooled_samples(&["c", "a"]).unwrap();
    assert_eq!(pooled.values, vec![0.1, 0.3, 0.1, 0.3, 0.1, 0.3, 0.1]);
    assert_eq!(pooled.backend_name, "a+c");
}

#[test]
fn unreliable_backends_are_excluded() {
    let good = graded(0.9);
    let flaky = |seed: u64| {
        if seed.is_multiple_of(10) {
            Err(Error::Run("timeout".into()))
        } else {
            Ok(0.5)
        }
    };
    let fleet: [(&str, &dyn RunSampler); 2] = [("good", &good), ("flaky", &flaky)];
    let ranking = score_fleet_with(&fleet, "inst", 1, 500, 1)
        .unwrap()
        .ranking(&uniform_curve())
        .unwrap();
    assert_eq!(ranking.names(), vec!["good"]);
    assert_eq!(ranking.excluded[0].backend_name, "flaky");
}

#[test]
fn bad_fleets_and_k_are_rejected() {
    let s = graded(0.5);
    let dup: [(&str, &dyn RunSampler); 2] = [("x", &s), ("x", &s)];
    assert!(score_fleet_with(&dup, "inst", 1, 10, 0).is_err());
    assert!(score_fleet_with(&[], "inst", 1, 10, 0).is_err());
    let runs = score_fleet_with(&[("x", &s as &dyn RunSampler)], "inst", 1, 10, 0).unwrap();
    let curve = uniform_curve();
    assert!(runs.select(&curve, 0, Strategy::RankedTopK, 10).is_err());
    assert!(runs.select(&curve, 2, Strategy::RankedTopK, 10).is_err());
    assert!(runs.select(&curve, 1, Strategy::RandomK, 1).is_err());
}

#[test]
fn doubling_two_qubit_error_lowers_rank() {
    let inst = builtin_instances(3).unwrap();
    let opts = RunOptions::default();
    let curve = build_reference(&inst, 1, 2000, 42, &opts).unwrap();
    let fleet = vec![
        topology_preset(Topology::IShape7, &NoiseParams::two_qubit_only(0.02)).with_name("noisier"),
        topology_preset(Topology::IShape7, &NoiseParams::two_qubit_only(0.01)).with_name("quieter"),
    ];
    let ranking = score_fleet(&fleet, &inst, 1, 300, 42, &opts)
        .unwrap()
        .ranking(&curve)
        .unwrap();
    assert_eq!(ranking.names(), vec!["quieter", "noisier"]);
}
