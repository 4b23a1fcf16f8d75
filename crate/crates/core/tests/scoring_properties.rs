use proptest::prelude::*;
use rand::Rng;
use toniq::backend::BackendModel;
use toniq::error::Error;
use toniq::qaoa::RunOptions;
use toniq::qubo::builtin_instances;
use toniq::scoring::{
    build_reference, build_reference_samples, collect_samples, h_score, robustness_with_curve, sample_runs,
    AccuracySamples, Binning, QaoaSampler, RobustnessConfig, ScoringCurve, DEFAULT_BINS,
};
use toniq::seed::{rng_from, run_seed, Stream};

fn batch(values: Vec<f64>) -> AccuracySamples {
    AccuracySamples::new(values, "inst", 1, "synthetic", 0)
}

fn accuracies() -> impl Strategy<Value = Vec<f64>> {
    // mixes continuous values with repeated point masses, as QAOA runs produce
    prop::collection::vec(
        prop_oneof![0.0f64..=1.0, Just(0.0), Just(1.0), Just(0.25), Just(0.5)],
        1..300,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn curves_are_valid_cdfs(reference in accuracies(), uniform in any::<bool>()) {
        let binning = if uniform { Binning::Uniform } else { Binning::Quantile };
        let curve = ScoringCurve::from_samples_with(&batch(reference), DEFAULT_BINS, binning).unwrap();
        prop_assert_eq!(curve.cdf[0], 0.0);
        prop_assert_eq!(*curve.cdf.last().unwrap(), 1.0);
        prop_assert!(curve.cdf.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(curve.bin_edges.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(curve.evaluate(0.0).unwrap(), 0.0);
        prop_assert_eq!(curve.evaluate(1.0).unwrap(), 1.0);
    }

    #[test]
    fn h_score_stays_in_bounds(reference in accuracies(), scored in accuracies()) {
        let curve = ScoringCurve::from_samples(&batch(reference), DEFAULT_BINS).unwrap();
        let h = h_score(&batch(scored), &curve).unwrap().h_score;
        prop_assert!((0.0..=2.0).contains(&h));
    }

    #[test]
    fn shifting_up_never_lowers_the_score(reference in accuracies(), scored in accuracies(), shift in 0.0f64..0.5) {
        let curve = ScoringCurve::from_samples(&batch(reference), DEFAULT_BINS).unwrap();
        let before = h_score(&batch(scored.clone()), &curve).unwrap().h_score;
        let shifted: Vec<f64> = scored.iter().map(|x| (x + shift).min(1.0)).collect();
        let after = h_score(&batch(shifted), &curve).unwrap().h_score;
        prop_assert!(after >= before - 1e-12, "{before} -> {after}");
    }
}

#[test]
fn uniform_reference_gives_identity_curve() {
    let mut rng = rng_from(5);
    let reference = batch((0..10_000).map(|_| rng.gen::<f64>()).collect());
    for binning in [Binning::Quantile, Binning::Uniform] {
        let curve = ScoringCurve::from_samples_with(&reference, DEFAULT_BINS, binning).unwrap();
        for k in 0..40 {
            let x = 0.0125 + 0.025 * k as f64;
            let f = curve.evaluate(x).unwrap();
            assert!((f - x).abs() < 0.02, "{binning:?}: F({x}) = {f}");
        }
    }
}

#[test]
fn curve_at_reference_median_is_one_half() {
    let inst = builtin_instances(3).unwrap();
    let samples = build_reference_samples(&inst, 1, 2000, 42, &RunOptions::default()).unwrap();
    let mut sorted = samples.values.clone();
    sorted.sort_by(f64::total_cmp);
    let median = 0.5 * (sorted[999] + sorted[1000]);
    let curve = ScoringCurve::from_samples(&samples, DEFAULT_BINS).unwrap();
    let f = curve.evaluate(median).unwrap();
    assert!((0.45..=0.55).contains(&f), "F(median) = {f}");
}

#[test]
fn fresh_noiseless_runs_score_about_one() {
    let inst = builtin_instances(3).unwrap();
    let opts = RunOptions::default();
    let curve = build_reference(&inst, 1, 5000, 42, &opts).unwrap();
    let samples = collect_samples(&inst, &BackendModel::ideal(3), 1, 1000, 42, &opts).unwrap();
    let h = h_score(&samples, &curve).unwrap().h_score;
    assert!((h - 1.0).abs() <= 0.03, "H = {h}");
}

#[test]
fn fixed_seed_repeats_have_no_spread() {
    let inst = builtin_instances(3).unwrap();
    let opts = RunOptions::default();
    let curve = build_reference(&inst, 1, 500, 3, &opts).unwrap();
    let ideal = BackendModel::ideal(3);
    let sampler = QaoaSampler {
        instance: &inst,
        backend: &ideal,
        n_layers: 1,
        options: opts,
    };
    let cfg = RobustnessConfig {
        repeats: 10,
        scoring_runs: 50,
        reference_runs: 500,
        master_seed: 3,
        fixed_seed: true,
    };
    let fixed = robustness_with_curve(&sampler, &curve, "ideal", &cfg).unwrap();
    assert_eq!(fixed.std, 0.0);
    let fresh = robustness_with_curve(
        &sampler,
        &curve,
        "ideal",
        &RobustnessConfig {
            fixed_seed: false,
            ..cfg
        },
    )
    .unwrap();
    assert!(fresh.std > 0.0);
    assert_eq!(fresh.scores.len(), 10);
}

#[test]
fn runs_follow_their_seeds_not_the_schedule() {
    let sampler = |seed: u64| Ok((seed % 1000) as f64 / 1000.0);
    let (values, failed) = sample_runs(&sampler, 257, 9, Stream::Scoring).unwrap();
    assert_eq!(failed, 0);
    for (i, v) in values.iter().enumerate() {
        assert_eq!(*v, (run_seed(9, Stream::Scoring, i as u64) % 1000) as f64 / 1000.0);
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let serial = pool.install(|| sample_runs(&sampler, 257, 9, Stream::Scoring).unwrap());
    assert_eq!(serial.0, values);
}

#[test]
fn failure_budget_is_one_percent() {
    let seeds: Vec<u64> = (0..1000).map(|i| run_seed(1, Stream::Scoring, i)).collect();
    let failing = |count: usize| {
        let bad: Vec<u64> = seeds[..count].to_vec();
        move |seed: u64| {
            if bad.contains(&seed) {
                Err(Error::Run("diverged".into()))
            } else {
                Ok(0.5)
            }
        }
    };
    let (values, failed) = sample_runs(&failing(10), 1000, 1, Stream::Scoring).unwrap();
    assert_eq!((values.len(), failed), (990, 10));
    assert!(matches!(
        sample_runs(&failing(11), 1000, 1, Stream::Scoring),
        Err(Error::RunBudget {
            failed: 11,
            total: 1000
        })
    ));
    let invalid = |_: u64| Err(Error::InvalidArgument("bad layers".into()));
    assert!(matches!(
        sample_runs(&invalid, 10, 1, Stream::Scoring),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn small_references_are_rejected() {
    let inst = builtin_instances(3).unwrap();
    assert!(matches!(
        build_reference(&inst, 1, 99, 0, &RunOptions::default()),
        Err(Error::InvalidArgument(_))
    ));
}
