//! Scoring curves and H-Scores.
//!
//! A scoring curve is the empirical CDF `F` of noiseless reference accuracies,
//! built as a histogram over `[0, 1]`, its normalized cumulative sum, and linear
//! interpolation between bin edges. A backend's H-Score over accuracies `X_i` is
//! `C = (2/M) sum_i F(X_i)`: 1 when the backend matches the reference
//! distribution, 2 when every run is perfect, 0 when every run fails.

mod curve;
mod robustness;
mod samples;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use curve::{Binning, ScoringCurve, DEFAULT_BINS};
pub use robustness::{fit_gaussian, robustness, robustness_with_curve, RepeatStats, RobustnessConfig, MIN_REPEATS};
pub use samples::{
    build_reference, build_reference_samples, collect_samples, sample_runs, AccuracySamples, FixedAccuracy,
    QaoaSampler, RunSampler, FAILURE_BUDGET, MIN_REFERENCE_RUNS,
};

/// Reference sample count used when none is given.
pub const DEFAULT_REFERENCE_RUNS: usize = 10_000;
/// Scoring runs per H-Score.
pub const DEFAULT_SCORING_RUNS: usize = 1000;
/// Independent H-Scores in a robustness study.
pub const DEFAULT_REPEATS: usize = 200;

/// An H-Score with the context it was computed in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HScoreReport {
    pub h_score: f64,
    #[serde(rename = "M_used")]
    pub m_used: usize,
    pub instance_id: String,
    pub n_layers: usize,
    pub backend_name: String,
    pub master_seed: u64,
    pub failed_runs: usize,
    /// `F(X_i)` per run, when retained.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_run_scores: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repeat_stats: Option<RepeatStats>,
}

fn check_context(samples: &AccuracySamples, curve: &ScoringCurve) -> Result<()> {
    if samples.instance_id != curve.instance_id || samples.n_layers != curve.n_layers {
        return Err(Error::ScoringContext(format!(
            "samples are for ({}, {} layers) but the curve is for ({}, {} layers)",
            samples.instance_id, samples.n_layers, curve.instance_id, curve.n_layers
        )));
    }
    Ok(())
}

/// `C = (2/M) sum_i F(X_i)` over the samples, with per-run scores retained.
pub fn h_score(samples: &AccuracySamples, curve: &ScoringCurve) -> Result<HScoreReport> {
    check_context(samples, curve)?;
    samples.validate()?;
    let scores = samples
        .values
        .iter()
        .map(|&x| curve.evaluate(x))
        .collect::<Result<Vec<f64>>>()?;
    let m = scores.len();
    let h = (2.0 * scores.iter().sum::<f64>() / m as f64).clamp(0.0, 2.0);
    Ok(HScoreReport {
        h_score: h,
        m_used: m,
        instance_id: samples.instance_id.clone(),
        n_layers: samples.n_layers,
        backend_name: samples.backend_name.clone(),
        master_seed: samples.master_seed,
        failed_runs: samples.failed_runs,
        per_run_scores: Some(scores),
        repeat_stats: None,
    })
}

/// Scores `a` against a curve built from `b`: above 1 means `a` tends to reach
/// higher accuracy than `b`, below 1 lower.
pub fn compare_distr(a: &AccuracySamples, b: &AccuracySamples) -> Result<f64> {
    if a.instance_id != b.instance_id || a.n_layers != b.n_layers {
        return Err(Error::ScoringContext(format!(
            "cannot compare ({}, {} layers) with ({}, {} layers)",
            a.instance_id, a.n_layers, b.instance_id, b.n_layers
        )));
    }
    let curve = ScoringCurve::from_samples(b, DEFAULT_BINS)?;
    Ok(h_score(a, &curve)?.h_score)
}
