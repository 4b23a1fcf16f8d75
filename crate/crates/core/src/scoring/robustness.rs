use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::curve::ScoringCurve;
use super::h_score;
use super::samples::{build_reference, sample_runs, AccuracySamples, QaoaSampler, RunSampler};
use crate::backend::BackendModel;
use crate::error::{Error, Result};
use crate::qaoa::RunOptions;
use crate::qubo::QuboInstance;
use crate::seed::Stream;

/// Spread of H-Scores over independent repeats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatStats {
    pub repeats: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator).
    pub std: f64,
    pub ci95_mean: [f64; 2],
    pub ci95_std: [f64; 2],
    pub scores: Vec<f64>,
}

/// Normal fit of a set of scores with 95% intervals for the mean and the
/// standard deviation.
pub fn fit_gaussian(scores: &[f64]) -> Result<RepeatStats> {
    let n = scores.len();
    if n < 2 {
        return Err(Error::invalid("need at least two scores to fit a spread"));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::invalid("scores must be finite"));
    }
    let mean = if scores.iter().all(|&s| s == scores[0]) {
        scores[0]
    } else {
        scores.iter().sum::<f64>() / n as f64
    };
    let var = scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let std = var.sqrt();
    let half = 1.96 * std / (n as f64).sqrt();
    let dof = (n - 1) as f64;
    let chi = ChiSquared::new(dof).map_err(|e| Error::invalid(e.to_string()))?;
    let (lo_q, hi_q) = (chi.inverse_cdf(0.025), chi.inverse_cdf(0.975));
    Ok(RepeatStats {
        repeats: n,
        mean,
        std,
        ci95_mean: [mean - half, mean + half],
        ci95_std: [(dof * var / hi_q).sqrt(), (dof * var / lo_q).sqrt()],
        scores: scores.to_vec(),
    })
}

/// Fewest repeats a robustness study accepts.
pub const MIN_REPEATS: usize = 10;

/// Sizes and seeding of a robustness study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobustnessConfig {
    pub repeats: usize,
    pub scoring_runs: usize,
    pub reference_runs: usize,
    pub master_seed: u64,
    /// Reuse the scoring seeds in every repeat instead of a fresh stream per repeat.
    pub fixed_seed: bool,
}

impl RobustnessConfig {
    fn stream(&self, r: usize) -> Stream {
        if self.fixed_seed {
            Stream::Scoring
        } else {
            Stream::Repeat(r as u32)
        }
    }
}

/// Builds the reference curve, then scores `backend` `cfg.repeats` times.
pub fn robustness(
    inst: &QuboInstance,
    backend: &BackendModel,
    n_layers: usize,
    cfg: &RobustnessConfig,
    opts: &RunOptions,
) -> Result<RepeatStats> {
    let curve = build_reference(inst, n_layers, cfg.reference_runs, cfg.master_seed, opts)?;
    let sampler = QaoaSampler {
        instance: inst,
        backend,
        n_layers,
        options: *opts,
    };
    robustness_with_curve(&sampler, &curve, &backend.name, cfg)
}

/// Repeats H-Scoring against a fixed curve. Repeat `r` draws its runs from its
/// own seed stream, so repeats are independent of each other and of the curve.
pub fn robustness_with_curve(
    sampler: &dyn RunSampler,
    curve: &ScoringCurve,
    backend_name: &str,
    cfg: &RobustnessConfig,
) -> Result<RepeatStats> {
    if cfg.repeats < MIN_REPEATS {
        return Err(Error::invalid(format!(
            "robustness needs at least {MIN_REPEATS} repeats, got {}",
            cfg.repeats
        )));
    }
    let mut scores = Vec::with_capacity(cfg.repeats);
    for r in 0..cfg.repeats {
        let (values, failed) = sample_runs(sampler, cfg.scoring_runs, cfg.master_seed, cfg.stream(r))?;
        let mut samples = AccuracySamples::new(
            values,
            curve.instance_id.clone(),
            curve.n_layers,
            backend_name,
            cfg.master_seed,
        );
        samples.failed_runs = failed;
        scores.push(h_score(&samples, curve)?.h_score);
    }
    fit_gaussian(&scores)
}
