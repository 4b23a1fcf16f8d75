use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::backend::BackendModel;
use crate::error::{Error, Result};
use crate::qaoa::{run_once, RunOptions};
use crate::qubo::QuboInstance;
use crate::seed::{run_seed, Stream};

use super::curve::{ScoringCurve, DEFAULT_BINS};

/// Fewest reference runs a scoring curve may be built from.
pub const MIN_REFERENCE_RUNS: usize = 100;

/// Largest fraction of runs allowed to fail before a batch is rejected.
pub const FAILURE_BUDGET: f64 = 0.01;

/// Accuracies from repeated QAOA runs, tagged with the context they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracySamples {
    pub values: Vec<f64>,
    pub instance_id: String,
    pub n_layers: usize,
    pub backend_name: String,
    pub master_seed: u64,
    #[serde(default)]
    pub failed_runs: usize,
}

impl AccuracySamples {
    pub fn new(
        values: Vec<f64>,
        instance_id: impl Into<String>,
        n_layers: usize,
        backend_name: impl Into<String>,
        master_seed: u64,
    ) -> Self {
        AccuracySamples {
            values,
            instance_id: instance_id.into(),
            n_layers,
            backend_name: backend_name.into(),
            master_seed,
            failed_runs: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::invalid("no accuracy samples"));
        }
        if let Some(x) = self.values.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::invalid(format!("accuracy {x} is outside [0, 1]")));
        }
        Ok(())
    }
}

/// Produces one accuracy per run seed.
///
/// QAOA is the real source; fixed or synthetic samplers stand in for it when
/// exercising the scoring arithmetic.
pub trait RunSampler: Sync {
    fn accuracy(&self, seed: u64) -> Result<f64>;
}

impl<F> RunSampler for F
where
    F: Fn(u64) -> Result<f64> + Sync,
{
    fn accuracy(&self, seed: u64) -> Result<f64> {
        self(seed)
    }
}

/// Full QAOA optimization of an instance on a backend.
pub struct QaoaSampler<'a> {
    pub instance: &'a QuboInstance,
    pub backend: &'a BackendModel,
    pub n_layers: usize,
    pub options: RunOptions,
}

impl RunSampler for QaoaSampler<'_> {
    fn accuracy(&self, seed: u64) -> Result<f64> {
        Ok(run_once(self.instance, self.backend, self.n_layers, &self.options, seed)?.accuracy)
    }
}

/// A sampler that reports the same accuracy for every run.
pub struct FixedAccuracy(pub f64);

impl RunSampler for FixedAccuracy {
    fn accuracy(&self, _seed: u64) -> Result<f64> {
        Ok(self.0)
    }
}

/// Draws `runs` accuracies with seeds `run_seed(master, stream, i)`.
///
/// Runs execute in parallel on the current rayon pool; the result does not
/// depend on the pool size. Failed runs are dropped unless they exceed
/// [`FAILURE_BUDGET`].
pub fn sample_runs(
    sampler: &dyn RunSampler,
    runs: usize,
    master_seed: u64,
    stream: Stream,
) -> Result<(Vec<f64>, usize)> {
    if runs == 0 {
        return Err(Error::invalid("run count must be positive"));
    }
    let outcomes: Vec<Result<f64>> = (0..runs)
        .into_par_iter()
        .map(|i| sampler.accuracy(run_seed(master_seed, stream, i as u64)))
        .collect();
    let mut values = Vec::with_capacity(runs);
    let mut failed = 0usize;
    let mut first_error = None;
    for outcome in outcomes {
        match outcome {
            Ok(a) if (0.0..=1.0).contains(&a) => values.push(a),
            Ok(a) => {
                failed += 1;
                first_error.get_or_insert_with(|| format!("accuracy {a} outside [0, 1]"));
            }
            Err(e) => {
                if matches!(e, Error::InvalidArgument(_) | Error::Capacity(_)) {
                    return Err(e);
                }
                failed += 1;
                first_error.get_or_insert_with(|| e.to_string());
            }
        }
    }
    let allowed = (FAILURE_BUDGET * runs as f64).floor() as usize;
    if failed > allowed || values.is_empty() {
        return Err(Error::RunBudget { failed, total: runs });
    }
    Ok((values, failed))
}

/// Scoring accuracies of `backend`, seeded from the scoring stream.
pub fn collect_samples(
    inst: &QuboInstance,
    backend: &BackendModel,
    n_layers: usize,
    runs: usize,
    master_seed: u64,
    opts: &RunOptions,
) -> Result<AccuracySamples> {
    collect_stream(inst, backend, n_layers, runs, master_seed, Stream::Scoring, opts)
}

pub(crate) fn collect_stream(
    inst: &QuboInstance,
    backend: &BackendModel,
    n_layers: usize,
    runs: usize,
    master_seed: u64,
    stream: Stream,
    opts: &RunOptions,
) -> Result<AccuracySamples> {
    let sampler = QaoaSampler {
        instance: inst,
        backend,
        n_layers,
        options: *opts,
    };
    let (values, failed) = sample_runs(&sampler, runs, master_seed, stream)?;
    let mut s = AccuracySamples::new(values, inst.id.clone(), n_layers, backend.name.clone(), master_seed);
    s.failed_runs = failed;
    Ok(s)
}

/// Noiseless reference accuracies, seeded from the reference stream.
pub fn build_reference_samples(
    inst: &QuboInstance,
    n_layers: usize,
    runs: usize,
    master_seed: u64,
    opts: &RunOptions,
) -> Result<AccuracySamples> {
    if runs < MIN_REFERENCE_RUNS {
        return Err(Error::invalid(format!(
            "a reference needs at least {MIN_REFERENCE_RUNS} runs, got {runs}"
        )));
    }
    let ideal = BackendModel::ideal(inst.n());
    collect_stream(inst, &ideal, n_layers, runs, master_seed, Stream::Reference, opts)
}

/// Scoring curve from `runs` noiseless reference runs.
pub fn build_reference(
    inst: &QuboInstance,
    n_layers: usize,
    runs: usize,
    master_seed: u64,
    opts: &RunOptions,
) -> Result<ScoringCurve> {
    let samples = build_reference_samples(inst, n_layers, runs, master_seed, opts)?;
    ScoringCurve::from_samples(&samples, DEFAULT_BINS)
}
