//! Fleet ranking and backend selection for distributed sampling.
//!
//! Every backend in a fleet runs the same `M` scoring seeds. Run `i` of a pooled
//! selection of `k` backends (sorted by name) executes on backend `i mod k` with
//! seed `i`, and all accuracies are pooled into one H-Score. The per-backend
//! accuracies are computed once, so any number of selections is cheap.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::backend::BackendModel;
use crate::error::{Error, Result};
use crate::qaoa::RunOptions;
use crate::qubo::QuboInstance;
use crate::scoring::{
    fit_gaussian, h_score, AccuracySamples, HScoreReport, QaoaSampler, RunSampler, ScoringCurve, FAILURE_BUDGET,
};
use crate::seed::{rng_from, run_seed, Stream};

/// Random selections evaluated by [`Strategy::RandomK`] when none is given.
pub const DEFAULT_TRIALS: usize = 200;

/// How pooled runs are spread across the chosen backends.
pub const POOLING: &str = "round_robin";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetEntry {
    pub backend_name: String,
    pub h_score: f64,
}

/// A backend dropped from the ranking because too many of its runs failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedBackend {
    pub backend_name: String,
    pub reason: String,
}

/// Backends sorted by descending H-Score, ties by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetRanking {
    pub instance_id: String,
    pub n_layers: usize,
    pub entries: Vec<FleetEntry>,
    pub excluded: Vec<ExcludedBackend>,
}

impl FleetRanking {
    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.backend_name.as_str()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    RankedTopK,
    RandomK,
    WorstK,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ranked_top_k" => Ok(Strategy::RankedTopK),
            "random_k" => Ok(Strategy::RandomK),
            "worst_k" => Ok(Strategy::WorstK),
            _ => Err(Error::invalid(format!(
                "unknown strategy {s:?} (expected ranked_top_k, random_k or worst_k)"
            ))),
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Strategy::RankedTopK => "ranked_top_k",
            Strategy::RandomK => "random_k",
            Strategy::WorstK => "worst_k",
        })
    }
}

/// Spread of pooled H-Scores over random selections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub trials: usize,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionOutcome {
    pub strategy: Strategy,
    pub k: usize,
    /// Chosen backends in pooling order (sorted by name). For `random_k` this is
    /// the first trial's selection.
    pub chosen: Vec<String>,
    pub pooling: String,
    pub pooled_report: HScoreReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_trials: Option<TrialStats>,
}

/// Per-run accuracies of every backend on shared scoring seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct FleetRuns {
    pub instance_id: String,
    pub n_layers: usize,
    pub master_seed: u64,
    names: Vec<String>,
    /// `runs[b][i]`: accuracy of run `i` on backend `b`, or the failure message.
    runs: Vec<Vec<Result<f64, String>>>,
}

/// Runs `m` scoring seeds on each backend.
pub fn score_fleet(
    backends: &[BackendModel],
    inst: &QuboInstance,
    n_layers: usize,
    m: usize,
    master_seed: u64,
    opts: &RunOptions,
) -> Result<FleetRuns> {
    let samplers: Vec<QaoaSampler> = backends
        .iter()
        .map(|b| QaoaSampler {
            instance: inst,
            backend: b,
            n_layers,
            options: *opts,
        })
        .collect();
    let named: Vec<(&str, &dyn RunSampler)> = backends
        .iter()
        .zip(&samplers)
        .map(|(b, s)| (b.name.as_str(), s as &dyn RunSampler))
        .collect();
    score_fleet_with(&named, &inst.id, n_layers, m, master_seed)
}

/// [`score_fleet`] over arbitrary samplers.
pub fn score_fleet_with(
    samplers: &[(&str, &dyn RunSampler)],
    instance_id: &str,
    n_layers: usize,
    m: usize,
    master_seed: u64,
) -> Result<FleetRuns> {
    if samplers.is_empty() {
        return Err(Error::invalid("a fleet needs at least one backend"));
    }
    if m == 0 {
        return Err(Error::invalid("M must be positive"));
    }
    let mut seen = BTreeSet::new();
    for (name, _) in samplers {
        if !seen.insert(*name) {
            return Err(Error::invalid(format!(
                "backend name {name:?} appears twice in the fleet"
            )));
        }
    }
    let jobs: Vec<(usize, usize)> = (0..samplers.len()).flat_map(|b| (0..m).map(move |i| (b, i))).collect();
    let results: Vec<Result<f64>> = jobs
        .par_iter()
        .map(|&(b, i)| samplers[b].1.accuracy(run_seed(master_seed, Stream::Scoring, i as u64)))
        .collect();
    let mut runs = vec![Vec::with_capacity(m); samplers.len()];
    for (&(b, _), r) in jobs.iter().zip(results) {
        let r = match r {
            Err(e @ (Error::InvalidArgument(_) | Error::Capacity(_))) => return Err(e),
            Ok(a) if !(0.0..=1.0).contains(&a) => Err(format!("accuracy {a} outside [0, 1]")),
            other => other.map_err(|e| e.to_string()),
        };
        runs[b].push(r);
    }
    Ok(FleetRuns {
        instance_id: instance_id.to_string(),
        n_layers,
        master_seed,
        names: samplers.iter().map(|(n, _)| n.to_string()).collect(),
        runs,
    })
}

impl FleetRuns {
    pub fn backend_names(&self) -> &[String] {
        &self.names
    }

    pub fn runs_per_backend(&self) -> usize {
        self.runs[0].len()
    }

    fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::invalid(format!("backend {name:?} is not in the fleet")))
    }

    /// Accuracies of the given backends pooled round-robin over run indices.
    pub fn pooled_samples(&self, chosen: &[&str]) -> Result<AccuracySamples> {
        if chosen.is_empty() {
            return Err(Error::invalid("cannot pool zero backends"));
        }
        let mut order: Vec<&str> = chosen.to_vec();
        order.sort_unstable();
        let idx = order.iter().map(|n| self.index_of(n)).collect::<Result<Vec<_>>>()?;
        let m = self.runs_per_backend();
        let mut values = Vec::with_capacity(m);
        let mut failed = 0;
        for i in 0..m {
            match &self.runs[idx[i % idx.len()]][i] {
                Ok(a) => values.push(*a),
                Err(_) => failed += 1,
            }
        }
        if failed > (FAILURE_BUDGET * m as f64).floor() as usize || values.is_empty() {
            return Err(Error::RunBudget { failed, total: m });
        }
        let mut s = AccuracySamples::new(
            values,
            self.instance_id.clone(),
            self.n_layers,
            order.join("+"),
            self.master_seed,
        );
        s.failed_runs = failed;
        Ok(s)
    }

    /// Scores each backend and sorts them. Backends over the failure budget are excluded.
    pub fn ranking(&self, curve: &ScoringCurve) -> Result<FleetRanking> {
        let mut entries = Vec::new();
        let mut excluded = Vec::new();
        for name in &self.names {
            match self.pooled_samples(&[name]).and_then(|s| h_score(&s, curve)) {
                Ok(r) => entries.push(FleetEntry {
                    backend_name: name.clone(),
                    h_score: r.h_score,
                }),
                Err(e @ Error::RunBudget { .. }) => excluded.push(ExcludedBackend {
                    backend_name: name.clone(),
                    reason: e.to_string(),
                }),
                Err(e) => return Err(e),
            }
        }
        if entries.is_empty() {
            return Err(Error::Run(
                "every backend in the fleet exceeded the failure budget".into(),
            ));
        }
        entries.sort_by(|a, b| {
            b.h_score
                .total_cmp(&a.h_score)
                .then_with(|| a.backend_name.cmp(&b.backend_name))
        });
        Ok(FleetRanking {
            instance_id: self.instance_id.clone(),
            n_layers: self.n_layers,
            entries,
            excluded,
        })
    }

    /// Chooses `k` ranked backends with `strategy` and scores their pooled runs.
    pub fn select(
        &self,
        curve: &ScoringCurve,
        k: usize,
        strategy: Strategy,
        trials: usize,
    ) -> Result<SelectionOutcome> {
        let ranking = self.ranking(curve)?;
        let names = ranking.names();
        if k == 0 || k > names.len() {
            return Err(Error::invalid(format!(
                "k = {k} must be between 1 and the fleet size {}",
                names.len()
            )));
        }
        let pool = |chosen: &[&str]| -> Result<(Vec<String>, HScoreReport)> {
            let report = h_score(&self.pooled_samples(chosen)?, curve)?;
            let mut sorted: Vec<String> = chosen.iter().map(|s| s.to_string()).collect();
            sorted.sort_unstable();
            Ok((sorted, report))
        };
        let (chosen, pooled_report, random_trials) = match strategy {
            Strategy::RankedTopK => {
                let (c, r) = pool(&names[..k])?;
                (c, r, None)
            }
            Strategy::WorstK => {
                let (c, r) = pool(&names[names.len() - k..])?;
                (c, r, None)
            }
            Strategy::RandomK => {
                if trials < 2 {
                    return Err(Error::invalid("random selection needs at least two trials"));
                }
                let mut rng = rng_from(run_seed(self.master_seed, Stream::Selection, k as u64));
                let mut first = None;
                let mut scores = Vec::with_capacity(trials);
                for _ in 0..trials {
                    let picked: Vec<&str> = sample(&mut rng, names.len(), k).into_iter().map(|i| names[i]).collect();
                    let (c, r) = pool(&picked)?;
                    scores.push(r.h_score);
                    first.get_or_insert((c, r));
                }
                let fit = fit_gaussian(&scores)?;
                let (c, r) = first.expect("at least two trials ran");
                (
                    c,
                    r,
                    Some(TrialStats {
                        trials,
                        mean: fit.mean,
                        std: fit.std,
                    }),
                )
            }
        };
        let mut pooled_report = pooled_report;
        pooled_report.per_run_scores = None;
        Ok(SelectionOutcome {
            strategy,
            k,
            chosen,
            pooling: POOLING.to_string(),
            pooled_report,
            random_trials,
        })
    }
}

/// Scores every backend with `m` runs and ranks them.
pub fn rank_fleet(
    backends: &[BackendModel],
    inst: &QuboInstance,
    n_layers: usize,
    m: usize,
    curve: &ScoringCurve,
    master_seed: u64,
    opts: &RunOptions,
) -> Result<FleetRanking> {
    score_fleet(backends, inst, n_layers, m, master_seed, opts)?.ranking(curve)
}

/// Ranks the fleet, then selects and pools `k` backends with `strategy`.
#[allow(clippy::too_many_arguments)]
pub fn select_and_pool(
    backends: &[BackendModel],
    k: usize,
    strategy: Strategy,
    inst: &QuboInstance,
    n_layers: usize,
    m: usize,
    curve: &ScoringCurve,
    master_seed: u64,
    opts: &RunOptions,
) -> Result<SelectionOutcome> {
    score_fleet(backends, inst, n_layers, m, master_seed, opts)?.select(curve, k, strategy, DEFAULT_TRIALS)
}
