//! QAOA ansatz construction and single optimization runs.
//!
//! The cost `x^T Q x` is mapped to Ising form with `x_i = (1 - z_i) / 2`, where
//! `z_i = +1` for `|0>`. This gives
//!
//! ```text
//! h_i  = -(Q_ii + sum_{j != i} Q_ij) / 2
//! J_ij =  Q_ij / 2                      (i < j)
//! ```
//!
//! plus a constant offset that only shifts the global phase and is dropped.
//! Each layer applies `RZ(2 gamma h_i)`, `RZZ(2 gamma J_ij)` and then `RX(2 beta)`.

use std::f64::consts::{PI, TAU};

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::backend::{mitigate_readout, route_and_compile, select_layout, BackendModel, Executor, Layout};
use crate::error::{Error, Result};
use crate::optimize::{nelder_mead, NelderMeadConfig};
use crate::qubo::{cost_table, QMatrix, QuboInstance};
use crate::seed;
use crate::sim::{GateOp, C64};

/// Layer angles; `gammas[l]` drives the phase operator and `betas[l]` the mixer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.is_empty() || gammas.len() != betas.len() {
            return Err(Error::invalid(format!(
                "need equal, non-zero numbers of gammas and betas (got {} and {})",
                gammas.len(),
                betas.len()
            )));
        }
        Ok(QaoaParams { gammas, betas })
    }

    pub fn layers(&self) -> usize {
        self.gammas.len()
    }

    /// Draws `gamma` uniform in [0, 2 pi) and `beta` uniform in [0, pi).
    pub fn random<R: Rng>(layers: usize, rng: &mut R) -> Self {
        let gammas = (0..layers).map(|_| rng.gen_range(0.0..TAU)).collect();
        let betas = (0..layers).map(|_| rng.gen_range(0.0..PI)).collect();
        QaoaParams { gammas, betas }
    }

    /// Flat `[gammas..., betas...]`.
    pub fn to_vec(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.betas).copied().collect()
    }

    pub fn from_slice(x: &[f64]) -> Result<Self> {
        if !x.len().is_multiple_of(2) {
            return Err(Error::invalid("flat parameter vector must have even length"));
        }
        let p = x.len() / 2;
        QaoaParams::new(x[..p].to_vec(), x[p..].to_vec())
    }
}

/// Ising fields and couplings of a QUBO matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingForm {
    pub fields: Vec<f64>,
    /// `(i, j, J_ij)` with `i < j`, row-major order, zero couplings omitted.
    pub couplings: Vec<(usize, usize, f64)>,
    pub offset: f64,
}

pub fn ising_form(q: &QMatrix) -> IsingForm {
    let n = q.dim();
    let mut fields = vec![0.0; n];
    let mut couplings = Vec::new();
    let mut offset = 0.0;
    for i in 0..n {
        fields[i] -= q.get(i, i) / 2.0;
        offset += q.get(i, i) / 2.0;
        for j in (i + 1)..n {
            let w = q.get(i, j);
            if w == 0.0 {
                continue;
            }
            // 2 Q_ij x_i x_j = (Q_ij / 2)(1 - z_i - z_j + z_i z_j)
            fields[i] -= w / 2.0;
            fields[j] -= w / 2.0;
            offset += w / 2.0;
            couplings.push((i, j, w / 2.0));
        }
    }
    IsingForm {
        fields,
        couplings,
        offset,
    }
}

/// Logical QAOA circuit over the matrix `q`.
pub fn ansatz_for_matrix(q: &QMatrix, params: &QaoaParams) -> Vec<GateOp> {
    let n = q.dim();
    let ising = ising_form(q);
    let mut gates: Vec<GateOp> = (0..n).map(GateOp::H).collect();
    for (&gamma, &beta) in params.gammas.iter().zip(&params.betas) {
        for (i, &h) in ising.fields.iter().enumerate() {
            if h != 0.0 {
                gates.push(GateOp::Rz(i, 2.0 * gamma * h));
            }
        }
        for &(i, j, w) in &ising.couplings {
            gates.push(GateOp::Rzz(i, j, 2.0 * gamma * w));
        }
        gates.extend((0..n).map(|i| GateOp::Rx(i, 2.0 * beta)));
    }
    gates
}

/// Uniform superposition followed by `p` phase/mixer layers.
pub fn build_ansatz(inst: &QuboInstance, params: &QaoaParams) -> Vec<GateOp> {
    ansatz_for_matrix(&inst.q, params)
}

fn check_dist(dist: &[f64], inst: &QuboInstance) -> Result<()> {
    if dist.len() != 1 << inst.n() {
        return Err(Error::invalid(format!(
            "distribution has {} entries, instance {} needs {}",
            dist.len(),
            inst.id,
            1usize << inst.n()
        )));
    }
    Ok(())
}

/// `sum_x dist(x) * cost(x)`.
pub fn cost_expectation(dist: &[f64], inst: &QuboInstance) -> Result<f64> {
    check_dist(dist, inst)?;
    Ok(dist.iter().zip(cost_table(&inst.q)).map(|(p, c)| p * c).sum())
}

/// Probability of measuring any ground state.
pub fn accuracy_of(dist: &[f64], inst: &QuboInstance) -> Result<f64> {
    check_dist(dist, inst)?;
    let acc: f64 = inst.dec_states.iter().map(|&d| dist[d]).sum();
    Ok(acc.clamp(0.0, 1.0))
}

/// Nelder–Mead settings for one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub max_evals: usize,
    pub xtol: f64,
    pub ftol: f64,
}

impl OptimizerConfig {
    /// `200 p` evaluations, `ftol = 1e-4`, `xtol = 1e-3`.
    pub fn for_layers(layers: usize) -> Self {
        OptimizerConfig {
            max_evals: 200 * layers,
            xtol: 1e-3,
            ftol: 1e-4,
        }
    }

    pub fn validate(&self, layers: usize) -> Result<()> {
        if self.max_evals < 2 * layers + 2 {
            return Err(Error::invalid(format!(
                "max_evals {} below the minimum {} for {layers} layers",
                self.max_evals,
                2 * layers + 2
            )));
        }
        Ok(())
    }
}

/// Options shared by every run of an experiment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Overrides [`OptimizerConfig::for_layers`] when set.
    pub optimizer: Option<OptimizerConfig>,
    /// Invert readout confusion before evaluating cost and accuracy.
    pub mitigate_readout: bool,
    /// Estimate the cost from this many sampled shots instead of the exact distribution.
    pub shots: Option<u32>,
}

impl RunOptions {
    pub fn optimizer_for(&self, layers: usize) -> OptimizerConfig {
        self.optimizer.unwrap_or_else(|| OptimizerConfig::for_layers(layers))
    }
}

/// Result of one optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaRunResult {
    pub accuracy: f64,
    pub final_cost: f64,
    pub evals_used: usize,
    pub converged: bool,
    pub params: QaoaParams,
}

/// Instance, backend and layout prepared for repeated circuit evaluation.
pub struct QaoaProblem<'a> {
    inst: &'a QuboInstance,
    executor: Executor<'a>,
    layout: Layout,
    costs: Vec<f64>,
    mitigate: bool,
}

impl<'a> QaoaProblem<'a> {
    pub fn new(inst: &'a QuboInstance, backend: &'a BackendModel, mitigate: bool) -> Result<Self> {
        let layout = select_layout(backend, inst.n())?;
        Ok(QaoaProblem {
            inst,
            executor: Executor::new(backend)?,
            layout,
            costs: cost_table(&inst.q),
            mitigate,
        })
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    /// Exact measured distribution over logical bitstrings for `params`.
    ///
    /// Noiseless backends skip routing: compiled execution there equals logical
    /// simulation, so the ansatz is applied directly as a diagonal phase per layer.
    pub fn distribution(&self, params: &QaoaParams) -> Result<Vec<f64>> {
        if self.executor.backend().noiseless {
            return Ok(noiseless_distribution(&self.costs, self.inst.n(), params));
        }
        let circuit = build_ansatz(self.inst, params);
        let compiled = route_and_compile(&circuit, self.executor.backend(), &self.layout)?;
        let exec = self.executor.run(&compiled)?;
        if self.mitigate {
            mitigate_readout(&exec.dist, self.executor.backend(), &exec.final_layout)
        } else {
            Ok(exec.dist)
        }
    }

    pub fn expectation(&self, dist: &[f64]) -> f64 {
        dist.iter().zip(&self.costs).map(|(p, c)| p * c).sum()
    }
}

/// Statevector QAOA where each phase layer multiplies basis state `k` by
/// `exp(-i gamma cost[k])`; this equals the RZ/RZZ product up to global phase.
pub fn noiseless_distribution(costs: &[f64], n: usize, params: &QaoaParams) -> Vec<f64> {
    let dim = 1usize << n;
    debug_assert_eq!(costs.len(), dim);
    let a0 = 1.0 / (dim as f64).sqrt();
    let mut amp = vec![C64::new(a0, 0.0); dim];
    for (&gamma, &beta) in params.gammas.iter().zip(&params.betas) {
        for (a, &c) in amp.iter_mut().zip(costs) {
            *a *= C64::from_polar(1.0, -gamma * c);
        }
        let (s, co) = beta.sin_cos();
        let ms = C64::new(0.0, -s);
        for q in 0..n {
            let bit = 1usize << q;
            for i in 0..dim {
                if i & bit == 0 {
                    let (x, y) = (amp[i], amp[i | bit]);
                    amp[i] = x * co + ms * y;
                    amp[i | bit] = ms * x + y * co;
                }
            }
        }
    }
    amp.iter().map(|a| a.norm_sqr()).collect()
}

fn sampled_expectation<R: Rng>(dist: &[f64], costs: &[f64], shots: u32, rng: &mut R) -> Result<f64> {
    let sampler = WeightedIndex::new(dist).map_err(|e| Error::Run(format!("cannot sample distribution: {e}")))?;
    let total: f64 = (0..shots).map(|_| costs[sampler.sample(rng)]).sum();
    Ok(total / f64::from(shots))
}

/// One full QAOA optimization of `inst` on `backend`.
///
/// Starting angles come from `run_seed`; the cost expectation of the executed
/// circuit is minimized with Nelder–Mead and the accuracy of the final state returned.
pub fn run_once(
    inst: &QuboInstance,
    backend: &BackendModel,
    layers: usize,
    opts: &RunOptions,
    run_seed: u64,
) -> Result<QaoaRunResult> {
    if layers == 0 {
        return Err(Error::invalid("QAOA needs at least one layer"));
    }
    let cfg = opts.optimizer_for(layers);
    cfg.validate(layers)?;
    if opts.shots == Some(0) {
        return Err(Error::invalid("shots must be positive"));
    }
    let problem = QaoaProblem::new(inst, backend, opts.mitigate_readout)?;
    let mut rng = seed::rng_from(run_seed);
    let start = QaoaParams::random(layers, &mut rng);

    let nm = NelderMeadConfig {
        max_evals: cfg.max_evals,
        xtol: cfg.xtol,
        ftol: cfg.ftol,
        ..NelderMeadConfig::default()
    };
    let objective = |x: &[f64]| -> Result<f64> {
        let dist = problem.distribution(&QaoaParams::from_slice(x)?)?;
        match opts.shots {
            Some(shots) => sampled_expectation(&dist, &problem.costs, shots, &mut rng),
            None => Ok(problem.expectation(&dist)),
        }
    };
    let min = nelder_mead(objective, &start.to_vec(), &nm)?;
    let params = QaoaParams::from_slice(&min.x)?;
    let dist = problem.distribution(&params)?;
    let final_cost = problem.expectation(&dist);
    if !final_cost.is_finite() {
        return Err(Error::Run(format!("final cost {final_cost} is not finite")));
    }
    Ok(QaoaRunResult {
        accuracy: accuracy_of(&dist, inst)?,
        final_cost,
        evals_used: min.evals,
        converged: min.converged,
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::{builtin_instances, evaluate_cost, QMatrix};
    use crate::sim::{GateKind, QuantumState, StateVector};

    fn simulate(gates: &[GateOp], n: usize) -> Vec<f64> {
        let mut s = StateVector::zero(n).unwrap();
        for g in gates {
            s.apply_gate(g).unwrap();
        }
        s.probabilities()
    }

    #[test]
    fn ising_reproduces_costs() {
        let inst = builtin_instances(4).unwrap();
        let ising = ising_form(&inst.q);
        for idx in 0..16 {
            let bits = crate::qubo::bits_of(idx, 4);
            let z: Vec<f64> = bits.iter().map(|&b| 1.0 - 2.0 * f64::from(b)).collect();
            let e = ising.offset
                + ising.fields.iter().zip(&z).map(|(h, z)| h * z).sum::<f64>()
                + ising.couplings.iter().map(|&(i, j, w)| w * z[i] * z[j]).sum::<f64>();
            assert!((e - evaluate_cost(&inst.q, &bits).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_angles_give_uniform_superposition() {
        let inst = builtin_instances(3).unwrap();
        let params = QaoaParams::new(vec![0.0], vec![0.0]).unwrap();
        for p in simulate(&build_ansatz(&inst, &params), 3) {
            assert!((p - 0.125).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_fast_path_matches_gate_list() {
        let mut rng = crate::seed::rng_from(11);
        for n in 3..=5 {
            let inst = builtin_instances(n).unwrap();
            let costs = cost_table(&inst.q);
            for layers in 1..=3 {
                let params = QaoaParams::random(layers, &mut rng);
                let fast = noiseless_distribution(&costs, n, &params);
                let slow = simulate(&build_ansatz(&inst, &params), n);
                for (a, b) in fast.iter().zip(&slow) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn gate_counts() {
        let inst = builtin_instances(4).unwrap();
        let params = QaoaParams::new(vec![0.1, 0.2], vec![0.3, 0.4]).unwrap();
        let gates = build_ansatz(&inst, &params);
        let count = |k| gates.iter().filter(|g| g.kind() == k).count();
        let ising = ising_form(&inst.q);
        let fields = ising.fields.iter().filter(|&&h| h != 0.0).count();
        assert_eq!(count(GateKind::H), 4);
        assert_eq!(count(GateKind::RX), 2 * 4);
        assert_eq!(count(GateKind::RZ), 2 * fields);
        assert_eq!(count(GateKind::RZZ), 2 * 6);
    }

    #[test]
    fn single_qubit_grid_search_finds_target() {
        // Q = [-1] has ground state |1>; a dense grid must find accuracy > 0.99
        let inst = QuboInstance::new("one", QMatrix::diag(&[-1.0]), None).unwrap();
        assert_eq!(ising_form(&inst.q).fields, vec![0.5]);
        assert_eq!(inst.dec_states, vec![1]);
        let mut best: f64 = 0.0;
        for gi in 0..200 {
            for bi in 0..100 {
                let params = QaoaParams::new(vec![TAU * gi as f64 / 200.0], vec![PI * bi as f64 / 100.0]).unwrap();
                let dist = simulate(&build_ansatz(&inst, &params), 1);
                best = best.max(accuracy_of(&dist, &inst).unwrap());
            }
        }
        assert!(best > 0.99, "best grid accuracy {best}");
    }

    #[test]
    fn expectation_and_accuracy_examples() {
        let inst = builtin_instances(3).unwrap();
        let mut delta = vec![0.0; 8];
        delta[inst.dec_states[0]] = 1.0;
        assert!((cost_expectation(&delta, &inst).unwrap() - inst.ground_energy).abs() < 1e-12);
        assert_eq!(accuracy_of(&delta, &inst).unwrap(), 1.0);

        let uniform = vec![0.125; 8];
        let mean = (0..8)
            .map(|i| evaluate_cost(&inst.q, &crate::qubo::bits_of(i, 3)).unwrap())
            .sum::<f64>()
            / 8.0;
        assert!((cost_expectation(&uniform, &inst).unwrap() - mean).abs() < 1e-12);
        assert!((accuracy_of(&uniform, &inst).unwrap() - 0.125).abs() < 1e-15);

        let degenerate = QuboInstance::new("zero", QMatrix::zeros(2), None).unwrap();
        assert_eq!(accuracy_of(&[0.1, 0.2, 0.3, 0.4], &degenerate).unwrap(), 1.0);
        assert!(cost_expectation(&[0.5, 0.5], &inst).is_err());
    }

    #[test]
    fn run_is_deterministic_and_bounded() {
        let inst = builtin_instances(3).unwrap();
        let ideal = BackendModel::ideal(3);
        let a = run_once(&inst, &ideal, 1, &RunOptions::default(), 99).unwrap();
        let b = run_once(&inst, &ideal, 1, &RunOptions::default(), 99).unwrap();
        assert_eq!(a, b);
        assert!((0.0..=1.0).contains(&a.accuracy));
        assert!(a.final_cost >= inst.ground_energy - 1e-9);
        assert!(a.evals_used <= 200 + 4);
    }

    #[test]
    fn run_rejects_bad_config() {
        let inst = builtin_instances(3).unwrap();
        let ideal = BackendModel::ideal(3);
        assert!(run_once(&inst, &ideal, 0, &RunOptions::default(), 1).is_err());
        let opts = RunOptions {
            optimizer: Some(OptimizerConfig {
                max_evals: 3,
                xtol: 1e-3,
                ftol: 1e-4,
            }),
            ..Default::default()
        };
        assert!(run_once(&inst, &ideal, 1, &opts, 1).is_err());
        let opts = RunOptions {
            shots: Some(0),
            ..Default::default()
        };
        assert!(run_once(&inst, &ideal, 1, &opts, 1).is_err());
    }

    #[test]
    fn shots_mode_runs() {
        let inst = builtin_instances(3).unwrap();
        let ideal = BackendModel::ideal(3);
        let opts = RunOptions {
            shots: Some(512),
            ..Default::default()
        };
        let r = run_once(&inst, &ideal, 1, &opts, 5).unwrap();
        assert!((0.0..=1.0).contains(&r.accuracy));
        assert_eq!(r, run_once(&inst, &ideal, 1, &opts, 5).unwrap());
    }
}
