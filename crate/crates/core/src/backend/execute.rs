use std::collections::BTreeMap;

use super::{BackendModel, CompiledCircuit, Layout};
use crate::error::{Error, Result};
use crate::sim::{
    apply_qubit_matrix, apply_readout_error, DensityMatrix, GateOp, QuantumState, ReadoutError, StateVector,
};

/// Outcome distributions of one execution, both over logical bitstrings.
#[derive(Debug, Clone, PartialEq)]
pub struct Execution {
    /// Before classical readout error.
    pub pre_readout: Vec<f64>,
    pub dist: Vec<f64>,
    pub final_layout: Layout,
}

/// Backend with its noise rates prepared once for repeated execution.
#[derive(Debug, Clone)]
pub struct Executor<'a> {
    backend: &'a BackendModel,
    depol2: BTreeMap<(usize, usize), f64>,
    idle1: Vec<Option<Relaxation>>,
    idle2: Vec<Option<Relaxation>>,
}

/// Damping and dephasing probabilities for one idle period.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Relaxation {
    gamma: f64,
    p_phase: f64,
}

const NEGLIGIBLE: f64 = 1e-12;

/// Same rates as [`NoiseChannel::decoherence`], in closed form.
fn relaxation(duration: f64, t1: f64, t2: f64) -> Option<Relaxation> {
    let gamma = 1.0 - (-duration / t1).exp();
    let extra = (-duration / t2 + duration / (2.0 * t1)).exp();
    let p_phase = ((1.0 - extra) / 2.0).max(0.0);
    (gamma >= NEGLIGIBLE || p_phase >= NEGLIGIBLE).then_some(Relaxation { gamma, p_phase })
}

impl<'a> Executor<'a> {
    pub fn new(backend: &'a BackendModel) -> Result<Self> {
        let mut ex = Executor {
            backend,
            depol2: BTreeMap::new(),
            idle1: vec![None; backend.num_qubits],
            idle2: vec![None; backend.num_qubits],
        };
        if backend.noiseless {
            return Ok(ex);
        }
        backend.validate()?;
        for &(a, b) in &backend.coupling {
            ex.depol2.insert((a, b), backend.edge_p2(a, b));
        }
        for q in 0..backend.num_qubits {
            ex.idle1[q] = relaxation(backend.dur1, backend.t1[q], backend.t2[q]);
            ex.idle2[q] = relaxation(backend.dur2, backend.t1[q], backend.t2[q]);
        }
        Ok(ex)
    }

    pub fn backend(&self) -> &BackendModel {
        self.backend
    }

    /// Simulates `c` from `|0...0>` and returns logical outcome distributions.
    ///
    /// After every gate: depolarizing noise on its qubits, then amplitude damping
    /// and dephasing for the gate duration on each of them. Readout error is applied
    /// per physical qubit before results are reordered through the final layout.
    pub fn run(&self, c: &CompiledCircuit) -> Result<Execution> {
        let b = self.backend;
        let active = c.active_qubits();
        if active.iter().any(|&p| p >= b.num_qubits) {
            return Err(Error::invalid(format!("circuit uses qubits outside {}", b.name)));
        }
        let m = active.len();
        let sim_index = |p: usize| -> Result<usize> {
            active
                .binary_search(&p)
                .map_err(|_| Error::invalid(format!("gate on inactive physical qubit {p}")))
        };
        let mut local = Vec::with_capacity(c.gates.len());
        for g in &c.gates {
            if let GateOp::Cnot { control, target } = *g {
                if !b.is_adjacent(control, target) {
                    return Err(Error::invalid(format!(
                        "CNOT({control}, {target}) is not on a coupling edge"
                    )));
                }
            }
            let qs = g.qubits();
            for &q in &qs {
                sim_index(q)?;
            }
            local.push(*g);
        }

        let sim_probs = if b.noiseless {
            let mut s = StateVector::zero(m)?;
            for g in &local {
                s.apply_gate(&g.remap(|p| active.binary_search(&p).unwrap()))?;
            }
            s.probabilities()
        } else {
            let mut rho = DensityMatrix::zero(m)?;
            for g in &local {
                let phys = g.qubits();
                let sim: Vec<usize> = phys.iter().map(|&p| active.binary_search(&p).unwrap()).collect();
                rho.apply_gate(&g.remap(|p| active.binary_search(&p).unwrap()))?;
                let p = if g.is_two_qubit() {
                    let key = (phys[0].min(phys[1]), phys[0].max(phys[1]));
                    self.depol2.get(&key).copied().unwrap_or(0.0)
                } else {
                    b.p1
                };
                rho.depolarize(&sim, p)?;
                let idle = if g.is_two_qubit() { &self.idle2 } else { &self.idle1 };
                for (&p, &s) in phys.iter().zip(&sim) {
                    if let Some(r) = idle[p] {
                        rho.relax(s, r.gamma, r.p_phase)?;
                    }
                }
            }
            normalize(rho.probabilities())
        };

        let flips: Vec<ReadoutError> = active.iter().map(|&p| b.qubit_readout(p)).collect();
        let measured = apply_readout_error(&sim_probs, &flips)?;
        // logical qubit l is read from sim bit position of final_layout[l]
        let positions: Vec<usize> = c
            .final_layout
            .as_slice()
            .iter()
            .map(|&p| sim_index(p))
            .collect::<Result<_>>()?;
        Ok(Execution {
            pre_readout: to_logical(&sim_probs, &positions),
            dist: to_logical(&measured, &positions),
            final_layout: c.final_layout.clone(),
        })
    }
}

fn normalize(mut p: Vec<f64>) -> Vec<f64> {
    let total: f64 = p.iter().sum();
    if total > 0.0 {
        for v in &mut p {
            *v /= total;
        }
    }
    p
}

/// Reorders a distribution over simulator bits into logical bits;
/// `positions[l]` is the simulator bit holding logical qubit `l`.
fn to_logical(sim: &[f64], positions: &[usize]) -> Vec<f64> {
    let n = positions.len();
    let mut out = vec![0.0; 1 << n];
    for (idx, &p) in sim.iter().enumerate() {
        let logical = positions
            .iter()
            .enumerate()
            .fold(0usize, |acc, (l, &s)| acc | (((idx >> s) & 1) << l));
        out[logical] += p;
    }
    out
}

/// Executes a compiled circuit on `b` and returns the measured logical distribution.
pub fn execute(c: &CompiledCircuit, b: &BackendModel) -> Result<Vec<f64>> {
    Ok(Executor::new(b)?.run(c)?.dist)
}

/// Undoes readout error by inverting the per-qubit confusion matrices of the physical
/// qubits that hold each logical qubit at the end of the circuit. Negative entries are
/// clipped to zero and the result renormalized.
pub fn mitigate_readout(dist: &[f64], b: &BackendModel, final_layout: &Layout) -> Result<Vec<f64>> {
    let n = final_layout.len();
    if dist.len() != 1 << n {
        return Err(Error::invalid(format!(
            "distribution of length {} does not match a {n}-qubit layout",
            dist.len()
        )));
    }
    let mut out = dist.to_vec();
    for l in 0..n {
        let p = final_layout.physical(l);
        if p >= b.num_qubits {
            return Err(Error::invalid(format!("layout qubit {p} outside {}", b.name)));
        }
        let r = b.qubit_readout(p);
        if r.is_zero() {
            continue;
        }
        let inv = r
            .inverse_confusion()
            .ok_or_else(|| Error::Mitigation(format!("confusion matrix of physical qubit {p} is singular ({r:?})")))?;
        apply_qubit_matrix(&mut out, l, &inv);
    }
    for v in &mut out {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let total: f64 = out.iter().sum();
    if total <= 0.0 {
        return Err(Error::Mitigation("mitigated distribution has no mass".into()));
    }
    Ok(out.into_iter().map(|v| v / total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{route_and_compile, select_layout, topology_preset, NoiseParams, Topology};
    use crate::sim::GateKind;

    fn bell_like(n: usize) -> Vec<GateOp> {
        let mut c: Vec<GateOp> = (0..n).map(GateOp::H).collect();
        for i in 0..n {
            for j in (i + 1)..n {
                c.push(GateOp::Rzz(i, j, 0.4 + 0.1 * (i * n + j) as f64));
            }
        }
        c.extend((0..n).map(|q| GateOp::Rx(q, 0.7)));
        c
    }

    #[test]
    fn noiseless_matches_statevector() {
        let b = topology_preset(Topology::IShape7, &NoiseParams::noiseless());
        let circ = bell_like(3);
        let layout = select_layout(&b, 3).unwrap();
        let c = route_and_compile(&circ, &b, &layout).unwrap();
        let got = execute(&c, &b).unwrap();
        let mut s = StateVector::zero(3).unwrap();
        for g in &circ {
            s.apply_gate(g).unwrap();
        }
        for (a, e) in got.iter().zip(s.probabilities()) {
            assert!((a - e).abs() < 1e-10);
        }
    }

    #[test]
    fn full_depolarizing_spreads_support() {
        let noise = NoiseParams::two_qubit_only(1.0);
        let b = topology_preset(Topology::IShape7, &noise);
        let c = route_and_compile(&[GateOp::Rzz(0, 1, 0.0)], &b, &Layout::trivial(2)).unwrap();
        assert!(c.count(GateKind::CNOT) >= 1);
        let d = execute(&c, &b).unwrap();
        assert!(d.iter().filter(|&&p| p > 1e-9).count() > 1);
    }

    #[test]
    fn readout_only_changes_post_readout() {
        let circ = bell_like(3);
        let base = topology_preset(Topology::IShape7, &NoiseParams::default());
        let worse = base.clone().with_readout(ReadoutError::new(0.2, 0.3)).unwrap();
        let layout = select_layout(&base, 3).unwrap();
        let c = route_and_compile(&circ, &base, &layout).unwrap();
        let a = Executor::new(&base).unwrap().run(&c).unwrap();
        let b = Executor::new(&worse).unwrap().run(&c).unwrap();
        assert_eq!(a.pre_readout, b.pre_readout);
        assert_ne!(a.dist, b.dist);
    }

    #[test]
    fn mitigation_inverts_readout() {
        let b = topology_preset(Topology::IShape7, &NoiseParams::default())
            .with_readout(ReadoutError::new(0.04, 0.07))
            .unwrap();
        let layout = Layout::new(vec![2, 0, 1]).unwrap();
        let p = vec![0.3, 0.05, 0.1, 0.15, 0.02, 0.08, 0.2, 0.1];
        let flips: Vec<_> = layout.as_slice().iter().map(|&q| b.qubit_readout(q)).collect();
        let noisy = apply_readout_error(&p, &flips).unwrap();
        let back = mitigate_readout(&noisy, &b, &layout).unwrap();
        for (x, y) in back.iter().zip(&p) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_rates_match_channel_constructor() {
        use crate::sim::NoiseChannel;
        let r = relaxation(0.3, 90.0, 70.0).unwrap();
        let [damp, dephase] = NoiseChannel::decoherence(0.3, 90.0, 70.0).unwrap();
        assert_eq!(damp, NoiseChannel::amplitude_damping(r.gamma).unwrap());
        assert_eq!(dephase, NoiseChannel::phase_flip(r.p_phase).unwrap());
        assert!(relaxation(0.3, 1e12, 1e12).is_none());
    }

    #[test]
    fn mitigation_identity_and_singular() {
        let clean = topology_preset(Topology::IShape7, &NoiseParams::noiseless());
        let p = vec![0.25; 4];
        assert_eq!(mitigate_readout(&p, &clean, &Layout::trivial(2)).unwrap(), p);
        let singular = topology_preset(Topology::IShape7, &NoiseParams::default())
            .with_readout(ReadoutError::new(0.5, 0.5))
            .unwrap();
        assert!(matches!(
            mitigate_readout(&p, &singular, &Layout::trivial(2)),
            Err(Error::Mitigation(_))
        ));
    }

    #[test]
    fn mitigation_clips_to_distribution() {
        let b = topology_preset(Topology::IShape7, &NoiseParams::default())
            .with_readout(ReadoutError::new(0.1, 0.1))
            .unwrap();
        // not in the image of the confusion map, so inversion goes negative
        let p = vec![1.0, 0.0, 0.0, 0.0];
        let m = mitigate_readout(&p, &b, &Layout::trivial(2)).unwrap();
        assert!(m.iter().all(|&v| v >= 0.0));
        assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
