use serde::{Deserialize, Serialize};

use super::BackendModel;
use crate::error::{Error, Result};

/// Injective map from logical qubit `i` to physical qubit `physical[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    physical: Vec<usize>,
}

impl Layout {
    pub fn new(physical: Vec<usize>) -> Result<Self> {
        let mut sorted = physical.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!("layout {physical:?} is not injective")));
        }
        Ok(Layout { physical })
    }

    pub fn trivial(n: usize) -> Self {
        Layout {
            physical: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.physical.len()
    }

    pub fn is_empty(&self) -> bool {
        self.physical.is_empty()
    }

    pub fn physical(&self, logical: usize) -> usize {
        self.physical[logical]
    }

    pub fn logical_of(&self, physical: usize) -> Option<usize> {
        self.physical.iter().position(|&p| p == physical)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.physical
    }

    /// Physical qubits in use, ascending.
    pub fn active(&self) -> Vec<usize> {
        let mut v = self.physical.clone();
        v.sort_unstable();
        v
    }

    /// Exchanges whatever logical qubits sit on physical `a` and `b`.
    pub(crate) fn swap_physical(&mut self, a: usize, b: usize) {
        for p in &mut self.physical {
            if *p == a {
                *p = b;
            } else if *p == b {
                *p = a;
            }
        }
    }
}

/// Greedy connected-subgraph layout on the device's most reliable qubits.
///
/// Seeds at the edge with the highest fidelity `1 - p2`, then repeatedly adds the
/// neighbouring qubit that maximizes the summed fidelity of its edges into the
/// chosen set minus its mean readout error. Ties go to the lowest physical index.
/// Logical qubits are assigned in the order physical qubits were chosen.
pub fn select_layout(b: &BackendModel, n: usize) -> Result<Layout> {
    if n > b.num_qubits {
        return Err(Error::Capacity(format!(
            "{n} logical qubits do not fit on {} ({} qubits)",
            b.name, b.num_qubits
        )));
    }
    if n == 0 {
        return Ok(Layout { physical: vec![] });
    }
    if n == 1 || b.coupling.is_empty() {
        if n > 1 {
            return Err(Error::Routing(format!("{} has no couplings", b.name)));
        }
        let best = (0..b.num_qubits)
            .min_by(|&x, &y| {
                b.qubit_readout(x)
                    .mean()
                    .total_cmp(&b.qubit_readout(y).mean())
                    .then(x.cmp(&y))
            })
            .expect("backend has qubits");
        return Ok(Layout { physical: vec![best] });
    }

    let &(s0, s1) = b
        .coupling
        .iter()
        .min_by(|&&(a0, a1), &&(c0, c1)| {
            let fa = 1.0 - b.edge_p2(a0, a1);
            let fc = 1.0 - b.edge_p2(c0, c1);
            fc.total_cmp(&fa).then((a0, a1).cmp(&(c0, c1)))
        })
        .expect("coupling is non-empty");
    let mut chosen = vec![s0, s1];
    while chosen.len() < n {
        let mut best: Option<(f64, usize)> = None;
        for cand in 0..b.num_qubits {
            if chosen.contains(&cand) {
                continue;
            }
            let links: Vec<usize> = b.neighbors(cand).into_iter().filter(|q| chosen.contains(q)).collect();
            if links.is_empty() {
                continue;
            }
            let score = links.iter().map(|&q| 1.0 - b.edge_p2(cand, q)).sum::<f64>() - b.qubit_readout(cand).mean();
            // strict improvement keeps the lowest index on ties
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, cand));
            }
        }
        let (_, next) =
            best.ok_or_else(|| Error::Capacity(format!("{} has no connected region of {n} qubits", b.name)))?;
        chosen.push(next);
    }
    Ok(Layout { physical: chosen })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{topology_preset, NoiseParams, Topology};

    #[test]
    fn uniform_noiseless_prefers_low_indices() {
        let b = topology_preset(Topology::IShape7, &NoiseParams::noiseless());
        assert_eq!(select_layout(&b, 4).unwrap().active(), vec![0, 1, 2, 3]);
        let h = topology_preset(Topology::HeavyHex16, &NoiseParams::noiseless());
        assert_eq!(select_layout(&h, 5).unwrap().active(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn better_edge_wins() {
        let b = BackendModel::with_uniform_noise("line", 3, &[(0, 1), (1, 2)], &NoiseParams::default())
            .unwrap()
            .with_edge_p2(1, 2, 0.001)
            .unwrap();
        assert_eq!(select_layout(&b, 2).unwrap().active(), vec![1, 2]);
    }

    #[test]
    fn capacity_error() {
        let b = topology_preset(Topology::IShape7, &NoiseParams::default());
        assert!(matches!(select_layout(&b, 8), Err(Error::Capacity(_))));
    }

    #[test]
    fn layout_injective_and_connected() {
        for kind in Topology::ALL {
            let b = topology_preset(kind, &NoiseParams::default());
            for n in 1..=6 {
                let l = select_layout(&b, n).unwrap();
                let active = l.active();
                assert_eq!(active.len(), n);
                assert!(active.windows(2).all(|w| w[0] < w[1]));
                // induced subgraph connected
                let mut seen = vec![active[0]];
                let mut frontier = vec![active[0]];
                while let Some(q) = frontier.pop() {
                    for nb in b.neighbors(q) {
                        if active.contains(&nb) && !seen.contains(&nb) {
                            seen.push(nb);
                            frontier.push(nb);
                        }
                    }
                }
                assert_eq!(seen.len(), n, "{kind} n={n}");
            }
        }
    }

    #[test]
    fn non_injective_rejected() {
        assert!(Layout::new(vec![0, 2, 0]).is_err());
    }
}
