use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{BackendModel, Layout};
use crate::error::{Error, Result};
use crate::sim::{GateKind, GateOp};

/// A circuit lowered onto physical qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompiledCircuit {
    /// Gates over physical indices; only H, RX, RZ and CNOT.
    pub gates: Vec<GateOp>,
    pub initial_layout: Layout,
    /// Layout after SWAP relabelling; read results through this one.
    pub final_layout: Layout,
    pub gate_counts: BTreeMap<GateKind, usize>,
    pub swaps_inserted: usize,
}

impl CompiledCircuit {
    pub fn count(&self, kind: GateKind) -> usize {
        self.gate_counts.get(&kind).copied().unwrap_or(0)
    }

    /// Physical qubits touched, ascending; equal to the layout image.
    pub fn active_qubits(&self) -> Vec<usize> {
        self.initial_layout.active()
    }
}

/// Shortest path from `from` to `to` through the `allowed` qubits, BFS with
/// neighbours visited in ascending order.
fn shortest_path(b: &BackendModel, allowed: &[usize], from: usize, to: usize) -> Option<Vec<usize>> {
    let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = VecDeque::from([from]);
    prev.insert(from, from);
    while let Some(q) = queue.pop_front() {
        if q == to {
            let mut path = vec![to];
            let mut cur = to;
            while cur != from {
                cur = prev[&cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for nb in b.neighbors(q) {
            if allowed.contains(&nb) && !prev.contains_key(&nb) {
                prev.insert(nb, q);
                queue.push_back(nb);
            }
        }
    }
    None
}

fn push_decomposed(out: &mut Vec<GateOp>, gate: GateOp) {
    match gate {
        GateOp::Rzz(a, c, theta) => {
            out.push(GateOp::Cnot { control: a, target: c });
            out.push(GateOp::Rz(c, theta));
            out.push(GateOp::Cnot { control: a, target: c });
        }
        GateOp::Swap(a, c) => {
            out.push(GateOp::Cnot { control: a, target: c });
            out.push(GateOp::Cnot { control: c, target: a });
            out.push(GateOp::Cnot { control: a, target: c });
        }
        g => out.push(g),
    }
}

/// Maps a logical circuit onto the device.
///
/// An `RZZ` between non-adjacent physical qubits moves its first operand along a
/// shortest path (restricted to the qubits in `layout`) until the pair is adjacent.
/// Each SWAP permanently relabels the layout. RZZ and SWAP are then decomposed
/// into CNOT and RZ.
pub fn route_and_compile(logical: &[GateOp], b: &BackendModel, layout: &Layout) -> Result<CompiledCircuit> {
    let n = layout.len();
    if let Some(&p) = layout.as_slice().iter().find(|&&p| p >= b.num_qubits) {
        return Err(Error::invalid(format!("layout uses qubit {p} outside {}", b.name)));
    }
    let allowed = layout.active();
    let mut current = layout.clone();
    let mut gates = Vec::with_capacity(logical.len() * 2);
    let mut swaps = 0;
    for gate in logical {
        gate.validate(n)?;
        match *gate {
            GateOp::H(_) | GateOp::Rx(..) | GateOp::Rz(..) => {
                gates.push(gate.remap(|q| current.physical(q)));
            }
            GateOp::Rzz(i, j, theta) => {
                let (pi, pj) = (current.physical(i), current.physical(j));
                if !b.is_adjacent(pi, pj) {
                    let path = shortest_path(b, &allowed, pi, pj).ok_or_else(|| {
                        Error::Routing(format!("no path between physical qubits {pi} and {pj} on {}", b.name))
                    })?;
                    for w in path[..path.len() - 1].windows(2) {
                        push_decomposed(&mut gates, GateOp::Swap(w[0], w[1]));
                        current.swap_physical(w[0], w[1]);
                        swaps += 1;
                    }
                }
                let (pi, pj) = (current.physical(i), current.physical(j));
                debug_assert!(b.is_adjacent(pi, pj));
                push_decomposed(&mut gates, GateOp::Rzz(pi, pj, theta));
            }
            other => {
                return Err(Error::invalid(format!(
                    "logical circuits may only use H, RX, RZ and RZZ, found {other:?}"
                )))
            }
        }
    }
    let mut gate_counts = BTreeMap::new();
    for g in &gates {
        *gate_counts.entry(g.kind()).or_insert(0) += 1;
    }
    Ok(CompiledCircuit {
        gates,
        initial_layout: layout.clone(),
        final_layout: current,
        gate_counts,
        swaps_inserted: swaps,
    })
}
