use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Gate kinds understood by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    H,
    RX,
    RZ,
    RZZ,
    CNOT,
    SWAP,
}

/// One gate applied to specific qubits.
///
/// Rotations follow `R_P(theta) = exp(-i theta P / 2)`; `Rzz` is `exp(-i theta Z⊗Z / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GateOp {
    H(usize),
    Rx(usize, f64),
    Rz(usize, f64),
    Rzz(usize, usize, f64),
    Cnot { control: usize, target: usize },
    Swap(usize, usize),
}

impl GateOp {
    pub fn kind(&self) -> GateKind {
        match self {
            GateOp::H(_) => GateKind::H,
            GateOp::Rx(..) => GateKind::RX,
            GateOp::Rz(..) => GateKind::RZ,
            GateOp::Rzz(..) => GateKind::RZZ,
            GateOp::Cnot { .. } => GateKind::CNOT,
            GateOp::Swap(..) => GateKind::SWAP,
        }
    }

    /// Qubits acted on; for `Cnot` the control comes first.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            GateOp::H(q) | GateOp::Rx(q, _) | GateOp::Rz(q, _) => vec![q],
            GateOp::Rzz(a, b, _) | GateOp::Swap(a, b) => vec![a, b],
            GateOp::Cnot { control, target } => vec![control, target],
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            GateOp::Rx(_, t) | GateOp::Rz(_, t) | GateOp::Rzz(_, _, t) => Some(t),
            _ => None,
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, GateOp::Rzz(..) | GateOp::Cnot { .. } | GateOp::Swap(..))
    }

    /// The same gate with every qubit index passed through `f`.
    pub fn remap(&self, f: impl Fn(usize) -> usize) -> GateOp {
        match *self {
            GateOp::H(q) => GateOp::H(f(q)),
            GateOp::Rx(q, t) => GateOp::Rx(f(q), t),
            GateOp::Rz(q, t) => GateOp::Rz(f(q), t),
            GateOp::Rzz(a, b, t) => GateOp::Rzz(f(a), f(b), t),
            GateOp::Cnot { control, target } => GateOp::Cnot {
                control: f(control),
                target: f(target),
            },
            GateOp::Swap(a, b) => GateOp::Swap(f(a), f(b)),
        }
    }

    pub fn inverse(&self) -> GateOp {
        match *self {
            GateOp::Rx(q, t) => GateOp::Rx(q, -t),
            GateOp::Rz(q, t) => GateOp::Rz(q, -t),
            GateOp::Rzz(a, b, t) => GateOp::Rzz(a, b, -t),
            g => g,
        }
    }

    /// Checks that targets are distinct and below `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        let qs = self.qubits();
        if let Some(&q) = qs.iter().find(|&&q| q >= n) {
            return Err(Error::invalid(format!(
                "{self:?} targets qubit {q} on a {n}-qubit register"
            )));
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::invalid(format!("{self:?} repeats qubit {}", qs[0])));
        }
        if let Some(t) = self.angle() {
            if !t.is_finite() {
                return Err(Error::invalid(format!("{self:?} has a non-finite angle")));
            }
        }
        Ok(())
    }

    /// Row-major unitary over the local basis of [`GateOp::qubits`], where local bit `k`
    /// is the state of `qubits()[k]`.
    pub fn matrix(&self) -> Vec<C64> {
        match *self {
            GateOp::H(_) => {
                let h = C64::new(FRAC_1_SQRT_2, 0.0);
                vec![h, h, h, -h]
            }
            GateOp::Rx(_, t) => {
                let c = C64::new((t / 2.0).cos(), 0.0);
                let s = C64::new(0.0, -(t / 2.0).sin());
                vec![c, s, s, c]
            }
            GateOp::Rz(_, t) => {
                vec![
                    C64::from_polar(1.0, -t / 2.0),
                    ZERO,
                    ZERO,
                    C64::from_polar(1.0, t / 2.0),
                ]
            }
            GateOp::Rzz(_, _, t) => {
                let even = C64::from_polar(1.0, -t / 2.0);
                let odd = C64::from_polar(1.0, t / 2.0);
                diag4([even, odd, odd, even])
            }
            GateOp::Cnot { .. } => {
                // local bit 0 = control, bit 1 = target: swaps |01> and |11> (indices 1 and 3)
                let mut m = vec![ZERO; 16];
                m[0] = ONE;
                m[4 + 3] = ONE;
                m[2 * 4 + 2] = ONE;
                m[3 * 4 + 1] = ONE;
                m
            }
            GateOp::Swap(..) => {
                let mut m = vec![ZERO; 16];
                m[0] = ONE;
                m[4 + 2] = ONE;
                m[2 * 4 + 1] = ONE;
                m[3 * 4 + 3] = ONE;
                m
            }
        }
    }
}

fn diag4(d: [C64; 4]) -> Vec<C64> {
    let mut m = vec![ZERO; 16];
    for (i, v) in d.into_iter().enumerate() {
        m[i * 4 + i] = v;
    }
    m
}

/// Applies a `2^k x 2^k` operator to the `targets` of a strided state vector.
///
/// Element `idx` of the logical vector lives at `data[base + idx * stride]`; `n` is
/// the register size. With `conjugate` set the operator's complex conjugate is used.
pub(crate) fn apply_local(
    data: &mut [C64],
    base: usize,
    stride: usize,
    n: usize,
    op: &[C64],
    targets: &[usize],
    conjugate: bool,
) {
    let k = targets.len();
    let dim = 1usize << k;
    debug_assert_eq!(op.len(), dim * dim);
    let mask: usize = targets.iter().map(|&t| 1usize << t).sum();
    let mut offsets = [0usize; 4];
    for (local, off) in offsets.iter_mut().enumerate().take(dim) {
        *off = targets
            .iter()
            .enumerate()
            .filter(|(bit, _)| (local >> bit) & 1 == 1)
            .map(|(_, &t)| 1usize << t)
            .sum();
    }
    let offsets = &offsets[..dim];
    let mut buf = [ZERO; 4];
    let mut out = [ZERO; 4];
    for idx in 0..(1usize << n) {
        if idx & mask != 0 {
            continue;
        }
        for (l, off) in offsets.iter().enumerate() {
            buf[l] = data[base + (idx | off) * stride];
        }
        for r in 0..dim {
            let mut acc = ZERO;
            for c in 0..dim {
                let m = op[r * dim + c];
                acc += if conjugate { m.conj() } else { m } * buf[c];
            }
            out[r] = acc;
        }
        for (l, off) in offsets.iter().enumerate() {
            data[base + (idx | off) * stride] = out[l];
        }
    }
}
