use super::channel::NoiseChannel;
use super::gate::{apply_local, GateOp, C64};
use crate::error::{Error, Result};

/// Largest register the exact simulator accepts.
pub const MAX_SIM_QUBITS: usize = 10;

fn check_size(n: usize) -> Result<()> {
    if n > MAX_SIM_QUBITS {
        return Err(Error::Capacity(format!(
            "simulator supports at most {MAX_SIM_QUBITS} qubits, got {n}"
        )));
    }
    Ok(())
}

/// Common surface of pure and mixed states.
pub trait QuantumState {
    fn num_qubits(&self) -> usize;
    fn apply_gate(&mut self, gate: &GateOp) -> Result<()>;
    /// Computational-basis outcome distribution, indexed little-endian.
    fn probabilities(&self) -> Vec<f64>;
}

/// Pure state of `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amp: Vec<C64>,
}

impl StateVector {
    /// `|0...0>`
    pub fn zero(n: usize) -> Result<Self> {
        check_size(n)?;
        let mut amp = vec![C64::new(0.0, 0.0); 1 << n];
        amp[0] = C64::new(1.0, 0.0);
        Ok(StateVector { n, amp })
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let mut s = StateVector::zero(n)?;
        if index >= s.amp.len() {
            return Err(Error::invalid(format!(
                "basis index {index} out of range for {n} qubits"
            )));
        }
        s.amp[0] = C64::new(0.0, 0.0);
        s.amp[index] = C64::new(1.0, 0.0);
        Ok(s)
    }

    /// Normalizes arbitrary amplitudes.
    pub fn from_amplitudes(amp: Vec<C64>) -> Result<Self> {
        let len = amp.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::invalid(format!("amplitude count {len} is not a power of two")));
        }
        let n = len.trailing_zeros() as usize;
        check_size(n)?;
        let norm = amp.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::invalid("amplitudes have zero or non-finite norm"));
        }
        Ok(StateVector {
            n,
            amp: amp.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amp
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `|<self|other>|`, which ignores global phase.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .norm()
    }
}

impl QuantumState for StateVector {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn apply_gate(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.n)?;
        apply_local(&mut self.amp, 0, 1, self.n, &gate.matrix(), &gate.qubits(), false);
        Ok(())
    }

    fn probabilities(&self) -> Vec<f64> {
        self.amp.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Mixed state of `n` qubits, stored as a row-major `2^n x 2^n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    rho: Vec<C64>,
}

impl DensityMatrix {
    pub fn zero(n: usize) -> Result<Self> {
        check_size(n)?;
        let d = 1 << n;
        let mut rho = vec![C64::new(0.0, 0.0); d * d];
        rho[0] = C64::new(1.0, 0.0);
        Ok(DensityMatrix { n, rho })
    }

    pub fn from_pure(s: &StateVector) -> Self {
        let d = s.amp.len();
        let mut rho = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                rho[i * d + j] = s.amp[i] * s.amp[j].conj();
            }
        }
        DensityMatrix { n: s.n, rho }
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.rho[i * self.dim() + j]
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.entry(i, i)).sum()
    }

    /// Largest deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.entry(i, j) - self.entry(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Reduced single-qubit state of `qubit` as a row-major 2x2 matrix.
    pub fn reduced_qubit(&self, qubit: usize) -> [C64; 4] {
        let d = self.dim();
        let bit = 1usize << qubit;
        let mut out = [C64::new(0.0, 0.0); 4];
        for i in 0..d {
            if i & bit != 0 {
                continue;
            }
            for a in 0..2 {
                for b in 0..2 {
                    out[a * 2 + b] += self.entry(i | (a * bit), i | (b * bit));
                }
            }
        }
        out
    }

    /// `U rho U^dagger` with a `2^k` operator on `targets`.
    fn conjugate_by(&mut self, op: &[C64], targets: &[usize]) {
        let d = self.dim();
        for col in 0..d {
            apply_local(&mut self.rho, col, d, self.n, op, targets, false);
        }
        for row in 0..d {
            apply_local(&mut self.rho, row * d, 1, self.n, op, targets, true);
        }
    }

    /// `rho <- sum_K K rho K^dagger` on `targets`.
    pub fn apply_channel(&mut self, channel: &NoiseChannel, targets: &[usize]) -> Result<()> {
        if channel.num_qubits() != targets.len() {
            return Err(Error::invalid(format!(
                "{}-qubit channel applied to {} targets",
                channel.num_qubits(),
                targets.len()
            )));
        }
        self.check_targets(targets)?;
        if channel.is_identity() {
            return Ok(());
        }
        let mut acc = vec![C64::new(0.0, 0.0); self.rho.len()];
        for k in channel.kraus().iter().filter(|k| k.iter().any(|v| v.norm_sqr() > 0.0)) {
            let mut term = self.clone();
            term.conjugate_by(k, targets);
            for (a, t) in acc.iter_mut().zip(&term.rho) {
                *a += t;
            }
        }
        self.rho = acc;
        Ok(())
    }
}

impl QuantumState for DensityMatrix {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn apply_gate(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.n)?;
        self.conjugate_by(&gate.matrix(), &gate.qubits());
        Ok(())
    }

    fn probabilities(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entry(i, i).re.max(0.0)).collect()
    }
}

impl DensityMatrix {
    /// Depolarizing noise on one or two qubits in closed form:
    /// `rho -> (1 - p) rho + p I/d ⊗ Tr_targets(rho)`.
    pub fn depolarize(&mut self, targets: &[usize], p: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidChannel(format!(
                "depolarizing probability {p} outside [0, 1]"
            )));
        }
        self.check_targets(targets)?;
        if p == 0.0 {
            return Ok(());
        }
        let d = self.dim();
        let mask: usize = targets.iter().map(|&t| 1usize << t).sum();
        let local_dim = 1usize << targets.len();
        let mut offsets = [0usize; 4];
        for (local, off) in offsets.iter_mut().enumerate().take(local_dim) {
            *off = targets
                .iter()
                .enumerate()
                .filter(|(bit, _)| (local >> bit) & 1 == 1)
                .map(|(_, &t)| 1usize << t)
                .sum();
        }
        let keep = 1.0 - p;
        for r in 0..d {
            if r & mask != 0 {
                continue;
            }
            for c in 0..d {
                if c & mask != 0 {
                    continue;
                }
                // block over the target bits with the other bits fixed to (r, c)
                let mut tr = C64::new(0.0, 0.0);
                for &o in &offsets[..local_dim] {
                    tr += self.rho[(r | o) * d + (c | o)];
                }
                let mixed = tr * (p / local_dim as f64);
                for &ro in &offsets[..local_dim] {
                    for &co in &offsets[..local_dim] {
                        let e = &mut self.rho[(r | ro) * d + (c | co)];
                        *e *= keep;
                        if ro == co {
                            *e += mixed;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Amplitude damping with probability `gamma` followed by a phase flip with
    /// probability `p_phase`, in closed form on one qubit.
    pub fn relax(&mut self, qubit: usize, gamma: f64, p_phase: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&gamma) || !(0.0..=1.0).contains(&p_phase) {
            return Err(Error::InvalidChannel(format!(
                "relaxation probabilities ({gamma}, {p_phase}) outside [0, 1]"
            )));
        }
        self.check_targets(&[qubit])?;
        let d = self.dim();
        let bit = 1usize << qubit;
        let coherence = (1.0 - gamma).sqrt() * (1.0 - 2.0 * p_phase);
        for r in 0..d {
            if r & bit != 0 {
                continue;
            }
            for c in 0..d {
                if c & bit != 0 {
                    continue;
                }
                let (i00, i01, i10, i11) = (
                    r * d + c,
                    r * d + (c | bit),
                    (r | bit) * d + c,
                    (r | bit) * d + (c | bit),
                );
                let excited = self.rho[i11];
                self.rho[i00] += excited * gamma;
                self.rho[i11] = excited * (1.0 - gamma);
                self.rho[i01] *= coherence;
                self.rho[i10] *= coherence;
            }
        }
        Ok(())
    }

    fn check_targets(&self, targets: &[usize]) -> Result<()> {
        for (i, &t) in targets.iter().enumerate() {
            if t >= self.n || targets[..i].contains(&t) {
                return Err(Error::invalid(format!("invalid channel targets {targets:?}")));
            }
        }
        Ok(())
    }
}

/// Free-function form of [`DensityMatrix::apply_channel`].
pub fn apply_channel(rho: &mut DensityMatrix, channel: &NoiseChannel, targets: &[usize]) -> Result<()> {
    rho.apply_channel(channel, targets)
}

pub fn probabilities<S: QuantumState>(state: &S) -> Vec<f64> {
    state.probabilities()
}
