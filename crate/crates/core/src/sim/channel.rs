use super::gate::C64;
use crate::error::{Error, Result};

const COMPLETENESS_TOL: f64 = 1e-8;

/// A completely positive trace-preserving map given by Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseChannel {
    num_qubits: usize,
    kraus: Vec<Vec<C64>>,
}

fn pauli(index: usize) -> [C64; 4] {
    let o = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match index {
        0 => [one, o, o, one],
        1 => [o, one, one, o],
        2 => [o, -i, i, o],
        _ => [one, o, o, -one],
    }
}

/// `a ⊗ b` where `a` acts on local bit 0 and `b` on local bit 1.
fn kron_local(a: &[C64; 4], b: &[C64; 4]) -> Vec<C64> {
    let mut m = vec![C64::new(0.0, 0.0); 16];
    for r in 0..4 {
        for c in 0..4 {
            m[r * 4 + c] = a[(r & 1) * 2 + (c & 1)] * b[(r >> 1) * 2 + (c >> 1)];
        }
    }
    m
}

impl NoiseChannel {
    /// Builds a channel, checking that all operators share a dimension and that
    /// `sum K^dagger K = I`.
    pub fn new(kraus: Vec<Vec<C64>>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidChannel("no Kraus operators".into()))?;
        let len = first.len();
        let dim = (len as f64).sqrt() as usize;
        if dim * dim != len || !dim.is_power_of_two() || dim < 2 {
            return Err(Error::InvalidChannel(format!(
                "operator with {len} entries is not 2^k x 2^k"
            )));
        }
        if kraus.iter().any(|k| k.len() != len) {
            return Err(Error::InvalidChannel("Kraus operators differ in dimension".into()));
        }
        for i in 0..dim {
            for j in 0..dim {
                let mut v = C64::new(0.0, 0.0);
                for k in &kraus {
                    for r in 0..dim {
                        v += k[r * dim + i].conj() * k[r * dim + j];
                    }
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                if (v - C64::new(expect, 0.0)).norm() > COMPLETENESS_TOL {
                    return Err(Error::InvalidChannel(format!(
                        "completeness violated at ({i}, {j}): {v}"
                    )));
                }
            }
        }
        Ok(NoiseChannel {
            num_qubits: dim.trailing_zeros() as usize,
            kraus,
        })
    }

    pub fn identity(num_qubits: usize) -> Self {
        let dim = 1 << num_qubits;
        let mut k = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            k[i * dim + i] = C64::new(1.0, 0.0);
        }
        NoiseChannel {
            num_qubits,
            kraus: vec![k],
        }
    }

    /// `rho -> (1 - p) rho + p I/d ⊗ Tr_targets(rho)` on one or two qubits.
    pub fn depolarizing(num_qubits: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidChannel(format!(
                "depolarizing probability {p} outside [0, 1]"
            )));
        }
        if p == 0.0 {
            return Ok(NoiseChannel::identity(num_qubits));
        }
        let kraus = match num_qubits {
            1 => {
                let w0 = (1.0 - 0.75 * p).sqrt();
                let w = (p / 4.0).sqrt();
                (0..4)
                    .map(|i| {
                        let s = if i == 0 { w0 } else { w };
                        pauli(i).iter().map(|v| v * s).collect()
                    })
                    .collect()
            }
            2 => {
                let w0 = (1.0 - 15.0 * p / 16.0).sqrt();
                let w = (p / 16.0).sqrt();
                (0..16)
                    .map(|i| {
                        let s = if i == 0 { w0 } else { w };
                        kron_local(&pauli(i & 3), &pauli(i >> 2))
                            .into_iter()
                            .map(|v| v * s)
                            .collect()
                    })
                    .collect()
            }
            k => {
                return Err(Error::InvalidChannel(format!(
                    "depolarizing on {k} qubits is not supported"
                )))
            }
        };
        NoiseChannel::new(kraus)
    }

    /// Energy relaxation with decay probability `gamma`.
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidChannel(format!(
                "damping probability {gamma} outside [0, 1]"
            )));
        }
        let z = C64::new(0.0, 0.0);
        let k0 = vec![C64::new(1.0, 0.0), z, z, C64::new((1.0 - gamma).sqrt(), 0.0)];
        let k1 = vec![z, C64::new(gamma.sqrt(), 0.0), z, z];
        NoiseChannel::new(vec![k0, k1])
    }

    /// Phase flip (Z) with probability `p`.
    pub fn phase_flip(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidChannel(format!(
                "phase-flip probability {p} outside [0, 1]"
            )));
        }
        let s0 = (1.0 - p).sqrt();
        let s1 = p.sqrt();
        let k0 = pauli(0).iter().map(|v| v * s0).collect();
        let k1 = pauli(3).iter().map(|v| v * s1).collect();
        NoiseChannel::new(vec![k0, k1])
    }

    /// Idle decoherence over `duration`: amplitude damping with
    /// `gamma = 1 - exp(-d/T1)`, then the pure dephasing that brings the total
    /// coherence decay to `exp(-d/T2)`, clamped at zero.
    pub fn decoherence(duration: f64, t1: f64, t2: f64) -> Result<[NoiseChannel; 2]> {
        if !(duration >= 0.0 && t1 > 0.0 && t2 > 0.0) {
            return Err(Error::InvalidChannel(format!(
                "decoherence needs duration >= 0 and positive T1/T2 (got {duration}, {t1}, {t2})"
            )));
        }
        let gamma = 1.0 - (-duration / t1).exp();
        // damping alone leaves coherence exp(-d / 2T1)
        let extra = (-duration / t2 + duration / (2.0 * t1)).exp();
        let p_phi = ((1.0 - extra) / 2.0).max(0.0);
        Ok([
            NoiseChannel::amplitude_damping(gamma)?,
            NoiseChannel::phase_flip(p_phi)?,
        ])
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn kraus(&self) -> &[Vec<C64>] {
        &self.kraus
    }

    pub fn is_identity(&self) -> bool {
        let dim = 1 << self.num_qubits;
        self.kraus.len() == 1
            && self.kraus[0].iter().enumerate().all(|(idx, v)| {
                let expect = if idx / dim == idx % dim { 1.0 } else { 0.0 };
                *v == C64::new(expect, 0.0)
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn incomplete_channel_rejected() {
        let z = C64::new(0.0, 0.0);
        let half = C64::new(0.5, 0.0);
        let err = NoiseChannel::new(vec![vec![half, z, z, half]]).unwrap_err();
        assert!(matches!(err, Error::InvalidChannel(_)));
    }

    #[test]
    fn mismatched_dimensions_rejected() {
        let a = NoiseChannel::identity(1).kraus()[0].clone();
        let b = NoiseChannel::identity(2).kraus()[0].clone();
        assert!(NoiseChannel::new(vec![a, b]).is_err());
    }

    #[test]
    fn constructors_are_complete() {
        for p in [0.0, 0.01, 0.5, 1.0] {
            NoiseChannel::depolarizing(1, p).unwrap();
            NoiseChannel::depolarizing(2, p).unwrap();
            NoiseChannel::amplitude_damping(p).unwrap();
            NoiseChannel::phase_flip(p).unwrap();
        }
        assert!(NoiseChannel::depolarizing(1, 1.5).is_err());
        assert!(NoiseChannel::depolarizing(3, 0.1).is_err());
    }

    #[test]
    fn dephasing_clamped_when_t2_at_limit() {
        let [_, dephase] = NoiseChannel::decoherence(0.1, 50.0, 100.0).unwrap();
        assert!(dephase.is_identity() || dephase.kraus()[1].iter().all(|v| v.norm() < 1e-12));
    }
}
