use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Classical bit-flip probabilities at measurement of one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct ReadoutError {
    /// P(read 1 | prepared 0)
    pub p01: f64,
    /// P(read 0 | prepared 1)
    pub p10: f64,
}

impl ReadoutError {
    pub fn new(p01: f64, p10: f64) -> Self {
        ReadoutError { p01, p10 }
    }

    pub fn is_zero(&self) -> bool {
        self.p01 == 0.0 && self.p10 == 0.0
    }

    pub fn mean(&self) -> f64 {
        0.5 * (self.p01 + self.p10)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p01) || !(0.0..=1.0).contains(&self.p10) {
            return Err(Error::invalid(format!(
                "readout flip probabilities {self:?} outside [0, 1]"
            )));
        }
        Ok(())
    }

    /// Column-stochastic confusion matrix `[[P(0|0), P(0|1)], [P(1|0), P(1|1)]]`.
    pub fn confusion(&self) -> [[f64; 2]; 2] {
        [[1.0 - self.p01, self.p10], [self.p01, 1.0 - self.p10]]
    }

    /// Inverse confusion matrix, or `None` when `p01 + p10 == 1`.
    pub fn inverse_confusion(&self) -> Option<[[f64; 2]; 2]> {
        let [[a, b], [c, d]] = self.confusion();
        let det = a * d - b * c;
        if det.abs() < 1e-12 {
            return None;
        }
        Some([[d / det, -b / det], [-c / det, a / det]])
    }
}

impl From<[f64; 2]> for ReadoutError {
    fn from([p01, p10]: [f64; 2]) -> Self {
        ReadoutError { p01, p10 }
    }
}

impl From<ReadoutError> for [f64; 2] {
    fn from(r: ReadoutError) -> Self {
        [r.p01, r.p10]
    }
}

/// Applies a 2x2 matrix to bit `qubit` of every outcome index.
pub(crate) fn apply_qubit_matrix(dist: &mut [f64], qubit: usize, m: &[[f64; 2]; 2]) {
    let bit = 1usize << qubit;
    for i in 0..dist.len() {
        if i & bit != 0 {
            continue;
        }
        let (p0, p1) = (dist[i], dist[i | bit]);
        dist[i] = m[0][0] * p0 + m[0][1] * p1;
        dist[i | bit] = m[1][0] * p0 + m[1][1] * p1;
    }
}

/// Passes a distribution through the tensor product of per-qubit confusion matrices;
/// `flips[i]` belongs to qubit `i`.
pub fn apply_readout_error(dist: &[f64], flips: &[ReadoutError]) -> Result<Vec<f64>> {
    if dist.len() != 1usize << flips.len() {
        return Err(Error::invalid(format!(
            "distribution of length {} does not match {} readout entries",
            dist.len(),
            flips.len()
        )));
    }
    let mut out = dist.to_vec();
    for (q, f) in flips.iter().enumerate() {
        f.validate()?;
        if !f.is_zero() {
            apply_qubit_matrix(&mut out, q, &f.confusion());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_flips_is_identity() {
        let p = vec![0.1, 0.2, 0.3, 0.4];
        assert_eq!(apply_readout_error(&p, &[ReadoutError::default(); 2]).unwrap(), p);
    }

    #[test]
    fn single_qubit_definition() {
        let out = apply_readout_error(&[1.0, 0.0], &[ReadoutError::new(0.1, 0.0)]).unwrap();
        assert!((out[0] - 0.9).abs() < 1e-15 && (out[1] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn output_is_distribution() {
        let p = vec![0.05, 0.15, 0.3, 0.5];
        let out = apply_readout_error(&p, &[ReadoutError::new(0.03, 0.07), ReadoutError::new(0.2, 0.1)]).unwrap();
        assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(out.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn singular_confusion() {
        assert!(ReadoutError::new(0.4, 0.6).inverse_confusion().is_none());
        assert!(ReadoutError::new(0.4, 0.5).inverse_confusion().is_some());
    }
}
