//! QUBO instances: symmetric Q matrices, cost evaluation, exhaustive ground truth,
//! and generation of benchmark instances of controlled difficulty.
//!
//! Bitstrings are little-endian throughout: entry `i` of a bitstring is qubit `i`,
//! and the decimal label of a bitstring is `sum_i x[i] * 2^i`.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::backend::BackendModel;
use crate::error::{Error, Result};
use crate::qaoa::{self, RunOptions};
use crate::seed::{self, Stream};

/// Largest instance `brute_force_solve` will enumerate.
pub const MAX_ENUMERATION_QUBITS: usize = 20;
/// Qubit range accepted by instance generation.
pub const MIN_QUBITS: usize = 3;
pub const MAX_QUBITS: usize = 8;
/// Candidates drawn before `generate_instance` gives up.
pub const REJECTION_BUDGET: usize = 1000;
/// Probe runs used to estimate single-layer difficulty.
pub const PROBE_RUNS: usize = 50;
/// Accepted window for the probe mean accuracy.
pub const PROBE_WINDOW: (f64, f64) = (0.05, 0.80);

/// Relative tolerance used to decide whether two costs are degenerate.
const DEGENERACY_TOL: f64 = 1e-9;

/// Dense symmetric real matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct QMatrix {
    n: usize,
    data: Vec<f64>,
}

impl QMatrix {
    /// Builds a matrix from rows, rejecting ragged or asymmetric input.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::invalid("Q matrix must have at least one row"));
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!(
                    "Q matrix row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("Q matrix row {i} has non-finite entries")));
            }
            data.extend_from_slice(row);
        }
        let m = QMatrix { n, data };
        for i in 0..n {
            for j in (i + 1)..n {
                if m.get(i, j) != m.get(j, i) {
                    return Err(Error::invalid(format!(
                        "Q matrix is not symmetric at ({i}, {j}): {} vs {}",
                        m.get(i, j),
                        m.get(j, i)
                    )));
                }
            }
        }
        Ok(m)
    }

    pub fn zeros(n: usize) -> Self {
        QMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = QMatrix::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.data[i * values.len() + i] = v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// Relabels variables: entry `(i, j)` of the result is entry `(perm[i], perm[j])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n;
        let mut out = QMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = self.get(perm[i], perm[j]);
            }
        }
        out
    }
}

impl TryFrom<Vec<Vec<f64>>> for QMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        QMatrix::from_rows(rows)
    }
}

impl From<QMatrix> for Vec<Vec<f64>> {
    fn from(m: QMatrix) -> Self {
        m.rows()
    }
}

/// Cost `x^T Q x` of a bitstring.
pub fn evaluate_cost(q: &QMatrix, x: &[u8]) -> Result<f64> {
    if x.len() != q.dim() {
        return Err(Error::invalid(format!(
            "bitstring has {} entries but Q is {}x{}",
            x.len(),
            q.dim(),
            q.dim()
        )));
    }
    if let Some(bad) = x.iter().find(|&&b| b > 1) {
        return Err(Error::invalid(format!("bitstring entry {bad} is not 0 or 1")));
    }
    // x^T (Q x)
    let n = q.dim();
    let mut total = 0.0;
    for i in 0..n {
        if x[i] == 0 {
            continue;
        }
        let row: f64 = (0..n).map(|j| q.get(i, j) * f64::from(x[j])).sum();
        total += row;
    }
    Ok(total)
}

/// Little-endian bits of `index` over `n` qubits.
pub fn bits_of(index: usize, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((index >> i) & 1) as u8).collect()
}

pub fn index_of(bits: &[u8]) -> usize {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | (usize::from(b) << i))
}

/// Renders a bitstring with qubit 0 first.
pub fn bits_to_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
}

pub fn bits_from_str(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::invalid(format!("bitstring character {other:?} is not 0 or 1"))),
        })
        .collect()
}

/// Exhaustive minimum of a QUBO.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub energy: f64,
    /// All minimizers, sorted by decimal label.
    pub states: Vec<Vec<u8>>,
    pub dec_states: Vec<usize>,
}

/// Costs of every bitstring, indexed by decimal label.
///
/// Accumulates term by term over set bits; `evaluate_cost` uses the matrix-vector
/// form instead, so the two serve as cross-checks of one another.
pub fn cost_table(q: &QMatrix) -> Vec<f64> {
    let n = q.dim();
    let mut table = Vec::with_capacity(1 << n);
    let mut ones = Vec::with_capacity(n);
    for idx in 0..(1usize << n) {
        ones.clear();
        ones.extend((0..n).filter(|&i| (idx >> i) & 1 == 1));
        let mut c = 0.0;
        for &i in &ones {
            c += q.get(i, i);
            for &j in &ones {
                if j > i {
                    c += 2.0 * q.get(i, j);
                }
            }
        }
        table.push(c);
    }
    table
}

fn degenerate(a: f64, b: f64) -> bool {
    (a - b).abs() <= DEGENERACY_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Enumerates all `2^n` bitstrings and returns the minimum cost with every minimizer.
pub fn brute_force_solve(q: &QMatrix) -> Result<GroundTruth> {
    let n = q.dim();
    if n > MAX_ENUMERATION_QUBITS {
        return Err(Error::Capacity(format!(
            "brute force supports at most {MAX_ENUMERATION_QUBITS} variables, got {n}"
        )));
    }
    let table = cost_table(q);
    let energy = table.iter().copied().fold(f64::INFINITY, f64::min);
    let dec_states: Vec<usize> = table
        .iter()
        .enumerate()
        .filter(|&(_, &c)| degenerate(c, energy))
        .map(|(i, _)| i)
        .collect();
    let states = dec_states.iter().map(|&d| bits_of(d, n)).collect();
    Ok(GroundTruth {
        energy,
        states,
        dec_states,
    })
}

/// A benchmark instance with its ground truth attached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceFile", into = "InstanceFile")]
pub struct QuboInstance {
    pub id: String,
    pub q: QMatrix,
    pub seed: Option<u64>,
    pub ground_energy: f64,
    pub ground_states: Vec<Vec<u8>>,
    pub dec_states: Vec<usize>,
}

impl QuboInstance {
    /// Wraps a matrix, computing ground truth by enumeration.
    pub fn new(id: impl Into<String>, q: QMatrix, seed: Option<u64>) -> Result<Self> {
        let gt = brute_force_solve(&q)?;
        Ok(QuboInstance {
            id: id.into(),
            q,
            seed,
            ground_energy: gt.energy,
            ground_states: gt.states,
            dec_states: gt.dec_states,
        })
    }

    pub fn n(&self) -> usize {
        self.q.dim()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(path, e))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance serializes");
        s.push('\n');
        s
    }

    /// Checks the stored ground truth against a fresh enumeration.
    pub fn verify(&self) -> Result<()> {
        let gt = brute_force_solve(&self.q)?;
        if !degenerate(gt.energy, self.ground_energy) || gt.dec_states != self.dec_states {
            return Err(Error::invalid(format!(
                "instance {} stores ground truth ({}, {:?}) but enumeration gives ({}, {:?})",
                self.id, self.ground_energy, self.dec_states, gt.energy, gt.dec_states
            )));
        }
        if gt.states != self.ground_states {
            return Err(Error::invalid(format!(
                "instance {} ground_states disagree with dec_states",
                self.id
            )));
        }
        Ok(())
    }
}

/// On-disk layout of an instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct InstanceFile {
    id: String,
    n: usize,
    q: QMatrix,
    seed: Option<u64>,
    ground_energy: f64,
    ground_states: Vec<String>,
    dec_states: Vec<usize>,
}

impl TryFrom<InstanceFile> for QuboInstance {
    type Error = Error;

    fn try_from(f: InstanceFile) -> Result<Self> {
        if f.n != f.q.dim() {
            return Err(Error::invalid(format!(
                "n = {} but Q is {}x{}",
                f.n,
                f.q.dim(),
                f.q.dim()
            )));
        }
        let ground_states = f
            .ground_states
            .iter()
            .map(|s| bits_from_str(s))
            .collect::<Result<Vec<_>>>()?;
        let inst = QuboInstance {
            id: f.id,
            q: f.q,
            seed: f.seed,
            ground_energy: f.ground_energy,
            ground_states,
            dec_states: f.dec_states,
        };
        inst.verify()?;
        Ok(inst)
    }
}

impl From<QuboInstance> for InstanceFile {
    fn from(inst: QuboInstance) -> Self {
        InstanceFile {
            id: inst.id,
            n: inst.q.dim(),
            q: inst.q,
            seed: inst.seed,
            ground_energy: inst.ground_energy,
            ground_states: inst.ground_states.iter().map(|b| bits_to_string(b)).collect(),
            dec_states: inst.dec_states,
        }
    }
}

/// Draws a symmetric matrix with entries uniform in [-1, 1] on a 1e-3 grid.
fn draw_matrix<R: Rng>(n: usize, rng: &mut R) -> QMatrix {
    let mut q = QMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let v: i32 = rng.gen_range(-1000..=1000);
            q.set_sym(i, j, f64::from(v) / 1000.0);
        }
    }
    q
}

/// Mean single-layer noiseless accuracy over the probe runs.
pub fn probe_accuracy(inst: &QuboInstance, probe_seed: u64) -> Result<f64> {
    let ideal = BackendModel::ideal(inst.n());
    let opts = RunOptions::default();
    let mut total = 0.0;
    for k in 0..PROBE_RUNS {
        let run = qaoa::run_once(
            inst,
            &ideal,
            1,
            &opts,
            seed::run_seed(probe_seed, Stream::Probe, k as u64),
        )?;
        total += run.accuracy;
    }
    Ok(total / PROBE_RUNS as f64)
}

/// Deterministically generates an instance with a unique ground state whose
/// single-layer noiseless probe accuracy lies inside [`PROBE_WINDOW`].
pub fn generate_instance(n: usize, seed: u64) -> Result<QuboInstance> {
    if !(MIN_QUBITS..=MAX_QUBITS).contains(&n) {
        return Err(Error::invalid(format!(
            "instance generation supports {MIN_QUBITS}..={MAX_QUBITS} qubits, got {n}"
        )));
    }
    let mut rng = seed::rng_from(seed);
    let mut last_reason = String::from("no candidates drawn");
    for attempt in 0..REJECTION_BUDGET {
        let q = draw_matrix(n, &mut rng);
        let inst = QuboInstance::new(format!("qubo_{n}_{seed}"), q, Some(seed))?;
        if inst.dec_states.len() != 1 {
            last_reason = format!("candidate {attempt} has {} ground states", inst.dec_states.len());
            continue;
        }
        let probe = probe_accuracy(&inst, seed::mix(seed, attempt as u64))?;
        if !(PROBE_WINDOW.0..=PROBE_WINDOW.1).contains(&probe) {
            last_reason = format!("candidate {attempt} probe accuracy {probe:.4} outside window");
            continue;
        }
        return Ok(inst);
    }
    Err(Error::GenerationFailure {
        attempts: REJECTION_BUDGET,
        last_reason,
    })
}

/// Seeds the shipped instances were generated from.
pub const BUILTIN_SEEDS: [(usize, u64); 4] = [(3, 7), (4, 4), (5, 5), (6, 6)];

const BUILTIN_FILES: [(usize, &str); 4] = [
    (3, include_str!("../instances/qubits_3.json")),
    (4, include_str!("../instances/qubits_4.json")),
    (5, include_str!("../instances/qubits_5.json")),
    (6, include_str!("../instances/qubits_6.json")),
];

/// The shipped instance for `n` qubits (3 to 6).
pub fn builtin_instances(n: usize) -> Result<QuboInstance> {
    let (_, text) = BUILTIN_FILES
        .iter()
        .find(|(k, _)| *k == n)
        .ok_or_else(|| Error::invalid(format!("no built-in instance for {n} qubits (supported: 3, 4, 5, 6)")))?;
    serde_json::from_str(text).map_err(|e| Error::json(format!("instances/qubits_{n}.json"), e))
}
