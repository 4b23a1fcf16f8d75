//! Simulated QPUs: coupling map and noise calibration, layout selection,
//! SWAP routing with gate decomposition, and noisy execution.

mod execute;
mod layout;
mod routing;
mod topology;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::ReadoutError;

pub use execute::{execute, mitigate_readout, Execution, Executor};
pub use layout::{select_layout, Layout};
pub use routing::{route_and_compile, CompiledCircuit};
pub use topology::{topology_preset, Topology};

/// Uniform calibration values applied to every qubit and edge of a preset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub p1: f64,
    pub p2: f64,
    /// microseconds
    pub t1: f64,
    pub t2: f64,
    pub dur1: f64,
    pub dur2: f64,
    pub readout: ReadoutError,
    pub noiseless: bool,
}

impl NoiseParams {
    /// Zero noise, flagged noiseless.
    pub fn noiseless() -> Self {
        NoiseParams {
            p1: 0.0,
            p2: 0.0,
            t1: 100.0,
            t2: 100.0,
            dur1: 0.035,
            dur2: 0.3,
            readout: ReadoutError::default(),
            noiseless: true,
        }
    }

    /// Only two-qubit depolarizing noise; decoherence (T1 = T2 = 1e12 us) and
    /// readout are effectively off.
    pub fn two_qubit_only(p2: f64) -> Self {
        NoiseParams {
            p2,
            t1: 1e12,
            t2: 1e12,
            noiseless: false,
            ..NoiseParams::noiseless()
        }
    }
}

impl Default for NoiseParams {
    /// Calibration in the range of current superconducting devices.
    fn default() -> Self {
        NoiseParams {
            p1: 3e-4,
            p2: 8e-3,
            t1: 100.0,
            t2: 80.0,
            dur1: 0.035,
            dur2: 0.3,
            readout: ReadoutError::new(0.015, 0.025),
            noiseless: false,
        }
    }
}

/// A simulated device.
#[derive(Debug, Clone, PartialEq)]
pub struct BackendModel {
    pub name: String,
    pub num_qubits: usize,
    /// Undirected edges, stored with the smaller index first.
    pub coupling: Vec<(usize, usize)>,
    pub p1: f64,
    pub p2_default: f64,
    pub p2_edges: BTreeMap<(usize, usize), f64>,
    pub t1: Vec<f64>,
    pub t2: Vec<f64>,
    pub dur1: f64,
    pub dur2: f64,
    pub readout: Vec<ReadoutError>,
    pub noiseless: bool,
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl BackendModel {
    /// Builds and validates a backend with uniform calibration.
    pub fn with_uniform_noise(
        name: impl Into<String>,
        num_qubits: usize,
        coupling: &[(usize, usize)],
        noise: &NoiseParams,
    ) -> Result<Self> {
        let mut edges: Vec<(usize, usize)> = coupling.iter().map(|&(a, b)| edge_key(a, b)).collect();
        edges.sort_unstable();
        edges.dedup();
        let b = BackendModel {
            name: name.into(),
            num_qubits,
            coupling: edges,
            p1: noise.p1,
            p2_default: noise.p2,
            p2_edges: BTreeMap::new(),
            t1: vec![noise.t1; num_qubits],
            t2: vec![noise.t2; num_qubits],
            dur1: noise.dur1,
            dur2: noise.dur2,
            readout: vec![noise.readout; num_qubits],
            noiseless: noise.noiseless,
        };
        b.validate()?;
        Ok(b)
    }

    /// All-to-all noiseless device used for reference runs.
    pub fn ideal(num_qubits: usize) -> Self {
        let coupling: Vec<_> = (0..num_qubits)
            .flat_map(|a| ((a + 1)..num_qubits).map(move |b| (a, b)))
            .collect();
        BackendModel::with_uniform_noise(
            format!("ideal_{num_qubits}"),
            num_qubits,
            &coupling,
            &NoiseParams::noiseless(),
        )
        .expect("ideal backend is valid")
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Same device with a different default two-qubit error.
    pub fn with_p2(mut self, p2: f64) -> Result<Self> {
        self.p2_default = p2;
        self.validate()?;
        Ok(self)
    }

    pub fn with_edge_p2(mut self, a: usize, b: usize, p2: f64) -> Result<Self> {
        let key = edge_key(a, b);
        if !self.coupling.contains(&key) {
            return Err(Error::invalid(format!("({a}, {b}) is not an edge of {}", self.name)));
        }
        self.p2_edges.insert(key, p2);
        self.validate()?;
        Ok(self)
    }

    pub fn with_readout(mut self, readout: ReadoutError) -> Result<Self> {
        self.readout = vec![readout; self.num_qubits];
        self.validate()?;
        Ok(self)
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.coupling.binary_search(&edge_key(a, b)).is_ok()
    }

    /// Neighbors of `q` in ascending order.
    pub fn neighbors(&self, q: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .coupling
            .iter()
            .filter_map(|&(a, b)| match (a == q, b == q) {
                (true, _) => Some(b),
                (_, true) => Some(a),
                _ => None,
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Two-qubit depolarizing probability on an edge; zero on noiseless devices.
    pub fn edge_p2(&self, a: usize, b: usize) -> f64 {
        if self.noiseless {
            return 0.0;
        }
        *self.p2_edges.get(&edge_key(a, b)).unwrap_or(&self.p2_default)
    }

    pub fn qubit_p1(&self) -> f64 {
        if self.noiseless {
            0.0
        } else {
            self.p1
        }
    }

    pub fn qubit_readout(&self, q: usize) -> ReadoutError {
        if self.noiseless {
            ReadoutError::default()
        } else {
            self.readout[q]
        }
    }

    /// Checks the structural and physical invariants of the model.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_qubits;
        if n == 0 {
            return Err(Error::invalid("backend has no qubits"));
        }
        if self.t1.len() != n || self.t2.len() != n || self.readout.len() != n {
            return Err(Error::invalid(format!(
                "backend {}: per-qubit arrays must have {n} entries",
                self.name
            )));
        }
        for &(a, b) in &self.coupling {
            if a >= n || b >= n || a == b {
                return Err(Error::invalid(format!("backend {}: bad edge ({a}, {b})", self.name)));
            }
        }
        for (&(a, b), &p) in &self.p2_edges {
            if !self.coupling.contains(&(a, b)) {
                return Err(Error::invalid(format!(
                    "backend {}: p2 given for non-edge {a}-{b}",
                    self.name
                )));
            }
            check_prob(&self.name, "p2 edge", p)?;
        }
        check_prob(&self.name, "p1", self.p1)?;
        check_prob(&self.name, "p2_default", self.p2_default)?;
        for q in 0..n {
            let (t1, t2) = (self.t1[q], self.t2[q]);
            if !(t1 > 0.0 && t2 > 0.0) {
                return Err(Error::invalid(format!(
                    "backend {}: qubit {q} has non-positive T1/T2",
                    self.name
                )));
            }
            if t2 > 2.0 * t1 {
                return Err(Error::invalid(format!(
                    "backend {}: qubit {q} violates T2 <= 2 T1 ({t2} > 2 * {t1})",
                    self.name
                )));
            }
            self.readout[q].validate()?;
        }
        if !(self.dur1 > 0.0 && self.dur2 > 0.0) {
            return Err(Error::invalid(format!(
                "backend {}: gate durations must be positive",
                self.name
            )));
        }
        // connected over the qubits the coupling mentions
        let mentioned: BTreeSet<usize> = self.coupling.iter().flat_map(|&(a, b)| [a, b]).collect();
        if let Some(&start) = mentioned.iter().next() {
            let mut seen = BTreeSet::from([start]);
            let mut queue = VecDeque::from([start]);
            while let Some(q) = queue.pop_front() {
                for nb in self.neighbors(q) {
                    if seen.insert(nb) {
                        queue.push_back(nb);
                    }
                }
            }
            if seen.len() != mentioned.len() {
                return Err(Error::invalid(format!(
                    "backend {}: coupling graph is disconnected",
                    self.name
                )));
            }
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Json { source, .. } => Error::json(path, source),
            other => other,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: BackendFile = serde_json::from_str(text).map_err(|e| Error::json("<backend>", e))?;
        BackendModel::try_from(file)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&BackendFile::from(self)).expect("backend serializes");
        s.push('\n');
        s
    }
}

fn check_prob(name: &str, what: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("backend {name}: {what} = {p} outside [0, 1]")));
    }
    Ok(())
}

/// On-disk layout of a backend.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct BackendFile {
    name: String,
    num_qubits: usize,
    coupling: Vec<[usize; 2]>,
    p1: f64,
    p2_default: f64,
    #[serde(default)]
    p2_edges: BTreeMap<String, f64>,
    t1: Vec<f64>,
    t2: Vec<f64>,
    dur1: f64,
    dur2: f64,
    readout: Vec<ReadoutError>,
    #[serde(default)]
    noiseless: bool,
}

impl From<&BackendModel> for BackendFile {
    fn from(b: &BackendModel) -> Self {
        BackendFile {
            name: b.name.clone(),
            num_qubits: b.num_qubits,
            coupling: b.coupling.iter().map(|&(a, c)| [a, c]).collect(),
            p1: b.p1,
            p2_default: b.p2_default,
            p2_edges: b.p2_edges.iter().map(|(&(a, c), &p)| (format!("{a}-{c}"), p)).collect(),
            t1: b.t1.clone(),
            t2: b.t2.clone(),
            dur1: b.dur1,
            dur2: b.dur2,
            readout: b.readout.clone(),
            noiseless: b.noiseless,
        }
    }
}

impl TryFrom<BackendFile> for BackendModel {
    type Error = Error;

    fn try_from(f: BackendFile) -> Result<Self> {
        let mut p2_edges = BTreeMap::new();
        for (key, p) in f.p2_edges {
            let (a, b) = key
                .split_once('-')
                .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                .ok_or_else(|| Error::invalid(format!("p2_edges key {key:?} is not of the form \"a-b\"")))?;
            p2_edges.insert(edge_key(a, b), p);
        }
        let mut coupling: Vec<_> = f.coupling.iter().map(|&[a, b]| edge_key(a, b)).collect();
        coupling.sort_unstable();
        coupling.dedup();
        let b = BackendModel {
            name: f.name,
            num_qubits: f.num_qubits,
            coupling,
            p1: f.p1,
            p2_default: f.p2_default,
            p2_edges,
            t1: f.t1,
            t2: f.t2,
            dur1: f.dur1,
            dur2: f.dur2,
            readout: f.readout,
            noiseless: f.noiseless,
        };
        b.validate()?;
        Ok(b)
    }
}
