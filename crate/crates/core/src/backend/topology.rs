use std::fmt;
use std::str::FromStr;

use super::{BackendModel, NoiseParams};
use crate::error::Error;

/// Coupling-map families found on current superconducting devices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    /// 16-qubit heavy-hexagon lattice (Falcon r4 layout).
    HeavyHex16,
    /// 27 qubits arranged as two long rows joined by bridge qubits.
    TwoLine27,
    /// 7-qubit I shape: two 3-qubit bars joined through a centre qubit.
    IShape7,
}

impl Topology {
    pub const ALL: [Topology; 3] = [Topology::HeavyHex16, Topology::TwoLine27, Topology::IShape7];

    pub fn name(self) -> &'static str {
        match self {
            Topology::HeavyHex16 => "heavy_hex_16",
            Topology::TwoLine27 => "two_line_27",
            Topology::IShape7 => "i_shape_7",
        }
    }

    pub fn num_qubits(self) -> usize {
        match self {
            Topology::HeavyHex16 => 16,
            Topology::TwoLine27 => 27,
            Topology::IShape7 => 7,
        }
    }

    #[rustfmt::skip]
    pub fn edges(self) -> &'static [(usize, usize)] {
        match self {
            Topology::HeavyHex16 => &[
                (0, 1), (1, 2), (1, 4), (2, 3), (3, 5), (4, 7), (5, 8), (6, 7),
                (7, 10), (8, 9), (8, 11), (10, 12), (11, 14), (12, 13), (12, 15), (13, 14),
            ],
            Topology::TwoLine27 => &[
                (0, 1), (1, 2), (1, 4), (2, 3), (3, 5), (4, 7), (5, 8), (6, 7), (7, 10),
                (8, 9), (8, 11), (10, 12), (11, 14), (12, 13), (12, 15), (13, 14), (14, 16),
                (15, 18), (16, 19), (17, 18), (18, 21), (19, 20), (19, 22), (21, 23), (22, 25),
                (23, 24), (24, 25), (25, 26),
            ],
            Topology::IShape7 => &[(0, 1), (1, 2), (1, 3), (3, 5), (4, 5), (5, 6)],
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Topology::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| {
            Error::invalid(format!(
                "unknown topology {s:?} (expected heavy_hex_16, two_line_27 or i_shape_7)"
            ))
        })
    }
}

/// Backend with the named coupling map and uniform calibration.
pub fn topology_preset(kind: Topology, noise: &NoiseParams) -> BackendModel {
    BackendModel::with_uniform_noise(kind.name(), kind.num_qubits(), kind.edges(), noise)
        .expect("preset coupling maps are valid")
}
