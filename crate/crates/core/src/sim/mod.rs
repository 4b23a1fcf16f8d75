//! Exact simulation: statevectors for noiseless runs, density matrices with
//! Kraus channels for noisy runs, and classical readout error.

mod channel;
mod gate;
mod readout;
mod state;

pub use channel::NoiseChannel;
pub use gate::{GateKind, GateOp, C64};
pub(crate) use readout::apply_qubit_matrix;
pub use readout::{apply_readout_error, ReadoutError};
pub use state::{apply_channel, probabilities, DensityMatrix, QuantumState, StateVector, MAX_SIM_QUBITS};
