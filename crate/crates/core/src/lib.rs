//! QPU benchmarking through QAOA accuracy distributions.
//!
//! A noiseless reference run of QAOA on a fixed QUBO instance yields an empirical
//! accuracy distribution whose CDF becomes the scoring curve. Runs on a target
//! backend are scored through that curve and averaged into an H-Score:
//! `C = (2/M) sum_i F(X_i)`, which is 1 for a noiseless device and at most 2.
//!
//! Modules, bottom up:
//!
//! - [`qubo`]: instances, costs, brute-force ground truth, built-in instances
//! - [`sim`]: exact statevector and density-matrix simulation
//! - [`backend`]: device models, layout, routing, noisy execution, readout mitigation
//! - [`qaoa`]: ansatz, cost/accuracy, single optimization runs
//! - [`scoring`]: scoring curves, H-Scores, distribution comparison, robustness
//! - [`fleet`]: ranking and selecting backends
//! - [`report`] and [`cli`]: persisted results, charts and the `toniq` command

pub mod backend;
pub mod cli;
pub mod error;
pub mod fleet;
pub mod optimize;
pub mod qaoa;
pub mod qubo;
pub mod report;
pub mod scoring;
pub mod seed;
pub mod sim;

pub use error::{Error, Result};
