//! Application-level quantum benchmark harness.
//!
//! The crate generates closed benchmark circuits (QAOA and LR-QAOA MaxCut,
//! fixed-point amplitude amplification, cosine and hidden-phase QFT, hidden
//! shift over bent functions, MPS image loading, paired-double VQE chemistry,
//! and copula ansatz circuits), executes them on a built-in noisy statevector
//! simulator or any pluggable sampling backend, scores the results with each
//! family's quality metric, and reports time-to-solution analytics plus
//! result tables.

pub mod circuit;
pub mod error;
pub mod simulator;

pub use circuit::{build_qft, decompose_mcx, gate_census, Circuit, Gate, GateCensus, GateKind};
pub use error::{Error, Result};
pub use simulator::{
    exact_distribution, hellinger_fidelity, sample, simulate, simulate_noisy, NoiseModel,
    OutcomeDistribution, ShotHistogram, StateVector, DEFAULT_QUBIT_CAP,
};
