//! Variational spectral decomposition of a two-qubit unitary and
//! fast-forwarded Ising dynamics, on a dense statevector simulator.
//!
//! The pieces, bottom-up:
//!
//! - [`simcore`]: statevectors, gates, marginals and seeded sampling.
//! - [`circuit`]: parameterized circuits with shared parameters.
//! - [`model`]: the Ising Hamiltonian, its Trotter step and exact propagator.
//! - [`ansatz`]: `V = W D W†` and the fast-forwarded `W D(kγ) W†`.
//! - [`lhst`]: the local Hilbert-Schmidt test circuits and cost.
//! - [`trainer`]: parameter-shift gradients and gradient descent.
//! - [`metrics`]: distances, eigenvalue error, gradient angle, fidelity.
//! - [`noise`]: calibration tables and Monte-Carlo trajectory noise.
//! - [`experiment`]: configuration and the end-to-end commands behind the
//!   `vff` binary.
//!
//! Runnable walkthroughs live in `examples/`; `cargo run --example` lists them.

pub mod ansatz;
pub mod circuit;
pub mod error;
pub mod experiment;
pub mod lhst;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod noise;
pub mod simcore;
pub mod trainer;

pub use ansatz::SpectralAnsatz;
pub use circuit::ParamCircuit;
pub use error::{Error, Result};
pub use model::IsingParams;
pub use simcore::StateVector;
