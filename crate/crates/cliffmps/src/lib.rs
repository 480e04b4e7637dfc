//! Random matrix product states, Clifford-enhanced MPS and stabilizer
//! ensembles: stabilizer Rényi entropies, replica transfer matrices,
//! frame potentials, purity fluctuations and entanglement cooling.

pub mod circuit;
pub mod clifford;
pub mod cooling;
pub mod ensemble;
pub mod error;
pub mod experiments;
pub mod io;
pub mod mps;
pub mod numeric;
pub mod oracles;
pub mod pauli;
pub mod replica;
pub mod statevector;
pub mod stats;

pub use error::{Error, Result};
