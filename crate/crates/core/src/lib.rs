//! Laboratory for adaptive variational eigensolvers built from Pauli-string
//! operator pools.
//!
//! The crate is organised bottom-up:
//!
//! - [`pauli`]: symplectic Pauli strings and real Pauli sums.
//! - [`state`]: dense statevector simulation and exact ground states.
//! - [`fermion`]: ladder operators, spin-adapted excitations, Jordan-Wigner
//!   mapping, and Hamiltonian ingestion (FCIDUMP and a Pauli text format).
//! - [`pool`]: fermionic, qubit, minimal complete and random operator pools.
//! - [`completeness`]: commutator closures, overlap-matrix rank and scans.
//! - [`adapt`]: the adaptive growth loop and its inner optimizer.
//! - [`resources`]: CNOT counts and the closed-form fermionic estimates.

pub mod adapt;
pub mod completeness;
pub mod error;
pub mod fermion;
pub mod optimize;
pub mod pauli;
pub mod pool;
pub mod resources;
pub mod state;

#[cfg(test)]
pub(crate) mod oracle;

pub use error::{Error, Result};
pub use pauli::{Parity, Pauli, PauliString, PauliSum};
pub use state::StateVector;
