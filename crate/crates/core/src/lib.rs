//! Perturbative ground-state properties of perturbed stabilizer Hamiltonians
//! on qubit systems, computed through the local Schrieffer-Wolff
//! transformation in the binary-symplectic encoding of the Pauli algebra.
//!
//! The crate is organized bottom-up:
//! - [`f2`]: exact linear algebra over F2 (rank, nullspace, Smith normal form)
//! - [`pauli`]: check-matrix Pauli operators and their arithmetic
//! - [`stabilizer`]: stabilizer Hamiltonians, ground-state specs, destabilizers
//! - [`sw`]: order-by-order construction of the Schrieffer-Wolff generator
//! - [`observables`]: perturbative expectation values and correlators
//! - [`translation`]: translation-invariant operator representation
//! - [`models`]: lattice model builders (Ising chain, toric codes)
//! - [`ed`]: dense exact-diagonalization oracle for desk-scale validation
//! - [`analysis`]: perimeter-law fits and deviation-onset estimation
//! - [`validate`]: the self-check suite behind the `validate` CLI command

pub mod analysis;
pub mod ed;
pub mod error;
pub mod f2;
pub mod models;
pub mod observables;
pub mod pauli;
pub mod stabilizer;
pub mod sw;
pub mod translation;
pub mod validate;

pub use error::{Error, Result};
pub use pauli::{PauliSum, PauliTerm};
pub use stabilizer::{GroundStateSpec, StabilizerHamiltonian};
pub use sw::SwGenerator;
