//! Exact calculus for valence-bond / finitely correlated states on open spin
//! chains.
//!
//! The crate computes correlation functions, string order and localizable
//! entanglement of matrix-product states three ways: through transfer
//! operators, through exhaustive simulation of single-site measurements, and
//! through closed forms. The deformed AKLT family is the running example; it
//! has a finite correlation length everywhere while its entanglement length
//! diverges at the isotropic point.
//!
//! Module map:
//!
//! - [`spin`]: dense operators, spin matrices, hermitian operator bases.
//! - [`linalg`]: eigen-decompositions and small numeric helpers.
//! - [`fcs`]: site tensors, chains, amplitudes and the dense state oracle.
//! - [`transfer`]: transfer operators, expectation values, correlation lengths.
//! - [`localizable`]: measurement ensembles, concurrence, localizable
//!   entanglement, entanglement length and string order.
//! - [`models`]: AKLT, deformed AKLT and Heisenberg Hamiltonians with exact
//!   diagonalization.
//! - [`verify`]: the acceptance checks shared by the test suite and the CLI.
//!
//! # Conventions
//!
//! Tensor products put the leftmost site in the slowest index (see
//! [`spin::kron`]). Spin bases are ordered by descending `m`, so spin-1 is
//! `(+1, 0, -1)` and a qubit is `(|0>, |1>) = (up, down)`. Observables are
//! always given in that reference basis; a tensor's own measurement basis is
//! bookkeeping that the library converts through.

pub mod error;
pub mod fcs;
pub mod linalg;
pub mod localizable;
pub mod models;
pub mod report;
pub mod spin;
pub mod tolerance;
pub mod transfer;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Dense complex matrix used for every operator in the crate.
pub type CMat = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVec = nalgebra::DVector<C64>;
