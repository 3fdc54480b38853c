//! Bounds on how much of quantum indistinguishability a psi-epistemic
//! ontological model can explain through overlapping preparation measures.
//!
//! The crate builds the Hadamard sign-vector family and its orthogonality
//! graph, computes independence numbers, evaluates the closed-form overlap
//! ratio bounds, and checks the independence-number cap on total classical
//! overlap by solving a linear program over finite deterministic models.

pub mod bitset;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod exec;
pub mod graph;
pub mod ksqubit;
pub mod lp;
pub mod ontomodel;
pub mod states;

pub use error::{Error, Result};
pub use exec::Execution;
