//! Simulation and numerical verification of optimal universal N→M qubit
//! cloning machines.
//!
//! The crate builds the cloning unitary in the symmetric (Dicke) subspace,
//! computes clone density matrices and fidelities, compares the quantum
//! cloner against the classical measure-and-prepare copier, and reproduces
//! the optimality bound via an eigenvalue computation on the sphere-averaged
//! fourth-moment matrix.

pub mod bloch;
pub mod ccm;
pub mod cloner;
pub mod optimality;
pub mod report;
pub mod symspace;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QcmError {
    #[error("invalid angle: theta must be finite and in [0, pi], phi finite (got theta={theta}, phi={phi})")]
    InvalidAngle { theta: f64, phi: f64 },
    #[error("Dicke label j={j} out of range for m={m}")]
    LabelOutOfRange { j: usize, m: usize },
    #[error("full tensor representation capped at m={max} qubits (requested m={m})")]
    TensorTooLarge { m: usize, max: usize },
    #[error("expected a {expected}x{expected} matrix, got {got}x{got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("cloner requires 1 <= n < m (got n={n}, m={m})")]
    BadCloneCounts { n: usize, m: usize },
    #[error("matrix is not Hermitian (max |A - A^dag| = {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("{0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, QcmError>;
