//! Numerics for 2-step nilpotent metric Lie groups of Heisenberg type,
//! their sigma-deformations and small perturbations.
//!
//! The crate builds Clifford modules and endomorphism spaces, evaluates
//! twisted Z-Fourier functions by quadrature, applies symbolic and
//! finite-difference differential operators (full Laplacian, compound
//! angular momentum, Zeeman blocks in a Hermite basis), implements the
//! dual Radon transform with its inversion formulas, and verifies the
//! intertwining and isospectrality identities connecting all of these.

pub mod algebra;
pub mod error;
pub mod funcspace;
pub mod intertwine;
pub mod linalg;
pub mod operators;
pub mod poly;
pub mod quad;
pub mod radon;
pub mod report;
pub mod spectra;

pub use error::CoreError;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, CoreError>;
