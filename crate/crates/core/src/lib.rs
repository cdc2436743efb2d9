//! Quantum image encodings, matrix-product-state compression, Fourier-space
//! error bounds and circuit preparation of image states.
//!
//! Qubit 0 is always the most significant bit of a basis-state index, and
//! color qubits (FRQI, NEQR) precede address qubits.

pub mod circuit;
pub mod encode;
pub mod error;
pub mod imageio;
pub mod linalg;
pub mod spectral;
pub mod synthetic;
pub mod tensnet;
pub mod varopt;

pub use error::{Error, Result};

/// Complex double used for every amplitude and matrix entry.
pub type C64 = num_complex::Complex64;

/// Largest qubit count materialized as a dense state vector.
pub const DENSE_MAX_QUBITS: usize = 26;
