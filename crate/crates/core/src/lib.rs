//! Statevector emulation of Schrodingerised advection-diffusion circuits,
//! with dense and classical oracles for verifying them.

pub mod error;
pub mod field;
pub mod gates;
pub mod hamiltonian;
pub mod oracle;
pub mod postprocess;
pub mod schrodingerise;
pub mod statevec;
pub mod transport;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
