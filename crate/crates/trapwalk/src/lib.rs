//! Discrete-time quantum walks of a single atom in arrays of optical traps.
//!
//! Two engines live here. [`walk`] evolves abstract coined walks exactly on
//! the line and the square lattice. [`trap`] integrates the one-dimensional
//! Schrödinger equation for moving Gaussian traps and turns tunneling pulses
//! into effective coin and shift unitaries. [`lab`] composes both into
//! experiments.
//!
//! All physical quantities are dimensionless: ħ = m = ωₓ = 1, lengths in
//! units of the ground-state spread α⁻¹.

pub mod error;
pub mod lab;
pub mod trap;
pub mod walk;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
