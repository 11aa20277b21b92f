//! Two interacting electrons in an axially symmetric parabolic quantum dot
//! under a perpendicular magnetic field.
//!
//! The crate computes relative-motion spectra, ground-state
//! singlet-triplet structure, and the linear-entropy entanglement measure of
//! the lowest states, together with the closed forms that hold in the limit
//! of vanishing interaction and an estimator that recovers the entanglement
//! from the field dependence of the addition energy.
//!
//! Units are scaled throughout: `ħ = m* = ω₀ = ℓ₀ = 1`, so energies are in
//! `ħω₀`, lengths in `ℓ₀`, and the Coulomb strength `λ` equals the Wigner
//! parameter.

pub mod basis;
pub mod cli;
pub mod coulomb;
pub mod entangle;
pub mod estimator;
pub mod io;
pub mod error;
pub mod linalg;
pub mod model;
pub mod mosh;
pub mod ptlimit;
pub mod quad;
pub mod spectra;
pub mod special;

pub use error::{Error, Result};
