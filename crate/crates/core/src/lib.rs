//! Spectral geometry of probability densities on the periodic circle.
//!
//! Everything lives on a uniform grid over `[0, 2π)` with the normalized
//! measure `μ = dx/2π`, so integrals are sample means and densities have
//! unit mass when their mean is 1. On top of the spectral calculus
//! ([`grid`]) the crate builds:
//!
//! - [`densities`]: Fisher–Rao and Wasserstein–Otto geometry, potential
//!   functionals, and Newton's equation on densities;
//! - [`madelung`]: the half-angle wave map `(ρ, θ) ↦ √ρ·e^{iθ/2}` with its
//!   differential, the Sasaki / Fubini–Study metrics, symplectic forms,
//!   great-circle geodesics, and the flattening map to `Diff × phases`;
//! - [`solvers`]: time integrators for the Schrödinger/NLS, compressible
//!   hydrodynamic, barotropic, sphere-constrained wave, modified
//!   Camassa–Holm, and two-component Hunter–Saxton flows;
//! - [`filament`]: binormal curve flow, Frenet curvature/torsion, and the
//!   curvature-phase complex field of a closed space curve;
//! - [`verify`]: numerical certificates for the structural identities
//!   connecting all of the above (isometry, symplectomorphism, flow
//!   conjugacy, correspondence of equations, conservation laws).
//!
//! The crate is `no_std` (alloc only); IO, file formats, and the command
//! line live in the companion `denslab` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
#[macro_use]
extern crate std;

pub mod densities;
pub mod error;
pub mod expr;
mod fft;
pub mod filament;
pub mod grid;
pub mod madelung;
pub mod solvers;
pub mod tol;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{ComplexField, PeriodicGrid, RealField};
