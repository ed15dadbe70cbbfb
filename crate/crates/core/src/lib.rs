//! Numerical laboratory for the stochastic symmetric p-Stokes system on the
//! unit square.
//!
//! The crate is organised bottom-up:
//!
//! * [`nfunction`] – the shifted power potential `φ_κ`, the stress `S`, the
//!   monotonicity tensor `V` and the energy `J`.
//! * [`field`] – a collocated uniform grid with mutually adjoint discrete
//!   differential operators.
//! * [`projector`] – discrete Helmholtz–Leray projection and a minimal-norm
//!   right inverse of the divergence (Bogovskii operator).
//! * [`stochastics`] – truncated cylindrical Wiener noise and Nemytskii
//!   noise coefficients.
//! * [`stepper`] – semi-implicit Euler–Maruyama time stepping of the projected
//!   gradient flow, pressure reconstruction and energy monitoring.
//! * [`normlab`] – Luxemburg, Besov–Orlicz/Nikolskii and Hölder norms of
//!   sampled paths plus temporal exponent fits.
//! * [`harness`] – experiment configuration, Monte Carlo orchestration,
//!   persistence and the self-test battery behind the `stokeslab` CLI.

pub mod error;
pub mod field;
pub mod harness;
mod linalg;
pub mod nfunction;
pub mod normlab;
pub mod projector;
pub mod stepper;
pub mod stochastics;

pub use error::{Error, Result};
