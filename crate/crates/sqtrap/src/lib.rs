//! Classical and quantum dynamics of a charged particle in a Paul trap driven
//! by a two-level (square-wave) voltage.
//!
//! The drive alternates the transverse restoring force between a focusing and
//! a defocusing value, so the classical equation of motion is a piecewise
//! harmonic/inverted oscillator. Everything downstream is built on its exact
//! piecewise solutions:
//!
//! * [`floquet`] — one-period transfer analysis, stability parameter λ,
//!   Floquet multipliers, and closed-form classical solutions for both
//!   transverse axes.
//! * [`invariant`] — the quadratic dynamical invariant I(t) with coefficient
//!   functions (g₋, g₀, g₊) and its constant frequency ω_I, including the
//!   choice that matches I(t) to the instantaneous Hamiltonian.
//! * [`phase`] — the accumulated polar phase θ(t) of the complex classical
//!   solution, cyclic-state searches over drive parameters, and the cyclic
//!   phase χₙ = −(n+½)·θ per cycle.
//! * [`wavefunction`] — exact eigenfunctions of the invariant and their
//!   numerical verification (normalization, orthogonality, Schrödinger
//!   residual).
//! * [`stability`] — stability maps over the (ω₁τ, ω₂τ) plane and divergence
//!   checks in the unstable regime.
//! * [`interference`] — the two-path interference experiment: per-path phase
//!   accumulation, destructive configurations, and SI parameter estimates.
//! * [`numeric`] — the independent numerical engines (RK4 integration,
//!   adaptive quadrature, bracketed root finding) used both as production
//!   machinery and as oracles for the closed forms.
//! * [`selftest`] — the end-to-end verification suite behind `sqtrap verify`.
//!
//! Internal computations use natural units (ħ = 1, the drive period τ as the
//! time unit unless stated otherwise); SI quantities enter only through
//! [`params`] and [`interference`].

// negated comparisons like `!(x > 0.0)` are used on purpose in input
// validation: they reject NaN along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod floquet;
pub mod interference;
pub mod invariant;
pub mod numeric;
pub mod params;
pub mod phase;
pub mod selftest;
pub mod stability;
pub mod tol;
pub mod wavefunction;

pub use error::{Error, Result};
pub use floquet::{ClassicalSolution, FloquetData, Stability, TransferData};
pub use invariant::{GTriple, InvariantSpec};
pub use params::{Axis, DriveProfile, FreqConvention, PhysicalParams};
pub use phase::{CisConfig, CisRule};
