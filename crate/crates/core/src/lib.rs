//! Spectral data of half-line Jacobi operators realized as trace-normed
//! canonical systems.
//!
//! The crate turns a truncated Jacobi coefficient pair (a, b) — off-diagonal
//! entries strictly negative, boundary entry a_0 = -1 — into the step-function
//! phase of an equivalent 2×2 canonical system, and back, exactly to rounding.
//! On top of the two representations it provides:
//!
//! * zero-energy fundamental solutions, transfer matrices, and
//!   Wronskian-based coefficient recovery ([`operator`]);
//! * step phases, projection-valued Hamiltonians, and closed-form propagation
//!   across singular intervals — no ODE solver anywhere ([`canonical`]);
//! * the bidirectional transform and the discrete-Schrödinger specialization
//!   with its potential-recovery formula ([`transform`]);
//! * two independently coded boundary m-function evaluators with Herglotz
//!   diagnostics and large-height measure asymptotics ([`weyl`]);
//! * exact pairings against piecewise-constant test functions and a sweep
//!   certificate separating a target phase from every discrete-Schrödinger
//!   phase ([`weak_star`]).
//!
//! Bulk evaluations (m-function grids, certificate sweeps) run data-parallel
//! through [`par`] when the default `parallel` feature is on, and fall back
//! to identical sequential loops without it; results are ordered by input
//! index either way.

pub mod canonical;
pub mod error;
pub mod operator;
pub mod par;
pub mod transform;
pub mod weak_star;
pub mod weyl;

pub use error::{Result, SpectralError};
