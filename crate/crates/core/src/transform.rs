//! Conversions between Jacobi coefficient pairs and step-phase canonical
//! systems, plus the discrete-Schrödinger specialization.
//!
//! Forward direction: write the zero-energy fundamental system in polar form,
//! c_n + i s_n = R_n e^{iφ_n}.  The cross product c_n s_{n+1} - c_{n+1} s_n
//! equals -1/a_n, so the angle increments satisfy
//!
//! ```text
//!     R_n R_{n+1} sin(φ_{n+1} - φ_n) = -1/a_n  > 0 ,
//! ```
//!
//! which places every increment in (0, π) and fixes the unique normalized
//! lift starting from φ_1 = π/2.  The increment sine is computed from this
//! identity — not from the cross product of the computed solutions — so it
//! stays fully accurate even when R_n grows exponentially and the increment
//! crowds the boundary of (0, π).  The inverse direction reads the same
//! identity backwards, which is why the roundtrip is exact to rounding.
//!
//! Discrete Schrödinger operators (a ≡ -1) are exactly the phases with
//! R_n R_{n+1} sin(φ_{n+1} - φ_n) = 1; their potential comes back via
//! b_{n+1} = R_n R_{n+2} sin(φ_{n+2} - φ_n).

use std::f64::consts::{FRAC_PI_2, PI};

use crate::canonical::StepPhase;
use crate::error::{Result, SpectralError};
use crate::operator::{det2, fundamental_solutions, FundamentalSolutions, JacobiCoefficients};

/// Polar form of the fundamental system: R_n and the wrapped angle
/// atan2(s_n, c_n) ∈ (-π, π], for n = 1..=N+1 — the raw data before the
/// normalized unwrapping.
#[derive(Debug, Clone)]
pub struct PolarSolutionData {
    radii: Vec<f64>,
    raw_angles: Vec<f64>,
}

impl PolarSolutionData {
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// R_n for n = 1..=N+1.
    pub fn radius(&self, n: usize) -> f64 {
        assert!(n >= 1, "polar data is indexed from 1");
        self.radii[n - 1]
    }

    /// atan2(s_n, c_n) for n = 1..=N+1, in (-π, π].
    pub fn raw_angle(&self, n: usize) -> f64 {
        assert!(n >= 1, "polar data is indexed from 1");
        self.raw_angles[n - 1]
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn raw_angles(&self) -> &[f64] {
        &self.raw_angles
    }
}

/// Polar-decomposes the fundamental system on indices 1..=N+1.
pub fn polar_solution_data(sol: &FundamentalSolutions) -> Result<PolarSolutionData> {
    let mut radii = Vec::with_capacity(sol.len() - 1);
    let mut raw_angles = Vec::with_capacity(sol.len() - 1);
    for n in 1..sol.len() {
        let (c, s) = (sol.c(n), sol.s(n));
        let r = c.hypot(s);
        if !(r.is_finite() && r > 0.0) {
            return Err(SpectralError::Numerical(format!(
                "solution magnitude R_{n} = {r} left the representable positive range"
            )));
        }
        radii.push(r);
        raw_angles.push(s.atan2(c));
    }
    Ok(PolarSolutionData { radii, raw_angles })
}

/// Maps an N-truncated coefficient pair to its step phase with breakpoints
/// L_n = Σ_{k≤n} R_k² (n = 1..=N+1), normalized so φ_1 = π/2, L_1 = 1.
pub fn jacobi_to_canonical(coeffs: &JacobiCoefficients) -> Result<StepPhase> {
    let sol = fundamental_solutions(coeffs);
    let polar = polar_solution_data(&sol)?;
    let n_max = coeffs.truncation();
    let mut sin_step = Vec::with_capacity(n_max);
    let mut cos_step = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let rr = polar.radius(n) * polar.radius(n + 1);
        if !rr.is_finite() {
            return Err(SpectralError::Numerical(format!(
                "magnitude product R_{n} R_{} overflowed",
                n + 1
            )));
        }
        // sin(φ_{n+1} - φ_n) from the cross-product identity; exact in the
        // coefficients, immune to the cancellation that kills the direct
        // cross product of large solutions.
        sin_step.push(-1.0 / (coeffs.a(n) * rr));
        // cos from the (cancellation-benign) dot product, compensated.
        let dot = det2(sol.c(n), sol.c(n + 1), -sol.s(n), sol.s(n + 1));
        cos_step.push(dot / rr);
    }
    // c_1 + i s_1 = i, so the lift starts at exactly π/2.
    StepPhase::from_polar_steps(FRAC_PI_2, polar.radii().to_vec(), sin_step, cos_step)
}

/// Inverse map: reads coefficients off an admissible phase with φ_1 = π/2,
/// L_1 = 1.  An M-breakpoint phase yields an (M-1)-truncated operator.
pub fn canonical_to_jacobi(phase: &StepPhase) -> Result<JacobiCoefficients> {
    phase.validate_jacobi_normalized()?;
    let n_max = phase.len() - 1;
    let mut a = Vec::with_capacity(n_max + 1);
    a.push(-1.0);
    for n in 1..=n_max {
        let denom = phase.step_radius(n) * phase.step_radius(n + 1) * phase.step_sin(n);
        if !denom.is_finite() || denom == 0.0 {
            return Err(SpectralError::Degenerate(format!(
                "R_{n} R_{} sin(Δφ_{n}) = {denom} cannot be inverted",
                n + 1
            )));
        }
        a.push(-1.0 / denom);
    }
    // b_n = -(a_n R_{n+1} cos δ_n + a_{n-1} R_{n-1} cos δ_{n-1}) / R_n with
    // the boundary convention (R_0, δ_0) = (1, π/2), whose cosine term drops.
    let mut b = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let outer = a[n] * phase.step_radius(n + 1) * phase.step_cos(n);
        let inner = if n >= 2 {
            a[n - 1] * phase.step_radius(n - 1) * phase.step_cos(n - 1)
        } else {
            0.0
        };
        b.push(-(outer + inner) / phase.step_radius(n));
    }
    JacobiCoefficients::with_inferred_bound(a, b)
}

/// R_n R_{n+1} sin(φ_{n+1} - φ_n) - 1 for 1 <= n <= M-1: zero exactly when
/// step n is compatible with a_n = -1.
pub fn ds_constraint_residual(phase: &StepPhase, n: usize) -> Result<f64> {
    if n < 1 || n >= phase.len() {
        return Err(SpectralError::OutOfRange {
            what: "phase step",
            index: n,
            limit: phase.len().saturating_sub(1),
        });
    }
    let rr = phase.step_radius(n) * phase.step_radius(n + 1);
    Ok(rr.mul_add(phase.step_sin(n), -1.0))
}

/// Extracts the potential of a discrete Schrödinger phase:
/// b_{n+1} = R_n R_{n+2} sin(φ_{n+2} - φ_n), with (R_0, φ_1 - φ_0) = (1, π/2).
///
/// Every step must satisfy the a ≡ -1 constraint within `tol`; otherwise the
/// worst-offending step is reported and nothing is extracted.
pub fn ds_to_schrodinger(phase: &StepPhase, tol: f64) -> Result<Vec<f64>> {
    assert!(tol.is_finite() && tol >= 0.0, "tolerance must be non-negative");
    phase.validate_jacobi_normalized()?;
    let mut worst = 0.0_f64;
    let mut worst_index = 0;
    for n in 1..phase.len() {
        let res = ds_constraint_residual(phase, n)?;
        if res.abs() > worst.abs() {
            worst = res;
            worst_index = n;
        }
    }
    if worst.abs() > tol {
        return Err(SpectralError::NotSchrodinger {
            index: worst_index,
            residual: worst,
            tol,
        });
    }
    let mut b = Vec::with_capacity(phase.len() - 1);
    for n in 1..phase.len() {
        // sin(φ_{n+1} - φ_{n-1}) expanded over the two stored increments.
        let spread = if n == 1 {
            phase.step_cos(1) // δ_0 = π/2 turns the sum into a cosine
        } else {
            phase.step_sin(n - 1) * phase.step_cos(n)
                + phase.step_cos(n - 1) * phase.step_sin(n)
        };
        let r_prev = if n == 1 { 1.0 } else { phase.step_radius(n - 1) };
        b.push(r_prev * phase.step_radius(n + 1) * spread);
    }
    Ok(b)
}

/// Length of the second singular interval forced on a discrete Schrödinger
/// phase by its second value: L_2 = 1 + csc²(φ_2 - π/2), minimized at 2.
pub fn ds_second_step_length(phi2: f64) -> Result<f64> {
    let delta = phi2 - FRAC_PI_2;
    if !(delta > 0.0 && delta < PI) {
        return Err(SpectralError::Domain(format!(
            "second phase value {phi2} must lie strictly between π/2 and 3π/2"
        )));
    }
    let s = delta.sin();
    if s <= 0.0 {
        return Err(SpectralError::Domain(format!(
            "second phase value {phi2} is numerically indistinguishable from a boundary"
        )));
    }
    Ok(1.0 + 1.0 / (s * s))
}
