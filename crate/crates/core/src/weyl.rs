//! Boundary m-functions for truncated Jacobi operators and step-phase
//! canonical systems, with Herglotz diagnostics and the large-height
//! asymptotics that expose the initial singular interval.
//!
//! The two evaluators are deliberately independent implementations of the
//! same analytic object:
//!
//! * [`m_jacobi`] shoots the three-term recurrence downward from a Dirichlet
//!   cap (y_{N+1} = 0, y_N = 1) and returns y_1 / y_0;
//! * [`m_canonical`] propagates a 2-vector backward through the singular
//!   intervals using the exact one-step factors (I + z·w·J·P_φ) — the
//!   inverses of the forward factors, closed-form because (J P_φ)² = 0 —
//!   and returns u²(0) / u¹(0).
//!
//! For a phase obtained from a coefficient pair the two values agree at
//! matched truncation, up to rounding.  Both are Herglotz for Im z > 0
//! (they are resolvent diagonal entries of finite symmetric problems), and
//! for operator-derived data m(iy) ≈ i/y for large y, reflecting a total
//! spectral mass of one.

use nalgebra::Vector2;
use num_complex::Complex64;

use crate::canonical::{propagate_singular, StepPhase};
use crate::error::{Result, SpectralError};
use crate::operator::JacobiCoefficients;
use crate::par;

/// Magnitude² ceiling that triggers rescaling of shooting iterates; the
/// returned ratios are invariant under the rescale.
const RESCALE_LIMIT: f64 = 1e280;

/// One evaluated boundary value: z in the open upper half plane and m(z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MPoint {
    pub z: Complex64,
    pub m: Complex64,
}

/// An evaluated grid with its truncation metadata.
///
/// `tail_delta` records the largest movement of m between the half-depth and
/// full-depth truncations over the grid — a direct convergence estimate.
#[derive(Debug, Clone)]
pub struct MGrid {
    points: Vec<MPoint>,
    truncation: usize,
    tail_delta: f64,
}

impl MGrid {
    /// Wraps explicit points; every z must lie in the open upper half plane.
    pub fn from_points(points: Vec<MPoint>, truncation: usize, tail_delta: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(SpectralError::Domain(
                "an m-function grid needs at least one point".into(),
            ));
        }
        for p in &points {
            if p.z.im <= 0.0 {
                return Err(SpectralError::UpperHalfPlane { z: p.z });
            }
        }
        Ok(MGrid {
            points,
            truncation,
            tail_delta,
        })
    }

    pub fn points(&self) -> &[MPoint] {
        &self.points
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn tail_delta(&self) -> f64 {
        self.tail_delta
    }
}

/// Outcome of the pointwise upper-half-plane check on a grid.
#[derive(Debug, Clone, Copy)]
pub struct HerglotzReport {
    /// True iff Im m > 0 at every grid point.
    pub pass: bool,
    /// Smallest imaginary part found.
    pub min_im: f64,
    /// Grid point where the minimum occurs (first among ties).
    pub at: Complex64,
}

/// Default evaluation grid: Re z from -4 to 4 in steps of 1/2, crossed with
/// Im z in {1/2, 1, 2, 4}; 68 points ordered by height then by real part.
pub fn default_grid() -> Vec<Complex64> {
    let mut grid = Vec::with_capacity(68);
    for &y in &[0.5, 1.0, 2.0, 4.0] {
        for i in 0..=16 {
            grid.push(Complex64::new(-4.0 + 0.5 * i as f64, y));
        }
    }
    grid
}

/// Dirichlet shooting value m = y_1 / y_0 at truncation `n`.
///
/// Sets y_{n+1} = 0, y_n = 1 and recurses downward; coefficients beyond the
/// stored range repeat the last stored pair.  Requires Im z > 0 and n >= 1.
pub fn m_jacobi(coeffs: &JacobiCoefficients, z: Complex64, n: usize) -> Result<Complex64> {
    if z.im <= 0.0 {
        return Err(SpectralError::UpperHalfPlane { z });
    }
    if n < 1 {
        return Err(SpectralError::Domain(
            "truncation length must be at least 1".into(),
        ));
    }
    let mut above = Complex64::new(0.0, 0.0); // y_{k+1}
    let mut here = Complex64::new(1.0, 0.0); // y_k
    for k in (1..=n).rev() {
        let next = ((z - coeffs.b_ext(k)) * here - coeffs.a_ext(k) * above) / coeffs.a_ext(k - 1);
        above = here;
        here = next;
        if here.norm_sqr() > RESCALE_LIMIT {
            let scale = here.norm().recip();
            here *= scale;
            above *= scale;
        }
    }
    if here.norm() == 0.0 {
        return Err(SpectralError::Degenerate(format!(
            "shooting solution vanished at the boundary for z = {z}; increase the truncation"
        )));
    }
    Ok(above / here)
}

/// Backward singular-interval propagation value m = u²(0) / u¹(0), truncating
/// the phase at breakpoint `n` (so 1 <= n <= M - 1: the terminal direction
/// reads φ_{n+1}).
pub fn m_canonical(phase: &StepPhase, z: Complex64, n: usize) -> Result<Complex64> {
    if z.im <= 0.0 {
        return Err(SpectralError::UpperHalfPlane { z });
    }
    if n < 1 || n >= phase.len() {
        return Err(SpectralError::OutOfRange {
            what: "terminal breakpoint",
            index: n,
            limit: phase.len().saturating_sub(1),
        });
    }
    // Terminal direction induced by the Dirichlet cap of the truncated
    // system, expressed through the next phase value.
    let (s, c) = phase.phi(n + 1).sin_cos();
    let mut u = Vector2::new(Complex64::new(s, 0.0), Complex64::new(-c, 0.0));
    for k in (1..=n).rev() {
        // (I + z w J P_φ) is the exact inverse of the forward factor, i.e.
        // the forward step evaluated at -z.
        let w = phase.step_radius(k).powi(2);
        u = propagate_singular(u, w, phase.phi(k), -z);
        if u[0].norm_sqr().max(u[1].norm_sqr()) > RESCALE_LIMIT {
            let scale = u[0].norm().max(u[1].norm()).recip();
            u[0] *= scale;
            u[1] *= scale;
        }
    }
    if u[0].norm() == 0.0 {
        return Err(SpectralError::Degenerate(format!(
            "propagated solution vanished at the boundary for z = {z}; increase the truncation"
        )));
    }
    Ok(u[1] / u[0])
}

/// Evaluates [`m_jacobi`] over a grid (concurrently, in deterministic input
/// order), recording the half- vs full-depth movement as `tail_delta`.
pub fn m_grid_jacobi(
    coeffs: &JacobiCoefficients,
    zs: &[Complex64],
    n: usize,
) -> Result<MGrid> {
    let half = (n / 2).max(1);
    let evaluated = par::map_ordered(zs, |&z| {
        let full = m_jacobi(coeffs, z, n)?;
        let halved = m_jacobi(coeffs, z, half)?;
        Ok::<_, SpectralError>((z, full, halved))
    });
    collect_grid(evaluated, n)
}

/// Evaluates [`m_canonical`] over a grid, as [`m_grid_jacobi`] does for the
/// recurrence evaluator.
pub fn m_grid_canonical(phase: &StepPhase, zs: &[Complex64], n: usize) -> Result<MGrid> {
    let half = (n / 2).max(1);
    let evaluated = par::map_ordered(zs, |&z| {
        let full = m_canonical(phase, z, n)?;
        let halved = m_canonical(phase, z, half)?;
        Ok::<_, SpectralError>((z, full, halved))
    });
    collect_grid(evaluated, n)
}

fn collect_grid(
    evaluated: Vec<Result<(Complex64, Complex64, Complex64)>>,
    n: usize,
) -> Result<MGrid> {
    let mut points = Vec::with_capacity(evaluated.len());
    let mut tail_delta = 0.0_f64;
    for item in evaluated {
        let (z, m, m_half) = item?;
        tail_delta = tail_delta.max((m - m_half).norm());
        points.push(MPoint { z, m });
    }
    MGrid::from_points(points, n, tail_delta)
}

/// Asserts Im m > 0 pointwise; reports the minimum and where it occurs.
pub fn herglotz_check(grid: &MGrid) -> HerglotzReport {
    let mut min_im = f64::INFINITY;
    let mut at = grid.points()[0].z;
    for p in grid.points() {
        if p.m.im < min_im {
            min_im = p.m.im;
            at = p.z;
        }
    }
    HerglotzReport {
        pass: min_im > 0.0,
        min_im,
        at,
    }
}

/// Large-height estimate of the boundary expansion m(iy) ≈ a + i·mass/y.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticEstimate {
    /// Constant term Re m(iy).
    pub a_est: f64,
    /// Total-measure estimate y · Im m(iy).
    pub mass_est: f64,
    /// Height used for the evaluation.
    pub y_used: f64,
}

/// Predictions forced by an initial singular interval (0, l) with value φ:
/// constant term −cot φ and total mass 1 / (l sin²φ).
///
/// The constant term is the large-height limit of m(iy) under this crate's
/// orientation (J = [[0,−1],[1,0]], m = u²/u¹ at 0): pushing the inverse
/// factor I + iy·l·J·P_φ through the first interval sends the ratio to
/// (J P_φ u)₂ / (J P_φ u)₁ = −cos φ / sin φ for every admissible tail, as the
/// one-interval closed form m(z) = z/(2 − z) at φ = π/4, l = 1 exhibits.
pub fn singular_interval_prediction(phase: &StepPhase) -> Result<(f64, f64)> {
    let l = phase.breakpoint(1);
    let s = phase.phi(1).sin();
    if s.abs() < 1e-12 {
        return Err(SpectralError::Domain(
            "first-interval phase is a multiple of π; the linear-term case is unsupported".into(),
        ));
    }
    Ok((-phase.phi(1).cos() / s, 1.0 / (l * s * s)))
}

/// Evaluates m at z = iy (y >= 100) and reads off the boundary expansion.
///
/// Compare the result against [`singular_interval_prediction`]; both sides
/// carry the same initial-interval data (length l, value φ).
pub fn finite_measure_asymptotics(phase: &StepPhase, y: f64) -> Result<AsymptoticEstimate> {
    if !(y.is_finite() && y >= 100.0) {
        return Err(SpectralError::Domain(format!(
            "evaluation height {y} must be finite and at least 100"
        )));
    }
    singular_interval_prediction(phase)?;
    if phase.len() < 2 {
        return Err(SpectralError::Domain(
            "need at least two breakpoints to truncate the system".into(),
        ));
    }
    let m = m_canonical(phase, Complex64::new(0.0, y), phase.len() - 1)?;
    if m.im <= 0.0 {
        return Err(SpectralError::Numerical(format!(
            "evaluated m = {m} lost the upper-half-plane property at height {y}"
        )));
    }
    Ok(AsymptoticEstimate {
        a_est: m.re,
        mass_est: y * m.im,
        y_used: y,
    })
}
