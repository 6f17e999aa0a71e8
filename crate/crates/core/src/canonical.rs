//! Trace-normed canonical systems whose Hamiltonian is a step function of
//! rank-one projections: H(t) = P_{φ(t)} with
//!
//! ```text
//!     P_φ = [ cos²φ      cosφ sinφ ]
//!           [ cosφ sinφ  sin²φ     ]
//! ```
//!
//! On an interval where φ is constant the system Ju' = zHu integrates in
//! closed form because P_φ J P_φ = 0 kills every quadratic term of the
//! exponential series: with w = ∫ h dt the propagator is exactly
//! I - z w J P_φ.  Stepping through the breakpoints therefore never touches
//! an ODE solver.
//!
//! A step phase is stored with its per-step data (R_n together with the sine
//! and cosine of each increment φ_{n+1} - φ_n) as the primary representation;
//! the cumulative breakpoints L_n = Σ R_k² and unwrapped phase values φ_n are
//! derived views.  Keeping the increments primary preserves the tiny angular
//! deficits that arise when solution magnitudes grow — exactly the data the
//! inverse transform needs — which cumulative double-precision angles cannot
//! resolve.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Result, SpectralError};

/// Tolerance for the first-interval normalization checks (φ_1 = π/2, L_1 = 1).
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Non-decreasing, right-continuous step function of phase values.
///
/// Breakpoints and values are indexed 1..=M; every increment
/// φ_{n+1} - φ_n lies strictly inside (0, π), which makes the representation
/// of the corresponding projection-valued Hamiltonian unique.
#[derive(Debug, Clone)]
pub struct StepPhase {
    /// R_n = sqrt(L_n - L_{n-1}), n = 1..=M (0-based storage).
    radii: Vec<f64>,
    /// sin(φ_{n+1} - φ_n), n = 1..=M-1; strictly positive.
    sin_step: Vec<f64>,
    /// cos(φ_{n+1} - φ_n), n = 1..=M-1.
    cos_step: Vec<f64>,
    /// Cumulative breakpoints L_1 < L_2 < ...
    lengths: Vec<f64>,
    /// Unwrapped phase values φ_1, φ_2, ...
    phases: Vec<f64>,
}

/// Wire form of [`StepPhase`]: `{"L": [...], "phi": [...]}` (L_0 = 0 implicit).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepPhaseRaw {
    #[serde(rename = "L")]
    pub l: Vec<f64>,
    pub phi: Vec<f64>,
}

impl TryFrom<StepPhaseRaw> for StepPhase {
    type Error = SpectralError;

    fn try_from(raw: StepPhaseRaw) -> Result<Self> {
        StepPhase::from_breakpoints(raw.l, raw.phi)
    }
}

impl From<&StepPhase> for StepPhaseRaw {
    fn from(phase: &StepPhase) -> Self {
        StepPhaseRaw {
            l: phase.lengths.clone(),
            phi: phase.phases.clone(),
        }
    }
}

impl StepPhase {
    /// Builds a phase from cumulative breakpoints and unwrapped values.
    ///
    /// Validates: equal non-zero lengths, finite entries, 0 < L_1 < L_2 < ...,
    /// and every increment strictly inside (0, π).  Increments that land on a
    /// boundary (0 or π) are rejected rather than silently nudged.
    pub fn from_breakpoints(l: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        if l.is_empty() || l.len() != phi.len() {
            return Err(SpectralError::invariant(
                "phase_lengths",
                format!(
                    "need matching non-empty breakpoint/value lists, got {} and {}",
                    l.len(),
                    phi.len()
                ),
            ));
        }
        for (&li, &pi) in l.iter().zip(phi.iter()) {
            if !li.is_finite() || !pi.is_finite() {
                return Err(SpectralError::invariant(
                    "finite_values",
                    format!("non-finite phase data (L = {li}, phi = {pi})"),
                ));
            }
        }
        let mut prev = 0.0;
        let mut radii = Vec::with_capacity(l.len());
        for (i, &li) in l.iter().enumerate() {
            if li <= prev {
                return Err(SpectralError::invariant(
                    "breakpoints_increasing",
                    format!("L_{} = {li} does not exceed L_{} = {prev}", i + 1, i),
                ));
            }
            radii.push((li - prev).sqrt());
            prev = li;
        }
        let mut sin_step = Vec::with_capacity(phi.len() - 1);
        let mut cos_step = Vec::with_capacity(phi.len() - 1);
        for i in 0..phi.len() - 1 {
            let delta = phi[i + 1] - phi[i];
            if !(delta > 0.0 && delta < PI) {
                return Err(SpectralError::invariant(
                    "increasing_steps",
                    format!(
                        "increment φ_{} - φ_{} = {delta} must lie strictly in (0, π)",
                        i + 2,
                        i + 1
                    ),
                ));
            }
            let (s, c) = delta.sin_cos();
            if s <= 0.0 {
                // delta is inside (0, π) as a real number but its sine
                // rounded to zero; treat as a boundary tie.
                return Err(SpectralError::invariant(
                    "increasing_steps",
                    format!("increment at index {} is numerically indistinguishable from a multiple of π", i + 1),
                ));
            }
            sin_step.push(s);
            cos_step.push(c);
        }
        Ok(StepPhase {
            radii,
            sin_step,
            cos_step,
            lengths: l,
            phases: phi,
        })
    }

    /// Builds a phase from per-step data; the cumulative views are derived.
    ///
    /// `sin_step[i]`, `cos_step[i]` describe the increment φ_{i+2} - φ_{i+1}
    /// and must have positive sine; radii must be positive and finite.
    pub fn from_polar_steps(
        first_phase: f64,
        radii: Vec<f64>,
        sin_step: Vec<f64>,
        cos_step: Vec<f64>,
    ) -> Result<Self> {
        if radii.is_empty()
            || sin_step.len() != radii.len() - 1
            || cos_step.len() != radii.len() - 1
        {
            return Err(SpectralError::invariant(
                "phase_lengths",
                format!(
                    "need len(radii) = len(steps) + 1 >= 1, got {} radii, {} steps",
                    radii.len(),
                    sin_step.len()
                ),
            ));
        }
        if !first_phase.is_finite() {
            return Err(SpectralError::invariant(
                "finite_values",
                format!("first phase value {first_phase} is not finite"),
            ));
        }
        for &r in &radii {
            if !(r.is_finite() && r > 0.0) {
                return Err(SpectralError::invariant(
                    "step_weights_positive",
                    format!("step radius {r} must be finite and positive"),
                ));
            }
        }
        for (&s, &c) in sin_step.iter().zip(cos_step.iter()) {
            if !(s.is_finite() && c.is_finite() && s > 0.0) {
                return Err(SpectralError::invariant(
                    "increasing_steps",
                    format!("step direction ({c}, {s}) must be finite with positive sine"),
                ));
            }
        }
        let mut lengths = Vec::with_capacity(radii.len());
        let mut acc = 0.0;
        for &r in &radii {
            acc += r * r;
            lengths.push(acc);
        }
        let mut phases = Vec::with_capacity(radii.len());
        let mut phi = first_phase;
        phases.push(phi);
        for (&s, &c) in sin_step.iter().zip(cos_step.iter()) {
            phi += s.atan2(c); // in (0, π) because s > 0
            phases.push(phi);
        }
        Ok(StepPhase {
            radii,
            sin_step,
            cos_step,
            lengths,
            phases,
        })
    }

    /// Phase of the free discrete Schrödinger operator: L_n = n, φ_n = nπ/2.
    pub fn free_schrodinger(m: usize) -> Self {
        assert!(m >= 1, "need at least one breakpoint");
        StepPhase::from_polar_steps(
            PI / 2.0,
            vec![1.0; m],
            vec![1.0; m - 1],
            vec![0.0; m - 1],
        )
        .expect("free phase data is valid")
    }

    /// Number of stored breakpoints M.
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// L_n for n = 1..=M.
    pub fn breakpoint(&self, n: usize) -> f64 {
        assert!(n >= 1, "breakpoints are indexed from 1");
        self.lengths[n - 1]
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.lengths
    }

    /// φ_n for n = 1..=M (unwrapped).
    pub fn phi(&self, n: usize) -> f64 {
        assert!(n >= 1, "phase values are indexed from 1");
        self.phases[n - 1]
    }

    pub fn phi_values(&self) -> &[f64] {
        &self.phases
    }

    /// R_n = sqrt(L_n - L_{n-1}) for n = 1..=M.
    pub fn step_radius(&self, n: usize) -> f64 {
        assert!(n >= 1, "step radii are indexed from 1");
        self.radii[n - 1]
    }

    /// sin(φ_{n+1} - φ_n) for n = 1..=M-1.
    pub fn step_sin(&self, n: usize) -> f64 {
        assert!(n >= 1, "step increments are indexed from 1");
        self.sin_step[n - 1]
    }

    /// cos(φ_{n+1} - φ_n) for n = 1..=M-1.
    pub fn step_cos(&self, n: usize) -> f64 {
        assert!(n >= 1, "step increments are indexed from 1");
        self.cos_step[n - 1]
    }

    /// The step function itself: φ_1 on (0, L_1), φ_{n+1} on [L_n, L_{n+1}),
    /// extended past the last stored breakpoint by its final value.
    pub fn phi_at(&self, t: f64) -> f64 {
        assert!(t >= 0.0, "evaluation point must be non-negative");
        let k = self.lengths.partition_point(|&l| l <= t);
        self.phases[k.min(self.phases.len() - 1)]
    }

    /// Checks the first-interval normalization φ_1 = π/2, L_1 = 1 that marks a
    /// phase as coming from (or convertible to) a Jacobi operator.
    pub fn validate_jacobi_normalized(&self) -> Result<()> {
        if (self.phases[0] - PI / 2.0).abs() > NORMALIZATION_TOL {
            return Err(SpectralError::invariant(
                "phi_first_step",
                format!("first phase value must be π/2, got {}", self.phases[0]),
            ));
        }
        if (self.lengths[0] - 1.0).abs() > NORMALIZATION_TOL {
            return Err(SpectralError::invariant(
                "unit_first_length",
                format!("first breakpoint must be 1, got {}", self.lengths[0]),
            ));
        }
        Ok(())
    }
}

/// Rank-one projection onto direction (cos φ, sin φ).
pub fn projection(phi: f64) -> Matrix2<f64> {
    let (s, c) = phi.sin_cos();
    Matrix2::new(c * c, c * s, c * s, s * s)
}

/// J P_φ as a real 2x2 block, with J = [[0, -1], [1, 0]].
fn j_projection(phi: f64) -> Matrix2<f64> {
    let (s, c) = phi.sin_cos();
    Matrix2::new(-c * s, -s * s, c * c, c * s)
}

/// Step-function Hamiltonian H(t) = P_{φ(t)}; trace-normed by construction.
#[derive(Debug, Clone)]
pub struct TraceNormedHamiltonian {
    phase: StepPhase,
}

impl TraceNormedHamiltonian {
    pub fn new(phase: StepPhase) -> Self {
        TraceNormedHamiltonian { phase }
    }

    pub fn phase(&self) -> &StepPhase {
        &self.phase
    }

    pub fn into_phase(self) -> StepPhase {
        self.phase
    }

    /// H(t); unit trace and zero determinant for every t.
    pub fn at(&self, t: f64) -> Matrix2<f64> {
        projection(self.phase.phi_at(t))
    }
}

impl From<StepPhase> for TraceNormedHamiltonian {
    fn from(phase: StepPhase) -> Self {
        TraceNormedHamiltonian::new(phase)
    }
}

/// Exact propagation across one singular interval of weight `weight` and
/// direction φ: u ↦ (I - z · weight · J P_φ) u.
///
/// The quadratic (and all higher) series terms vanish identically because
/// P_φ J P_φ = 0, so this one multiply *is* the exponential.
pub fn propagate_singular(
    u: Vector2<Complex64>,
    weight: f64,
    phi: f64,
    z: Complex64,
) -> Vector2<Complex64> {
    assert!(weight >= 0.0 && weight.is_finite(), "interval weight must be non-negative");
    let jp = j_projection(phi);
    let v = apply_real(&jp, &u);
    Vector2::new(u[0] - z * weight * v[0], u[1] - z * weight * v[1])
}

fn apply_real(m: &Matrix2<f64>, u: &Vector2<Complex64>) -> Vector2<Complex64> {
    Vector2::new(
        m[(0, 0)] * u[0] + m[(0, 1)] * u[1],
        m[(1, 0)] * u[0] + m[(1, 1)] * u[1],
    )
}

/// Discrete trajectory u_0, ..., u_K of a step-phase canonical system,
/// satisfying J(u_{n+1} - u_n) = z H_{n+1} u_n with H_{n+1} = R_{n+1}² P_{φ_{n+1}}.
#[derive(Debug, Clone)]
pub struct DiscreteCanonicalState {
    vectors: Vec<Vector2<Complex64>>,
    z: Complex64,
}

impl DiscreteCanonicalState {
    pub fn z(&self) -> Complex64 {
        self.z
    }

    /// u_n for n = 0..=K (u_0 is the initial vector).
    pub fn vector(&self, n: usize) -> Vector2<Complex64> {
        self.vectors[n]
    }

    pub fn vectors(&self) -> &[Vector2<Complex64>] {
        &self.vectors
    }

    /// Number of propagation steps K.
    pub fn steps(&self) -> usize {
        self.vectors.len() - 1
    }

    /// Sup-norm defect of the difference equation at step n (0-based):
    /// ‖J(u_{n+1} - u_n) - z R_{n+1}² P_{φ_{n+1}} u_n‖_∞.
    pub fn defect(&self, phase: &StepPhase, n: usize) -> f64 {
        let u0 = &self.vectors[n];
        let u1 = &self.vectors[n + 1];
        let d = Vector2::new(u1[0] - u0[0], u1[1] - u0[1]);
        let jd = Vector2::new(-d[1], d[0]);
        let p = projection(phase.phi(n + 1));
        let w = phase.step_radius(n + 1).powi(2);
        let hu = apply_real(&p, u0);
        let r0 = jd[0] - self.z * w * hu[0];
        let r1 = jd[1] - self.z * w * hu[1];
        r0.norm().max(r1.norm())
    }
}

/// Propagates `u0` through the first `upto` singular intervals of `phase`.
pub fn propagate_phase(
    phase: &StepPhase,
    u0: Vector2<Complex64>,
    z: Complex64,
    upto: usize,
) -> Result<DiscreteCanonicalState> {
    if upto > phase.len() {
        return Err(SpectralError::OutOfRange {
            what: "propagation steps",
            index: upto,
            limit: phase.len(),
        });
    }
    let mut vectors = Vec::with_capacity(upto + 1);
    vectors.push(u0);
    let mut u = u0;
    for k in 1..=upto {
        let w = phase.step_radius(k).powi(2);
        u = propagate_singular(u, w, phase.phi(k), z);
        vectors.push(u);
    }
    Ok(DiscreteCanonicalState { vectors, z })
}

/// Σ_{n=1}^{K} u_n^* H_n u_n with H_n = R_n² P_{φ_n} — the discrete form of
/// ∫ u^* H u dt up to the K-th breakpoint.
///
/// Either endpoint of each singular interval gives the same value because
/// P_{φ_n} u is constant across it; the right endpoint u_n is used.
pub fn h_integral(phase: &StepPhase, state: &DiscreteCanonicalState) -> f64 {
    let k = state.steps().min(phase.len());
    let mut total = 0.0;
    for n in 1..=k {
        let p = projection(phase.phi(n));
        let u = state.vector(n);
        let pu = apply_real(&p, &u);
        let quad = (u[0].conj() * pu[0] + u[1].conj() * pu[1]).re;
        total += phase.step_radius(n).powi(2) * quad;
    }
    total
}
