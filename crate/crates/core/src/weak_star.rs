//! Pairings of step-function Hamiltonians against compactly supported
//! piecewise-constant test functions, and a brute-force separation
//! certificate for a target phase against the whole one-parameter family of
//! discrete-Schrödinger phases.
//!
//! The pairing ∫ f* H f dt is evaluated exactly: both the test function and
//! the Hamiltonian are piecewise constant, so the integral is a finite sum of
//! (overlap length) × fᵀ P_φ f terms with no quadrature error.  Because every
//! discrete-Schrödinger phase takes a single constant value ψ on [1, 2) —
//! its second singular interval has length csc²(ψ - π/2) ≥ 1 — a target
//! phase with two different projection directions inside (1, 2) can be
//! separated from the entire family by sweeping ψ and taking the worst
//! pairing discrepancy against a fixed pair of test functions supported
//! there.  A strictly positive sweep infimum is the certificate.
//!
//! Two pairing conventions are computed side by side: the length-weighted
//! Lebesgue integral (canonical) and an unnormalized variant that sums the
//! integrand values over overlapped segments without the length factor.
//! Certificates always report the selected convention plus the alternate.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::canonical::{StepPhase, TraceNormedHamiltonian};
use crate::error::{Result, SpectralError};
use crate::par;

/// One constant piece of a test function: the vector `vector` on
/// `[start, end)`, zero elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub vector: [f64; 2],
}

/// Compactly supported piecewise-constant ℝ²-valued test function on [0, ∞).
///
/// Pieces are kept sorted by start and must be pairwise disjoint (half-open
/// intervals may touch).
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pieces: Vec<Piece>,
}

impl TestFunction {
    pub fn new(mut pieces: Vec<Piece>) -> Result<Self> {
        for p in &pieces {
            if !(p.start.is_finite()
                && p.end.is_finite()
                && p.vector[0].is_finite()
                && p.vector[1].is_finite())
            {
                return Err(SpectralError::invariant(
                    "finite_values",
                    format!("test-function piece {p:?} holds a non-finite value"),
                ));
            }
            if !(p.start >= 0.0 && p.start < p.end) {
                return Err(SpectralError::invariant(
                    "piece_intervals",
                    format!("piece [{}, {}) must satisfy 0 <= start < end", p.start, p.end),
                ));
            }
        }
        pieces.sort_by(|x, y| x.start.total_cmp(&y.start));
        for w in pieces.windows(2) {
            if w[1].start < w[0].end {
                return Err(SpectralError::invariant(
                    "disjoint_support",
                    format!(
                        "pieces [{}, {}) and [{}, {}) overlap",
                        w[0].start, w[0].end, w[1].start, w[1].end
                    ),
                ));
            }
        }
        Ok(TestFunction { pieces })
    }

    /// Single-piece test function: `vector` on `[start, end)`.
    pub fn indicator(start: f64, end: f64, vector: [f64; 2]) -> Result<Self> {
        Self::new(vec![Piece { start, end, vector }])
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Pointwise value (zero off the support).
    pub fn value_at(&self, t: f64) -> [f64; 2] {
        for p in &self.pieces {
            if t >= p.start && t < p.end {
                return p.vector;
            }
            if t < p.start {
                break;
            }
        }
        [0.0, 0.0]
    }

    /// Right edge of the support.
    pub fn support_end(&self) -> f64 {
        self.pieces.last().map_or(0.0, |p| p.end)
    }
}

/// How overlap terms enter a pairing sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairingConvention {
    /// (overlap length) × fᵀ P_φ f — the Lebesgue integral; canonical.
    Weighted,
    /// fᵀ P_φ f per overlapped segment, ignoring its length.
    Unnormalized,
}

impl PairingConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            PairingConvention::Weighted => "weighted",
            PairingConvention::Unnormalized => "unnormalized",
        }
    }

    pub fn other(self) -> Self {
        match self {
            PairingConvention::Weighted => PairingConvention::Unnormalized,
            PairingConvention::Unnormalized => PairingConvention::Weighted,
        }
    }
}

impl std::fmt::Display for PairingConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

fn segment_term(
    piece: &Piece,
    seg_start: f64,
    seg_end: f64,
    phi: f64,
    convention: PairingConvention,
) -> f64 {
    let lo = piece.start.max(seg_start);
    let hi = piece.end.min(seg_end);
    if hi <= lo {
        return 0.0;
    }
    let (s, c) = phi.sin_cos();
    let along = c * piece.vector[0] + s * piece.vector[1];
    let q = along * along;
    match convention {
        PairingConvention::Weighted => (hi - lo) * q,
        PairingConvention::Unnormalized => q,
    }
}

/// ∫ f* H f dt under the chosen convention; exact for step data.
pub fn pairing_with(
    h: &TraceNormedHamiltonian,
    f: &TestFunction,
    convention: PairingConvention,
) -> f64 {
    let phase = h.phase();
    let m = phase.len();
    let mut total = 0.0;
    for piece in f.pieces() {
        let mut seg_start = 0.0;
        for k in 1..=m {
            let seg_end = phase.breakpoint(k);
            total += segment_term(piece, seg_start, seg_end, phase.phi(k), convention);
            seg_start = seg_end;
        }
        // The phase extends past its last breakpoint by its final value.
        total += segment_term(piece, seg_start, f64::INFINITY, phase.phi(m), convention);
    }
    total
}

/// Length-weighted pairing ∫ f* H f dt.
pub fn pairing(h: &TraceNormedHamiltonian, f: &TestFunction) -> f64 {
    pairing_with(h, f, PairingConvention::Weighted)
}

/// max over f ∈ F of |pairing(H1, f) - pairing(H2, f)|.
pub fn weak_star_discrepancy_with(
    h1: &TraceNormedHamiltonian,
    h2: &TraceNormedHamiltonian,
    fs: &[TestFunction],
    convention: PairingConvention,
) -> Result<f64> {
    if fs.is_empty() {
        return Err(SpectralError::Domain(
            "discrepancy needs at least one test function".into(),
        ));
    }
    Ok(fs
        .iter()
        .map(|f| (pairing_with(h1, f, convention) - pairing_with(h2, f, convention)).abs())
        .fold(0.0, f64::max))
}

/// Length-weighted discrepancy.
pub fn weak_star_discrepancy(
    h1: &TraceNormedHamiltonian,
    h2: &TraceNormedHamiltonian,
    fs: &[TestFunction],
) -> Result<f64> {
    weak_star_discrepancy_with(h1, h2, fs, PairingConvention::Weighted)
}

/// The built-in demonstration target: π/2 on (0,1), then two distinct
/// directions 3π/4 on [1, 3/2) and π on [3/2, 2).
pub fn certificate_example_phase() -> StepPhase {
    StepPhase::from_breakpoints(vec![1.0, 1.5, 2.0], vec![FRAC_PI_2, 0.75 * PI, PI])
        .expect("built-in phase data is valid")
}

/// The fixed separating pair: first-component indicators of [1, 3/2) and
/// [3/2, 2).
pub fn standard_test_pair() -> Vec<TestFunction> {
    vec![
        TestFunction::indicator(1.0, 1.5, [1.0, 0.0]).expect("valid piece"),
        TestFunction::indicator(1.5, 2.0, [1.0, 0.0]).expect("valid piece"),
    ]
}

/// The discrete-Schrödinger phase whose second value is ψ: π/2 on (0, 1),
/// then ψ on [1, 1 + csc²(ψ - π/2)); requires ψ ∈ (π/2, 3π/2).
pub fn ds_comparison_phase(psi: f64) -> Result<StepPhase> {
    let delta = psi - FRAC_PI_2;
    if !(delta > 0.0 && delta < PI) {
        return Err(SpectralError::Domain(format!(
            "second value {psi} must lie strictly between π/2 and 3π/2"
        )));
    }
    let s = delta.sin();
    StepPhase::from_polar_steps(FRAC_PI_2, vec![1.0, s.recip()], vec![s], vec![delta.cos()])
}

/// Strictly positive separation of a target phase from the swept
/// discrete-Schrödinger family, at a recorded resolution and convention.
#[derive(Debug, Clone)]
pub struct NonDensityCertificate {
    phase: StepPhase,
    test_set: Vec<TestFunction>,
    /// Smallest sweep discrepancy under the selected convention.
    pub infimum: f64,
    /// ψ attaining the infimum (smallest among ties).
    pub argmin_psi: f64,
    /// Number of sweep samples.
    pub resolution: usize,
    /// Convention the headline numbers use.
    pub convention: PairingConvention,
    /// Infimum under the other convention.
    pub alternate_infimum: f64,
    /// Its argmin.
    pub alternate_argmin_psi: f64,
    /// (ψ, discrepancy) samples under the selected convention, sweep order.
    curve: Vec<(f64, f64)>,
}

impl NonDensityCertificate {
    pub fn phase(&self) -> &StepPhase {
        &self.phase
    }

    pub fn test_set(&self) -> &[TestFunction] {
        &self.test_set
    }

    pub fn curve(&self) -> &[(f64, f64)] {
        &self.curve
    }
}

/// Fold of the phase values on the window [1, 2): true iff at least two
/// overlapping segments carry genuinely different projection directions
/// (difference not a multiple of π).
fn has_distinct_directions_on_window(phase: &StepPhase) -> bool {
    let mut values = Vec::new();
    let mut seg_start = 0.0_f64;
    for k in 1..=phase.len() {
        let seg_end = phase.breakpoint(k);
        if seg_end.min(2.0) > seg_start.max(1.0) {
            values.push(phase.phi(k));
        }
        seg_start = seg_end;
    }
    if seg_start < 2.0 {
        values.push(phase.phi(phase.len()));
    }
    values
        .iter()
        .enumerate()
        .any(|(i, &vi)| values[i + 1..].iter().any(|&vj| (vi - vj).sin().abs() >= 1e-12))
}

/// Sweeps ψ uniformly over (π/2 + 1e-6, 3π/2 - 1e-6) and certifies that the
/// worst pairing discrepancy against `phase_j` stays positive everywhere.
///
/// Both conventions are evaluated in one pass; the certificate carries the
/// selected one as its headline plus the alternate for cross-checking.
pub fn nondensity_certificate_with(
    phase_j: &StepPhase,
    resolution: usize,
    convention: PairingConvention,
) -> Result<NonDensityCertificate> {
    if resolution < 2 {
        return Err(SpectralError::Domain(format!(
            "sweep resolution {resolution} is too coarse; need at least 2 samples"
        )));
    }
    if !has_distinct_directions_on_window(phase_j) {
        return Err(SpectralError::CertificateInapplicable(
            "target phase carries a single projection direction on [1, 2); \
             the standard test pair cannot separate it from the swept family"
                .into(),
        ));
    }
    let tests = standard_test_pair();
    let target = TraceNormedHamiltonian::new(phase_j.clone());
    let eps = 1e-6;
    let lo = FRAC_PI_2 + eps;
    let hi = 1.5 * PI - eps;
    let step = (hi - lo) / (resolution - 1) as f64;
    let indices: Vec<usize> = (0..resolution).collect();
    let rows = par::map_ordered(&indices, |&i| {
        let psi = lo + step * i as f64;
        let ds = TraceNormedHamiltonian::new(ds_comparison_phase(psi)?);
        let weighted =
            weak_star_discrepancy_with(&target, &ds, &tests, PairingConvention::Weighted)?;
        let unnormalized =
            weak_star_discrepancy_with(&target, &ds, &tests, PairingConvention::Unnormalized)?;
        Ok::<_, SpectralError>((psi, weighted, unnormalized))
    });
    let mut curve = Vec::with_capacity(resolution);
    let mut min_w = f64::INFINITY;
    let mut arg_w = lo;
    let mut min_u = f64::INFINITY;
    let mut arg_u = lo;
    for row in rows {
        let (psi, weighted, unnormalized) = row?;
        if weighted < min_w {
            min_w = weighted;
            arg_w = psi;
        }
        if unnormalized < min_u {
            min_u = unnormalized;
            arg_u = psi;
        }
        let selected = match convention {
            PairingConvention::Weighted => weighted,
            PairingConvention::Unnormalized => unnormalized,
        };
        curve.push((psi, selected));
    }
    let (infimum, argmin_psi, alternate_infimum, alternate_argmin_psi) = match convention {
        PairingConvention::Weighted => (min_w, arg_w, min_u, arg_u),
        PairingConvention::Unnormalized => (min_u, arg_u, min_w, arg_w),
    };
    if !(infimum > 0.0) {
        return Err(SpectralError::CertificateInapplicable(format!(
            "sweep infimum {infimum} at ψ = {argmin_psi} is not strictly positive"
        )));
    }
    Ok(NonDensityCertificate {
        phase: phase_j.clone(),
        test_set: tests,
        infimum,
        argmin_psi,
        resolution,
        convention,
        alternate_infimum,
        alternate_argmin_psi,
        curve,
    })
}

/// [`nondensity_certificate_with`] under the canonical weighted convention.
pub fn nondensity_certificate(
    phase_j: &StepPhase,
    resolution: usize,
) -> Result<NonDensityCertificate> {
    nondensity_certificate_with(phase_j, resolution, PairingConvention::Weighted)
}
