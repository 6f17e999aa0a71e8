//! Half-line Jacobi difference operators and their zero-energy solution data.
//!
//! A truncated operator is the coefficient pair (a, b) acting through the
//! three-term recurrence
//!
//! ```text
//!     a_{n-1} y_{n-1} + b_n y_n + a_n y_{n+1} = z y_n ,        1 <= n <= N,
//! ```
//!
//! with every off-diagonal entry strictly negative and the boundary entry
//! pinned to a_0 = -1.  The discrete Schrödinger case is a ≡ -1.
//!
//! The zero-energy fundamental system (c, s) starts from c_0 = 1, c_1 = 0 and
//! s_0 = 0, s_1 = 1; its Wronskian obeys a_n (c_n s_{n+1} - c_{n+1} s_n) = -1
//! for every n, which is both the coefficient-recovery formula and the
//! per-step health check used throughout the test suite.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectralError};

/// Truncated Jacobi coefficient pair with a declared sup-norm bound.
///
/// Storage is 0-based while the accessors keep the half-line subscripts:
/// `a(n)` for n = 0..=N (a_0 is the boundary entry, always -1) and `b(n)` for
/// n = 1..=N.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiCoefficients {
    a: Vec<f64>,
    b: Vec<f64>,
    bound: f64,
}

/// Wire form of [`JacobiCoefficients`]: `{"a": [...], "b": [...], "bound": B}`.
///
/// Parsing this type checks only JSON shape; structural validation happens in
/// the `TryFrom` conversion so schema errors and invariant violations stay
/// distinguishable.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JacobiCoefficientsRaw {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub bound: f64,
}

impl TryFrom<JacobiCoefficientsRaw> for JacobiCoefficients {
    type Error = SpectralError;

    fn try_from(raw: JacobiCoefficientsRaw) -> Result<Self> {
        JacobiCoefficients::new(raw.a, raw.b, raw.bound)
    }
}

impl From<&JacobiCoefficients> for JacobiCoefficientsRaw {
    fn from(coeffs: &JacobiCoefficients) -> Self {
        JacobiCoefficientsRaw {
            a: coeffs.a.clone(),
            b: coeffs.b.clone(),
            bound: coeffs.bound,
        }
    }
}

impl JacobiCoefficients {
    /// Validates and wraps a coefficient pair.
    ///
    /// Requirements: `a` holds a_0..a_N and `b` holds b_1..b_N (so
    /// `a.len() == b.len() + 1`); a_0 = -1 exactly; every a_n < 0; all values
    /// finite and within the declared `bound`.
    pub fn new(a: Vec<f64>, b: Vec<f64>, bound: f64) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() + 1 {
            return Err(SpectralError::invariant(
                "coefficient_lengths",
                format!("need len(a) = len(b) + 1 >= 1, got len(a) = {}, len(b) = {}", a.len(), b.len()),
            ));
        }
        if !bound.is_finite() || bound <= 0.0 {
            return Err(SpectralError::invariant(
                "bound_positive",
                format!("declared bound must be finite and positive, got {bound}"),
            ));
        }
        if a[0] != -1.0 {
            return Err(SpectralError::invariant(
                "boundary_normalization",
                format!("a_0 must equal -1 exactly, got {}", a[0]),
            ));
        }
        for (n, &an) in a.iter().enumerate() {
            if !an.is_finite() || an >= 0.0 {
                return Err(SpectralError::invariant(
                    "offdiagonal_sign",
                    format!("a_{n} = {an} is not strictly negative and finite"),
                ));
            }
            if an.abs() > bound {
                return Err(SpectralError::invariant(
                    "coefficient_bound",
                    format!("|a_{n}| = {} exceeds declared bound {bound}", an.abs()),
                ));
            }
        }
        for (i, &bn) in b.iter().enumerate() {
            let n = i + 1;
            if !bn.is_finite() {
                return Err(SpectralError::invariant(
                    "finite_values",
                    format!("b_{n} = {bn} is not finite"),
                ));
            }
            if bn.abs() > bound {
                return Err(SpectralError::invariant(
                    "coefficient_bound",
                    format!("|b_{n}| = {} exceeds declared bound {bound}", bn.abs()),
                ));
            }
        }
        Ok(JacobiCoefficients { a, b, bound })
    }

    /// Like [`new`](Self::new) with the bound inferred as max(1, sup |a|, sup |b|).
    pub fn with_inferred_bound(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let bound = a
            .iter()
            .chain(b.iter())
            .fold(1.0_f64, |acc, &v| acc.max(v.abs()));
        Self::new(a, b, bound)
    }

    /// The free discrete Schrödinger operator: a ≡ -1, b ≡ 0, truncation `n`.
    pub fn free_schrodinger(n: usize) -> Self {
        JacobiCoefficients {
            a: vec![-1.0; n + 1],
            b: vec![0.0; n],
            bound: 1.0,
        }
    }

    /// Discrete Schrödinger operator with potential `b` (a ≡ -1).
    pub fn from_potential(b: Vec<f64>) -> Result<Self> {
        let a = vec![-1.0; b.len() + 1];
        Self::with_inferred_bound(a, b)
    }

    /// Truncation length N: `a` carries N+1 entries, `b` carries N.
    pub fn truncation(&self) -> usize {
        self.a.len() - 1
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// a_n for n = 0..=N.  Panics out of range; see [`a_ext`](Self::a_ext) for
    /// the tail-extended accessor.
    pub fn a(&self, n: usize) -> f64 {
        self.a[n]
    }

    /// b_n for n = 1..=N.  Panics out of range.
    pub fn b(&self, n: usize) -> f64 {
        assert!(n >= 1, "b is indexed from 1");
        self.b[n - 1]
    }

    pub fn a_values(&self) -> &[f64] {
        &self.a
    }

    pub fn b_values(&self) -> &[f64] {
        &self.b
    }

    /// a_n extended past the stored range by repeating the last stored entry.
    pub fn a_ext(&self, n: usize) -> f64 {
        *self.a.get(n).unwrap_or_else(|| self.a.last().unwrap())
    }

    /// b_n (n >= 1) extended past the stored range by repeating the last
    /// stored entry; an operator with no stored b extends by zero.
    pub fn b_ext(&self, n: usize) -> f64 {
        assert!(n >= 1, "b is indexed from 1");
        match self.b.get(n - 1) {
            Some(&v) => v,
            None => self.b.last().copied().unwrap_or(0.0),
        }
    }

    /// Materializes the tail rule: a copy truncated or extended to length `n`.
    pub fn extended(&self, n: usize) -> JacobiCoefficients {
        let a = (0..=n).map(|k| self.a_ext(k)).collect();
        let b = (1..=n).map(|k| self.b_ext(k)).collect();
        JacobiCoefficients {
            a,
            b,
            bound: self.bound,
        }
    }
}

/// Zero-energy fundamental system (c, s), indices 0..=N+1.
#[derive(Debug, Clone)]
pub struct FundamentalSolutions {
    c: Vec<f64>,
    s: Vec<f64>,
}

impl FundamentalSolutions {
    /// Number of stored indices (N + 2 for an N-truncated operator).
    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn c(&self, n: usize) -> f64 {
        self.c[n]
    }

    pub fn s(&self, n: usize) -> f64 {
        self.s[n]
    }

    pub fn c_values(&self) -> &[f64] {
        &self.c
    }

    pub fn s_values(&self) -> &[f64] {
        &self.s
    }

    /// c_n s_{n+1} - c_{n+1} s_n for n <= len - 2, via a compensated 2x2
    /// determinant so the subtraction itself adds no cancellation error.
    pub fn wronskian(&self, n: usize) -> f64 {
        det2(self.c[n], self.s[n + 1], self.c[n + 1], self.s[n])
    }
}

/// a d - b c with fused multiply-adds (Kahan's determinant scheme).
pub(crate) fn det2(a: f64, d: f64, b: f64, c: f64) -> f64 {
    let w = b * c;
    let e = b.mul_add(c, -w);
    let f = a.mul_add(d, -w);
    f - e
}

/// One-step transfer matrix at spectral parameter z:
///
/// ```text
///     M_n(z) = [ 0                 1           ]
///              [ -a_{n-1}/a_n   (z - b_n)/a_n ]
/// ```
///
/// so that (y_n, y_{n+1})ᵗ = M_n(z) (y_{n-1}, y_n)ᵗ, with
/// det M_n = a_{n-1}/a_n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    m: Matrix2<Complex64>,
}

impl TransferMatrix {
    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.m
    }

    pub fn det(&self) -> Complex64 {
        self.m[(0, 0)] * self.m[(1, 1)] - self.m[(0, 1)] * self.m[(1, 0)]
    }

    /// Applies the step to a solution window (y_{n-1}, y_n)ᵗ.
    pub fn apply(&self, window: Vector2<Complex64>) -> Vector2<Complex64> {
        self.m * window
    }
}

/// Builds M_n(z) for 1 <= n <= N.
pub fn transfer_matrix(coeffs: &JacobiCoefficients, n: usize, z: Complex64) -> Result<TransferMatrix> {
    let limit = coeffs.truncation();
    if n < 1 || n > limit {
        return Err(SpectralError::OutOfRange {
            what: "transfer matrix step",
            index: n,
            limit,
        });
    }
    let an = coeffs.a(n);
    let lower_left = Complex64::new(-coeffs.a(n - 1) / an, 0.0);
    let lower_right = (z - coeffs.b(n)) / an;
    Ok(TransferMatrix {
        m: Matrix2::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            lower_left,
            lower_right,
        ),
    })
}

/// Runs the zero-energy recurrence for both fundamental solutions,
/// producing c, s on indices 0..=N+1.
pub fn fundamental_solutions(coeffs: &JacobiCoefficients) -> FundamentalSolutions {
    let n_max = coeffs.truncation();
    let mut c = Vec::with_capacity(n_max + 2);
    let mut s = Vec::with_capacity(n_max + 2);
    c.extend_from_slice(&[1.0, 0.0]);
    s.extend_from_slice(&[0.0, 1.0]);
    for n in 1..=n_max {
        let an = coeffs.a(n);
        let am = coeffs.a(n - 1);
        let bn = coeffs.b(n);
        c.push(-(am * c[n - 1] + bn * c[n]) / an);
        s.push(-(am * s[n - 1] + bn * s[n]) / an);
    }
    FundamentalSolutions { c, s }
}

/// Recovers a_n = -1 / (c_n s_{n+1} - c_{n+1} s_n) from the fundamental system.
pub fn recover_a(sol: &FundamentalSolutions, n: usize) -> Result<f64> {
    if n + 1 >= sol.len() {
        return Err(SpectralError::OutOfRange {
            what: "wronskian index",
            index: n,
            limit: sol.len().saturating_sub(2),
        });
    }
    let w = sol.wronskian(n);
    if w == 0.0 || !w.is_finite() {
        return Err(SpectralError::Degenerate(format!(
            "wronskian vanished or overflowed at index {n} (value {w})"
        )));
    }
    Ok(-1.0 / w)
}

/// Recovers b_{n+1} = a_n a_{n+1} (c_n s_{n+2} - c_{n+2} s_n).
///
/// `a` must cover indices n and n+1; the solutions must reach index n+2.
pub fn recover_b(sol: &FundamentalSolutions, a: &[f64], n: usize) -> Result<f64> {
    if n + 2 >= sol.len() {
        return Err(SpectralError::OutOfRange {
            what: "solution index",
            index: n + 2,
            limit: sol.len() - 1,
        });
    }
    if n + 1 >= a.len() {
        return Err(SpectralError::OutOfRange {
            what: "coefficient index",
            index: n + 1,
            limit: a.len().saturating_sub(1),
        });
    }
    let skew = det2(sol.c(n), sol.s(n + 2), sol.c(n + 2), sol.s(n));
    Ok(a[n] * a[n + 1] * skew)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn free_solutions_follow_period_four_pattern() {
        // Oracle: y_{n+1} = -y_{n-1} stepped by hand.
        let coeffs = JacobiCoefficients::free_schrodinger(8);
        let sol = fundamental_solutions(&coeffs);
        let (mut c0, mut c1) = (1.0, 0.0);
        let (mut s0, mut s1) = (0.0, 1.0);
        for n in 0..sol.len() {
            assert_eq!(sol.c(n), c0);
            assert_eq!(sol.s(n), s0);
            let (cn, sn) = (-c0, -s0);
            (c0, c1, s0, s1) = (c1, cn, s1, sn);
        }
    }

    #[test]
    fn two_step_example_has_negative_c2() {
        let coeffs = JacobiCoefficients::new(vec![-1.0, -1.0], vec![2.0], 2.0).unwrap();
        let sol = fundamental_solutions(&coeffs);
        assert_eq!(sol.c_values(), &[1.0, 0.0, -1.0]);
        assert_eq!(sol.s_values(), &[0.0, 1.0, 2.0]);
        // a_1 (c_1 s_2 - c_2 s_1) = -1 pins the sign of c_2.
        assert_eq!(coeffs.a(1) * sol.wronskian(1), -1.0);
    }

    #[test]
    fn transfer_matrix_matches_hand_values() {
        let free = JacobiCoefficients::free_schrodinger(3);
        let m = transfer_matrix(&free, 1, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(m.matrix()[(0, 0)], Complex64::new(0.0, 0.0));
        assert_eq!(m.matrix()[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(m.matrix()[(1, 0)], Complex64::new(-1.0, 0.0));
        assert_eq!(m.matrix()[(1, 1)], Complex64::new(0.0, 0.0));

        let mi = transfer_matrix(&free, 1, Complex64::new(0.0, 1.0)).unwrap();
        assert_eq!(mi.matrix()[(1, 1)], Complex64::new(0.0, -1.0));

        let mixed = JacobiCoefficients::new(vec![-1.0, -2.0], vec![3.0], 3.0).unwrap();
        let mm = transfer_matrix(&mixed, 1, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(mm.matrix()[(1, 0)], Complex64::new(-0.5, 0.0));
        assert_eq!(mm.matrix()[(1, 1)], Complex64::new(1.5, 0.0));
        // det M_n = a_{n-1}/a_n
        assert_abs_diff_eq!(mm.det().re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(mm.det().im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn transfer_steps_reproduce_fundamental_solutions() {
        let coeffs =
            JacobiCoefficients::new(vec![-1.0, -0.7, -1.3, -0.9], vec![0.4, -0.2, 0.8], 2.0)
                .unwrap();
        let sol = fundamental_solutions(&coeffs);
        let mut window = Vector2::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        for n in 1..=coeffs.truncation() {
            window = transfer_matrix(&coeffs, n, Complex64::new(0.0, 0.0))
                .unwrap()
                .apply(window);
            assert_abs_diff_eq!(window[0].re, sol.c(n), epsilon = 1e-14);
            assert_abs_diff_eq!(window[1].re, sol.c(n + 1), epsilon = 1e-14);
        }
    }

    #[test]
    fn recovery_inverts_the_recurrence() {
        let coeffs =
            JacobiCoefficients::new(vec![-1.0, -1.1, -0.8, -1.05], vec![0.3, -0.45, 0.9], 2.0)
                .unwrap();
        let sol = fundamental_solutions(&coeffs);
        for n in 0..=coeffs.truncation() {
            assert_abs_diff_eq!(recover_a(&sol, n).unwrap(), coeffs.a(n), epsilon = 1e-13);
        }
        for n in 0..coeffs.truncation() {
            assert_abs_diff_eq!(
                recover_b(&sol, coeffs.a_values(), n).unwrap(),
                coeffs.b(n + 1),
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn recover_b_matches_worked_example() {
        let coeffs = JacobiCoefficients::new(vec![-1.0, -1.0], vec![2.0], 2.0).unwrap();
        let sol = fundamental_solutions(&coeffs);
        assert_eq!(recover_b(&sol, coeffs.a_values(), 0).unwrap(), 2.0);
    }

    #[test]
    fn constructor_rejects_bad_inputs() {
        let err = |r: Result<JacobiCoefficients>| match r {
            Err(SpectralError::Invariant { name, .. }) => name,
            other => panic!("expected invariant error, got {other:?}"),
        };
        assert_eq!(
            err(JacobiCoefficients::new(vec![-1.0, 0.5], vec![0.0], 1.0)),
            "offdiagonal_sign"
        );
        assert_eq!(
            err(JacobiCoefficients::new(vec![-0.9, -1.0], vec![0.0], 1.0)),
            "boundary_normalization"
        );
        assert_eq!(
            err(JacobiCoefficients::new(vec![-1.0, -1.0], vec![5.0], 2.0)),
            "coefficient_bound"
        );
        assert_eq!(
            err(JacobiCoefficients::new(vec![-1.0], vec![1.0], 2.0)),
            "coefficient_lengths"
        );
        assert_eq!(
            err(JacobiCoefficients::new(vec![-1.0, -1.0], vec![f64::NAN], 2.0)),
            "finite_values"
        );
    }

    #[test]
    fn tail_rule_repeats_last_entries() {
        let coeffs = JacobiCoefficients::new(vec![-1.0, -0.5], vec![0.25], 1.0).unwrap();
        assert_eq!(coeffs.a_ext(7), -0.5);
        assert_eq!(coeffs.b_ext(7), 0.25);
        let ext = coeffs.extended(4);
        assert_eq!(ext.truncation(), 4);
        assert_eq!(ext.a_values(), &[-1.0, -0.5, -0.5, -0.5, -0.5]);
        assert_eq!(ext.b_values(), &[0.25, 0.25, 0.25, 0.25]);
        let cut = ext.extended(1);
        assert_eq!(cut.a_values(), &[-1.0, -0.5]);
        assert_eq!(cut.b_values(), &[0.25]);
    }
}
