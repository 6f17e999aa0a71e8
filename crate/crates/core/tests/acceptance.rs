//! Acceptance gates: one test per shipped guarantee, each printing a single
//! pass/fail line (run with `--nocapture` to see them all). Every corpus is
//! seeded, so the numbers in the lines are reproducible bit for bit.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use spectral_cs::canonical::propagate_singular;
use spectral_cs::operator::{fundamental_solutions, JacobiCoefficients};
use spectral_cs::transform::{
    canonical_to_jacobi, ds_constraint_residual, ds_to_schrodinger, jacobi_to_canonical,
};
use spectral_cs::weak_star::{certificate_example_phase, nondensity_certificate};
use spectral_cs::weyl::{
    default_grid, finite_measure_asymptotics, herglotz_check, m_canonical, m_grid_canonical,
    m_grid_jacobi, m_jacobi, singular_interval_prediction,
};

fn report(number: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {number} ({name}): {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {number} ({name}) failed: {detail}");
}

/// Draws with moderate off-diagonal spread inside the declared bound 3:
/// zero-energy solutions stay oscillatory, so bilinear identities are
/// checkable at 1e-12. (The full bound-3 class, where solutions reach ~1e18,
/// is covered by the randomized suite at its growth-aware tolerance.)
fn moderate_corpus(seed: u64, count: usize, n: usize) -> Vec<JacobiCoefficients> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut a = vec![-1.0];
            a.extend((0..n).map(|_| rng.gen_range(-1.25..-0.8)));
            let b = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
            JacobiCoefficients::new(a, b, 3.0).expect("corpus draw is valid")
        })
        .collect()
}

/// Wider off-diagonal spread with |b| < 2·|a| everywhere, so the constant
/// extension tail keeps zero energy inside the oscillatory band and deep
/// truncations converge.
fn mixed_corpus(seed: u64, count: usize, n: usize) -> Vec<JacobiCoefficients> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut a = vec![-1.0];
            a.extend((0..n).map(|_| rng.gen_range(-2.0..-0.5)));
            let b = (0..n).map(|_| rng.gen_range(-0.9..0.9)).collect();
            JacobiCoefficients::new(a, b, 3.0).expect("corpus draw is valid")
        })
        .collect()
}

#[test]
fn criterion_1_roundtrip_exactness() {
    let corpus = moderate_corpus(9001, 100, 40);
    let mut worst = 0.0f64;
    for coeffs in &corpus {
        let phase = jacobi_to_canonical(coeffs).unwrap();
        let back = canonical_to_jacobi(&phase).unwrap();
        for n in 0..=coeffs.truncation() {
            worst = worst.max((back.a(n) - coeffs.a(n)).abs());
        }
        for n in 1..=coeffs.truncation() {
            worst = worst.max((back.b(n) - coeffs.b(n)).abs());
        }
    }
    report(
        1,
        "roundtrip exactness",
        worst <= 1e-10,
        &format!("max componentwise coefficient error {worst:.3e} over 100 operators (N = 40)"),
    );
}

#[test]
fn criterion_2_wronskian_identity() {
    let corpus = moderate_corpus(9001, 100, 40);
    let mut worst = 0.0f64;
    for coeffs in &corpus {
        let sol = fundamental_solutions(coeffs);
        for n in 0..=coeffs.truncation() {
            worst = worst.max((coeffs.a(n) * sol.wronskian(n) + 1.0).abs());
        }
    }
    // Unit off-diagonal specialization: the bracket itself is identically 1.
    // The diagonal spread matches the main corpus; random potentials have a
    // positive Lyapunov exponent, so wider draws would trade the absolute
    // 1e-12 scale for solution growth.
    let mut rng = StdRng::seed_from_u64(9021);
    let mut worst_unit = 0.0f64;
    for _ in 0..20 {
        let b: Vec<f64> = (0..40).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let coeffs = JacobiCoefficients::from_potential(b).unwrap();
        let sol = fundamental_solutions(&coeffs);
        for n in 0..=coeffs.truncation() {
            worst_unit = worst_unit.max((sol.wronskian(n) - 1.0).abs());
        }
    }
    report(
        2,
        "wronskian identity",
        worst <= 1e-12 && worst_unit <= 1e-12,
        &format!(
            "max |a_n W_n + 1| = {worst:.3e} on the roundtrip corpus; max |W_n - 1| = {worst_unit:.3e} with unit off-diagonal"
        ),
    );
}

#[test]
fn criterion_3_independent_m_evaluators_agree() {
    let corpus = mixed_corpus(9003, 20, 60);
    let grid = default_grid();
    let mut worst = 0.0f64;
    for coeffs in &corpus {
        let phase = jacobi_to_canonical(&coeffs.extended(500)).unwrap();
        for &z in &grid {
            let via_recurrence = m_jacobi(coeffs, z, 500).unwrap();
            let via_propagation = m_canonical(&phase, z, 500).unwrap();
            worst = worst.max((via_recurrence - via_propagation).norm());
        }
    }
    report(
        3,
        "independent m evaluators agree",
        worst <= 1e-8,
        &format!(
            "max |m difference| {worst:.3e} over 20 operators x {} grid points at depth 500",
            grid.len()
        ),
    );
}

#[test]
fn criterion_4_closed_form_anchor() {
    let free = JacobiCoefficients::free_schrodinger(40);
    let z = Complex64::new(0.0, 1.0);
    let m = m_jacobi(&free, z, 600).unwrap();
    // Decaying characteristic root of w² + zw + 1 = 0.
    let disc = (z * z - Complex64::new(4.0, 0.0)).sqrt();
    let (r1, r2) = ((-z + disc) * 0.5, (-z - disc) * 0.5);
    let root = if r1.norm() < r2.norm() { r1 } else { r2 };
    assert!((root * root + z * root + Complex64::new(1.0, 0.0)).norm() <= 1e-14);
    let anchor = Complex64::new(0.0, 0.618_033_988_749_894_9);
    let pass =
        (m - root).norm() <= 1e-8 && (m - anchor).norm() <= 1e-8 && (root - anchor).norm() <= 1e-12;
    report(
        4,
        "closed-form anchor at z = i",
        pass,
        &format!(
            "m = {:.16}{:+.16}i vs characteristic root {:.16}{:+.16}i",
            m.re, m.im, root.re, root.im
        ),
    );
}

#[test]
fn criterion_5_herglotz_and_normalization() {
    let corpus = mixed_corpus(9003, 20, 60);
    let grid = default_grid();
    let mut min_im = f64::INFINITY;
    let mut worst_re = 0.0f64;
    let mut worst_mass = 0.0f64;
    let mut worst_pred = 0.0f64;
    for coeffs in &corpus {
        let phase = jacobi_to_canonical(&coeffs.extended(500)).unwrap();
        let report_j = herglotz_check(&m_grid_jacobi(coeffs, &grid, 500).unwrap());
        let report_c = herglotz_check(&m_grid_canonical(&phase, &grid, 500).unwrap());
        min_im = min_im.min(report_j.min_im).min(report_c.min_im);
        let tall = m_jacobi(coeffs, Complex64::new(0.0, 1e4), 500).unwrap();
        worst_re = worst_re.max(tall.re.abs());
        worst_mass = worst_mass.max((1e4 * tall.im - 1.0).abs());
        // First-interval data (length 1, angle π/2) forces the pair (0, 1).
        let (a_pred, mass_pred) = singular_interval_prediction(&phase).unwrap();
        worst_pred = worst_pred.max(a_pred.abs()).max((mass_pred - 1.0).abs());
        let est = finite_measure_asymptotics(&phase, 1e4).unwrap();
        worst_re = worst_re.max((est.a_est - a_pred).abs());
        worst_mass = worst_mass.max((est.mass_est - mass_pred).abs());
    }
    let pass = min_im > 0.0 && worst_re <= 1e-3 && worst_mass <= 1e-3 && worst_pred <= 1e-12;
    report(
        5,
        "herglotz property and unit-mass normalization",
        pass,
        &format!(
            "min Im m = {min_im:.3e} on both grids; |Re m(10⁴i)| ≤ {worst_re:.3e}; |10⁴·Im m - 1| ≤ {worst_mass:.3e}"
        ),
    );
}

#[test]
fn criterion_6_potential_classification_and_recovery() {
    let mut rng = StdRng::seed_from_u64(9006);
    let mut worst_res = 0.0f64;
    let mut worst_rec = 0.0f64;
    for _ in 0..100 {
        let b: Vec<f64> = (0..40).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let coeffs = JacobiCoefficients::from_potential(b.clone()).unwrap();
        let phase = jacobi_to_canonical(&coeffs).unwrap();
        for n in 1..phase.len() {
            worst_res = worst_res.max(ds_constraint_residual(&phase, n).unwrap().abs());
        }
        let recovered = ds_to_schrodinger(&phase, 1e-9).unwrap();
        assert_eq!(recovered.len(), b.len());
        for (got, want) in recovered.iter().zip(&b) {
            worst_rec = worst_rec.max((got - want).abs());
        }
    }
    report(
        6,
        "unit off-diagonal classification and potential recovery",
        worst_res <= 1e-9 && worst_rec <= 1e-10,
        &format!(
            "max step-length residual {worst_res:.3e}; max recovered-potential error {worst_rec:.3e} over 100 potentials (N = 40)"
        ),
    );
}

#[test]
fn criterion_7_nondensity_certificate() {
    let cert = nondensity_certificate(&certificate_example_phase(), 10_000).unwrap();
    let pass = cert.infimum >= 0.12 && cert.alternate_infimum >= 0.24;
    report(
        7,
        "non-density certificate",
        pass,
        &format!(
            "weighted infimum {:.6} (argmin ψ = {:.6}); unnormalized infimum {:.6} (argmin ψ = {:.6}); resolution 10000",
            cert.infimum, cert.argmin_psi, cert.alternate_infimum, cert.alternate_argmin_psi
        ),
    );
}

/// Σ aᵢ·bᵢ with error-free product transforms and compensated summation:
/// accurate even when the terms cancel to ~0.
fn dot4(pairs: [(f64, f64); 4]) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for (a, b) in pairs {
        let hi = a * b;
        let lo = a.mul_add(b, -hi);
        let t = sum + hi;
        let e = if sum.abs() >= hi.abs() {
            (sum - t) + hi
        } else {
            (hi - t) + sum
        };
        sum = t;
        comp += e + lo;
    }
    sum + comp
}

fn det_accurate(m: &Matrix2<Complex64>) -> Complex64 {
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let re = dot4([(a.re, d.re), (-a.im, d.im), (-b.re, c.re), (b.im, c.im)]);
    let im = dot4([(a.re, d.im), (a.im, d.re), (-b.re, c.im), (-b.im, c.re)]);
    Complex64::new(re, im)
}

/// Generic 2×2 exponential: exp(M) = e^{tr/2}(cosh μ·I + sinhc μ·(M − (tr/2)I))
/// with μ² = (tr/2)² − det M, the small-μ branch by series.
fn exp_closed_form(m: &Matrix2<Complex64>) -> Matrix2<Complex64> {
    let half_tr = (m[(0, 0)] + m[(1, 1)]) * 0.5;
    let mu2 = half_tr * half_tr - det_accurate(m);
    let mu = mu2.sqrt();
    let one = Complex64::new(1.0, 0.0);
    let (cosh, sinhc) = if mu.norm() < 1e-4 {
        (
            one + mu2 * 0.5 + mu2 * mu2 * (1.0 / 24.0),
            one + mu2 * (1.0 / 6.0) + mu2 * mu2 * (1.0 / 120.0),
        )
    } else {
        (mu.cosh(), mu.sinh() / mu)
    };
    let id = Matrix2::identity();
    (id * cosh + (m - id * half_tr) * sinhc) * half_tr.exp()
}

/// Independent dense exponential: scale until the largest entry is ≤ 1/4,
/// sum the Taylor series to degree 16, square back up.
fn exp_scaling_squaring(m: &Matrix2<Complex64>) -> Matrix2<Complex64> {
    let biggest = m.iter().map(|e| e.norm()).fold(0.0f64, f64::max);
    let mut squarings = 0i32;
    while biggest * 0.5f64.powi(squarings) > 0.25 {
        squarings += 1;
    }
    let scaled = m.map(|e| e * 0.5f64.powi(squarings));
    let mut sum = Matrix2::<Complex64>::identity();
    let mut term = Matrix2::<Complex64>::identity();
    for j in 1..=16u32 {
        term = (term * scaled).map(|e| e * (1.0 / f64::from(j)));
        sum += term;
    }
    let mut out = sum;
    for _ in 0..squarings {
        out = out * out;
    }
    out
}

#[test]
fn criterion_8_propagation_matches_generic_exponential() {
    let mut rng = StdRng::seed_from_u64(9008);
    let mut worst = 0.0f64;
    let mut worst_cross = 0.0f64;
    for _ in 0..1000 {
        let weight: f64 = rng.gen_range(0.0..10.0);
        let phi: f64 = rng.gen_range(-10.0..10.0);
        let z = loop {
            let cand = Complex64::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            if cand.norm() <= 5.0 {
                break cand;
            }
        };
        let u = loop {
            let cand = Vector2::new(
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            );
            let norm = (cand[0].norm_sqr() + cand[1].norm_sqr()).sqrt();
            if norm > 0.1 {
                break cand.map(|e| e / norm);
            }
        };
        let (s, c) = phi.sin_cos();
        let jp = Matrix2::new(-c * s, -s * s, c * c, c * s);
        let generator = jp.map(|e| -z * weight * e);
        let direct = propagate_singular(u, weight, phi, z);
        let via_exp = exp_closed_form(&generator) * u;
        worst = worst.max((direct - via_exp).norm());
        let cross = (exp_scaling_squaring(&generator) - exp_closed_form(&generator))
            .iter()
            .map(|e| e.norm())
            .fold(0.0f64, f64::max);
        worst_cross = worst_cross.max(cross);
    }
    report(
        8,
        "terminating propagator matches generic exponential",
        worst <= 1e-12 && worst_cross <= 1e-10,
        &format!(
            "max |propagated - exp·u| = {worst:.3e} over 1000 samples; oracle cross-check max entry gap {worst_cross:.3e}"
        ),
    );
}
