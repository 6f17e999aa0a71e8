//! The `verify` subcommand: a seeded built-in check suite (no inputs), or an
//! invariant battery per input file. Prints one line per check; any failure
//! exits 3 with the failed checks named.

use std::path::{Path, PathBuf};

use num_complex::Complex64;

use spectral_cs::canonical::StepPhase;
use spectral_cs::operator::{fundamental_solutions, JacobiCoefficients};
use spectral_cs::transform::{
    canonical_to_jacobi, ds_constraint_residual, ds_to_schrodinger, jacobi_to_canonical,
};
use spectral_cs::weak_star::{certificate_example_phase, nondensity_certificate};
use spectral_cs::weyl::{
    herglotz_check, m_canonical, m_grid_canonical, m_grid_jacobi, m_jacobi,
};

use crate::{fmt_f64, parse_coefficients, parse_phase, Failure};

struct CheckLog {
    failures: Vec<String>,
}

impl CheckLog {
    fn new() -> Self {
        CheckLog {
            failures: Vec::new(),
        }
    }

    fn record(&mut self, name: &str, pass: bool, detail: &str) {
        println!("check {name}: {} — {detail}", if pass { "ok" } else { "FAIL" });
        if !pass {
            self.failures.push(name.to_string());
        }
    }

    fn note(&self, name: &str, detail: &str) {
        let _ = self;
        println!("check {name}: note — {detail}");
    }

    fn finish(self, what: &str) -> Result<(), Failure> {
        if self.failures.is_empty() {
            Ok(())
        } else {
            Err(Failure::checks(format!(
                "{what}: failed checks: {}",
                self.failures.join(", ")
            )))
        }
    }
}

/// Small deterministic linear-congruential stream: the verify corpus must be
/// identical across platforms and runs without pulling in an RNG crate here.
struct SeededStream(u64);

impl SeededStream {
    fn next_unit(&mut self) -> f64 {
        // Numerical Recipes LCG constants; top 53 bits → [0, 1).
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_unit()
    }
}

fn seeded_corpus(seed: u64, count: usize, n: usize) -> Vec<JacobiCoefficients> {
    let mut stream = SeededStream(seed);
    (0..count)
        .map(|_| {
            let mut a = vec![-1.0];
            a.extend((0..n).map(|_| stream.in_range(-1.25, -0.8)));
            let b = (0..n).map(|_| stream.in_range(-0.5, 0.5)).collect();
            JacobiCoefficients::new(a, b, 3.0).expect("seeded draw is valid")
        })
        .collect()
}

fn seeded_potentials(seed: u64, count: usize, n: usize) -> Vec<Vec<f64>> {
    let mut stream = SeededStream(seed);
    (0..count)
        .map(|_| (0..n).map(|_| stream.in_range(-2.0, 2.0)).collect())
        .collect()
}

fn mini_grid() -> Vec<Complex64> {
    [-2.0, 0.0, 2.0]
        .iter()
        .flat_map(|&x| [1.0, 4.0].iter().map(move |&y| Complex64::new(x, y)))
        .collect()
}

const GOLDEN_INVERSE: f64 = 0.618_033_988_749_894_9;

fn builtin_suite(tol: f64) -> Result<(), Failure> {
    let mut log = CheckLog::new();
    let corpus = seeded_corpus(1301, 20, 30);

    let mut worst = 0.0f64;
    for coeffs in &corpus {
        let sol = fundamental_solutions(coeffs);
        for n in 0..=coeffs.truncation() {
            worst = worst.max((coeffs.a(n) * sol.wronskian(n) + 1.0).abs());
        }
    }
    log.record(
        "wronskian",
        worst <= tol,
        &format!("max |a_n W_n + 1| = {worst:.3e} (tol {tol:.1e})"),
    );

    let mut worst = 0.0f64;
    let mut phases = Vec::new();
    for coeffs in &corpus {
        let phase = jacobi_to_canonical(coeffs).map_err(Failure::from)?;
        let back = canonical_to_jacobi(&phase).map_err(Failure::from)?;
        for n in 0..=coeffs.truncation() {
            worst = worst.max((back.a(n) - coeffs.a(n)).abs());
        }
        for n in 1..=coeffs.truncation() {
            worst = worst.max((back.b(n) - coeffs.b(n)).abs());
        }
        phases.push(phase);
    }
    log.record(
        "roundtrip",
        worst <= tol,
        &format!("max coefficient error {worst:.3e} (tol {tol:.1e})"),
    );

    let normalized = phases
        .iter()
        .all(|p| p.validate_jacobi_normalized().is_ok());
    log.record(
        "normalization",
        normalized,
        "transformed phases start with interval (0, 1) at angle \u{3c0}/2",
    );

    let mut worst_res = 0.0f64;
    let mut worst_rec = 0.0f64;
    for b in seeded_potentials(1302, 20, 30) {
        let coeffs = JacobiCoefficients::from_potential(b.clone()).map_err(Failure::from)?;
        let phase = jacobi_to_canonical(&coeffs).map_err(Failure::from)?;
        for n in 1..phase.len() {
            worst_res = worst_res.max(
                ds_constraint_residual(&phase, n)
                    .map_err(Failure::from)?
                    .abs(),
            );
        }
        let recovered = ds_to_schrodinger(&phase, tol.max(1e-12)).map_err(Failure::from)?;
        for (got, want) in recovered.iter().zip(&b) {
            worst_rec = worst_rec.max((got - want).abs());
        }
    }
    log.record(
        "classification",
        worst_res <= tol && worst_rec <= tol,
        &format!("max step residual {worst_res:.3e}, max recovered-potential error {worst_rec:.3e}"),
    );

    let zs = mini_grid();
    let mut worst = 0.0f64;
    for coeffs in corpus.iter().take(4) {
        let phase = jacobi_to_canonical(&coeffs.extended(400)).map_err(Failure::from)?;
        for &z in &zs {
            let a = m_jacobi(coeffs, z, 400).map_err(Failure::from)?;
            let b = m_canonical(&phase, z, 400).map_err(Failure::from)?;
            worst = worst.max((a - b).norm());
        }
    }
    log.record(
        "m-agreement",
        worst <= tol,
        &format!("max evaluator difference {worst:.3e} over {} points", zs.len()),
    );

    let mut min_im = f64::INFINITY;
    let mut worst_tail = 0.0f64;
    for coeffs in corpus.iter().take(4) {
        let grid = m_grid_jacobi(coeffs, &zs, 400).map_err(Failure::from)?;
        let report = herglotz_check(&grid);
        min_im = min_im.min(report.min_im);
        worst_tail = worst_tail.max(grid.tail_delta());
    }
    log.record(
        "herglotz",
        min_im > 0.0 && worst_tail <= tol,
        &format!("min Im m = {min_im:.3e}, max tail movement {worst_tail:.3e}"),
    );

    let free = JacobiCoefficients::free_schrodinger(40);
    let m = m_jacobi(&free, Complex64::new(0.0, 1.0), 600).map_err(Failure::from)?;
    let gap = (m - Complex64::new(0.0, GOLDEN_INVERSE)).norm();
    log.record(
        "anchor",
        gap <= tol,
        &format!("|m(i) - {GOLDEN_INVERSE}i| = {gap:.3e}"),
    );

    // Finite-height reading of a y → ∞ statement: the scale here is the
    // asymptotic remainder at y = 1e4, not the identity tolerance.
    let tall = m_jacobi(&corpus[0], Complex64::new(0.0, 1e4), 400).map_err(Failure::from)?;
    let re_gap = tall.re.abs();
    let mass_gap = (1e4 * tall.im - 1.0).abs();
    log.record(
        "asymptotics",
        re_gap <= 1e-3 && mass_gap <= 1e-3,
        &format!("|Re m(10^4 i)| = {re_gap:.3e}, |10^4 Im m - 1| = {mass_gap:.3e} (fixed scale 1e-3)"),
    );

    let cert = nondensity_certificate(&certificate_example_phase(), 200).map_err(Failure::from)?;
    log.record(
        "certificate",
        cert.infimum >= 0.12 && cert.alternate_infimum >= 0.24,
        &format!(
            "weighted infimum {} / unnormalized {} at resolution 200",
            fmt_f64(cert.infimum),
            fmt_f64(cert.alternate_infimum)
        ),
    );

    log.finish("built-in suite")
}

enum ParsedInput {
    Coefficients(JacobiCoefficients),
    Phase(StepPhase),
}

fn parse_any(path: &Path) -> Result<ParsedInput, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::io(&format!("reading {}", path.display()), &e))?;
    match parse_coefficients(&text) {
        Ok(coeffs) => Ok(ParsedInput::Coefficients(coeffs)),
        Err(coeff_err) => match parse_phase(&text) {
            Ok(phase) => Ok(ParsedInput::Phase(phase)),
            Err(phase_err) => Err(Failure::parse(format!(
                "{} is neither coefficient nor phase JSON ({}; {})",
                path.display(),
                coeff_err.message,
                phase_err.message
            ))),
        },
    }
}

fn coefficient_battery(log: &mut CheckLog, coeffs: &JacobiCoefficients, tol: f64) {
    let sol = fundamental_solutions(coeffs);
    // The identity's floating floor scales with the bilinear terms, so wild
    // inputs are judged against their own cancellation magnitude.
    let mut worst_ratio = 0.0f64;
    for n in 0..=coeffs.truncation() {
        let scale = coeffs.a(n).abs()
            * (sol.c(n) * sol.s(n + 1)).abs().max((sol.c(n + 1) * sol.s(n)).abs())
            * 1e-13;
        let allowed = tol.max(scale);
        worst_ratio = worst_ratio.max((coeffs.a(n) * sol.wronskian(n) + 1.0).abs() / allowed);
    }
    log.record(
        "wronskian",
        worst_ratio <= 1.0,
        &format!("worst residual at {worst_ratio:.3} of the scale-aware allowance"),
    );

    match jacobi_to_canonical(coeffs) {
        Err(e) => log.record("transform", false, &e.to_string()),
        Ok(phase) => {
            log.record(
                "transform",
                phase.validate_jacobi_normalized().is_ok(),
                &format!("phase has {} steps, first interval (0, 1)", phase.len()),
            );
            match canonical_to_jacobi(&phase) {
                Err(e) => log.record("roundtrip", false, &e.to_string()),
                Ok(back) => {
                    let mut worst = 0.0f64;
                    for n in 0..=coeffs.truncation() {
                        worst = worst.max((back.a(n) - coeffs.a(n)).abs());
                    }
                    for n in 1..=coeffs.truncation() {
                        worst = worst.max((back.b(n) - coeffs.b(n)).abs());
                    }
                    log.record(
                        "roundtrip",
                        worst <= tol,
                        &format!("max coefficient error {worst:.3e} (tol {tol:.1e})"),
                    );
                }
            }
        }
    }

    match m_grid_jacobi(coeffs, &mini_grid(), 300) {
        Err(e) => log.record("herglotz", false, &e.to_string()),
        Ok(grid) => {
            let report = herglotz_check(&grid);
            log.record(
                "herglotz",
                report.pass,
                &format!(
                    "min Im m = {:.3e}; tail movement {:.3e}",
                    report.min_im,
                    grid.tail_delta()
                ),
            );
        }
    }
}

fn phase_battery(log: &mut CheckLog, phase: &StepPhase, tol: f64) {
    log.record("admissible", true, &format!("{} steps, total length {}", phase.len(), fmt_f64(phase.breakpoint(phase.len()))));

    match phase.validate_jacobi_normalized() {
        Err(e) => log.note("normalization", &format!("{e}; conversion checks skipped")),
        Ok(()) => match canonical_to_jacobi(phase) {
            Err(e) => log.record("roundtrip", false, &e.to_string()),
            Ok(coeffs) => match jacobi_to_canonical(&coeffs) {
                Err(e) => log.record("roundtrip", false, &e.to_string()),
                Ok(again) => {
                    let mut worst = 0.0f64;
                    for n in 1..=phase.len() {
                        let rel = 1.0 + phase.breakpoint(n).abs();
                        worst = worst
                            .max((again.breakpoint(n) - phase.breakpoint(n)).abs() / rel)
                            .max((again.phi(n) - phase.phi(n)).abs());
                    }
                    log.record(
                        "roundtrip",
                        worst <= tol,
                        &format!("max breakpoint/angle error {worst:.3e} (tol {tol:.1e})"),
                    );
                }
            },
        },
    }

    if phase.len() >= 2 {
        let mut worst = 0.0f64;
        for n in 1..phase.len() {
            if let Ok(residual) = ds_constraint_residual(phase, n) {
                worst = worst.max(residual.abs());
            }
        }
        log.note(
            "step-structure",
            &format!(
                "max unit-off-diagonal residual {worst:.3e} ({})",
                if worst <= tol {
                    "free-coefficient class within tol"
                } else {
                    "general coefficients"
                }
            ),
        );

        match m_grid_canonical(phase, &mini_grid(), phase.len() - 1) {
            Err(e) => log.record("herglotz", false, &e.to_string()),
            Ok(grid) => {
                let report = herglotz_check(&grid);
                log.record(
                    "herglotz",
                    report.pass,
                    &format!(
                        "min Im m = {:.3e} at depth {}",
                        report.min_im,
                        grid.truncation()
                    ),
                );
            }
        }
    } else {
        log.note("herglotz", "single-interval phase; no interior depth to evaluate at");
    }
}

pub fn cmd_verify(tol: f64, inputs: &[PathBuf]) -> Result<(), Failure> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Failure::parse(format!(
            "--tol must be a positive finite number, got {tol}"
        )));
    }
    if inputs.is_empty() {
        return builtin_suite(tol);
    }
    let mut log = CheckLog::new();
    for path in inputs {
        println!("— {}", path.display());
        match parse_any(path)? {
            ParsedInput::Coefficients(coeffs) => coefficient_battery(&mut log, &coeffs, tol),
            ParsedInput::Phase(phase) => phase_battery(&mut log, &phase, tol),
        }
    }
    log.finish("input batteries")
}
