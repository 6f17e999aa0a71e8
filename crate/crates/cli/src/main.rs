//! Command-line frontend: conversions between coefficient and phase JSON,
//! m-function grids as CSV, invariant verification, and non-density
//! certificates.
//!
//! Exit codes: 0 success, 1 I/O, 2 parse/usage, 3 violated invariant,
//! 4 inapplicable certificate, 5 numerical failure. Identical inputs and
//! flags produce byte-identical outputs.

mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use spectral_cs::canonical::{StepPhase, StepPhaseRaw};
use spectral_cs::operator::{JacobiCoefficients, JacobiCoefficientsRaw};
use spectral_cs::transform::{canonical_to_jacobi, jacobi_to_canonical};
use spectral_cs::weak_star::{certificate_example_phase, nondensity_certificate_with, PairingConvention};
use spectral_cs::weyl::{default_grid, herglotz_check, m_grid_canonical, m_grid_jacobi, MGrid};
use spectral_cs::SpectralError;

#[derive(Parser)]
#[command(
    name = "spectral-cs",
    version,
    about = "Jacobi coefficients, step-phase canonical systems, m-functions, and weak-* certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert coefficient JSON to phase JSON or back.
    Convert {
        /// Target representation.
        #[arg(long, value_enum)]
        to: Target,
        /// Input JSON file.
        input: PathBuf,
        /// Output path (stdout when omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate the Weyl m-function over an upper-half-plane grid, as CSV.
    Mfunc {
        /// Which evaluator (and input schema) to use.
        #[arg(long, value_enum)]
        source: Source,
        /// Grid as "x0:x1:dx,y0:y1:dy" (built-in grid when omitted).
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Truncation depth (clamped to the phase length for --source canonical).
        #[arg(short = 'N', default_value_t = 500)]
        n: usize,
        /// Input JSON file.
        input: PathBuf,
        /// Output path (stdout when omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run invariant checks: the built-in seeded suite, or batteries over files.
    Verify {
        /// Absolute tolerance for the exact identities.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// JSON files (coefficients or phases) to check; none runs the built-in suite.
        inputs: Vec<PathBuf>,
    },
    /// Sweep the one-parameter comparison family and certify a positive weak-* gap.
    Certify {
        /// Use the built-in worked example phase instead of an input file.
        #[arg(long = "paper-example", conflicts_with = "input")]
        paper_example: bool,
        /// Phase JSON input.
        input: Option<PathBuf>,
        /// Number of sweep samples.
        #[arg(long, default_value_t = 10_000)]
        resolution: usize,
        /// Pairing convention reported as primary.
        #[arg(long, value_enum, default_value_t = Convention::Weighted)]
        convention: Convention,
        /// JSON output path; the sweep curve lands next to it as `<stem>.curve.csv`.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum Target {
    Canonical,
    Jacobi,
}

#[derive(Copy, Clone, ValueEnum)]
enum Source {
    Jacobi,
    Canonical,
}

#[derive(Copy, Clone, ValueEnum)]
enum Convention {
    Weighted,
    Unnormalized,
}

impl From<Convention> for PairingConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Weighted => PairingConvention::Weighted,
            Convention::Unnormalized => PairingConvention::Unnormalized,
        }
    }
}

/// A failed run: exit code plus the message for stderr.
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn io(context: &str, err: &std::io::Error) -> Self {
        Failure {
            code: 1,
            message: format!("{context}: {err}"),
        }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    pub fn checks(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Failure {
            code: 5,
            message: message.into(),
        }
    }
}

impl From<SpectralError> for Failure {
    fn from(err: SpectralError) -> Self {
        let code = match err {
            SpectralError::CertificateInapplicable(_) => 4,
            SpectralError::Numerical(_) => 5,
            _ => 3,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(failure) = configure_threads().and_then(|()| run(cli)) {
        eprintln!("spectral-cs: {}", failure.message);
        return ExitCode::from(failure.code);
    }
    ExitCode::SUCCESS
}

/// SPECTRAL_CS_THREADS caps the worker pool; unset means the rayon default.
fn configure_threads() -> Result<(), Failure> {
    match std::env::var("SPECTRAL_CS_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => {
            let threads: usize = raw
                .trim()
                .parse()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| {
                    Failure::parse(format!(
                        "SPECTRAL_CS_THREADS must be a positive integer, got '{raw}'"
                    ))
                })?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global()
                .ok();
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Convert { to, input, output } => cmd_convert(to, &input, output.as_deref()),
        Command::Mfunc {
            source,
            grid,
            n,
            input,
            output,
        } => cmd_mfunc(source, grid.as_deref(), n, &input, output.as_deref()),
        Command::Verify { tol, inputs } => verify::cmd_verify(tol, &inputs),
        Command::Certify {
            paper_example,
            input,
            resolution,
            convention,
            output,
        } => cmd_certify(
            paper_example,
            input.as_deref(),
            resolution,
            convention.into(),
            output.as_deref(),
        ),
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::io(&format!("reading {}", path.display()), &e))
}

fn write_output(path: Option<&Path>, content: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| Failure::io(&format!("writing {}", p.display()), &e)),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

pub fn parse_coefficients(text: &str) -> Result<JacobiCoefficients, Failure> {
    let raw: JacobiCoefficientsRaw = serde_json::from_str(text)
        .map_err(|e| Failure::parse(format!("coefficient JSON: {e}")))?;
    Ok(JacobiCoefficients::try_from(raw)?)
}

pub fn parse_phase(text: &str) -> Result<StepPhase, Failure> {
    let raw: StepPhaseRaw =
        serde_json::from_str(text).map_err(|e| Failure::parse(format!("phase JSON: {e}")))?;
    Ok(StepPhase::try_from(raw)?)
}

/// Decimal text that parses back to the identical f64, with -0 folded to 0.
pub fn fmt_f64(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v}")
}

fn to_pretty_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::parse(format!("serializing output: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn cmd_convert(to: Target, input: &Path, output: Option<&Path>) -> Result<(), Failure> {
    let text = read_text(input)?;
    let rendered = match to {
        Target::Canonical => {
            let coeffs = parse_coefficients(&text)?;
            let phase = jacobi_to_canonical(&coeffs)?;
            to_pretty_json(&StepPhaseRaw::from(&phase))?
        }
        Target::Jacobi => {
            let phase = parse_phase(&text)?;
            let coeffs = canonical_to_jacobi(&phase)?;
            to_pretty_json(&JacobiCoefficientsRaw::from(&coeffs))?
        }
    };
    write_output(output, &rendered)
}

/// "x0:x1:dx,y0:y1:dy" → points row by row in y, then x, matching the
/// built-in grid's ordering.
fn parse_grid(spec: &str) -> Result<Vec<Complex64>, Failure> {
    let (x_part, y_part) = spec.split_once(',').ok_or_else(|| {
        Failure::parse(format!("grid spec '{spec}' must be 'x0:x1:dx,y0:y1:dy'"))
    })?;
    let xs = parse_axis(x_part, "x")?;
    let ys = parse_axis(y_part, "y")?;
    if let Some(bad) = ys.iter().find(|&&y| y <= 0.0) {
        return Err(Failure::parse(format!(
            "grid ordinate {bad} is not in the open upper half-plane"
        )));
    }
    let mut points = Vec::with_capacity(xs.len() * ys.len());
    for &y in &ys {
        for &x in &xs {
            points.push(Complex64::new(x, y));
        }
    }
    if points.is_empty() {
        return Err(Failure::parse("grid spec produces no points"));
    }
    Ok(points)
}

fn parse_axis(part: &str, axis: &str) -> Result<Vec<f64>, Failure> {
    let fields: Vec<&str> = part.split(':').collect();
    let [lo, hi, step] = fields[..] else {
        return Err(Failure::parse(format!(
            "{axis}-axis '{part}' must be 'start:stop:step'"
        )));
    };
    let parse = |s: &str| -> Result<f64, Failure> {
        s.trim()
            .parse::<f64>()
            .map_err(|e| Failure::parse(format!("{axis}-axis value '{s}': {e}")))
    };
    let (lo, hi, step) = (parse(lo)?, parse(hi)?, parse(step)?);
    if !(lo.is_finite() && hi.is_finite() && step.is_finite() && step > 0.0) {
        return Err(Failure::parse(format!(
            "{axis}-axis needs finite bounds and a positive step, got {lo}:{hi}:{step}"
        )));
    }
    if hi < lo {
        return Err(Failure::parse(format!(
            "{axis}-axis is empty: {hi} < {lo}"
        )));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| lo + step * k as f64).collect())
}

fn render_m_csv(grid: &MGrid, source: &str) -> String {
    let mut out = String::from("re_z,im_z,re_m,im_m,N,source\n");
    for point in grid.points() {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_f64(point.z.re),
            fmt_f64(point.z.im),
            fmt_f64(point.m.re),
            fmt_f64(point.m.im),
            grid.truncation(),
            source,
        ));
    }
    let report = herglotz_check(grid);
    out.push_str(&format!(
        "# herglotz: {}; min_im={}; at_re={}; at_im={}; tail_delta={}\n",
        if report.pass { "pass" } else { "FAIL" },
        fmt_f64(report.min_im),
        fmt_f64(report.at.re),
        fmt_f64(report.at.im),
        fmt_f64(grid.tail_delta()),
    ));
    out
}

fn cmd_mfunc(
    source: Source,
    grid_spec: Option<&str>,
    n: usize,
    input: &Path,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let zs = match grid_spec {
        Some(spec) => parse_grid(spec)?,
        None => default_grid(),
    };
    let text = read_text(input)?;
    let (grid, label) = match source {
        Source::Jacobi => {
            let coeffs = parse_coefficients(&text)?;
            (m_grid_jacobi(&coeffs, &zs, n)?, "jacobi")
        }
        Source::Canonical => {
            let phase = parse_phase(&text)?;
            let depth = n.min(phase.len().saturating_sub(1)).max(1);
            (m_grid_canonical(&phase, &zs, depth)?, "canonical")
        }
    };
    let rendered = render_m_csv(&grid, label);
    write_output(output, &rendered)?;
    let report = herglotz_check(&grid);
    if !report.pass {
        return Err(Failure::numerical(format!(
            "Herglotz check failed: Im m = {} at z = {} + {}i",
            report.min_im, report.at.re, report.at.im
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct AlternateOut {
    convention: &'static str,
    infimum: f64,
    argmin_psi: f64,
}

#[derive(Serialize)]
struct CertificateOut {
    infimum: f64,
    argmin_psi: f64,
    resolution: usize,
    convention: &'static str,
    alternate: AlternateOut,
}

fn cmd_certify(
    paper_example: bool,
    input: Option<&Path>,
    resolution: usize,
    convention: PairingConvention,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let phase = match (paper_example, input) {
        (true, _) => certificate_example_phase(),
        (false, Some(path)) => parse_phase(&read_text(path)?)?,
        (false, None) => {
            return Err(Failure::parse(
                "provide a phase JSON file or --paper-example",
            ));
        }
    };
    let cert = nondensity_certificate_with(&phase, resolution, convention)?;
    let summary = CertificateOut {
        infimum: cert.infimum,
        argmin_psi: cert.argmin_psi,
        resolution: cert.resolution,
        convention: cert.convention.as_str(),
        alternate: AlternateOut {
            convention: cert.convention.other().as_str(),
            infimum: cert.alternate_infimum,
            argmin_psi: cert.alternate_argmin_psi,
        },
    };
    write_output(output, &to_pretty_json(&summary)?)?;
    if let Some(json_path) = output {
        let mut curve = String::from("psi,discrepancy\n");
        for &(psi, value) in cert.curve() {
            curve.push_str(&format!("{},{}\n", fmt_f64(psi), fmt_f64(value)));
        }
        let curve_path = json_path.with_extension("curve.csv");
        std::fs::write(&curve_path, curve)
            .map_err(|e| Failure::io(&format!("writing {}", curve_path.display()), &e))?;
    }
    Ok(())
}
