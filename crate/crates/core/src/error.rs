use num_complex::Complex64;

/// Errors surfaced by constructors and operations across the crate.
///
/// `Invariant` carries a stable machine-readable name so callers (the CLI in
/// particular) can report *which* structural requirement failed without
/// parsing prose.
#[derive(Debug, thiserror::Error)]
pub enum SpectralError {
    #[error("index {index} out of range for {what} (limit {limit})")]
    OutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("invariant `{name}` violated: {detail}")]
    Invariant { name: &'static str, detail: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("spectral parameter must lie in the open upper half-plane, got {z}")]
    UpperHalfPlane { z: Complex64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "not a discrete Schrödinger system: step {index} has constraint residual {residual:e} \
         (tolerance {tol:e})"
    )]
    NotSchrodinger {
        index: usize,
        residual: f64,
        tol: f64,
    },

    #[error("certificate inapplicable: {0}")]
    CertificateInapplicable(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl SpectralError {
    pub(crate) fn invariant(name: &'static str, detail: impl Into<String>) -> Self {
        SpectralError::Invariant {
            name,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, SpectralError>;
