use thiserror::Error;

/// Every failure the library can report. Variants map one-to-one to the error
/// kinds surfaced in analysis reports (see [`Error::kind`]).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("normalization error: {0}")]
    Normalization(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unsupported level: {0}")]
    UnsupportedLevel(String),
    #[error("no formal solution: {0}")]
    NoFormalSolution(String),
    #[error("multiple roots unsupported: {0}")]
    MultipleRoot(String),
    #[error("polygon shape unsupported: {0}")]
    Shape(String),
    #[error("resonance at index {index}: {detail}")]
    Resonance { index: usize, detail: String },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("degenerate Pade table at (L, M) = ({l}, {m}); try different orders")]
    DegeneratePade { l: usize, m: usize },
    #[error("integration ray passes within {distance:.3e} of the pole {pole}")]
    RayHitsPole { pole: String, distance: f64 },
    #[error("Laplace integral does not converge: {0}")]
    NonConvergent(String),
    #[error("divergent domain: {0}")]
    DivergentDomain(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("quadrature failure: {0}")]
    Quadrature(String),
    #[error("root finding failed: {0}")]
    RootFinding(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Normalization(_) => "normalization",
            Error::Domain(_) => "domain",
            Error::Unsupported(_) => "unsupported",
            Error::UnsupportedLevel(_) => "unsupported-level",
            Error::NoFormalSolution(_) => "no-formal-solution",
            Error::MultipleRoot(_) => "multiple-root-unsupported",
            Error::Shape(_) => "shape",
            Error::Resonance { .. } => "resonance",
            Error::InsufficientData(_) => "insufficient-data",
            Error::DegeneratePade { .. } => "degenerate-table",
            Error::RayHitsPole { .. } => "ray-hits-pole",
            Error::NonConvergent(_) => "nonconvergent",
            Error::DivergentDomain(_) => "divergent-domain",
            Error::Degenerate(_) => "degenerate",
            Error::Quadrature(_) => "quadrature",
            Error::RootFinding(_) => "root-finding",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
