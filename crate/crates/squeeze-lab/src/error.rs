use thiserror::Error;

/// Errors produced by construction, propagation, spectral analysis, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidSpec(String),

    #[error("Kerr order {0} is not supported (only 2 and 4)")]
    KerrOrder(u32),

    #[error("operation requires a Kerr term but the spec has none")]
    MissingKerr,

    #[error("state norm deviates from 1 by {deviation:.3e} (limit {limit:.1e})")]
    NormDeviation { deviation: f64, limit: f64 },

    #[error(
        "Chebyshev expansion needs {required} terms per step (cap {cap}); \
         reduce dr or use the spectral method"
    )]
    ChebyshevSeriesTooLong { required: usize, cap: usize },

    #[error(
        "powering refused at dim {dim}: dense one-step propagators cost O(dim^3) \
         and are capped at dim {max}; use the spectral method instead"
    )]
    PoweringRefused { dim: usize, max: usize },

    #[error("eigensolver failed to converge at index {index}")]
    EigenConvergence { index: usize },

    #[error("spectrum has no eigenvalue above the zero threshold")]
    NoPositiveEigenvalue,

    #[error("eigenvectors were not requested for this spectrum")]
    VectorsAbsent,

    #[error("power-law fit needs at least {need} points, got {got}")]
    FitTooFewPoints { got: usize, need: usize },

    #[error("no regulated/unregulated flip in the sweep; verdicts: {verdicts}")]
    NoThresholdFlip { verdicts: String },

    #[error("strength {strength} is not regulated at dim {dim} (cross-dim distance {distance:.3e})")]
    StrengthNotRegulated {
        strength: f64,
        dim: usize,
        distance: f64,
    },

    #[error("unknown figure id {0:?} (expected fig1..fig9)")]
    UnknownFigure(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path} line {line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
}

impl Error {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
