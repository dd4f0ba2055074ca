use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} has zero degree")]
    IsolatedVertex { vertex: usize },

    #[error("no connected graph after {attempts} attempts")]
    Connectivity { attempts: usize },

    #[error("graph is disconnected")]
    Disconnected,

    #[error("size error: {0}")]
    Size(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: String, found: String },

    #[error("eigensolver did not converge")]
    Convergence,

    #[error("window geometry: {0}")]
    Geometry(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("degenerate layout: {0}")]
    DegenerateLayout(String),

    #[error("frame of {samples} samples is too short (need at least 2)")]
    FrameTooShort { samples: usize },

    #[error("need at least 2 samples, found {found}")]
    TooFewSamples { found: usize },

    #[error("not defined: {0}")]
    NotDefined(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dimension(expected: impl ToString, found: impl ToString) -> Self {
        Error::Dimension {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    /// Stable name of the error kind, used in diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::IsolatedVertex { .. } => "IsolatedVertexError",
            Error::Connectivity { .. } => "ConnectivityError",
            Error::Disconnected => "DisconnectedGraphError",
            Error::Size(_) => "SizeError",
            Error::Dimension { .. } => "DimensionError",
            Error::Convergence => "ConvergenceError",
            Error::Geometry(_) => "GeometryError",
            Error::EmptyInput(_) => "EmptyInputError",
            Error::DegenerateLayout(_) => "DegenerateLayoutError",
            Error::FrameTooShort { .. } => "FrameTooShortError",
            Error::TooFewSamples { .. } => "TooFewSamplesError",
            Error::NotDefined(_) => "NotDefinedError",
            Error::InvalidParameter(_) => "InvalidParameterError",
            Error::Parse(_) => "ParseError",
            Error::Io(_) => "IoError",
        }
    }

    /// True for failures of a numerical procedure rather than of the inputs.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Convergence | Error::Connectivity { .. } | Error::NotDefined(_)
        )
    }
}
