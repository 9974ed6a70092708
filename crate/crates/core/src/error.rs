use thiserror::Error;

/// Errors raised anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("momentum {0} is not on the grid's momentum lattice")]
    OffLattice(f64),

    #[error("cannot keep {requested} modes on a grid with {available}")]
    Truncation { requested: usize, available: usize },

    #[error("invalid drive: {0}")]
    InvalidDrive(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eigensolver did not converge for a matrix of dimension {0}")]
    EigenNonConvergence(usize),

    #[error("branch tracking is ambiguous at parameter {parameter}: best overlap {overlap:.3}")]
    BranchAmbiguity { parameter: f64, overlap: f64 },

    #[error("propagation of negative mode {mode} failed: {source}")]
    Mode {
        mode: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("configuration: {0}")]
    ConfigMissing(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Coarse machine-readable category, used for CLI exit codes.
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Config { .. } | Error::ConfigMissing(_) => ErrorCategory::Config,
            Error::Io(_) => ErrorCategory::Io,
            Error::EigenNonConvergence(_) | Error::BranchAmbiguity { .. } => {
                ErrorCategory::Numerical
            }
            Error::Mode { source, .. } => source.category(),
            _ => ErrorCategory::Input,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Io,
    Numerical,
    Input,
}

impl ErrorCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCategory::Config => "config",
            ErrorCategory::Io => "io",
            ErrorCategory::Numerical => "numerical",
            ErrorCategory::Input => "input",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Config => 2,
            ErrorCategory::Io => 3,
            ErrorCategory::Numerical => 4,
            ErrorCategory::Input => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
