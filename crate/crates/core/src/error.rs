use thiserror::Error;

/// Errors raised by the numerical routines and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of the gamma function at x = {0}")]
    Pole(f64),

    #[error("domain error in {function}: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },

    #[error("{function} did not reach the requested tolerance ({detail})")]
    NonConvergence {
        function: &'static str,
        detail: String,
    },

    #[error("{function} overflows for the given arguments ({detail})")]
    Overflow {
        function: &'static str,
        detail: String,
    },

    #[error("length mismatch in {context}: expected {expected}, got {got}")]
    LengthMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("kernel is not integrable at the origin (exponent {exponent} >= 1)")]
    NonIntegrableKernel { exponent: f64 },

    #[error("singular pivot in row {row}")]
    SingularPivot { row: usize },

    #[error("coefficient `{name}` evaluated to {value} at x = {x}, y = {y}, t = {t}")]
    Coefficient {
        name: &'static str,
        x: f64,
        y: f64,
        t: f64,
        value: f64,
    },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("time level {level}: {source}")]
    Level {
        level: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }

    pub(crate) fn at_level(self, level: usize) -> Self {
        match self {
            e @ Error::Level { .. } => e,
            e => Error::Level {
                level,
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
