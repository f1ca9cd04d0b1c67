use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite {what} at x = {x:?}, second argument = {arg:?}")]
    Evaluation {
        what: &'static str,
        x: Vec<f64>,
        arg: Vec<f64>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed problem: {0}")]
    MalformedProblem(String),

    #[error(
        "regularization with delta = {delta:e} failed certification: sup error {measured:e} \
         at x = {x:?}, lambda = {lambda:?}"
    )]
    RegularizationInvalid {
        delta: f64,
        measured: f64,
        x: Vec<f64>,
        lambda: Vec<f64>,
    },

    #[error("forward-backward sweeps did not converge after {sweeps} sweeps (last change {last:e})")]
    NonConvergence {
        sweeps: usize,
        last: f64,
        history: Vec<f64>,
    },

    #[error("optimization failed for all {} starts: {}", .details.len(), .details.join("; "))]
    OptimizationFailed { details: Vec<String> },

    #[error("multiplier extraction inconsistent: stationarity violated by {violation:e} at step {step}")]
    ExtractionInconsistent { violation: f64, step: usize },

    #[error("brute force needs {required:e} evaluations, budget is {budget:e}")]
    BudgetExceeded { required: f64, budget: f64 },

    #[error("query {point:?} at t = {t} is outside the region covered by the grid")]
    Domain { point: Vec<f64>, t: f64 },

    #[error("unknown problem id `{0}`")]
    NotFound(String),

    #[error("oracle unavailable: {0}")]
    OracleUnavailable(String),

    #[error("i/o error at {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error at {}: {source}", .path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
