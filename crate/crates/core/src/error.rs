use std::io;

use thiserror::Error;

use crate::solver::SolverError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cell {cell} is degenerate (signed area {area:e})")]
    DegenerateCell { cell: usize, area: f64 },

    #[error("no quadrature rule for degree {0} (supported: 1..=12)")]
    UnsupportedQuadrature(usize),

    #[error("unsupported finite element pair: {0}")]
    UnsupportedSpace(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),

    #[error("an analytic solution is required for {0}")]
    MissingExactSolution(&'static str),

    #[error("effectivity undefined: the error norm is zero")]
    ZeroErrorNorm,

    #[error(transparent)]
    Solver(#[from] SolverError),

    #[error("Picard iteration did not converge in {iterations} iterations (last residual {last:e})")]
    PicardNotConverged {
        iterations: usize,
        last: f64,
        history: Vec<f64>,
    },

    #[error("adaptive level {level}: {source}")]
    AtLevel {
        level: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
