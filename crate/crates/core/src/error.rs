use thiserror::Error;

use crate::lp::LpStatus;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("atom {atom} has negative measure {value}; not realizable by uncoded subsets")]
    NotSubsetFeasible { atom: String, value: f64 },

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("flow is unbounded: an s-t path uses only uncapacitated edges")]
    UnboundedFlow,

    #[error("linear program is {0}")]
    NotOptimal(LpStatus),

    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error("exact solve refused: {variables} variables exceeds cap of {cap}")]
    TooLarge { variables: usize, cap: usize },

    #[error("infeasible input: {0}")]
    InfeasibleInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
