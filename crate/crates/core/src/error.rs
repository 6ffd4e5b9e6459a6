use thiserror::Error;

/// Errors produced by the sampling, allocation and estimation routines.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// A direction-number or model file could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Input parsed but violates a structural constraint.
    #[error("validation error: {0}")]
    Validation(String),

    /// More dimensions were requested than the loaded table provides.
    #[error("capacity error: requested {requested} dimensions, {available} available")]
    Capacity { requested: usize, available: usize },

    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// No allocation satisfies the constraints (e.g. fewer samples than strata).
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// The request is valid in principle but exceeds what is computed exactly.
    #[error("unsupported size: {0}")]
    Capability(String),

    /// A caller-side contract (ordering, stratification) was not met.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A numerical evaluation produced a non-finite or undefined value.
    #[error("numerical failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
