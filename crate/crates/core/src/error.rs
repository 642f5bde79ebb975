use thiserror::Error;

use crate::model::Violation;
use crate::rational::{ArithmeticError, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),

    #[error("prefix length {requested} is out of range 1..={len}")]
    PrefixOutOfRange { requested: usize, len: usize },

    #[error("job index {index} is out of range for {len} jobs")]
    JobIndexOutOfRange { index: usize, len: usize },

    #[error("job {job}: no eligible processor")]
    NoEligibleProcessor { job: usize },

    #[error("invalid instance: {}", join(.0))]
    InvalidInstance(Vec<Violation>),

    #[error("quantum must be positive, got {0}")]
    NonPositiveQuantum(Rational),

    #[error("unattainable generator configuration: {0}")]
    UnattainableConfig(String),
}

fn join(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
