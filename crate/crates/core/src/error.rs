use thiserror::Error;

use crate::system::Violation;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoxError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: unknown generator label `{label}`")]
    UnknownLabel { line: usize, label: String },

    #[error("line {line}: duplicate m declaration for pair ({a}, {b})")]
    DuplicatePair { line: usize, a: String, b: String },

    #[error("invalid Coxeter matrix: {}", format_violations(.0))]
    Invalid(Vec<Violation>),

    #[error("subset mask {mask:#x} has bits outside rank {rank}")]
    SubsetOutOfRange { mask: u32, rank: usize },

    #[error("generator index {index} out of range for rank {rank}")]
    GeneratorOutOfRange { index: usize, rank: usize },

    #[error("unknown generator label `{0}`")]
    UnknownGenerator(String),

    #[error("elements belong to different Coxeter systems")]
    SystemMismatch,

    #[error(
        "numerical ambiguity: root coordinates of generator {generator} are neither certifiably positive nor negative (epsilon {epsilon:e})"
    )]
    NumericalAmbiguity { generator: usize, epsilon: f64 },

    #[error("ball enumeration exceeded the element cap of {cap}")]
    ResourceLimit { cap: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = CoxError> = std::result::Result<T, E>;
