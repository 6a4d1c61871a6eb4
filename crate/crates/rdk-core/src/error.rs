use thiserror::Error;

/// Failures shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("map is not surjective: {0}")]
    NotSurjective(String),
    #[error("root {index} does not lie in the given sublattice")]
    RootNotInLattice { index: usize },
    #[error("root {index} is not in the kernel of the map")]
    RootNotInKernel { index: usize },
    #[error("invalid root datum: {0}")]
    InvalidDatum(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("enumeration needs {needed} elements but the budget is {budget}")]
    BudgetExceeded { needed: String, budget: u64 },
    #[error("{0}")]
    Refused(String),
}

pub type Result<T> = std::result::Result<T, Error>;
