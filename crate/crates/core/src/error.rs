use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The operation needs an exact alpha and was handed a decimal interval.
    #[error("undecidable representation: {0}")]
    UndecidableRepresentation(String),

    #[error("ambiguous floor: interval not certified at {bits} bits ({detail})")]
    AmbiguousFloor { bits: u32, detail: String },

    #[error("budget exceeded: {needed} terms requested, budget is {budget}")]
    Budget { needed: String, budget: u64 },

    #[error("insufficient terms: need at least {need}, got {got}")]
    InsufficientTerms { need: usize, got: usize },

    /// An identity that must hold for exact arithmetic was violated.
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
