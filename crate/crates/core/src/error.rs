use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by the zero rational function")]
    DivisionByZero,

    #[error("not regular at ℓ = 1: {0}")]
    PoleAtOne(String),

    #[error("ambient rank mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },

    #[error("{what} exceeds the size guard ({got} > {limit})")]
    TooLarge {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    #[error("subgroup is not an element of the poset")]
    NotInPoset,

    #[error("subgroups are not comparable under containment")]
    NotComparable,

    #[error("operation requires an abelian (torus) group")]
    NotAbelian,

    #[error("{0}")]
    InvalidInput(String),

    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
