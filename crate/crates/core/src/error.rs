use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Arguments outside an operation's documented domain.
    #[error("{0}")]
    Domain(String),

    #[error("n = {n} exceeds the oracle bound {bound}")]
    OracleBound { n: usize, bound: usize },

    #[error("reversal degree {d} is below the polynomial degree {degree}")]
    ReversalDegree { d: usize, degree: usize },

    #[error("inexact division computing {0}")]
    InexactDivision(String),

    /// The degree-bounded solve of the defining identity did not close up.
    #[error("defining identity fails: {0}")]
    InconsistentSolve(String),

    #[error("invalid partition literal {0:?}")]
    Parse(String),

    #[error("invalid poset: {0}")]
    InvalidPoset(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
