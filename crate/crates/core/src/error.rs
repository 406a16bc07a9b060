use thiserror::Error;

use crate::vector::IntVector;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("zero vector is not a direction")]
    ZeroVector,

    #[error("polynomial is not a line polynomial")]
    NotLinePolynomial,

    #[error("directions {0} and {1} are parallel")]
    ParallelDirections(IntVector, IntVector),

    #[error("span of {0} and {1} meets the periodicity subspace non-trivially")]
    SpanCondition(IntVector, IntVector),

    #[error("point {point} lies outside the evaluation domain")]
    OutOfDomain { point: IntVector },

    #[error("eroded window is empty")]
    EmptyErosion,

    #[error("domains have empty intersection")]
    EmptyDomain,

    #[error("sum of periodic and fiber configurations has no finite representation; rasterize first")]
    UnboundedMixedSum,

    #[error("value {0} is not an integer")]
    NonInteger(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("verification failed: {0}")]
    Verification(String),

    /// A bounded search ran out of budget. Not a refutation.
    #[error("inconclusive: {what} (bound {bound})")]
    Inconclusive { what: String, bound: u64 },

    #[error("tiles are not independent; dependent choice {witness:?}")]
    DependentTiles { witness: Vec<IntVector> },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Error {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// True when the root cause is bound exhaustion rather than a hard failure.
    pub fn is_inconclusive(&self) -> bool {
        match self {
            Error::Inconclusive { .. } => true,
            Error::Context { source, .. } => source.is_inconclusive(),
            _ => false,
        }
    }

    /// `DimensionMismatch` unless the two agree.
    pub fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }
}
