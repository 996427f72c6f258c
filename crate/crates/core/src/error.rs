use thiserror::Error;

/// Failures shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("class mismatch: {left} vs {right}")]
    MismatchedClass { left: String, right: String },
    #[error("map lists {got} images but the domain has {expected} generators")]
    MalformedMap { expected: usize, got: usize },
    #[error("ambient mismatch: {0}")]
    AmbientMismatch(String),
    #[error("{0} is not a prime supported by this instance")]
    ZeroCharacteristic(u32),
    #[error("enumeration too large: {size} exceeds {limit}")]
    TooLarge { size: u64, limit: u64 },
    #[error("operation not supported by this instance: {0}")]
    NotSupported(&'static str),
    #[error("bounded search found no finite witness")]
    NoFiniteWitness,
    #[error("empty pool")]
    EmptyPool,
    #[error("empty carrier")]
    EmptyCarrier,
    #[error("two distinct sub-amalgams inside the ambient: {0}")]
    AmbiguousWitness(String),
    #[error("no decomposition found within bounds")]
    NoDecomposition,
    #[error("diagrams are over different spans")]
    SpanMismatch,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("amalgam construction failed at stage {index}: {reason}")]
    AmalgamConstructionFailed { index: usize, reason: String },
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("element lies outside the total model")]
    ElementOutsideTotal,
    #[error("regularity failed at stage {0}")]
    RegularityFailure(usize),
    #[error("candidate generator exhausted after {0} candidates without an exact verdict")]
    GeneratorExhaustedInexact(usize),
    #[error("search bound {0} exceeded")]
    SearchBoundExceeded(usize),
    #[error("iso search inconclusive and no invariant separates the pair")]
    InconclusivePair,
    #[error("instance offers no separation invariant")]
    DistinguisherUnavailable,
    #[error("uniqueness isomorphism missing at assembly stage {0}")]
    UniquenessFailed(usize),
    #[error("decomposition failed: {0}")]
    DecompositionFailed(String),
    #[error("closure system has no basis for {0}")]
    NoBasisFound(String),
    #[error("presentation does not satisfy C'(1/6)")]
    NotSmallCancellation,
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
