use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid marked space: {0}")]
    InvalidSpace(String),
    #[error("unknown marking {0:?}")]
    UnknownMarking(String),
    #[error("invalid stable bipartition (h={h}, S={set}): {reason}")]
    InvalidBipartition { h: i64, set: String, reason: String },
    #[error("expected {expected} composition parts, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("chain is not strictly increasing: {0}")]
    ChainOrder(String),
    #[error("invalid stable graph: {0}")]
    InvalidGraph(String),
    #[error("degree {requested} out of range 0..={dim}")]
    DegreeOutOfRange { requested: i64, dim: u32 },
    #[error("malformed universal-curve monomial: {0}")]
    MalformedMonomial(String),
    #[error("classes live on different marked spaces")]
    MismatchedSpaces,
    #[error("missing Chern character component of degree {0}")]
    MissingComponent(usize),
    #[error("Brill-Noether precondition violated: {0}")]
    BrillNoether(String),
    #[error("divisor degree {divisor} does not match polarisation degree {phi}")]
    DegreeMismatch { divisor: i64, phi: i64 },
    #[error("degenerate polarisation on {0:?}")]
    DegeneratePhi(Vec<String>),
    #[error("polarisation has no value for bipartition {0}")]
    MissingPhiEntry(String),
}

pub type Result<T> = std::result::Result<T, Error>;
