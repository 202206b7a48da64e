use thiserror::Error;

/// Every domain error produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid norm: {0}")]
    InvalidNorm(String),
    #[error("polygon is not centrally symmetric (vertex {index})")]
    NotCentrallySymmetric { index: usize },
    #[error("polygon is not strictly convex and counter-clockwise (vertex {index})")]
    NotConvex { index: usize },
    #[error("polygon has a zero-length side at vertex {index}")]
    DegenerateSide { index: usize },
    #[error("zero vector has no facet index")]
    ZeroVector,
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("length mismatch: expected {expected} points, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("no direction witness: sequence is not a copy within tolerance")]
    NoWitness,
    #[error("sampler exhausted: no point beyond N-distance {radius}")]
    SamplerExhausted { radius: f64 },
    #[error("point at N-norm {norm} lies outside the last ring (radius {radius})")]
    OutOfRange { norm: f64, radius: f64 },
    #[error("copy does not correspond to the anchor set: {0}")]
    CorrespondenceMismatch(String),
    #[error("no accumulation point detected at this scale")]
    NoAccumulation,
    #[error("brute force limited to {limit} points, got {actual}")]
    TooLarge { limit: usize, actual: usize },
    #[error("invalid hypergraph: {0}")]
    InvalidHypergraph(String),
    #[error("edge {edge} has a core of {size} vertices, fewer than {needed} colours")]
    InfeasibleCore { edge: usize, size: usize, needed: usize },
    #[error("greedy peeling could not build transversal {colour}")]
    PeelingFailed { colour: usize },
    #[error("too few points: need {needed}, got {actual}")]
    TooFewPoints { needed: usize, actual: usize },
    #[error("invalid bisector: {0}")]
    InvalidBisector(String),
    #[error("segment too short: N-length {length}, need {needed}")]
    SegmentTooShort { length: f64, needed: f64 },
    #[error("inconclusive at sampling density {density}: {reason}")]
    Inconclusive { density: usize, reason: String },
    #[error("iteration limit {0} reached")]
    IterationLimit(usize),
    #[error("internal self-check failed: {0}")]
    SelfCheckFailed(String),
    #[error("unknown oracle: {0}")]
    UnknownOracle(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidNorm(_) => "InvalidNorm",
            Error::NotCentrallySymmetric { .. } => "NotCentrallySymmetric",
            Error::NotConvex { .. } => "NotConvex",
            Error::DegenerateSide { .. } => "DegenerateSide",
            Error::ZeroVector => "ZeroVector",
            Error::NonFinite => "NonFinite",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::NoWitness => "NoWitness",
            Error::SamplerExhausted { .. } => "SamplerExhausted",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::CorrespondenceMismatch(_) => "CorrespondenceMismatch",
            Error::NoAccumulation => "NoAccumulation",
            Error::TooLarge { .. } => "TooLarge",
            Error::InvalidHypergraph(_) => "InvalidHypergraph",
            Error::InfeasibleCore { .. } => "InfeasibleCore",
            Error::PeelingFailed { .. } => "PeelingFailed",
            Error::TooFewPoints { .. } => "TooFewPoints",
            Error::InvalidBisector(_) => "InvalidBisector",
            Error::SegmentTooShort { .. } => "SegmentTooShort",
            Error::Inconclusive { .. } => "Inconclusive",
            Error::IterationLimit(_) => "IterationLimit",
            Error::SelfCheckFailed(_) => "SelfCheckFailed",
            Error::UnknownOracle(_) => "UnknownOracle",
            Error::Malformed(_) => "Malformed",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
