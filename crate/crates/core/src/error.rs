use thiserror::Error;

/// Errors surfaced by the library. Absence of an adjoint, a failed check or
/// a missing section are *values*, not errors; this type covers contract
/// violations and resource bounds.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("ambient algebra mismatch: {0}")]
    AmbientMismatch(String),

    #[error("algebra is not commutative")]
    NotCommutative,

    #[error("element is not self-adjoint")]
    NotSelfAdjoint,

    #[error("minimal polynomial of {element} does not split over the Gaussian rationals (residual factor of degree {residual_degree})")]
    NotSplitOverGaussianRationals { element: String, residual_degree: usize },

    #[error("generator {0} is not normal (g·g* ≠ g*·g)")]
    NonNormalGenerator(String),

    #[error("fragment would exceed the configured bound of {bound} contexts")]
    FragmentTooLarge { bound: usize },

    #[error("frame would exceed the configured bound of {bound} opens")]
    FrameTooLarge { bound: usize },

    #[error("restriction target is not closed: intersection of context {context} is missing from the target fragment")]
    TargetNotClosed { context: usize },

    #[error("maps do not form an adjoint pair: {0}")]
    NotAdjointPair(String),

    #[error("net is not local; strong locality is undefined (witness: {0})")]
    NotLocal(String),

    #[error("inconsistent functional family: contexts {left} and {right} disagree on a shared element")]
    InconsistentFamily { left: usize, right: usize },

    #[error("region is not a causal diamond")]
    NotADiamond,

    #[error("geometry out of bounds: {0}")]
    OutOfBounds(String),

    #[error("unsupported size: {0}")]
    SizeBound(String),

    #[error("not monotone: {0}")]
    NotMonotone(String),

    #[error("invalid poset: {0}")]
    InvalidPoset(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal arithmetic invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
