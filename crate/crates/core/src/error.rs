use crate::arith::Int;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid algebra descriptor: {0}")]
    InvalidAlgebra(String),
    #[error("elements or matrices belong to different algebras")]
    AlgebraMismatch,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix has non-integral entries")]
    NotIntegral,
    #[error("zero ideal")]
    ZeroIdeal,
    #[error("unsupported request: {0}")]
    Unsupported(String),
    #[error("inconsistent CRT targets at p = {0}")]
    InconsistentTargets(Int),
    #[error("right factor is not two-sided")]
    NotTwoSided,
    #[error("matrix is not a similitude")]
    NotSimilitude,
    #[error("multipliers {0} and {1} differ by more than a sign")]
    MultiplierMismatch(Int, Int),
    #[error("inputs are not equivalent")]
    NotEquivalent,
    #[error("precision limit reached at p = {0}")]
    PrecisionExhausted(Int),
    #[error("infeasible profile: {0}")]
    InfeasibleProfile(String),
    #[error("class condition fails: {0}")]
    ClassObstruction(String),
    #[error("search exhausted its bound {0} without a decision")]
    Inconclusive(Int),
    #[error("side condition violated: {0}")]
    SideCondition(String),
    #[error("bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("lifting failed: {0}")]
    LiftFailure(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
