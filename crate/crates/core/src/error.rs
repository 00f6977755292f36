use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vectors must have at least one coordinate")]
    EmptyVector,
    #[error("coordinate {index} is not finite")]
    NonFinite { index: usize },
    #[error("exponent must lie in [1, inf], got {0}")]
    InvalidExponent(f64),
    #[error("cannot radially project a vector of norm {norm:e}")]
    ZeroVector { norm: f64 },
    #[error("need at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("point {index} has norm {norm} instead of 1")]
    NotOnSphere { index: usize, norm: f64 },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("dimension must be at least {min}, got {found}")]
    InvalidDimension { min: usize, found: usize },
    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("exponent is infinite; the cube formula applies instead")]
    InfiniteExponent,
    #[error("assembled bounds are inconsistent: lo = {lo} > hi = {hi} (n = {n}, p = {p}, eps = {eps})")]
    InconsistentBounds {
        n: usize,
        p: String,
        eps: f64,
        lo: usize,
        hi: usize,
    },
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("linear system is singular or ill-conditioned (condition number {condition:e})")]
    SingularSystem { condition: f64 },
    #[error("point is not in the span of the selected generators (residual {residual:e})")]
    OutsideSpan { residual: f64 },
    #[error("point has norm {norm} > 1; maps are defined on the unit ball only")]
    OutsideBall { norm: f64 },
    #[error("generator hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("cascade depth j = {j} is outside the regime j < (n+1)/2 for n = {n}")]
    RegimeViolation { n: usize, j: usize },
    #[error("target is not in the image of the map: {0}")]
    EmptyFiber(String),
    #[error("requested Hadamard order {order} exceeds the cap {cap}")]
    OrderOverflow { order: usize, cap: usize },
    #[error("{0} is not an odd prime congruent to 3 mod 4")]
    InvalidPrime(usize),
    #[error("no Hadamard matrix of order {0} in the constructive registry")]
    OrderUnavailable(usize),
    #[error("Hadamard matrix is not normalized")]
    NotNormalized,
    #[error("malformed Hadamard grid: {0}")]
    MalformedGrid(String),
    #[error("configuration is not feasible: origin is not in the convex hull")]
    Infeasible,
    #[error("feasible configuration with diameter {diameter} falls below the lower bound {bound}")]
    BoundViolation { diameter: f64, bound: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
