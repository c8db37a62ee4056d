use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KochError {
    #[error("orbit diverged at step {step} (d = {d})")]
    OrbitDiverged { d: u32, step: usize },

    #[error("root finder did not converge for starters {unconverged:?} after {iterations} iterations")]
    NoConvergence {
        unconverged: Vec<usize>,
        iterations: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid index: {0}")]
    InvalidIndex(String),

    #[error("truncation length {len} is shorter than required {need}")]
    TruncationTooShort { len: usize, need: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("G undefined at this size (k + m - 1 = {dim} < 2)")]
    GUndefined { dim: usize },

    #[error("not preperiodic within type bound")]
    NotPreperiodic,

    #[error("parameter equation degree {degree} exceeds cap {cap}")]
    DegreeCapExceeded { degree: u64, cap: u64 },

    #[error("type ({k}, {m}) is not strictly below ({outer_k}, {outer_m})")]
    NotStrictlyBelow {
        k: usize,
        m: usize,
        outer_k: usize,
        outer_m: usize,
    },

    #[error("no outer block: fixed point has exact type (k, m)")]
    NoOuterBlock,

    #[error("fixed point not of exact type (k, m): |delta_{index}| = {value:e}")]
    NotExactType { index: usize, value: f64 },

    #[error("evaluation at pole (t = {re} + {im}i)")]
    EvaluationAtPole { re: f64, im: f64 },

    #[error("identity degenerate (critical orbit point): delta_{0} vanishes")]
    DegenerateIdentity(usize),

    #[error("chi^d is too close to 1")]
    RootOfUnity,

    #[error("singular linear system")]
    Singular,
}

pub type Result<T, E = KochError> = std::result::Result<T, E>;
