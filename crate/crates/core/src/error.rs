use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("adjustment cost must be a finite non-negative amount, got {0}")]
    InvalidCost(f64),

    #[error("invalid adjustment rule: {0}")]
    InvalidRule(String),

    #[error("operation expects an initial type profile")]
    WrongProfileKind,

    #[error("type profile is empty")]
    EmptyProfile,

    #[error("at least 2 agents are required, got {0}")]
    TooFewAgents(usize),

    #[error("valuations must be finite and non-negative, got {0}")]
    NegativeValuation(f64),

    #[error("agent index {index} out of range for {len} agents")]
    BadIndex { index: usize, len: usize },

    #[error("unsupported distribution family `{0}`")]
    UnsupportedDistribution(String),

    #[error("invalid support [{low}, {high}]: low must be below high")]
    BadSupport { low: f64, high: f64 },

    #[error("initial type {0} outside [0, 1]")]
    InvalidType(f64),

    #[error("opponent slope {0} leaves the win probability undefined")]
    DegenerateOpponent(f64),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("{got} samples requested, at least {min} required")]
    InsufficientSamples { got: usize, min: usize },

    #[error("profit derivative is unbounded at c = 0 for gamma < 1")]
    SingularDerivative,

    #[error("expected profit grows without bound in the adjustment cost")]
    UnboundedProfit,

    #[error("optimizer did not converge within {0} iterations")]
    NoConvergence(usize),

    #[error("reserve price {0} outside the valuation support [0, 1]")]
    InvalidReserve(f64),

    #[error("unsupported case: {0}")]
    UnsupportedCase(String),
}
