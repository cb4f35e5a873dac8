use thiserror::Error;

/// Errors raised while building or evaluating lattice states, symbols,
/// families and pairings.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("grid of {points} points per axis aliases modes up to |k| = {max_component}; need at least {required}")]
    Aliasing {
        points: usize,
        max_component: i64,
        required: usize,
    },

    #[error("lattice index overflow: {0}")]
    Overflow(String),

    #[error("direction must be nonzero")]
    ZeroDirection,

    #[error("invalid quadratic surd: {0}")]
    InvalidSurd(String),

    #[error("target {0} is resonant; a non-resonant direction is required")]
    ResonantTarget(String),

    #[error("direction {0} is non-resonant where a resonant one was expected")]
    NonResonant(String),

    #[error("ladder exhausted: requested n = {requested}, largest admissible n = {largest}")]
    LadderExhausted { requested: usize, largest: usize },

    #[error("family index n = {0} is out of range")]
    FamilyIndex(usize),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("symbol is not admissible here: {0}")]
    InadmissibleSymbol(String),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("window bandwidth {bandwidth} cannot be folded onto the period {period}")]
    WindowNotFoldable { bandwidth: f64, period: f64 },

    #[error("quadrature budget {budget:e} exceeds requested tolerance {tolerance:e} (value {value})")]
    BudgetExceeded {
        value: num_complex::Complex64,
        budget: f64,
        tolerance: f64,
    },

    #[error("empty truncation window for the wave packet")]
    EmptyPacket,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
