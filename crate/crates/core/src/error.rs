use thiserror::Error;

/// Which inequality a modulo-quantizer precondition check failed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// `|x - h| <= delta_prime`
    SideDistance,
    /// `k * eps >= 2 * (eps + delta_prime)`
    LatticeSpacing,
}

impl std::fmt::Display for Condition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Condition::SideDistance => write!(f, "|x - h| <= delta_prime"),
            Condition::LatticeSpacing => write!(f, "k*eps >= 2*(eps + delta_prime)"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("resolution k = {0} is invalid (need k >= 4)")]
    InvalidResolution(u32),

    #[error("invalid quantizer parameter: {0}")]
    InvalidParameter(String),

    #[error("lattice spacing is zero; encoding is undefined")]
    DegenerateLattice,

    #[error("quantizer precondition violated: {condition} ({detail})")]
    ConditionViolated { condition: Condition, detail: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("bit budget r = {r} is below the minimum {min} (2 * log k)")]
    BudgetTooSmall { r: usize, min: usize },

    #[error("client {client} depends on client {node}, which is not decoded yet")]
    OrderViolation { client: usize, node: usize },

    #[error("distance constraint violated for {pair}: realized {realized} > bound {bound} (slack {slack:e})")]
    ConstraintViolation {
        pair: String,
        realized: f64,
        bound: f64,
        slack: f64,
    },

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
