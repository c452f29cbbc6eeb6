use thiserror::Error;

/// Library-wide error type.  The CLI maps these onto exit codes: precondition
/// violations exit 2, exhausted budgets exit 3, and internal invariant
/// violations (the "must never fire" class) exit 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("precision exhausted: cannot certify partial quotient a_{0}")]
    PrecisionExhausted(usize),
    #[error("need at least {0} continued-fraction terms")]
    InsufficientDepth(usize),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("partition arcs do not tile the circle (arithmetic bug)")]
    PartitionGap,
    #[error("cusp exponent {exponent} below requested Holder exponent {requested}: seminorm infinite")]
    UnsupportedExponent { exponent: f64, requested: f64 },
    #[error("level {level} too small: {reason}")]
    LevelTooSmall { level: usize, reason: String },
    #[error("no level n <= {n_max} satisfies the case condition; tau window {tau_window:?}")]
    CaseSearchExhausted { n_max: usize, tau_window: Vec<f64> },
    #[error("K = {k} too small for horizon N = {n} and measure budget {budget}")]
    InsufficientK { k: usize, n: usize, budget: f64 },
    #[error("no constant region of measure > {0} available for the correction bump")]
    NoRoomForBump(f64),
    #[error("small denominator at frequency {k}: ||k*alpha|| = {norm:.3e}")]
    SmallDenominator { k: i64, norm: f64 },
    #[error("stage {0} unreachable within the convergent budget")]
    DepthUnreachable(usize),
    #[error("law-of-iterated-logarithm horizon exceeds 2^40")]
    HorizonBudget,
    #[error("cover interval of length {len:.3e} exceeds mesh {mesh:.3e}")]
    MeshViolation { len: f64, mesh: f64 },
    #[error("cover classes disagree with the stored complement geometry: {0}")]
    CoverMismatch(String),
    #[error("series is identically zero; growth exponent undefined")]
    DegenerateSeries,
    #[error("internal consistency check failed: {0}")]
    InternalCheck(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code class for the CLI.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            PrecisionExhausted(_) | InsufficientDepth(_) | UnsupportedExponent { .. }
            | LevelTooSmall { .. } | InsufficientK { .. } | NoRoomForBump(_)
            | SmallDenominator { .. } | MeshViolation { .. } | InvalidInput(_) => 2,
            BudgetExceeded(_) | CaseSearchExhausted { .. } | DepthUnreachable(_)
            | HorizonBudget => 3,
            PartitionGap | CoverMismatch(_) | DegenerateSeries | InternalCheck(_) => 4,
            Io(_) | Json(_) => 1,
        }
    }
}
