use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid probability sequence: {0}")]
    InvalidSequence(String),

    #[error("sequence kind {kind} requires field `{field}`")]
    MissingField { kind: &'static str, field: &'static str },

    #[error("p_{k} = {value} is outside (0, 1]")]
    InvalidProbability { k: u64, value: f64 },

    #[error("sequence index must be >= 1")]
    ZeroIndex,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("window [{lo}, {hi}] too small for windowed evaluation (need hi - lo >= {min_span})")]
    WindowTooSmall { lo: u64, hi: u64, min_span: u64 },

    #[error("formula singularity: non-positive denominator at k = {k}")]
    FormulaSingularity { k: u64 },

    #[error("cell budget exceeded at level {level}: {count} live cells (budget {budget})")]
    BudgetExceeded {
        level: u32,
        count: u64,
        budget: u64,
        /// Replicates finished before the failing one, when raised by an estimator.
        completed_replicates: Option<usize>,
    },

    #[error("level {k} out of range for depth {depth}")]
    LevelOutOfRange { k: u32, depth: u32 },

    #[error("rendering needs n = 2, got n = {0}")]
    UnsupportedDimension(u32),

    #[error("raster side {side} exceeds the maximum of {max}")]
    RasterTooLarge { side: u64, max: u64 },

    #[error("no surviving realization after {attempts} attempts")]
    AllExtinct { attempts: u64 },

    #[error("invalid witness: {0}")]
    InvalidWitness(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}
