use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid array geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid angular grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("empty matrix ({rows}x{cols}) has no rank")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("invalid rank policy: {0}")]
    InvalidPolicy(String),

    /// `lower` is the largest subset size verified independent so far;
    /// `upper` the best analytic or numerical upper bound.
    #[error(
        "kruskal enumeration too large: C({n},{r}) exceeds budget {budget} \
         (verified krank >= {lower}, krank <= {upper})"
    )]
    KruskalBudget {
        n: usize,
        r: usize,
        budget: u64,
        lower: usize,
        upper: usize,
    },

    #[error("support enumeration too large: C({n},{k}) exceeds budget {budget}")]
    EnumerationBudget { n: usize, k: usize, budget: u64 },

    #[error("degenerate waveform: waveform matrix has rank 0")]
    DegenerateWaveform,

    #[error("unsupported geometry for matched construction: {0}")]
    UnsupportedGeometry(String),

    #[error("waveform too short to carry rank: t = {t} < n_s = {n_s}")]
    WaveformTooShort { t: usize, n_s: usize },

    #[error("wrong regime: {0}")]
    WrongRegime(String),

    #[error("zero vector where a nonzero vector is required: {0}")]
    ZeroVector(&'static str),

    #[error("internal consistency failure in {context}: deviation {deviation:e}")]
    Consistency {
        context: &'static str,
        deviation: f64,
    },

    #[error("scene grid does not match sensing matrix grid")]
    GridMismatch,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
