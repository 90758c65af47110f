use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty probability vector")]
    Empty,
    #[error("non-finite entry {value} at index {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("negative mass {value} at index {index}")]
    NegativeMass { index: usize, value: f64 },
    #[error("entries sum to {sum}, not 1 (tolerance {tolerance})")]
    NotNormalized { sum: f64, tolerance: f64 },
    #[error("row {row}: {source}")]
    InvalidRow {
        row: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("rows have unequal lengths (row {row} has {found}, expected {expected})")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("alpha must be positive, got {0}")]
    InvalidAlpha(f64),
    #[error("operation requires finite alpha > 1, got {0}")]
    UnsupportedAlpha(f64),
    #[error("gamma must be positive, got {0}")]
    NonPositiveGamma(f64),
    #[error("support of P is not contained in support of Q")]
    SupportViolation,
    #[error("gamma bounds ({gamma_min}, {gamma_max}) do not dominate the pair ratios ({pair_min}, {pair_max})")]
    GammaViolation {
        gamma_max: f64,
        gamma_min: f64,
        pair_max: f64,
        pair_min: f64,
    },
    #[error("invalid gamma bounds: need gamma_min <= 1 <= gamma_max, got ({gamma_min}, {gamma_max})")]
    InvalidGammaBounds { gamma_max: f64, gamma_min: f64 },
    #[error("{name} = {value} is out of range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("s must be non-negative, got {0}")]
    NegativeS(f64),
    #[error("solver did not reach tolerance {tolerance} (bracket width {width})")]
    SolverFailure { tolerance: f64, width: f64 },
    #[error("quadrature did not converge to tolerance {tolerance}")]
    QuadratureFailure { tolerance: f64 },
    #[error("rows {i} and {j} have overlapping supports")]
    SupportsOverlap { i: usize, j: usize },
    #[error("perturbation gamma must lie in (0, 1), got {0}")]
    BadGamma(f64),
    #[error("operation requires a finite list of input distributions")]
    UnsupportedInputSet,
    #[error("input set has no pair of distinct members")]
    DegenerateSet,
    #[error("contraction ratio {ratio} exceeds 1: data processing violated")]
    DpiViolation { ratio: f64 },
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("alphabet size {size} exceeds oracle limit {limit}")]
    AlphabetTooLarge { size: usize, limit: usize },
}

impl Error {
    /// True for failures of an iterative numeric routine, as opposed to
    /// rejected inputs.
    pub fn is_numeric_failure(&self) -> bool {
        matches!(
            self,
            Error::SolverFailure { .. } | Error::QuadratureFailure { .. } | Error::DpiViolation { .. }
        )
    }
}
