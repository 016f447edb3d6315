use thiserror::Error;

/// Errors produced by the corrfilt library.
#[derive(Error, Debug)]
pub enum CorrError {
    #[error("matrix dimensions do not match: {0}")]
    DimensionMismatch(String),
    #[error("need at least {needed} records/elements, got {got}")]
    DimensionTooSmall { needed: usize, got: usize },
    #[error("column {0:?} has zero sample variance")]
    ZeroVarianceColumn(String),
    #[error("matrix is not positive definite (pivot {pivot} at index {index} below tolerance {tol})")]
    NotPositiveDefinite {
        index: usize,
        pivot: f64,
        tol: f64,
    },
    #[error("eigendecomposition failed to converge after {0} iterations")]
    ConvergenceFailure(usize),
    #[error("matrix violates correlation-matrix invariants: {0}")]
    InvalidCorrelationMatrix(String),
    #[error("bootstrap replica degenerate after {retries} retries: column {column:?} is constant")]
    DegenerateReplica { column: String, retries: usize },
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },
    #[error("negative correlation structure not supported by the factor model: {0}")]
    UnsupportedNegativeStructure(String),
    #[error("tail parameter mu must exceed 2 for simulation, got {0}")]
    InvalidMu(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("quadrature failed to reach relative accuracy {target} (best estimate error {best})")]
    QuadratureFailure { target: f64, best: f64 },
    #[error("need t > n + 1 for Wishart expectations, got n={n}, t={t}")]
    InsufficientSamples { n: usize, t: usize },
    #[error("fixed-point iteration did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("maximum-likelihood fit failed for column {column:?}: {reason}")]
    MleFailure { column: String, reason: String },
    #[error("shrinkage weight must lie in [0, 1], got {0}")]
    AlphaOutOfRange(f64),
    #[error("need t_len >= n for the spectral filter (Q >= 1), got n={n}, t={t}")]
    QBelowOne { n: usize, t: usize },
    #[error("need at least {needed} replicas, got {got}")]
    InsufficientReplicas { needed: usize, got: usize },
    #[error("{stage}: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<CorrError>,
    },
    #[error("csv parse error at row {row}: {message}")]
    ParseError { row: usize, message: String },
    #[error("row {row} has {got} fields, expected {expected}")]
    RaggedRows {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("non-numeric cell at row {row}, column {column}: {value:?}")]
    NonNumericCell {
        row: usize,
        column: usize,
        value: String,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CorrError {
    /// Wrap an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &str) -> Self {
        CorrError::Stage {
            stage: stage.to_string(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, CorrError>;
