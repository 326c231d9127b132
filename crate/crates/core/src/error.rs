use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("distribution is not normalized: weights sum to {total}")]
    NotNormalized { total: f64 },

    #[error("{field}: value {value} out of range (limit {limit})")]
    OutOfRange {
        field: String,
        value: usize,
        limit: usize,
    },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("unknown game `{0}`")]
    UnknownGame(String),

    #[error("strategy budget exceeded: {required} deterministic strategy pairs, budget {budget}")]
    BudgetExceeded { required: f64, budget: f64 },

    #[error("relaxation level {level} exceeds the configured cap {cap}")]
    DegreeOverflow { level: usize, cap: usize },

    #[error("monomial {0} cannot be represented in the moment basis")]
    NotRepresentable(String),

    #[error("problem has no normalization constraint")]
    MissingNormalization,

    #[error("certificate extraction failed: block {block} has eigenvalue {eigenvalue:e} below -{clamp_tol:e}")]
    Extraction {
        block: usize,
        eigenvalue: f64,
        clamp_tol: f64,
    },

    #[error("solver did not reach an optimal solution (status {0})")]
    NotOptimal(String),

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e} in block {block}")]
    NotPsd { block: usize, eigenvalue: f64 },

    #[error("matrix is not Hermitian: deviation {0:e}")]
    NotHermitian(f64),

    #[error("not a level-1 certificate: {0}")]
    NotLevelOne(String),

    #[error("Alice cross-question Gram entry ({row}, {col}) has magnitude {magnitude:e}")]
    CrossBlock {
        row: String,
        col: String,
        magnitude: f64,
    },

    #[error("no isometry maps the factor onto the prescribed corner factor (singular values {singular_values:?}, residual {residual:e})")]
    NoIsometry {
        singular_values: Vec<f64>,
        residual: f64,
    },

    #[error("prescribed corner factor does not reproduce the corner (deviation {0:e})")]
    CornerMismatch(f64),

    #[error("certificate does not verify: max residual {0:e}")]
    VerificationFailed(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed file: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
