use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("entry count {found} does not match shape {rows}x{cols}")]
    BadShape { rows: usize, cols: usize, found: usize },

    #[error("non-finite entry at index {0}")]
    NonFinite(usize),

    #[error("ket is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("{what} is not unitary (max deviation of U^dag U from I: {deviation:e})")]
    NotUnitary { what: String, deviation: f64 },

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("unknown register label `{0}`")]
    UnknownRegister(String),

    #[error("cut must leave both sides non-empty")]
    EmptyCut,

    #[error("zero-leakage hypothesis violated: max deviation {deviation:e} exceeds {tolerance:e}")]
    Leakage { deviation: f64, tolerance: f64 },

    #[error("tau vectors are not orthonormal (Gram residual {0:e})")]
    TauNotOrthonormal(f64),

    #[error("reconstruction residual {0:e} exceeds bound")]
    Reconstruction(f64),

    #[error("plaintext extraction failed: reduced state purity {0} below 0.99")]
    ExtractionFailed(f64),

    #[error("invalid scheme: {0}")]
    InvalidScheme(String),

    #[error("unknown circuit `{0}`")]
    UnknownCircuit(String),

    #[error("invalid builder parameters: {0}")]
    BadParameters(String),

    #[error("eigendecomposition failed to converge")]
    NoConvergence,

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
