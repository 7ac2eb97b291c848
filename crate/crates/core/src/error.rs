use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("realization error: imaginary residue {residue:e} exceeds tolerance {limit:e}")]
    Realization { residue: f64, limit: f64 },

    #[error("structure error: {0}")]
    Structure(String),

    #[error("parity error: subset cardinality {m} and set cardinality {n} differ in parity")]
    Parity { m: u32, n: u32 },

    #[error("normalization error: {0}")]
    Normalization(String),

    #[error("singular error: |B(z)| = {modulus:e} at a prescribed node")]
    Singular { modulus: f64 },

    #[error("coincident interpolation nodes in t = z + 1/z: {0}")]
    CoincidentNodes(String),

    #[error("data exhausted at level {level}: no valid samples remain")]
    DataExhausted { level: u32 },

    #[error("level mismatch: mask built for level {mask} applied to data at level {data}")]
    LevelMismatch { mask: u32, data: u32 },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
