use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("matrix must have an even number of rows, got {0}")]
    OddRowCount(usize),
    #[error("matrix columns are not pairwise symplectically orthogonal")]
    NotIsotropic,
    #[error("matrix is not full column rank (rank {rank}, expected {expected})")]
    NotFullRank { rank: usize, expected: usize },
    #[error("seed must have {expected} bits, got {got}")]
    SeedLength { expected: usize, got: usize },
    #[error("search space too large: {0}")]
    TooLarge(String),
    #[error("degenerate sample: {0}")]
    Degenerate(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_prob(name: &str, p: f64, lo: f64, hi: f64) -> Result<()> {
    if p.is_finite() && p >= lo && p <= hi {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} = {p} outside [{lo}, {hi}]"
        )))
    }
}
