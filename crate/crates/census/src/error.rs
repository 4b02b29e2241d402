use thiserror::Error;

#[derive(Debug, Error)]
pub enum CensusError {
    #[error(transparent)]
    Core(#[from] schurkit_core::Error),

    #[error("bad input: {0}")]
    BadInput(String),

    #[error("unknown lemma {0:?}")]
    UnknownLemma(String),

    #[error("no run named {0:?} in the cache")]
    MissingRun(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CensusError {
    /// Whether the error stems from malformed user input rather than the computation.
    pub fn is_bad_input(&self) -> bool {
        matches!(
            self,
            CensusError::BadInput(_)
                | CensusError::UnknownLemma(_)
                | CensusError::MissingRun(_)
                | CensusError::Json(_)
                | CensusError::Core(schurkit_core::Error::InvalidArgument(_))
        )
    }

    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            CensusError::Core(schurkit_core::Error::BudgetExceeded(_))
        )
    }
}

pub type Result<T> = std::result::Result<T, CensusError>;
