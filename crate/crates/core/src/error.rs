use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    Index { index: usize, n_qubits: usize },

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    /// Training produced a NaN or infinite loss.
    #[error("non-finite loss {loss} at epoch {epoch}")]
    NonFiniteLoss {
        epoch: usize,
        loss: f64,
        snapshot: Box<crate::model::ParameterSet>,
    },

    #[error("eigen-decomposition did not converge: {0}")]
    Convergence(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors caused by bad user input rather than a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::Index { .. }
                | Error::UnsupportedConfiguration(_)
                | Error::Parse { .. }
        )
    }
}
