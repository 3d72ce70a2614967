use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("non-finite value in {what}")]
    NonFinite { what: String },

    #[error("linear solver failed: {0}")]
    Solver(String),

    #[error("numerical instability at step {step} (t = {time})")]
    Instability { step: usize, time: f64 },

    #[error("step {step} (t = {time}): {source}")]
    AtStep {
        step: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("no snapshot stored at t = {0}")]
    MissingSnapshot(f64),

    #[error("diagnostic error: {0}")]
    Diagnostic(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Process exit code used by the CLI: 2 configuration, 3 numerical, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::GridMismatch(_) | Error::MissingSnapshot(_) | Error::Json(_) => 2,
            Error::NonFinite { .. }
            | Error::Solver(_)
            | Error::Instability { .. }
            | Error::Diagnostic(_) => 3,
            Error::AtStep { source, .. } => source.exit_code(),
            Error::Io(_) => 4,
        }
    }
}
