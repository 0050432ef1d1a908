use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invariant breach: {0}")]
    Invariant(String),
    #[error(transparent)]
    Core(#[from] marriage_core::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for bad input, 3 for a broken invariant, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        use marriage_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Core(e) => match e {
                E::Internal(_) => 3,
                E::InvalidDimension(_)
                | E::DimensionMismatch { .. }
                | E::InvalidDomain(_)
                | E::InvalidParameter(_)
                | E::OutOfRange(_)
                | E::WindowTooSmall(_) => 2,
                _ => 1,
            },
            _ => 1,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
