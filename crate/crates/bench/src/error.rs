use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] lsi_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("result checksum mismatch: {0}")]
    Checksum(String),
}

pub type Result<T> = std::result::Result<T, BenchError>;

impl BenchError {
    /// 1 usage, 2 I/O or parse, 3 checksum failure.
    pub fn exit_code(&self) -> u8 {
        use lsi_core::Error as E;
        match self {
            BenchError::Usage(_) => 1,
            BenchError::Core(
                E::Io(_) | E::Parse { .. } | E::EmptyInput | E::InvalidCoordinate { .. },
            ) => 2,
            BenchError::Core(_) => 1,
            BenchError::Io(_) | BenchError::Csv(_) => 2,
            BenchError::Checksum(_) => 3,
        }
    }
}

impl From<&BenchError> for ExitCode {
    fn from(e: &BenchError) -> Self {
        ExitCode::from(e.exit_code())
    }
}
