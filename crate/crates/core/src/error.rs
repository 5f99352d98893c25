use std::path::PathBuf;

/// Errors produced while building indexes, models and workloads.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("non-finite coordinate ({lon}, {lat})")]
    InvalidCoordinate { lon: f64, lat: f64 },

    #[error("invalid bounding box [{min_lon}, {min_lat}, {max_lon}, {max_lat}]")]
    InvalidBox {
        min_lon: f64,
        min_lat: f64,
        max_lon: f64,
        max_lat: f64,
    },

    #[error("invalid key {0}: keys must be finite")]
    InvalidKey(f64),

    #[error("cannot build over an empty input")]
    EmptyInput,

    #[error("keys are not sorted: key at position {position} is smaller than its predecessor")]
    Unsorted { position: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid workload specification: {0}")]
    InvalidSpec(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
