use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not a rotation: orthonormality error {ortho_err:.3e}, det {det}")]
    NotARotation { ortho_err: f64, det: f64 },

    #[error("matrix is not skew-symmetric: symmetric part norm {0:.3e}")]
    NotSkewSymmetric(f64),

    #[error("time step must be positive, got {0}")]
    NonPositiveStep(f64),

    #[error("lever arm must be positive, got {0}")]
    NonPositiveLeverArm(f64),

    #[error("accelerometer index {0} out of range (rig has 4)")]
    SensorIndex(usize),

    #[error("accelerometer 0 reading too small for a gravity direction (norm {0:.3e})")]
    MeasurementDropout(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed CSV at {path}:{line}: {msg}")]
    Csv { path: PathBuf, line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
