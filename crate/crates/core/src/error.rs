use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// Best template correlation stayed below the acceptance floor.
    #[error("centering marker lost (best correlation {correlation:.3})")]
    MarkerLost { correlation: f64 },

    #[error("degenerate gray reference: channel mean {channel} is zero")]
    DegenerateReference { channel: usize },

    #[error("no frames in manifest")]
    NoFrames,

    /// A failure tied to one manifest row (1-based, header excluded).
    #[error("manifest row {row}: {source}")]
    Row {
        row: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors that should abort a run with a nonzero exit status.
    pub fn is_configuration(&self) -> bool {
        match self {
            Error::MarkerLost { .. } => false,
            Error::Row { source, .. } => source.is_configuration(),
            _ => true,
        }
    }

    pub(crate) fn at_row(self, row: usize) -> Self {
        Error::Row {
            row,
            source: Box::new(self),
        }
    }
}
