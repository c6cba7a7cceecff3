use std::path::PathBuf;

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate contour: {0}")]
    DegenerateContour(String),

    #[error("rasterized blob rejected: area {area} below minimum {min_area}")]
    RejectedBlob { area: usize, min_area: usize },

    #[error("retry budget exhausted after producing {produced} of {requested} blobs")]
    RetryBudgetExhausted { produced: usize, requested: usize },

    #[error("need at least {required} usable blobs, found {found}")]
    NotEnoughBlobs { required: usize, found: usize },

    #[error("no foreground in any input mask")]
    EmptyMasks,

    #[error("no mask contains two or more instances")]
    NoSpacingSamples,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("malformed {what}: {reason}")]
    Malformed { what: &'static str, reason: String },

    #[error("image codec error: {0}")]
    Image(#[from] image::ImageError),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config error: {0}")]
    Config(#[from] toml::de::Error),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Stable machine-readable identifier for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::DegenerateContour(_) => "degenerate_contour",
            Error::RejectedBlob { .. } => "rejected_blob",
            Error::RetryBudgetExhausted { .. } => "retry_budget_exhausted",
            Error::NotEnoughBlobs { .. } => "not_enough_blobs",
            Error::EmptyMasks => "empty_masks",
            Error::NoSpacingSamples => "no_spacing_samples",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::UnsupportedFormat(_) => "unsupported_format",
            Error::Malformed { .. } => "malformed_input",
            Error::Image(_) => "image_codec",
            Error::Json(_) => "json",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
