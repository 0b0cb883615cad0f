use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Error, Debug)]
pub enum Error {
    /// The block map refused to grow past its configured capacity.
    #[error("out of memory: block capacity of {capacity} blocks exhausted")]
    OutOfMemory { capacity: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("unsupported bit depth in {path}: expected 16-bit samples, found {found}")]
    BitDepth { path: PathBuf, found: String },

    #[error("unsupported channel count in {path}: expected 1, found {found}")]
    ChannelCount { path: PathBuf, found: usize },

    #[error("file not found: {0}")]
    NotFound(PathBuf),

    #[error("image error: {0}")]
    Image(#[from] image::ImageError),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}
