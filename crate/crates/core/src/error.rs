use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("mask is {mask_w}x{mask_h} but image is {image_w}x{image_h}")]
    MaskMismatch {
        mask_w: usize,
        mask_h: usize,
        image_w: usize,
        image_h: usize,
    },

    #[error("corruption `{0}` alters the whole frame and cannot be applied through a mask")]
    GlobalOnlyKind(&'static str),

    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("image is {0}x{1}, ssim needs at least 11 pixels on each side")]
    TooSmall(usize, usize),

    #[error("failed to spawn provider `{command}`: {source}")]
    Spawn {
        command: String,
        #[source]
        source: std::io::Error,
    },

    #[error("provider handshake failed: {0}")]
    Handshake(String),

    #[error("provider reported an error: {0}")]
    Provider(String),

    #[error("provider protocol violation: {0}")]
    Protocol(String),

    #[error("provider did not answer within {0:?}")]
    Timeout(std::time::Duration),

    #[error("invalid manifest: {0}")]
    Manifest(String),

    #[error("score table is empty")]
    EmptyTable,

    #[error("no rows to plot for `{0}`")]
    NoData(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than a failure while running.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::Manifest(_)
                | Error::MaskMismatch { .. }
                | Error::GlobalOnlyKind(_)
                | Error::Format(_)
        )
    }
}
