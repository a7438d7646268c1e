//! Pixel storage, colour conversion, residual algebra and PSNR.
//!
//! Samples are kept as `f64` in planar layout (`channel`, `row`, `column`)
//! and only quantised to the 8-bit grid when written to disk.

mod color;
mod export;
mod image;
mod io;
mod metrics;

pub use self::color::{rgb_to_ycbcr, ycbcr_to_rgb, luma, LUMA_WEIGHTS};
pub use self::export::{export_residual, ExportMode};
pub use self::image::{apply_residual, residual, Image, Residual};
pub use self::io::{load_png, save_png, to_rgb8, from_rgb8};
pub use self::metrics::{mse, psnr, Psnr};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ImageError {
    #[error("shape mismatch: {0} vs {1}")]
    ShapeMismatch(String, String),
    #[error("pixel range mismatch: [{0}, {1}] vs [{2}, {3}]")]
    RangeMismatch(f64, f64, f64, f64),
    #[error("expected {expected} channels, found {found}")]
    ChannelCount { expected: usize, found: usize },
    #[error("invalid pixel range [{0}, {1}]")]
    InvalidRange(f64, f64),
    #[error("sample buffer has {found} values, shape requires {expected}")]
    BufferLength { expected: usize, found: usize },
    #[error("image i/o: {0}")]
    Io(String),
}
