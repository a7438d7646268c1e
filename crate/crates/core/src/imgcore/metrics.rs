use super::{Image, ImageError};
use serde::{Deserialize, Serialize};
use std::fmt;

/// PSNR in decibels, with an explicit sentinel for identical images.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub enum Psnr {
    Finite(f64),
    Infinite,
}

impl Psnr {
    /// Decibel value, `f64::INFINITY` for the sentinel.
    pub fn db(self) -> f64 {
        match self {
            Psnr::Finite(v) => v,
            Psnr::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Psnr::Infinite)
    }
}

impl fmt::Display for Psnr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Psnr::Finite(v) => write!(f, "{v:.4}"),
            Psnr::Infinite => f.write_str("inf"),
        }
    }
}

/// Mean squared difference over all samples of all channels.
pub fn mse(a: &Image, b: &Image) -> Result<f64, ImageError> {
    a.check_compatible(b)?;
    if a.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(sum / a.len() as f64)
}

/// `10 log10(R^2 / MSE)` with `R = pixel_max - pixel_min`.
pub fn psnr(a: &Image, b: &Image) -> Result<Psnr, ImageError> {
    let m = mse(a, b)?;
    if m == 0.0 {
        return Ok(Psnr::Infinite);
    }
    let r = a.range();
    Ok(Psnr::Finite(10.0 * (r * r / m).log10()))
}
