//! Visualisation of residuals: scaled RGB / YCbCr differences and log-magnitude spectra.

use super::color::ycbcr_delta;
use super::{Image, ImageError, Residual};
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportMode {
    Rgb,
    Ycbcr,
    Fourier,
}

impl FromStr for ExportMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rgb" => Ok(ExportMode::Rgb),
            "ycbcr" => Ok(ExportMode::Ycbcr),
            "fourier" | "fft" => Ok(ExportMode::Fourier),
            other => Err(format!("unknown export mode '{other}' (rgb, ycbcr, fourier)")),
        }
    }
}

/// Renders a residual as a viewable image in the residual's pixel range.
///
/// `rgb` / `ycbcr`: `mid + gain * r`, clamped (YCbCr uses the linear part of
/// the colour transform). `fourier`: per-channel 2-D DFT magnitude passed
/// through `log(1 + |x|)`, centred, then min-max normalised per channel.
/// A constant channel maps to `pixel_min`. `gain` is ignored in this mode.
pub fn export_residual(r: &Residual, mode: ExportMode, gain: f64) -> Result<Image, ImageError> {
    let (w, h, c) = (r.width(), r.height(), r.channels());
    let n = w * h;
    let lo = r.pixel_min();
    let hi = r.pixel_max();
    let mid = 0.5 * (lo + hi);
    let data = match mode {
        ExportMode::Rgb => r.data().iter().map(|v| mid + gain * v).collect(),
        ExportMode::Ycbcr => {
            if c != 3 {
                return Err(ImageError::ChannelCount {
                    expected: 3,
                    found: c,
                });
            }
            let mut out = vec![0.0; 3 * n];
            for i in 0..n {
                let d = ycbcr_delta(r.data()[i], r.data()[n + i], r.data()[2 * n + i]);
                for k in 0..3 {
                    out[k * n + i] = mid + gain * d[k];
                }
            }
            out
        }
        ExportMode::Fourier => {
            let mut out = Vec::with_capacity(c * n);
            for ch in 0..c {
                let mag = log_magnitude(r.plane(ch), w, h);
                let (mn, mx) = mag
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
                let span = mx - mn;
                // relative tolerance: float noise in the FFT should not count as structure
                let flat = span.is_nan() || span <= 1e-9 * mx.abs().max(1.0);
                out.extend(mag.iter().map(|&v| {
                    if flat {
                        lo
                    } else {
                        lo + (hi - lo) * (v - mn) / span
                    }
                }));
            }
            out
        }
    };
    Image::with_range(w, h, c, data, lo, hi)
}

fn log_magnitude(plane: &[f64], w: usize, h: usize) -> Vec<f64> {
    let mut buf: Vec<Complex<f64>> = plane.iter().map(|&v| Complex::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft_forward(w);
    for row in buf.chunks_mut(w) {
        row_fft.process(row);
    }
    let col_fft = planner.plan_fft_forward(h);
    let mut col = vec![Complex::new(0.0, 0.0); h];
    for x in 0..w {
        for y in 0..h {
            col[y] = buf[y * w + x];
        }
        col_fft.process(&mut col);
        for y in 0..h {
            buf[y * w + x] = col[y];
        }
    }
    // centre the zero frequency
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let sy = (y + h / 2) % h;
            let sx = (x + w / 2) % w;
            out[sy * w + sx] = buf[y * w + x].norm().ln_1p();
        }
    }
    out
}
