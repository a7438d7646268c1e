//! Colour adjustments on `[0, 1]`-normalised RGB. Gray uses BT.601 luma weights.

use super::filters::{convolve2d, rebuild};
use crate::imgcore::{Image, LUMA_WEIGHTS};

/// Applies `f` to every normalised `(r, g, b)` pixel.
fn per_pixel(img: &Image, f: impl Fn([f64; 3]) -> [f64; 3]) -> Image {
    let (lo, range) = (img.pixel_min(), img.range());
    let n = img.width() * img.height();
    let mut out = img.data().to_vec();
    for i in 0..n {
        let px = [0, 1, 2].map(|c| (out[c * n + i] - lo) / range);
        let q = f(px);
        for c in 0..3 {
            out[c * n + i] = lo + q[c] * range;
        }
    }
    rebuild(img, img.width(), img.height(), out)
}

fn gray(p: [f64; 3]) -> f64 {
    LUMA_WEIGHTS[0] * p[0] + LUMA_WEIGHTS[1] * p[1] + LUMA_WEIGHTS[2] * p[2]
}

fn clamp01(p: [f64; 3]) -> [f64; 3] {
    p.map(|v| v.clamp(0.0, 1.0))
}

/// Multiplies intensities by `factor`.
pub fn brightness(img: &Image, factor: f64) -> Image {
    per_pixel(img, |p| clamp01(p.map(|v| v * factor)))
}

/// Blends with the mean gray level.
pub fn contrast(img: &Image, factor: f64) -> Image {
    let (lo, range) = (img.pixel_min(), img.range());
    let n = (img.width() * img.height()).max(1);
    let mean = (0..n)
        .map(|i| gray([0, 1, 2].map(|c| (img.plane(c)[i] - lo) / range)))
        .sum::<f64>()
        / n as f64;
    per_pixel(img, |p| clamp01(p.map(|v| mean + factor * (v - mean))))
}

/// Blends with the per-pixel gray value.
pub fn saturation(img: &Image, factor: f64) -> Image {
    per_pixel(img, |p| {
        let g = gray(p);
        clamp01(p.map(|v| g + factor * (v - g)))
    })
}

pub fn grayscale(img: &Image) -> Image {
    per_pixel(img, |p| [gray(p); 3])
}

fn rgb_to_hsv([r, g, b]: [f64; 3]) -> [f64; 3] {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let d = max - min;
    let h = if d == 0.0 {
        0.0
    } else if max == r {
        ((g - b) / d).rem_euclid(6.0)
    } else if max == g {
        (b - r) / d + 2.0
    } else {
        (r - g) / d + 4.0
    };
    let s = if max == 0.0 { 0.0 } else { d / max };
    [h / 6.0, s, max]
}

fn hsv_to_rgb([h, s, v]: [f64; 3]) -> [f64; 3] {
    let h6 = h.rem_euclid(1.0) * 6.0;
    let c = v * s;
    let x = c * (1.0 - (h6.rem_euclid(2.0) - 1.0).abs());
    let (r, g, b) = match h6 as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    [r + m, g + m, b + m]
}

/// Rotates hue by `shift` turns (`0.5` is half the colour wheel).
pub fn hue(img: &Image, shift: f64) -> Image {
    per_pixel(img, |p| {
        let [h, s, v] = rgb_to_hsv(p);
        clamp01(hsv_to_rgb([h + shift, s, v]))
    })
}

/// Adds a per-channel offset given in normalised units.
pub fn rgb_shift(img: &Image, shifts: [f64; 3]) -> Image {
    per_pixel(img, |p| clamp01([p[0] + shifts[0], p[1] + shifts[1], p[2] + shifts[2]]))
}

/// Keeps the top `bits` bits of each 8-bit level.
pub fn posterize(img: &Image, bits: u32) -> Image {
    if bits >= 8 {
        return img.clone();
    }
    let mask = !((1u32 << (8 - bits)) - 1) & 0xff;
    per_pixel(img, |p| {
        p.map(|v| (((v * 255.0).round().clamp(0.0, 255.0) as u32) & mask) as f64 / 255.0)
    })
}

/// Blend with a smoothed copy: `factor` 1 is identity, 0 fully smoothed.
/// The one-pixel border keeps its original values.
pub fn sharpness(img: &Image, factor: f64) -> Image {
    let k = [1.0, 1.0, 1.0, 1.0, 5.0, 1.0, 1.0, 1.0, 1.0].map(|v| v / 13.0);
    let smooth = convolve2d(img, &k, 3);
    let (w, h) = (img.width(), img.height());
    let mut data = img.data().to_vec();
    for c in 0..img.channels() {
        let (src, sm) = (img.plane(c), smooth.plane(c));
        for y in 1..h.saturating_sub(1) {
            for x in 1..w.saturating_sub(1) {
                let i = y * w + x;
                data[c * w * h + i] = sm[i] + factor * (src[i] - sm[i]);
            }
        }
    }
    rebuild(img, w, h, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hsv_round_trip() {
        for p in [[0.2, 0.5, 0.9], [1.0, 0.0, 0.0], [0.3, 0.3, 0.3], [0.9, 0.8, 0.1]] {
            let q = hsv_to_rgb(rgb_to_hsv(p));
            for c in 0..3 {
                assert!((p[c] - q[c]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn neutral_factors_are_identity() {
        let data: Vec<f64> = (0..4 * 4 * 3).map(|i| (i * 13 % 256) as f64).collect();
        let img = Image::from_data(4, 4, 3, data).unwrap();
        for out in [
            brightness(&img, 1.0),
            contrast(&img, 1.0),
            saturation(&img, 1.0),
            hue(&img, 0.0),
            hue(&img, 1.0),
            sharpness(&img, 1.0),
            posterize(&img, 8),
        ] {
            for (a, b) in out.data().iter().zip(img.data()) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn posterize_masks_low_bits() {
        let img = Image::filled(1, 1, 3, 0b1011_0111 as f64);
        let p = posterize(&img, 5);
        assert_eq!(p.data()[0], 0b1011_0000 as f64);
    }
}
