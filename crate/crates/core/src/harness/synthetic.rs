//! Deterministic natural-looking test images: smooth gradients, soft-edged
//! shapes, periodic texture and mild grain, kept away from the range limits.

use crate::imgcore::Image;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Lowest and highest sample value produced.
pub const SYNTHETIC_RANGE: (f64, f64) = (16.0, 240.0);

pub fn synthetic_image(seed: u64, width: usize, height: usize) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7a11_5eed);
    let n = width * height;
    let (wf, hf) = (width as f64, height as f64);
    let mut data = vec![0.0; 3 * n];

    for c in 0..3 {
        let base = rng.random_range(60.0..190.0);
        let gx = rng.random_range(-60.0..60.0);
        let gy = rng.random_range(-60.0..60.0);
        for y in 0..height {
            for x in 0..width {
                data[c * n + y * width + x] = base + gx * (x as f64 / wf - 0.5) + gy * (y as f64 / hf - 0.5);
            }
        }
    }

    let shapes = rng.random_range(5..11);
    for _ in 0..shapes {
        let cx = rng.random_range(0.0..wf);
        let cy = rng.random_range(0.0..hf);
        let rx = rng.random_range(0.05..0.35) * wf;
        let ry = rng.random_range(0.05..0.35) * hf;
        let theta: f64 = rng.random_range(0.0..std::f64::consts::PI);
        let soft = rng.random_range(1.0..6.0);
        let colour: [f64; 3] = [
            rng.random_range(30.0..225.0),
            rng.random_range(30.0..225.0),
            rng.random_range(30.0..225.0),
        ];
        let opacity = rng.random_range(0.4..0.9);
        let (s, co) = theta.sin_cos();
        for y in 0..height {
            for x in 0..width {
                let dx = x as f64 - cx;
                let dy = y as f64 - cy;
                let u = (dx * co + dy * s) / rx;
                let v = (-dx * s + dy * co) / ry;
                let dist = ((u * u + v * v).sqrt() - 1.0) * rx.min(ry);
                let a = opacity / (1.0 + (dist / soft).exp());
                if a > 1e-4 {
                    for c in 0..3 {
                        let p = &mut data[c * n + y * width + x];
                        *p = (1.0 - a) * *p + a * colour[c];
                    }
                }
            }
        }
    }

    let fx = rng.random_range(0.02..0.15);
    let fy = rng.random_range(0.02..0.15);
    let amp = rng.random_range(2.0..10.0);
    let grain = Normal::new(0.0, rng.random_range(1.0..5.0)).expect("positive std");
    for y in 0..height {
        for x in 0..width {
            let t = amp * (fx * x as f64 + fy * y as f64).sin() * (0.7 * fy * x as f64).cos();
            for c in 0..3 {
                data[c * n + y * width + x] += t + grain.sample(&mut rng);
            }
        }
    }

    let (lo, hi) = SYNTHETIC_RANGE;
    data.iter_mut().for_each(|v| *v = v.clamp(lo, hi));
    Image::from_data(width, height, 3, data).expect("sized buffer")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_band() {
        let a = synthetic_image(4, 64, 48);
        assert_eq!(a, synthetic_image(4, 64, 48));
        assert_ne!(a, synthetic_image(5, 64, 48));
        let (lo, hi) = SYNTHETIC_RANGE;
        assert!(a.data().iter().all(|&v| (lo..=hi).contains(&v)));
    }
}
