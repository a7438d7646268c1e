//! Orthonormal DCT-II and one-level Haar transforms on row-major planes.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Row-major `n x n` orthonormal DCT-II matrix: `C[k][i]`.
pub fn dct_matrix(n: usize) -> Arc<Vec<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("dct cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut m = vec![0.0; n * n];
            let nf = n as f64;
            for k in 0..n {
                let a = if k == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
                for i in 0..n {
                    m[k * n + i] =
                        a * (std::f64::consts::PI * (2 * i + 1) as f64 * k as f64 / (2.0 * nf)).cos();
                }
            }
            Arc::new(m)
        })
        .clone()
}

/// Separable 2-D DCT of a `w x h` plane (`w` columns, `h` rows).
pub fn dct2(plane: &[f64], w: usize, h: usize) -> Vec<f64> {
    separable(plane, w, h, false)
}

pub fn idct2(coeffs: &[f64], w: usize, h: usize) -> Vec<f64> {
    separable(coeffs, w, h, true)
}

fn separable(src: &[f64], w: usize, h: usize, inverse: bool) -> Vec<f64> {
    debug_assert_eq!(src.len(), w * h);
    let cw = dct_matrix(w);
    let ch = dct_matrix(h);
    // rows
    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for k in 0..w {
            let mut acc = 0.0;
            for i in 0..w {
                acc += if inverse { cw[i * w + k] * row[i] } else { cw[k * w + i] * row[i] };
            }
            tmp[y * w + k] = acc;
        }
    }
    // columns
    let mut out = vec![0.0; w * h];
    let mut col = vec![0.0; h];
    for x in 0..w {
        for y in 0..h {
            col[y] = tmp[y * w + x];
        }
        for k in 0..h {
            let mut acc = 0.0;
            for i in 0..h {
                acc += if inverse { ch[i * h + k] * col[i] } else { ch[k * h + i] * col[i] };
            }
            out[k * w + x] = acc;
        }
    }
    out
}

/// Copies the `n x n` block with top-left corner `(bx, by)` out of a plane.
pub fn read_block(plane: &[f64], width: usize, bx: usize, by: usize, n: usize) -> Vec<f64> {
    let mut b = Vec::with_capacity(n * n);
    for y in 0..n {
        let start = (by + y) * width + bx;
        b.extend_from_slice(&plane[start..start + n]);
    }
    b
}

pub fn write_block(plane: &mut [f64], width: usize, bx: usize, by: usize, n: usize, block: &[f64]) {
    for y in 0..n {
        let start = (by + y) * width + bx;
        plane[start..start + n].copy_from_slice(&block[y * n..(y + 1) * n]);
    }
}

/// One-level orthonormal Haar decomposition of the even-sized top-left region.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarBands {
    pub half_w: usize,
    pub half_h: usize,
    pub ll: Vec<f64>,
    /// Horizontal detail (column differences).
    pub hl: Vec<f64>,
    /// Vertical detail (row differences).
    pub lh: Vec<f64>,
    pub hh: Vec<f64>,
}

pub fn haar_forward(plane: &[f64], w: usize, h: usize) -> HaarBands {
    let (hw, hh) = (w / 2, h / 2);
    let n = hw * hh;
    let mut bands = HaarBands {
        half_w: hw,
        half_h: hh,
        ll: vec![0.0; n],
        hl: vec![0.0; n],
        lh: vec![0.0; n],
        hh: vec![0.0; n],
    };
    for y in 0..hh {
        for x in 0..hw {
            let a = plane[(2 * y) * w + 2 * x];
            let b = plane[(2 * y) * w + 2 * x + 1];
            let c = plane[(2 * y + 1) * w + 2 * x];
            let d = plane[(2 * y + 1) * w + 2 * x + 1];
            let i = y * hw + x;
            bands.ll[i] = 0.5 * (a + b + c + d);
            bands.hl[i] = 0.5 * (a - b + c - d);
            bands.lh[i] = 0.5 * (a + b - c - d);
            bands.hh[i] = 0.5 * (a - b - c + d);
        }
    }
    bands
}

/// Writes the reconstruction into the even region of `plane`; trailing
/// odd row/column samples are left untouched.
pub fn haar_inverse(bands: &HaarBands, plane: &mut [f64], w: usize) {
    let hw = bands.half_w;
    for y in 0..bands.half_h {
        for x in 0..hw {
            let i = y * hw + x;
            let (ll, hl, lh, hh) = (bands.ll[i], bands.hl[i], bands.lh[i], bands.hh[i]);
            plane[(2 * y) * w + 2 * x] = 0.5 * (ll + hl + lh + hh);
            plane[(2 * y) * w + 2 * x + 1] = 0.5 * (ll - hl + lh - hh);
            plane[(2 * y + 1) * w + 2 * x] = 0.5 * (ll + hl - lh - hh);
            plane[(2 * y + 1) * w + 2 * x + 1] = 0.5 * (ll - hl - lh + hh);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random_range(-50.0..50.0)).collect()
    }

    #[test]
    fn dct_round_trip_and_energy() {
        for (w, h) in [(8, 8), (4, 4), (12, 7)] {
            let x = random(w * h, 1);
            let c = dct2(&x, w, h);
            let e1: f64 = x.iter().map(|v| v * v).sum();
            let e2: f64 = c.iter().map(|v| v * v).sum();
            assert!((e1 - e2).abs() < 1e-8 * e1);
            let back = idct2(&c, w, h);
            for (a, b) in x.iter().zip(&back) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn dct_dc_of_constant() {
        let c = dct2(&[3.0; 64], 8, 8);
        assert!((c[0] - 24.0).abs() < 1e-12);
        assert!(c[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn haar_round_trip_keeps_trailing() {
        let (w, h) = (7, 5);
        let x = random(w * h, 2);
        let bands = haar_forward(&x, w, h);
        assert_eq!((bands.half_w, bands.half_h), (3, 2));
        let mut y = x.clone();
        y.iter_mut().for_each(|v| *v += 0.0);
        haar_inverse(&bands, &mut y, w);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn block_io() {
        let mut p: Vec<f64> = (0..64).map(|v| v as f64).collect();
        let b = read_block(&p, 8, 4, 4, 4);
        assert_eq!(b[0], 36.0);
        write_block(&mut p, 8, 0, 0, 4, &b);
        assert_eq!(p[0], 36.0);
    }
}
