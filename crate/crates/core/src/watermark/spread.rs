//! Keyed spread-spectrum watermarking with orthonormal full-image carriers.
//!
//! All keys share one method-wide carrier space: a fixed set of `m`
//! orthonormal, zero-mean, high-passed noise images (`m` = capacity). A key
//! selects an orthonormal frame inside that space through a seeded random
//! rotation. Different keys therefore give near-uncorrelated carriers, yet a
//! second embedding with any key lands in the same subspace and disturbs the
//! first message.

use super::{Secret, WatermarkerSpec};
use crate::imgcore::Image;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Seed of the shared carrier space.
const BASIS_SEED: u64 = 0x51_5eed_ca77_1e55;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct BasisKey {
    width: usize,
    height: usize,
    channels: usize,
    dim: usize,
}

/// Orthonormal carrier basis, one unit-norm image per row.
struct Basis {
    vectors: Vec<Vec<f64>>,
}

pub(super) fn available(w: usize, h: usize, c: usize) -> usize {
    // one dimension per channel goes to mean removal
    (w * h * c).saturating_sub(c)
}

fn basis_for(key: BasisKey) -> Arc<Basis> {
    static CACHE: OnceLock<Mutex<HashMap<BasisKey, Arc<Basis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(b) = cache.lock().expect("basis cache poisoned").get(&key) {
        return b.clone();
    }
    let built = Arc::new(build_basis(key));
    cache
        .lock()
        .expect("basis cache poisoned")
        .entry(key)
        .or_insert(built)
        .clone()
}

fn build_basis(key: BasisKey) -> Basis {
    let BasisKey {
        width: w,
        height: h,
        channels: c,
        dim,
    } = key;
    let n = w * h;
    let mut rng = ChaCha8Rng::seed_from_u64(BASIS_SEED ^ (dim as u64).rotate_left(32));
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(dim);
    while vectors.len() < dim {
        let noise: Vec<f64> = (0..n * c).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mut v = Vec::with_capacity(n * c);
        for ch in 0..c {
            let mut plane = high_pass(&noise[ch * n..(ch + 1) * n], w, h);
            let mean = plane.iter().sum::<f64>() / n as f64;
            plane.iter_mut().for_each(|x| *x -= mean);
            v.extend(plane);
        }
        // modified Gram-Schmidt, applied twice for numerical orthogonality
        for _ in 0..2 {
            for u in &vectors {
                let d = dot(&v, u);
                v.iter_mut().zip(u).for_each(|(a, b)| *a -= d * b);
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm < 1e-8 {
            continue;
        }
        v.iter_mut().for_each(|a| *a /= norm);
        vectors.push(v);
    }
    Basis { vectors }
}

/// `x - box3x3(x)` with reflected borders.
fn high_pass(plane: &[f64], w: usize, h: usize) -> Vec<f64> {
    let reflect = |i: isize, n: usize| -> usize {
        if n == 1 {
            0
        } else if i < 0 {
            (-i) as usize
        } else if i as usize >= n {
            2 * (n - 1) - i as usize
        } else {
            i as usize
        }
    };
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for dy in -1..=1isize {
                for dx in -1..=1isize {
                    acc += plane[reflect(y as isize + dy, h) * w + reflect(x as isize + dx, w)];
                }
            }
            out[y * w + x] = plane[y * w + x] - acc / 9.0;
        }
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Keyed `m x m` orthogonal matrix; row `i` holds carrier `i` in basis coordinates.
fn rotation(seed: u64, m: usize) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(m, m, |_, _| StandardNormal.sample(&mut rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    // fix column signs so the rotation is a deterministic function of the seed
    for j in 0..m {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

struct Carriers {
    basis: Arc<Basis>,
    rotation: DMatrix<f64>,
}

fn carriers(spec: &WatermarkerSpec, img: &Image) -> Carriers {
    let m = spec.capacity_bits;
    let basis = basis_for(BasisKey {
        width: img.width(),
        height: img.height(),
        channels: img.channels(),
        dim: m,
    });
    Carriers {
        basis,
        rotation: rotation(spec.keyed_seed(), m),
    }
}

/// Per-carrier amplitude giving a per-sample RMS of `alpha`.
fn amplitude(spec: &WatermarkerSpec, img: &Image) -> f64 {
    spec.embed_strength * (img.len() as f64 / spec.capacity_bits as f64).sqrt()
}

/// Unit-norm carrier images for a key, materialised (used by tests and tools).
pub fn carrier_images(spec: &WatermarkerSpec, img: &Image) -> Vec<Vec<f64>> {
    let c = carriers(spec, img);
    let m = spec.capacity_bits;
    (0..m)
        .map(|i| {
            let mut v = vec![0.0; img.len()];
            for k in 0..m {
                let coef = c.rotation[(i, k)];
                v.iter_mut()
                    .zip(&c.basis.vectors[k])
                    .for_each(|(a, b)| *a += coef * b);
            }
            v
        })
        .collect()
}

pub(super) fn embed(spec: &WatermarkerSpec, cover: &Image, secret: &Secret) -> Image {
    let c = carriers(spec, cover);
    let m = spec.capacity_bits;
    let amp = amplitude(spec, cover);
    // basis coordinates of sum_i sign_i * carrier_i
    let mut coords = vec![0.0; m];
    for (i, &bit) in secret.bits().iter().enumerate() {
        let sign = if bit { 1.0 } else { -1.0 };
        for (k, slot) in coords.iter_mut().enumerate() {
            *slot += sign * c.rotation[(i, k)];
        }
    }
    let mut data = cover.data().to_vec();
    for (k, &coef) in coords.iter().enumerate() {
        let scale = amp * coef;
        data.iter_mut()
            .zip(&c.basis.vectors[k])
            .for_each(|(a, b)| *a += scale * b);
    }
    cover.with_data(data)
}

pub(super) fn extract(spec: &WatermarkerSpec, img: &Image) -> Secret {
    let c = carriers(spec, img);
    let m = spec.capacity_bits;
    let proj: Vec<f64> = c.basis.vectors.iter().map(|b| dot(img.data(), b)).collect();
    let bits = (0..m)
        .map(|i| (0..m).map(|k| c.rotation[(i, k)] * proj[k]).sum::<f64>() > 0.0)
        .collect();
    Secret::new(bits)
}
