//! QIM transform-domain methods operating on the BT.601 luma plane.
//!
//! Luma changes are pushed back to RGB by adding the same delta to all three
//! channels, which leaves Cb and Cr untouched.

use super::qim::{qim_decode, qim_embed};
use super::{MethodId, Secret, WatermarkerSpec};
use crate::imgcore::{luma as luma_plane, Image};
use crate::transform::{dct2, haar_forward, haar_inverse, idct2, read_block, write_block};
use nalgebra::Matrix4;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Re-embedding passes used to recover from clamping at the range limits.
const MAX_PASSES: usize = 4;

pub(super) fn available(spec: &WatermarkerSpec, w: usize, h: usize) -> usize {
    let b = spec.block_size;
    match spec.method {
        MethodId::Dct => (w / b) * (h / b),
        MethodId::Dwt => 2 * (w / 2) * (h / 2),
        MethodId::DwtDct | MethodId::DwtDctSvd => ((w / 2) / b) * ((h / 2) / b),
        MethodId::SpreadSpectrum => unreachable!("spread spectrum is not a luma method"),
    }
}

/// Mid-frequency `(u, v)` positions of a `b x b` DCT block.
fn mid_band(b: usize) -> Vec<(usize, usize)> {
    let lo = 2.max(3 * b / 8);
    let hi = lo.max(5 * b / 8);
    let mut band = Vec::new();
    for u in 1..b {
        for v in 1..b {
            if (lo..=hi).contains(&(u + v)) {
                band.push((u, v));
            }
        }
    }
    band
}

/// Keyed slot indices (and a per-slot coefficient choice for block methods).
struct Slots {
    slots: Vec<usize>,
    coeff: Vec<usize>,
}

fn select(spec: &WatermarkerSpec, total: usize, band_len: usize) -> Slots {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.keyed_seed());
    let slots = sample(&mut rng, total, spec.capacity_bits).into_vec();
    let coeff = slots
        .iter()
        .map(|_| if band_len > 1 { rng.random_range(0..band_len) } else { 0 })
        .collect();
    Slots { slots, coeff }
}

/// Visits the carrier scalar of every selected slot, in message order.
fn visit(spec: &WatermarkerSpec, plane: &mut [f64], w: usize, h: usize, mut f: impl FnMut(usize, &mut f64)) {
    let b = spec.block_size;
    match spec.method {
        MethodId::Dct => {
            let band = mid_band(b);
            let bw = w / b;
            let sel = select(spec, available(spec, w, h), band.len());
            for (i, (&slot, &ci)) in sel.slots.iter().zip(&sel.coeff).enumerate() {
                let (bx, by) = ((slot % bw) * b, (slot / bw) * b);
                let mut c = dct2(&read_block(plane, w, bx, by, b), b, b);
                let (u, v) = band[ci];
                f(i, &mut c[v * b + u]);
                write_block(plane, w, bx, by, b, &idct2(&c, b, b));
            }
        }
        MethodId::Dwt => {
            let mut bands = haar_forward(plane, w, h);
            let per = bands.half_w * bands.half_h;
            let sel = select(spec, 2 * per, 1);
            for (i, &slot) in sel.slots.iter().enumerate() {
                if slot < per {
                    f(i, &mut bands.hl[slot]);
                } else {
                    f(i, &mut bands.lh[slot - per]);
                }
            }
            haar_inverse(&bands, plane, w);
        }
        MethodId::DwtDct | MethodId::DwtDctSvd => {
            let mut bands = haar_forward(plane, w, h);
            let lw = bands.half_w;
            let svd = spec.method == MethodId::DwtDctSvd;
            let band = if svd { vec![(0, 0)] } else { mid_band(b) };
            let bw = lw / b;
            let sel = select(spec, available(spec, w, h), band.len());
            for (i, (&slot, &ci)) in sel.slots.iter().zip(&sel.coeff).enumerate() {
                let (bx, by) = ((slot % bw) * b, (slot / bw) * b);
                let mut c = dct2(&read_block(&bands.ll, lw, bx, by, b), b, b);
                if svd {
                    modify_top_singular_value(&mut c, b, |s| f(i, s));
                } else {
                    let (u, v) = band[ci];
                    f(i, &mut c[v * b + u]);
                }
                write_block(&mut bands.ll, lw, bx, by, b, &idct2(&c, b, b));
            }
            haar_inverse(&bands, plane, w);
        }
        MethodId::SpreadSpectrum => unreachable!(),
    }
}

/// Runs `f` on the largest singular value of a square block and rebuilds it.
fn modify_top_singular_value(block: &mut [f64], b: usize, f: impl FnOnce(&mut f64)) {
    if b == 4 {
        let m = Matrix4::from_row_slice(block);
        let svd = m.svd(true, true);
        let (u, vt) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
        let mut s = svd.singular_values;
        let top = s.imax();
        f(&mut s[top]);
        let rebuilt = u * Matrix4::from_diagonal(&s) * vt;
        for r in 0..4 {
            for c in 0..4 {
                block[r * 4 + c] = rebuilt[(r, c)];
            }
        }
    } else {
        let m = nalgebra::DMatrix::from_row_slice(b, b, block);
        let svd = m.svd(true, true);
        let (u, vt) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
        let mut s = svd.singular_values;
        let top = s.imax();
        f(&mut s[top]);
        let rebuilt = u * nalgebra::DMatrix::from_diagonal(&s) * vt;
        for r in 0..b {
            for c in 0..b {
                block[r * b + c] = rebuilt[(r, c)];
            }
        }
    }
}

pub(super) fn embed(spec: &WatermarkerSpec, cover: &Image, secret: &Secret) -> Image {
    let (w, h) = (cover.width(), cover.height());
    let n = w * h;
    let step = spec.quantization_step;
    let bits = secret.bits();
    let mut out = cover.clone();
    for _ in 0..MAX_PASSES {
        let y = luma_plane(&out).expect("three channels checked by caller");
        let mut target = y.clone();
        visit(spec, &mut target, w, h, |i, v| *v = qim_embed(*v, step, bits[i]));
        let mut raw = out.data().to_vec();
        for c in 0..3 {
            for i in 0..n {
                raw[c * n + i] += target[i] - y[i];
            }
        }
        let clamped = out.count_out_of_range(&raw);
        out = out.with_data(raw);
        if clamped == 0 {
            break;
        }
    }
    out
}

pub(super) fn extract(spec: &WatermarkerSpec, img: &Image) -> Secret {
    let (w, h) = (img.width(), img.height());
    let step = spec.quantization_step;
    let mut y = luma_plane(img).expect("three channels checked by caller");
    let mut bits = vec![false; spec.capacity_bits];
    visit(spec, &mut y, w, h, |i, v| bits[i] = qim_decode(*v, step));
    Secret::new(bits)
}
