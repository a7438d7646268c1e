//! Scalar quantisation index modulation on two interleaved lattices
//! `{2 step t}` (bit 0) and `{2 step t + step}` (bit 1).

/// Nearest point of the lattice selected by `bit`.
pub fn qim_embed(v: f64, step: f64, bit: bool) -> f64 {
    let offset = if bit { step } else { 0.0 };
    let t = ((v - offset) / (2.0 * step)).round();
    2.0 * step * t + offset
}

/// Bit whose lattice holds the point nearest `v`; ties go to 0.
pub fn qim_decode(v: f64, step: f64) -> bool {
    let d0 = (v - qim_embed(v, step, false)).abs();
    let d1 = (v - qim_embed(v, step, true)).abs();
    d1 < d0
}
