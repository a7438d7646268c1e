//! Full-range BT.601 (JFIF) colour conversion.

use super::{Image, ImageError};

/// Luma weights `(Kr, Kg, Kb)`.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

const KR: f64 = LUMA_WEIGHTS[0];
const KG: f64 = LUMA_WEIGHTS[1];
const KB: f64 = LUMA_WEIGHTS[2];

fn require_rgb(img: &Image) -> Result<(), ImageError> {
    if img.channels() != 3 {
        return Err(ImageError::ChannelCount {
            expected: 3,
            found: img.channels(),
        });
    }
    Ok(())
}

/// Chroma offset: 128 on the 8-bit range, scaled for other ranges.
fn chroma_offset(img: &Image) -> f64 {
    img.pixel_min() + img.range() * 128.0 / 255.0
}

/// Luma plane of a 3-channel image, in the image's own units.
pub fn luma(img: &Image) -> Result<Vec<f64>, ImageError> {
    require_rgb(img)?;
    let (r, g, b) = (img.plane(0), img.plane(1), img.plane(2));
    Ok(r.iter()
        .zip(g)
        .zip(b)
        .map(|((r, g), b)| KR * r + KG * g + KB * b)
        .collect())
}

pub fn rgb_to_ycbcr(img: &Image) -> Result<Image, ImageError> {
    require_rgb(img)?;
    let off = chroma_offset(img);
    let lo = img.pixel_min();
    let n = img.width() * img.height();
    let mut out = vec![0.0; 3 * n];
    let (r, g, b) = (img.plane(0), img.plane(1), img.plane(2));
    for i in 0..n {
        let (rr, gg, bb) = (r[i] - lo, g[i] - lo, b[i] - lo);
        let y = KR * rr + KG * gg + KB * bb;
        out[i] = lo + y;
        out[n + i] = off + (bb - y) / (2.0 * (1.0 - KB));
        out[2 * n + i] = off + (rr - y) / (2.0 * (1.0 - KR));
    }
    Ok(img.with_data(out))
}

pub fn ycbcr_to_rgb(img: &Image) -> Result<Image, ImageError> {
    require_rgb(img)?;
    let off = chroma_offset(img);
    let lo = img.pixel_min();
    let n = img.width() * img.height();
    let mut out = vec![0.0; 3 * n];
    let (yp, cb, cr) = (img.plane(0), img.plane(1), img.plane(2));
    for i in 0..n {
        let y = yp[i] - lo;
        let r = y + 2.0 * (1.0 - KR) * (cr[i] - off);
        let b = y + 2.0 * (1.0 - KB) * (cb[i] - off);
        let g = (y - KR * r - KB * b) / KG;
        out[i] = lo + r;
        out[n + i] = lo + g;
        out[2 * n + i] = lo + b;
    }
    Ok(img.with_data(out))
}

/// Linear part of the forward transform applied to a signed difference triple.
pub(crate) fn ycbcr_delta(dr: f64, dg: f64, db: f64) -> [f64; 3] {
    let y = KR * dr + KG * dg + KB * db;
    [
        y,
        (db - y) / (2.0 * (1.0 - KB)),
        (dr - y) / (2.0 * (1.0 - KR)),
    ]
}
