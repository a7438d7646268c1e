//! Deterministic stand-in watermarkers for exercising the harness and ensembles.

use super::{Secret, WatermarkError, Watermarker};
use crate::imgcore::Image;

/// Writes each bit into the parity of a rounded sample.
///
/// Bit `i` lives at flat sample index `offset + i * stride`, so doubles with
/// the same stride and different offsets touch disjoint samples.
#[derive(Debug, Clone)]
pub struct LsbDouble {
    pub capacity: usize,
    pub offset: usize,
    pub stride: usize,
}

impl LsbDouble {
    pub fn new(capacity: usize, offset: usize, stride: usize) -> Self {
        LsbDouble {
            capacity,
            offset,
            stride: stride.max(1),
        }
    }

    fn index(&self, i: usize, img: &Image) -> Result<usize, WatermarkError> {
        let idx = self.offset + i * self.stride;
        if idx >= img.len() {
            return Err(WatermarkError::CapacityOverflow {
                method: self.name(),
                needed: self.capacity,
                available: img.len().saturating_sub(self.offset).div_ceil(self.stride),
            });
        }
        Ok(idx)
    }
}

impl Watermarker for LsbDouble {
    fn name(&self) -> String {
        format!("lsb+{}/{}", self.offset, self.stride)
    }

    fn capacity(&self) -> usize {
        self.capacity
    }

    fn embed(&self, cover: &Image, secret: &Secret) -> Result<Image, WatermarkError> {
        if secret.len() != self.capacity {
            return Err(WatermarkError::LengthMismatch {
                expected: self.capacity,
                found: secret.len(),
            });
        }
        let mut data = cover.data().to_vec();
        for (i, &bit) in secret.bits().iter().enumerate() {
            let idx = self.index(i, cover)?;
            let mut v = data[idx].round();
            if (((v - cover.pixel_min()) as i64).rem_euclid(2) == 1) != bit {
                v += if v + 1.0 <= cover.pixel_max() { 1.0 } else { -1.0 };
            }
            data[idx] = v;
        }
        Ok(cover.with_data(data))
    }

    fn extract(&self, img: &Image) -> Result<Secret, WatermarkError> {
        (0..self.capacity)
            .map(|i| {
                let v = img.data()[self.index(i, img)?].round();
                Ok(((v - img.pixel_min()) as i64).rem_euclid(2) == 1)
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Secret::new)
    }
}

/// Wraps another watermarker and flips extracted bit 0.
pub struct FlipOneDouble<W>(pub W);

impl<W: Watermarker> Watermarker for FlipOneDouble<W> {
    fn name(&self) -> String {
        format!("flip1({})", self.0.name())
    }

    fn capacity(&self) -> usize {
        self.0.capacity()
    }

    fn embed(&self, cover: &Image, secret: &Secret) -> Result<Image, WatermarkError> {
        self.0.embed(cover, secret)
    }

    fn extract(&self, img: &Image) -> Result<Secret, WatermarkError> {
        let mut bits = self.0.extract(img)?.into_bits();
        if let Some(b) = bits.first_mut() {
            *b = !*b;
        }
        Ok(Secret::new(bits))
    }
}

/// Zero-capacity identity: leaves the image untouched and extracts the empty secret.
#[derive(Debug, Clone, Copy, Default)]
pub struct PassThrough;

impl Watermarker for PassThrough {
    fn name(&self) -> String {
        "pass_through".into()
    }

    fn capacity(&self) -> usize {
        0
    }

    fn embed(&self, cover: &Image, _secret: &Secret) -> Result<Image, WatermarkError> {
        Ok(cover.clone())
    }

    fn extract(&self, _img: &Image) -> Result<Secret, WatermarkError> {
        Ok(Secret::zeros(0))
    }
}

/// Overwrites a fixed set of samples with a fixed value, regardless of the secret.
///
/// Idempotent, so two copies produce the same image in series and in parallel.
#[derive(Debug, Clone)]
pub struct StampDouble {
    pub capacity: usize,
    pub stride: usize,
    pub value: f64,
}

impl Watermarker for StampDouble {
    fn name(&self) -> String {
        "stamp".into()
    }

    fn capacity(&self) -> usize {
        self.capacity
    }

    fn embed(&self, cover: &Image, _secret: &Secret) -> Result<Image, WatermarkError> {
        let mut data = cover.data().to_vec();
        for v in data.iter_mut().step_by(self.stride.max(1)) {
            *v = self.value;
        }
        Ok(cover.with_data(data))
    }

    fn extract(&self, _img: &Image) -> Result<Secret, WatermarkError> {
        Ok(Secret::zeros(self.capacity))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lsb_round_trip_and_disjointness() {
        let img = Image::filled(8, 8, 3, 255.0);
        let a = LsbDouble::new(16, 0, 2);
        let b = LsbDouble::new(16, 1, 2);
        let sa = Secret::from_bit_str("1011001110001111").unwrap();
        let sb = Secret::from_bit_str("0100110001110000").unwrap();
        let both = b.embed(&a.embed(&img, &sa).unwrap(), &sb).unwrap();
        assert_eq!(a.extract(&both).unwrap(), sa);
        assert_eq!(b.extract(&both).unwrap(), sb);
    }
}
