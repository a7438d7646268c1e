use super::ImageError;

/// Owned planar raster with explicit pixel range.
///
/// Every public constructor and operation keeps all samples inside
/// `[pixel_min, pixel_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    channels: usize,
    pixel_min: f64,
    pixel_max: f64,
    data: Vec<f64>,
}

/// Signed, unclamped difference between two images of the same shape.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    width: usize,
    height: usize,
    channels: usize,
    pixel_min: f64,
    pixel_max: f64,
    data: Vec<f64>,
}

impl Image {
    /// Image filled with `value` (clamped) in the default `[0, 255]` range.
    pub fn filled(width: usize, height: usize, channels: usize, value: f64) -> Self {
        let value = value.clamp(0.0, 255.0);
        Self {
            width,
            height,
            channels,
            pixel_min: 0.0,
            pixel_max: 255.0,
            data: vec![value; width * height * channels],
        }
    }

    /// Builds an image in the default `[0, 255]` range, clamping samples.
    pub fn from_data(
        width: usize,
        height: usize,
        channels: usize,
        data: Vec<f64>,
    ) -> Result<Self, ImageError> {
        Self::with_range(width, height, channels, data, 0.0, 255.0)
    }

    pub fn with_range(
        width: usize,
        height: usize,
        channels: usize,
        mut data: Vec<f64>,
        pixel_min: f64,
        pixel_max: f64,
    ) -> Result<Self, ImageError> {
        if pixel_max <= pixel_min || !pixel_min.is_finite() || !pixel_max.is_finite() {
            return Err(ImageError::InvalidRange(pixel_min, pixel_max));
        }
        let expected = width * height * channels;
        if data.len() != expected {
            return Err(ImageError::BufferLength {
                expected,
                found: data.len(),
            });
        }
        for v in &mut data {
            *v = if v.is_nan() { pixel_min } else { v.clamp(pixel_min, pixel_max) };
        }
        Ok(Self {
            width,
            height,
            channels,
            pixel_min,
            pixel_max,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn pixel_min(&self) -> f64 {
        self.pixel_min
    }

    pub fn pixel_max(&self) -> f64 {
        self.pixel_max
    }

    /// `pixel_max - pixel_min`.
    pub fn range(&self) -> f64 {
        self.pixel_max - self.pixel_min
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.pixel_min + self.pixel_max)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// One channel plane, row-major.
    pub fn plane(&self, c: usize) -> &[f64] {
        let n = self.width * self.height;
        &self.data[c * n..(c + 1) * n]
    }

    pub fn get(&self, c: usize, y: usize, x: usize) -> f64 {
        self.data[(c * self.height + y) * self.width + x]
    }

    pub fn shape_string(&self) -> String {
        format!("{}x{}x{}", self.width, self.height, self.channels)
    }

    /// Fails unless `other` has the same shape and pixel range.
    pub fn check_compatible(&self, other: &Image) -> Result<(), ImageError> {
        if self.width != other.width || self.height != other.height || self.channels != other.channels
        {
            return Err(ImageError::ShapeMismatch(
                self.shape_string(),
                other.shape_string(),
            ));
        }
        if self.pixel_min != other.pixel_min || self.pixel_max != other.pixel_max {
            return Err(ImageError::RangeMismatch(
                self.pixel_min,
                self.pixel_max,
                other.pixel_min,
                other.pixel_max,
            ));
        }
        Ok(())
    }

    /// New image of the same shape and range built from `data`, clamped.
    pub fn with_data(&self, data: Vec<f64>) -> Image {
        assert_eq!(data.len(), self.data.len(), "sample count must match");
        let (lo, hi) = (self.pixel_min, self.pixel_max);
        let data = data
            .into_iter()
            .map(|v| if v.is_nan() { lo } else { v.clamp(lo, hi) })
            .collect();
        Image {
            data,
            ..self.clone_meta()
        }
    }

    /// Applies `f` to every sample and clamps the result.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Image {
        self.with_data(self.data.iter().map(|&v| f(v)).collect())
    }

    fn clone_meta(&self) -> Image {
        Image {
            width: self.width,
            height: self.height,
            channels: self.channels,
            pixel_min: self.pixel_min,
            pixel_max: self.pixel_max,
            data: Vec::new(),
        }
    }

    /// Number of samples outside the pixel range if `data` were applied unclamped.
    pub fn count_out_of_range(&self, data: &[f64]) -> usize {
        data.iter()
            .filter(|&&v| v < self.pixel_min || v > self.pixel_max)
            .count()
    }
}

/// `watermarked - original`, unclamped.
pub fn residual(watermarked: &Image, original: &Image) -> Result<Residual, ImageError> {
    watermarked.check_compatible(original)?;
    let data = watermarked
        .data
        .iter()
        .zip(&original.data)
        .map(|(w, o)| w - o)
        .collect();
    Ok(Residual {
        width: original.width,
        height: original.height,
        channels: original.channels,
        pixel_min: original.pixel_min,
        pixel_max: original.pixel_max,
        data,
    })
}

/// `clamp(original + scale * r)`.
pub fn apply_residual(original: &Image, r: &Residual, scale: f64) -> Result<Image, ImageError> {
    if original.width != r.width || original.height != r.height || original.channels != r.channels {
        return Err(ImageError::ShapeMismatch(original.shape_string(), r.shape_string()));
    }
    let data = original
        .data
        .iter()
        .zip(&r.data)
        .map(|(o, d)| o + scale * d)
        .collect();
    Ok(original.with_data(data))
}

impl Image {
    pub fn residual_from(&self, original: &Image) -> Result<Residual, ImageError> {
        residual(self, original)
    }

    pub fn apply_residual(&self, r: &Residual, scale: f64) -> Result<Image, ImageError> {
        apply_residual(self, r, scale)
    }
}

impl Residual {
    pub fn zeros_like(img: &Image) -> Self {
        Residual {
            width: img.width,
            height: img.height,
            channels: img.channels,
            pixel_min: img.pixel_min,
            pixel_max: img.pixel_max,
            data: vec![0.0; img.data.len()],
        }
    }

    pub fn from_data(
        width: usize,
        height: usize,
        channels: usize,
        data: Vec<f64>,
    ) -> Result<Self, ImageError> {
        let expected = width * height * channels;
        if data.len() != expected {
            return Err(ImageError::BufferLength {
                expected,
                found: data.len(),
            });
        }
        Ok(Residual {
            width,
            height,
            channels,
            pixel_min: 0.0,
            pixel_max: 255.0,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn pixel_min(&self) -> f64 {
        self.pixel_min
    }

    pub fn pixel_max(&self) -> f64 {
        self.pixel_max
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn plane(&self, c: usize) -> &[f64] {
        let n = self.width * self.height;
        &self.data[c * n..(c + 1) * n]
    }

    pub fn shape_string(&self) -> String {
        format!("{}x{}x{}", self.width, self.height, self.channels)
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// Element-wise `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &Residual, b: f64) -> Result<Residual, ImageError> {
        if self.data.len() != other.data.len() || self.width != other.width {
            return Err(ImageError::ShapeMismatch(self.shape_string(), other.shape_string()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(Residual {
            data,
            ..self.clone()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_of_identical_is_zero() {
        let x = Image::filled(4, 3, 3, 77.0);
        let r = residual(&x, &x).unwrap();
        assert!(r.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn residual_uniform_offset() {
        let x = Image::filled(4, 4, 3, 100.0);
        let y = Image::filled(4, 4, 3, 130.0);
        let r = residual(&y, &x).unwrap();
        assert!(r.data().iter().all(|&v| v == 30.0));
    }

    #[test]
    fn apply_residual_cases() {
        let x = Image::filled(4, 4, 3, 128.0);
        let r = Residual::from_data(4, 4, 3, vec![20.0; 48]).unwrap();
        assert_eq!(apply_residual(&x, &r, 0.0).unwrap(), x);
        let half = apply_residual(&x, &r, 0.5).unwrap();
        assert!(half.data().iter().all(|&v| v == 138.0));
        let hi = Image::filled(4, 4, 3, 250.0);
        let out = apply_residual(&hi, &r, 1.0).unwrap();
        assert!(out.data().iter().all(|&v| v == 255.0));
    }

    #[test]
    fn shape_mismatch_is_error() {
        let a = Image::filled(4, 4, 3, 0.0);
        let b = Image::filled(4, 5, 3, 0.0);
        assert!(matches!(residual(&a, &b), Err(ImageError::ShapeMismatch(..))));
    }

    #[test]
    fn constructor_rejects_bad_range() {
        assert!(Image::with_range(1, 1, 1, vec![0.0], 1.0, 1.0).is_err());
        assert!(Image::from_data(2, 2, 1, vec![0.0; 3]).is_err());
    }
}
