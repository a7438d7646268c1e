use super::{Image, ImageError};
use image::RgbImage;
use std::path::Path;

/// Decodes any supported raster (PNG in practice) into a `[0, 255]` RGB image.
pub fn load_png(path: impl AsRef<Path>) -> Result<Image, ImageError> {
    let path = path.as_ref();
    let dynimg = image::open(path).map_err(|e| ImageError::Io(format!("{}: {e}", path.display())))?;
    Ok(from_rgb8(&dynimg.to_rgb8()))
}

/// Quantises to 8 bits and writes a PNG.
pub fn save_png(img: &Image, path: impl AsRef<Path>) -> Result<(), ImageError> {
    let path = path.as_ref();
    to_rgb8(img)?
        .save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| ImageError::Io(format!("{}: {e}", path.display())))
}

pub fn from_rgb8(buf: &RgbImage) -> Image {
    let (w, h) = (buf.width() as usize, buf.height() as usize);
    let n = w * h;
    let mut data = vec![0.0; 3 * n];
    for (i, p) in buf.pixels().enumerate() {
        for c in 0..3 {
            data[c * n + i] = p.0[c] as f64;
        }
    }
    Image::from_data(w, h, 3, data).expect("buffer sized from image dimensions")
}

/// Rounds to the 8-bit grid, rescaling from the image's range to `[0, 255]`.
pub fn to_rgb8(img: &Image) -> Result<RgbImage, ImageError> {
    if img.channels() != 3 {
        return Err(ImageError::ChannelCount {
            expected: 3,
            found: img.channels(),
        });
    }
    let (w, h) = (img.width(), img.height());
    let n = w * h;
    let scale = 255.0 / img.range();
    let lo = img.pixel_min();
    let d = img.data();
    let mut out = RgbImage::new(w as u32, h as u32);
    for (i, p) in out.pixels_mut().enumerate() {
        for c in 0..3 {
            p.0[c] = ((d[c * n + i] - lo) * scale).round().clamp(0.0, 255.0) as u8;
        }
    }
    Ok(out)
}
