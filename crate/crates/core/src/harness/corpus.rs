use super::synthetic::synthetic_image;
use super::HarnessError;
use crate::augment::resize;
use crate::imgcore::{load_png, Image};
use std::path::Path;

/// Default cap on the long side of loaded images.
pub const DEFAULT_MAX_DIM: usize = 512;

/// Ordered, non-empty set of cover images.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub id: String,
    pub names: Vec<String>,
    pub images: Vec<Image>,
}

impl Corpus {
    pub fn from_images(id: impl Into<String>, names: Vec<String>, images: Vec<Image>) -> Result<Self, HarnessError> {
        if images.is_empty() {
            return Err(HarnessError::EmptyCorpus);
        }
        if names.len() != images.len() {
            return Err(HarnessError::Invalid("one name per image required".into()));
        }
        Ok(Corpus {
            id: id.into(),
            names,
            images,
        })
    }

    /// `count` generated images of `size x size`.
    pub fn synthetic(count: usize, size: usize, seed: u64) -> Result<Self, HarnessError> {
        let images = (0..count)
            .map(|i| synthetic_image(seed.wrapping_add(i as u64), size, size))
            .collect();
        let names = (0..count).map(|i| format!("synthetic_{i:03}")).collect();
        Self::from_images(format!("synthetic:{count}x{size}:{seed}"), names, images)
    }

    /// Every `.png` in `dir`, sorted by file name. Images whose long side
    /// exceeds `max_dim` are centre-cropped to a square and scaled to it.
    pub fn load_dir(dir: &Path, max_dim: Option<usize>) -> Result<Self, HarnessError> {
        let entries = std::fs::read_dir(dir)
            .map_err(|e| HarnessError::Io(format!("{}: {e}", dir.display())))?;
        let mut paths: Vec<_> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.is_file()
                    && p.extension()
                        .is_some_and(|x| x.eq_ignore_ascii_case("png"))
            })
            .collect();
        paths.sort();
        let mut names = Vec::with_capacity(paths.len());
        let mut images = Vec::with_capacity(paths.len());
        for p in &paths {
            let img = load_png(p)?;
            images.push(match max_dim {
                Some(cap) => fit(&img, cap),
                None => img,
            });
            names.push(p.file_name().unwrap_or_default().to_string_lossy().into_owned());
        }
        Self::from_images(dir.display().to_string(), names, images)
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }
}

fn fit(img: &Image, cap: usize) -> Image {
    let (w, h) = (img.width(), img.height());
    if w.max(h) <= cap {
        return img.clone();
    }
    let side = w.min(h);
    let (x0, y0) = ((w - side) / 2, (h - side) / 2);
    let mut data = Vec::with_capacity(side * side * img.channels());
    for c in 0..img.channels() {
        let p = img.plane(c);
        for y in y0..y0 + side {
            data.extend_from_slice(&p[y * w + x0..y * w + x0 + side]);
        }
    }
    let square = Image::with_range(side, side, img.channels(), data, img.pixel_min(), img.pixel_max())
        .expect("cropped buffer matches shape");
    let s = side.min(cap);
    resize(&square, s, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oversized_images_are_cropped_and_scaled() {
        let img = Image::filled(40, 20, 3, 9.0);
        let f = fit(&img, 16);
        assert_eq!((f.width(), f.height()), (16, 16));
        assert_eq!(fit(&img, 64), img);
    }

    #[test]
    fn empty_corpus_is_rejected() {
        assert!(matches!(
            Corpus::from_images("x", vec![], vec![]),
            Err(HarnessError::EmptyCorpus)
        ));
    }
}
