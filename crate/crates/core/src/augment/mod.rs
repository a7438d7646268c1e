//! Seeded robustness augmentations and the five evaluation suites.
//!
//! Randomness protocol: each step draws one uniform `u` and fires when
//! `u < probability`; only a firing step draws its parameters. A suite
//! runs its fixed steps in order, then samples `choose` pool steps without
//! replacement and runs them in draw order.

mod color;
mod filters;

pub use filters::{motion_kernel, resize, zigzag_order};

use crate::imgcore::{from_rgb8, to_rgb8, Image};
use crate::transform::{dct2, idct2};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AugmentError {
    #[error("unsupported augmentation: {0}")]
    Unsupported(String),
    #[error("invalid augmentation step: {0}")]
    InvalidStep(String),
    #[error("unknown suite '{0}' (expected one of: rivagan, ssl, trustmark_low, trustmark_medium, trustmark_high)")]
    UnknownSuite(String),
    #[error("jpeg round trip failed: {0}")]
    Jpeg(String),
}

/// Closed interval `[lo, hi]`.
pub type Range = (f64, f64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepKind {
    Identity,
    /// Window of sampled area fraction, aspect kept, resized back.
    Crop { scale: Range },
    /// Downscale by a sampled factor and upscale back.
    Scale { scale: Range },
    /// Keeps a sampled fraction of full-image DCT coefficients in zig-zag order.
    FrequencyCompress { keep: Range },
    HorizontalFlip,
    Rotation { degrees: Range },
    /// Sampled area fraction and aspect ratio, resized back.
    ResizedCrop { scale: Range, ratio: Range },
    /// Gaussian blur with an odd kernel drawn from `3..=max_kernel`.
    RandomBlur { max_kernel: usize },
    Jpeg { quality: u8 },
    Brightness { factor: Range },
    Contrast { factor: Range },
    Saturation { factor: Range },
    /// Hue rotation in turns.
    Hue { shift: Range },
    /// Brightness, contrast, saturation and hue jitter applied in that order.
    ColorJiggle { brightness: f64, contrast: f64, saturation: f64, hue: f64 },
    Grayscale,
    GaussianBlur { kernel: usize, sigma: Range },
    /// Standard deviation relative to the pixel range.
    GaussianNoise { std: f64 },
    MotionBlur { kernel: (usize, usize), angle: Range, direction: Range },
    Posterize { bits: u32 },
    /// Per-channel offset bound relative to the pixel range.
    RgbShift { limit: f64 },
    /// Blend factor drawn from `[0, max]`.
    Sharpness { max: f64 },
    MedianBlur { kernel: usize },
    BoxBlur { kernel: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentationStep {
    #[serde(flatten)]
    pub kind: StepKind,
    pub probability: f64,
}

impl AugmentationStep {
    pub fn new(kind: StepKind, probability: f64) -> Self {
        AugmentationStep { kind, probability }
    }

    pub fn always(kind: StepKind) -> Self {
        Self::new(kind, 1.0)
    }

    pub fn validate(&self) -> Result<(), AugmentError> {
        let bad = |m: &str| Err(AugmentError::InvalidStep(format!("{:?}: {m}", self.kind)));
        if !(0.0..=1.0).contains(&self.probability) {
            return bad("probability outside [0, 1]");
        }
        let ranges: Vec<Range> = match &self.kind {
            StepKind::Crop { scale } | StepKind::Scale { scale } => vec![*scale],
            StepKind::FrequencyCompress { keep } => vec![*keep],
            StepKind::Rotation { degrees } => vec![*degrees],
            StepKind::ResizedCrop { scale, ratio } => vec![*scale, *ratio],
            StepKind::Brightness { factor }
            | StepKind::Contrast { factor }
            | StepKind::Saturation { factor } => vec![*factor],
            StepKind::Hue { shift } => vec![*shift],
            StepKind::GaussianBlur { sigma, .. } => vec![*sigma],
            StepKind::MotionBlur { kernel, angle, direction } => {
                vec![(kernel.0 as f64, kernel.1 as f64), *angle, *direction]
            }
            _ => vec![],
        };
        if ranges.iter().any(|(lo, hi)| lo > hi || !lo.is_finite() || !hi.is_finite()) {
            return bad("range bounds out of order");
        }
        match &self.kind {
            StepKind::Crop { scale } | StepKind::Scale { scale } | StepKind::ResizedCrop { scale, .. }
                if scale.0 <= 0.0 || scale.1 > 1.0 =>
            {
                bad("scale must lie in (0, 1]")
            }
            StepKind::FrequencyCompress { keep } if keep.0 <= 0.0 || keep.1 > 1.0 => {
                bad("kept fraction must lie in (0, 1]")
            }
            StepKind::Jpeg { quality } if !(1..=100).contains(quality) => bad("quality must be 1..=100"),
            StepKind::GaussianBlur { kernel, .. }
            | StepKind::MedianBlur { kernel }
            | StepKind::BoxBlur { kernel }
                if kernel % 2 == 0 =>
            {
                bad("kernel size must be odd")
            }
            StepKind::RandomBlur { max_kernel } if *max_kernel < 3 => bad("max kernel below 3"),
            StepKind::GaussianNoise { std } if *std < 0.0 => bad("negative std"),
            _ => Ok(()),
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): Range) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Uniform odd integer in `[lo, hi]`.
fn odd_in(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    let lo = lo | 1;
    let choices = (hi.saturating_sub(lo)) / 2 + 1;
    lo + 2 * rng.random_range(0..choices)
}

fn require_rgb(img: &Image, what: &str) -> Result<(), AugmentError> {
    if img.channels() != 3 {
        return Err(AugmentError::Unsupported(format!(
            "{what} needs 3 channels, image has {}",
            img.channels()
        )));
    }
    Ok(())
}

/// Draws the firing decision, then parameters, then applies the step.
pub fn apply_step(img: &Image, step: &AugmentationStep, rng: &mut ChaCha8Rng) -> Result<Image, AugmentError> {
    step.validate()?;
    if rng.random::<f64>() >= step.probability {
        return Ok(img.clone());
    }
    transform(img, &step.kind, rng)
}

fn transform(img: &Image, kind: &StepKind, rng: &mut ChaCha8Rng) -> Result<Image, AugmentError> {
    let (w, h) = (img.width(), img.height());
    Ok(match kind {
        StepKind::Identity => img.clone(),
        StepKind::Crop { scale } => {
            let s = uniform(rng, *scale).sqrt();
            let cw = ((w as f64 * s).round() as usize).clamp(1, w);
            let ch = ((h as f64 * s).round() as usize).clamp(1, h);
            let x0 = rng.random_range(0..=w - cw);
            let y0 = rng.random_range(0..=h - ch);
            filters::crop_resize(img, x0, y0, cw, ch)
        }
        StepKind::Scale { scale } => {
            let f = uniform(rng, *scale);
            let nw = ((w as f64 * f).round() as usize).max(1);
            let nh = ((h as f64 * f).round() as usize).max(1);
            resize(&resize(img, nw, nh), w, h)
        }
        StepKind::FrequencyCompress { keep } => {
            let f = uniform(rng, *keep);
            let kept = ((f * (w * h) as f64).ceil() as usize).clamp(1, w * h);
            let order = zigzag_order(w, h);
            filters::map_planes(img, |p| {
                let mut c = dct2(p, w, h);
                for &i in &order[kept..] {
                    c[i] = 0.0;
                }
                idct2(&c, w, h)
            })
        }
        StepKind::HorizontalFlip => filters::hflip(img),
        StepKind::Rotation { degrees } => filters::rotate(img, uniform(rng, *degrees)),
        StepKind::ResizedCrop { scale, ratio } => {
            let (x0, y0, cw, ch) = resized_crop_window(w, h, *scale, *ratio, rng);
            filters::crop_resize(img, x0, y0, cw, ch)
        }
        StepKind::RandomBlur { max_kernel } => {
            let k = odd_in(rng, 3, *max_kernel);
            let sigma = 0.3 * ((k as f64 - 1.0) * 0.5 - 1.0) + 0.8;
            filters::gaussian_blur(img, k, sigma)
        }
        StepKind::Jpeg { quality } => jpeg(img, *quality)?,
        StepKind::Brightness { factor } => {
            require_rgb(img, "brightness")?;
            color::brightness(img, uniform(rng, *factor))
        }
        StepKind::Contrast { factor } => {
            require_rgb(img, "contrast")?;
            color::contrast(img, uniform(rng, *factor))
        }
        StepKind::Saturation { factor } => {
            require_rgb(img, "saturation")?;
            color::saturation(img, uniform(rng, *factor))
        }
        StepKind::Hue { shift } => {
            require_rgb(img, "hue")?;
            color::hue(img, uniform(rng, *shift))
        }
        StepKind::ColorJiggle { brightness, contrast, saturation, hue } => {
            require_rgb(img, "color jiggle")?;
            let b = uniform(rng, (1.0 - brightness, 1.0 + brightness));
            let c = uniform(rng, (1.0 - contrast, 1.0 + contrast));
            let s = uniform(rng, (1.0 - saturation, 1.0 + saturation));
            let hh = uniform(rng, (-hue, *hue));
            let out = color::brightness(img, b);
            let out = color::contrast(&out, c);
            let out = color::saturation(&out, s);
            color::hue(&out, hh)
        }
        StepKind::Grayscale => {
            require_rgb(img, "grayscale")?;
            color::grayscale(img)
        }
        StepKind::GaussianBlur { kernel, sigma } => {
            filters::gaussian_blur(img, *kernel, uniform(rng, *sigma))
        }
        StepKind::GaussianNoise { std } => {
            let normal = Normal::new(0.0, std * img.range())
                .map_err(|e| AugmentError::InvalidStep(e.to_string()))?;
            let data = img.data().iter().map(|v| v + normal.sample(rng)).collect();
            img.with_data(data)
        }
        StepKind::MotionBlur { kernel, angle, direction } => {
            let k = odd_in(rng, kernel.0, kernel.1);
            let a = uniform(rng, *angle);
            let d = uniform(rng, *direction);
            filters::convolve2d(img, &motion_kernel(k, a, d), k)
        }
        StepKind::Posterize { bits } => {
            require_rgb(img, "posterize")?;
            color::posterize(img, *bits)
        }
        StepKind::RgbShift { limit } => {
            require_rgb(img, "rgb shift")?;
            let s = [0; 3].map(|_| uniform(rng, (-limit, *limit)));
            color::rgb_shift(img, s)
        }
        StepKind::Sharpness { max } => color::sharpness(img, uniform(rng, (0.0, *max))),
        StepKind::MedianBlur { kernel } => filters::median_blur(img, *kernel),
        StepKind::BoxBlur { kernel } => filters::box_blur(img, *kernel),
    })
}

/// Area-and-aspect crop window with ten attempts and a centred fallback.
fn resized_crop_window(
    w: usize,
    h: usize,
    scale: Range,
    ratio: Range,
    rng: &mut ChaCha8Rng,
) -> (usize, usize, usize, usize) {
    let area = (w * h) as f64;
    let (lr0, lr1) = (ratio.0.ln(), ratio.1.ln());
    for _ in 0..10 {
        let target = area * uniform(rng, scale);
        let aspect = uniform(rng, (lr0, lr1)).exp();
        let cw = (target * aspect).sqrt().round() as usize;
        let ch = (target / aspect).sqrt().round() as usize;
        if cw > 0 && ch > 0 && cw <= w && ch <= h {
            let x0 = rng.random_range(0..=w - cw);
            let y0 = rng.random_range(0..=h - ch);
            return (x0, y0, cw, ch);
        }
    }
    let in_ratio = w as f64 / h as f64;
    let (cw, ch) = if in_ratio < ratio.0 {
        (w, ((w as f64 / ratio.0).round() as usize).clamp(1, h))
    } else if in_ratio > ratio.1 {
        (((h as f64 * ratio.1).round() as usize).clamp(1, w), h)
    } else {
        (w, h)
    };
    ((w - cw) / 2, (h - ch) / 2, cw, ch)
}

fn jpeg(img: &Image, quality: u8) -> Result<Image, AugmentError> {
    require_rgb(img, "jpeg")?;
    let rgb = to_rgb8(img).map_err(|e| AugmentError::Jpeg(e.to_string()))?;
    let mut buf = Vec::new();
    image::codecs::jpeg::JpegEncoder::new_with_quality(&mut buf, quality)
        .encode_image(&rgb)
        .map_err(|e| AugmentError::Jpeg(e.to_string()))?;
    let decoded = image::load_from_memory_with_format(&buf, image::ImageFormat::Jpeg)
        .map_err(|e| AugmentError::Jpeg(e.to_string()))?
        .to_rgb8();
    let back = from_rgb8(&decoded);
    let (lo, r) = (img.pixel_min(), img.range());
    Ok(img.with_data(back.data().iter().map(|v| lo + v / 255.0 * r).collect()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentationSuite {
    pub name: String,
    pub always: Vec<AugmentationStep>,
    pub pool: Vec<AugmentationStep>,
    pub choose: usize,
}

impl AugmentationSuite {
    pub fn validate(&self) -> Result<(), AugmentError> {
        if self.choose > self.pool.len() {
            return Err(AugmentError::InvalidStep(format!(
                "suite {} draws {} of {} pool steps",
                self.name,
                self.choose,
                self.pool.len()
            )));
        }
        self.always.iter().chain(&self.pool).try_for_each(|s| s.validate())
    }

    /// Steps that would run for `seed`, in order, before probability draws.
    pub fn schedule(&self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        sample(rng, self.pool.len(), self.choose).into_vec()
    }
}

/// Applies a suite under a seed; identical inputs give bit-identical output.
pub fn apply_suite(img: &Image, suite: &AugmentationSuite, seed: u64) -> Result<Image, AugmentError> {
    suite.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = img.clone();
    for step in &suite.always {
        out = apply_step(&out, step, &mut rng)?;
    }
    for i in suite.schedule(&mut rng) {
        out = apply_step(&out, &suite.pool[i], &mut rng)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteName {
    Rivagan,
    Ssl,
    TrustmarkLow,
    TrustmarkMedium,
    TrustmarkHigh,
}

impl SuiteName {
    pub const ALL: [SuiteName; 5] = [
        SuiteName::Rivagan,
        SuiteName::Ssl,
        SuiteName::TrustmarkLow,
        SuiteName::TrustmarkMedium,
        SuiteName::TrustmarkHigh,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteName::Rivagan => "rivagan",
            SuiteName::Ssl => "ssl",
            SuiteName::TrustmarkLow => "trustmark_low",
            SuiteName::TrustmarkMedium => "trustmark_medium",
            SuiteName::TrustmarkHigh => "trustmark_high",
        }
    }

    pub fn suite(self) -> AugmentationSuite {
        match self {
            SuiteName::Rivagan => rivagan(),
            SuiteName::Ssl => ssl(),
            SuiteName::TrustmarkLow => trustmark(self, &TM_LOW),
            SuiteName::TrustmarkMedium => trustmark(self, &TM_MEDIUM),
            SuiteName::TrustmarkHigh => trustmark(self, &TM_HIGH),
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteName {
    type Err = AugmentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SuiteName::ALL
            .into_iter()
            .find(|n| n.as_str() == s.to_ascii_lowercase())
            .ok_or_else(|| AugmentError::UnknownSuite(s.to_string()))
    }
}

fn rivagan() -> AugmentationSuite {
    AugmentationSuite {
        name: "rivagan".into(),
        always: vec![
            AugmentationStep::new(StepKind::Crop { scale: (0.8, 1.0) }, 0.5),
            AugmentationStep::new(StepKind::Scale { scale: (0.8, 1.0) }, 0.5),
            AugmentationStep::new(StepKind::FrequencyCompress { keep: (0.5, 1.0) }, 0.5),
        ],
        pool: vec![],
        choose: 0,
    }
}

fn ssl() -> AugmentationSuite {
    AugmentationSuite {
        name: "ssl".into(),
        always: vec![AugmentationStep::new(StepKind::HorizontalFlip, 0.5)],
        pool: vec![
            AugmentationStep::always(StepKind::Identity),
            AugmentationStep::always(StepKind::Rotation { degrees: (-30.0, 30.0) }),
            AugmentationStep::always(StepKind::ResizedCrop {
                scale: (0.2, 1.0),
                ratio: (3.0 / 4.0, 4.0 / 3.0),
            }),
            AugmentationStep::always(StepKind::Scale { scale: (0.2, 1.0) }),
            AugmentationStep::always(StepKind::RandomBlur { max_kernel: 17 }),
        ],
        choose: 1,
    }
}

struct TrustmarkLevel {
    quality: u8,
    factor: Range,
    jiggle: [f64; 4],
    blur_kernel: usize,
    blur_sigma: Range,
    noise: f64,
    hue: Range,
    motion_kernel: (usize, usize),
    motion_angle: Range,
    motion_direction: Range,
    bits: u32,
    shift: f64,
    sharpness: f64,
    box_kernel: usize,
}

const TM_LOW: TrustmarkLevel = TrustmarkLevel {
    quality: 70,
    factor: (0.9, 1.1),
    jiggle: [0.05, 0.05, 0.05, 0.01],
    blur_kernel: 3,
    blur_sigma: (0.1, 1.0),
    noise: 0.02,
    hue: (-0.1, 0.1),
    motion_kernel: (3, 5),
    motion_angle: (-25.0, 25.0),
    motion_direction: (-0.25, 0.25),
    bits: 5,
    shift: 0.02,
    sharpness: 1.0,
    box_kernel: 3,
};

const TM_MEDIUM: TrustmarkLevel = TrustmarkLevel {
    quality: 50,
    factor: (0.75, 1.25),
    jiggle: [0.1, 0.1, 0.1, 0.02],
    blur_kernel: 5,
    blur_sigma: (0.1, 1.5),
    noise: 0.04,
    hue: (-0.2, 0.2),
    motion_kernel: (3, 7),
    motion_angle: (-45.0, 45.0),
    motion_direction: (-0.5, 0.5),
    bits: 4,
    shift: 0.05,
    sharpness: 1.5,
    box_kernel: 5,
};

const TM_HIGH: TrustmarkLevel = TrustmarkLevel {
    quality: 40,
    factor: (0.5, 1.5),
    jiggle: [0.1, 0.1, 0.1, 0.05],
    blur_kernel: 7,
    blur_sigma: (0.1, 2.0),
    noise: 0.08,
    hue: (-0.5, 0.5),
    motion_kernel: (3, 9),
    motion_angle: (-90.0, 90.0),
    motion_direction: (-1.0, 1.0),
    bits: 3,
    shift: 0.1,
    sharpness: 2.5,
    box_kernel: 7,
};

fn trustmark(name: SuiteName, l: &TrustmarkLevel) -> AugmentationSuite {
    let half = |kind| AugmentationStep::new(kind, 0.5);
    AugmentationSuite {
        name: name.as_str().into(),
        always: vec![
            half(StepKind::HorizontalFlip),
            AugmentationStep::always(StepKind::ResizedCrop {
                scale: (0.7, 1.0),
                ratio: (3.0 / 4.0, 4.0 / 3.0),
            }),
        ],
        pool: vec![
            half(StepKind::Jpeg { quality: l.quality }),
            half(StepKind::Brightness { factor: l.factor }),
            half(StepKind::Contrast { factor: l.factor }),
            half(StepKind::ColorJiggle {
                brightness: l.jiggle[0],
                contrast: l.jiggle[1],
                saturation: l.jiggle[2],
                hue: l.jiggle[3],
            }),
            half(StepKind::Grayscale),
            half(StepKind::GaussianBlur {
                kernel: l.blur_kernel,
                sigma: l.blur_sigma,
            }),
            half(StepKind::GaussianNoise { std: l.noise }),
            half(StepKind::Hue { shift: l.hue }),
            half(StepKind::MotionBlur {
                kernel: l.motion_kernel,
                angle: l.motion_angle,
                direction: l.motion_direction,
            }),
            half(StepKind::Posterize { bits: l.bits }),
            half(StepKind::RgbShift { limit: l.shift }),
            half(StepKind::Saturation { factor: l.factor }),
            half(StepKind::Sharpness { max: l.sharpness }),
            half(StepKind::MedianBlur { kernel: 3 }),
            half(StepKind::BoxBlur { kernel: l.box_kernel }),
        ],
        choose: 2,
    }
}
