//! Composition of two watermarkers, PSNR strength clipping and coded ensembles.

use crate::ecc::{self, EccError, LinearCode};
use crate::imgcore::{apply_residual, psnr, residual, Image, ImageError, Psnr};
use crate::watermark::{Secret, WatermarkError, Watermarker, WatermarkerSpec};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error(transparent)]
    Watermark(#[from] WatermarkError),
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Ecc(#[from] EccError),
    #[error("code length {n} does not match the combined capacity {m1} + {m2}")]
    CodeLength { n: usize, m1: usize, m2: usize },
    #[error("target PSNR must be finite, got {0}")]
    NonFiniteTarget(f64),
    #[error("message has {found} bits, ensemble capacity is {expected}")]
    LengthMismatch { expected: usize, found: usize },
}

impl From<EnsembleError> for WatermarkError {
    fn from(e: EnsembleError) -> Self {
        match e {
            EnsembleError::Watermark(w) => w,
            EnsembleError::Image(i) => WatermarkError::Image(i),
            EnsembleError::Ecc(EccError::DecodeFailure) => WatermarkError::DecodeFailure,
            EnsembleError::LengthMismatch { expected, found } => {
                WatermarkError::LengthMismatch { expected, found }
            }
            other => WatermarkError::InvalidSpec(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Series,
    Parallel,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::Series, Mode::Parallel];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Series => "series",
            Mode::Parallel => "parallel",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "series" => Ok(Mode::Series),
            "parallel" => Ok(Mode::Parallel),
            _ => Err(format!("unknown ensemble mode '{s}' (expected series or parallel)")),
        }
    }
}

/// Embeds `m2` with `wm2` on top of `wm1`'s output.
pub fn series_ensemble(
    original: &Image,
    wm1: &dyn Watermarker,
    wm2: &dyn Watermarker,
    m1: &Secret,
    m2: &Secret,
) -> Result<Image, EnsembleError> {
    let first = wm1.embed(original, m1)?;
    Ok(wm2.embed(&first, m2)?)
}

/// `original + (r1 + r2) / 2`, with both residuals taken against `original`.
pub fn parallel_ensemble(
    original: &Image,
    wm1: &dyn Watermarker,
    wm2: &dyn Watermarker,
    m1: &Secret,
    m2: &Secret,
) -> Result<Image, EnsembleError> {
    let r1 = residual(&wm1.embed(original, m1)?, original)?;
    let r2 = residual(&wm2.embed(original, m2)?, original)?;
    let avg = r1.combine(0.5, &r2, 0.5)?;
    Ok(apply_residual(original, &avg, 1.0)?)
}

pub fn compose(
    mode: Mode,
    original: &Image,
    wm1: &dyn Watermarker,
    wm2: &dyn Watermarker,
    m1: &Secret,
    m2: &Secret,
) -> Result<Image, EnsembleError> {
    match mode {
        Mode::Series => series_ensemble(original, wm1, wm2, m1, m2),
        Mode::Parallel => parallel_ensemble(original, wm1, wm2, m1, m2),
    }
}

/// Scales the residual down so the PSNR reaches `target_db`; never scales up.
pub fn psnr_clip(watermarked: &Image, original: &Image, target_db: f64) -> Result<Image, EnsembleError> {
    if !target_db.is_finite() {
        return Err(EnsembleError::NonFiniteTarget(target_db));
    }
    let r = residual(watermarked, original)?;
    let n = r.data().len();
    if n == 0 || r.energy() == 0.0 {
        return Ok(watermarked.clone());
    }
    let mse = r.energy() / n as f64;
    let range = original.range();
    let target_mse = range * range * 10f64.powf(-target_db / 10.0);
    let factor = (target_mse / mse).sqrt();
    if factor >= 1.0 {
        return Ok(watermarked.clone());
    }
    Ok(apply_residual(original, &r, factor)?)
}

/// `min + s * (max - min)` over the two standalone PSNRs.
///
/// Infinite PSNRs (a watermark that left the image unchanged) give an
/// infinite target for `s > 0`.
pub fn clip_target(psnr1: Psnr, psnr2: Psnr, strength: f64) -> f64 {
    let (a, b) = (psnr1.db(), psnr2.db());
    let (lo, hi) = (a.min(b), a.max(b));
    if strength == 0.0 || lo == hi {
        return lo;
    }
    lo + strength * (hi - lo)
}

/// Clips to an already computed target: `+inf` yields the original and
/// `-inf` leaves the image unchanged.
pub fn clip_to_target(watermarked: &Image, original: &Image, target_db: f64) -> Result<Image, EnsembleError> {
    if target_db == f64::INFINITY {
        watermarked.check_compatible(original)?;
        return Ok(original.clone());
    }
    if target_db == f64::NEG_INFINITY {
        return Ok(watermarked.clone());
    }
    psnr_clip(watermarked, original, target_db)
}

/// PSNR of each watermark embedded alone on `original`.
pub fn standalone_psnrs(
    original: &Image,
    wm1: &dyn Watermarker,
    wm2: &dyn Watermarker,
    m1: &Secret,
    m2: &Secret,
) -> Result<(Psnr, Psnr), EnsembleError> {
    let p1 = psnr(&wm1.embed(original, m1)?, original)?;
    let p2 = psnr(&wm2.embed(original, m2)?, original)?;
    Ok((p1, p2))
}

#[allow(clippy::too_many_arguments)]
pub fn clip_to_strength(
    watermarked: &Image,
    original: &Image,
    strength: f64,
    wm1: &dyn Watermarker,
    wm2: &dyn Watermarker,
    m1: &Secret,
    m2: &Secret,
) -> Result<Image, EnsembleError> {
    let (p1, p2) = standalone_psnrs(original, wm1, wm2, m1, m2)?;
    clip_to_target(watermarked, original, clip_target(p1, p2, strength))
}

/// Serializable description of an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub first: WatermarkerSpec,
    pub second: WatermarkerSpec,
    pub mode: Mode,
    /// `None` disables clipping.
    pub strength: Option<f64>,
    /// Code expression understood by [`ecc::build_code`].
    pub code: Option<String>,
}

impl EnsembleSpec {
    pub fn build(&self) -> Result<Ensemble, EnsembleError> {
        self.first.validate()?;
        self.second.validate()?;
        let code = self.code.as_deref().map(ecc::build_code).transpose()?;
        Ensemble::new(
            Arc::new(self.first.clone()),
            Arc::new(self.second.clone()),
            self.mode,
            self.strength,
            code,
        )
    }
}

/// Two watermarkers acting as one, optionally behind a linear code.
#[derive(Clone)]
pub struct Ensemble {
    first: Arc<dyn Watermarker>,
    second: Arc<dyn Watermarker>,
    mode: Mode,
    strength: Option<f64>,
    code: Option<LinearCode>,
}

impl fmt::Debug for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Outcome of a coded or uncoded ensemble extraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnsembleExtraction {
    pub message: Secret,
    /// Raw concatenated bits read from both watermarks.
    pub raw: Secret,
    pub corrections: usize,
}

impl Ensemble {
    pub fn new(
        first: Arc<dyn Watermarker>,
        second: Arc<dyn Watermarker>,
        mode: Mode,
        strength: Option<f64>,
        code: Option<LinearCode>,
    ) -> Result<Self, EnsembleError> {
        let (m1, m2) = (first.capacity(), second.capacity());
        if let Some(c) = &code {
            if c.n() != m1 + m2 {
                return Err(EnsembleError::CodeLength { n: c.n(), m1, m2 });
            }
        }
        Ok(Ensemble {
            first,
            second,
            mode,
            strength,
            code,
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn strength(&self) -> Option<f64> {
        self.strength
    }

    pub fn code(&self) -> Option<&LinearCode> {
        self.code.as_ref()
    }

    pub fn first(&self) -> &Arc<dyn Watermarker> {
        &self.first
    }

    pub fn second(&self) -> &Arc<dyn Watermarker> {
        &self.second
    }

    pub fn with_mode(&self, mode: Mode) -> Self {
        Ensemble { mode, ..self.clone() }
    }

    pub fn with_strength(&self, strength: Option<f64>) -> Self {
        Ensemble {
            strength,
            ..self.clone()
        }
    }

    /// Message length: `k` with a code, otherwise the summed capacities.
    pub fn effective_capacity(&self) -> usize {
        match &self.code {
            Some(c) => c.k(),
            None => self.first.capacity() + self.second.capacity(),
        }
    }

    /// Bits handed to each watermarker for a message.
    pub fn split_message(&self, message: &Secret) -> Result<(Secret, Secret), EnsembleError> {
        if message.len() != self.effective_capacity() {
            return Err(EnsembleError::LengthMismatch {
                expected: self.effective_capacity(),
                found: message.len(),
            });
        }
        let word = match &self.code {
            Some(c) => c.encode(message.bits())?,
            None => message.bits().to_vec(),
        };
        let (a, b) = ecc::split_for_ensemble(&word, self.first.capacity(), self.second.capacity())?;
        Ok((Secret::new(a), Secret::new(b)))
    }

    /// Composite image before strength clipping.
    pub fn compose(&self, cover: &Image, message: &Secret) -> Result<Image, EnsembleError> {
        let (m1, m2) = self.split_message(message)?;
        compose(self.mode, cover, &*self.first, &*self.second, &m1, &m2)
    }

    pub fn embed_message(&self, cover: &Image, message: &Secret) -> Result<Image, EnsembleError> {
        let (m1, m2) = self.split_message(message)?;
        let out = compose(self.mode, cover, &*self.first, &*self.second, &m1, &m2)?;
        match self.strength {
            None => Ok(out),
            Some(s) => clip_to_strength(&out, cover, s, &*self.first, &*self.second, &m1, &m2),
        }
    }

    pub fn extract_message(&self, img: &Image) -> Result<EnsembleExtraction, EnsembleError> {
        let a = self.first.extract(img)?;
        let b = self.second.extract(img)?;
        let raw = Secret::new(ecc::join(a.bits(), b.bits()));
        match &self.code {
            None => Ok(EnsembleExtraction {
                message: raw.clone(),
                raw,
                corrections: 0,
            }),
            Some(c) => {
                let d = c.decode(raw.bits())?;
                Ok(EnsembleExtraction {
                    message: Secret::new(d.message),
                    raw,
                    corrections: d.corrections,
                })
            }
        }
    }
}

impl Watermarker for Ensemble {
    fn name(&self) -> String {
        let mut s = format!("{}({}+{})", self.mode, self.first.name(), self.second.name());
        if let Some(st) = self.strength {
            s.push_str(&format!("@{st}"));
        }
        if let Some(c) = &self.code {
            s.push_str(&format!("[{}]", c.name()));
        }
        s
    }

    fn capacity(&self) -> usize {
        self.effective_capacity()
    }

    fn embed(&self, cover: &Image, secret: &Secret) -> Result<Image, WatermarkError> {
        Ok(self.embed_message(cover, secret)?)
    }

    fn extract(&self, img: &Image) -> Result<Secret, WatermarkError> {
        Ok(self.extract_message(img)?.message)
    }
}
