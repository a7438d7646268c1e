//! Blind watermarkers: a small embed/extract contract and five keyed
//! implementations (four QIM transform-domain methods and spread spectrum).

pub mod doubles;
mod luma;
mod qim;
mod secret;
mod spread;

pub use self::qim::{qim_decode, qim_embed};
pub use self::secret::{HexError, Secret};
pub use self::spread::carrier_images;

use crate::imgcore::{Image, ImageError};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WatermarkError {
    #[error("secret has {found} bits, watermarker capacity is {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("{method}: capacity {needed} bits exceeds {available} carrier slots for this image")]
    CapacityOverflow {
        method: String,
        needed: usize,
        available: usize,
    },
    #[error("invalid watermarker parameters: {0}")]
    InvalidSpec(String),
    #[error("no codeword within decoder reach")]
    DecodeFailure,
    #[error(transparent)]
    Image(#[from] ImageError),
}

/// Embed/extract contract shared by native methods and test doubles.
pub trait Watermarker: Send + Sync {
    fn name(&self) -> String;

    /// Message length in bits.
    fn capacity(&self) -> usize;

    fn embed(&self, cover: &Image, secret: &Secret) -> Result<Image, WatermarkError>;

    /// Always returns `capacity()` bits when the image is large enough.
    fn extract(&self, img: &Image) -> Result<Secret, WatermarkError>;

    /// Instance used as the second watermark when this method is paired with
    /// itself. `None` reuses the same instance (same key).
    fn self_pair_partner(&self) -> Option<Arc<dyn Watermarker>> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodId {
    Dct,
    Dwt,
    DwtDct,
    DwtDctSvd,
    SpreadSpectrum,
}

impl MethodId {
    pub const ALL: [MethodId; 5] = [
        MethodId::Dct,
        MethodId::Dwt,
        MethodId::DwtDct,
        MethodId::DwtDctSvd,
        MethodId::SpreadSpectrum,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MethodId::Dct => "dct",
            MethodId::Dwt => "dwt",
            MethodId::DwtDct => "dwtdct",
            MethodId::DwtDctSvd => "dwtdctsvd",
            MethodId::SpreadSpectrum => "spread_spectrum",
        }
    }

    pub fn valid_names() -> String {
        Self::ALL.iter().map(|m| m.as_str()).collect::<Vec<_>>().join(", ")
    }

    /// Salt mixed into the key so methods sharing a key pick unrelated slots.
    fn salt(self) -> u64 {
        match self {
            MethodId::Dct => 0x9e37_79b9_7f4a_7c15,
            MethodId::Dwt => 0xbf58_476d_1ce4_e5b9,
            MethodId::DwtDct => 0x94d0_49bb_1331_11eb,
            MethodId::DwtDctSvd => 0x2545_f491_4f6c_dd1d,
            MethodId::SpreadSpectrum => 0xd6e8_feb8_6659_fd93,
        }
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Self::ALL
            .iter()
            .copied()
            .find(|m| m.as_str() == norm || (norm == "ss" && *m == MethodId::SpreadSpectrum))
            .ok_or_else(|| format!("unknown method '{s}'; valid methods: {}", Self::valid_names()))
    }
}

pub const DEFAULT_CAPACITY: usize = 32;
pub const DEFAULT_KEY: u64 = 0x5eed_0fc0_ffee;

/// Parameters of one native watermarker. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WatermarkerSpec {
    pub method: MethodId,
    pub capacity_bits: usize,
    pub key: u64,
    /// QIM step for the transform methods.
    pub quantization_step: f64,
    /// Per-sample RMS amplitude for spread spectrum.
    pub embed_strength: f64,
    pub block_size: usize,
}

impl WatermarkerSpec {
    /// Default parameters for `method`.
    pub fn new(method: MethodId) -> Self {
        let (step, block) = match method {
            MethodId::Dct | MethodId::DwtDct => (12.0, 8),
            MethodId::Dwt => (24.0, 2),
            MethodId::DwtDctSvd => (8.0, 4),
            MethodId::SpreadSpectrum => (12.0, 1),
        };
        WatermarkerSpec {
            method,
            capacity_bits: DEFAULT_CAPACITY,
            key: DEFAULT_KEY,
            quantization_step: step,
            embed_strength: 2.5,
            block_size: block,
        }
    }

    pub fn with_capacity(mut self, bits: usize) -> Self {
        self.capacity_bits = bits;
        self
    }

    pub fn with_key(mut self, key: u64) -> Self {
        self.key = key;
        self
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.quantization_step = step;
        self
    }

    pub fn with_strength(mut self, alpha: f64) -> Self {
        self.embed_strength = alpha;
        self
    }

    pub fn with_block_size(mut self, n: usize) -> Self {
        self.block_size = n;
        self
    }

    pub fn validate(&self) -> Result<(), WatermarkError> {
        if self.capacity_bits == 0 {
            return Err(WatermarkError::InvalidSpec("capacity_bits must be >= 1".into()));
        }
        if self.quantization_step <= 0.0 || !self.quantization_step.is_finite() {
            return Err(WatermarkError::InvalidSpec("quantization_step must be > 0".into()));
        }
        if self.embed_strength <= 0.0 || !self.embed_strength.is_finite() {
            return Err(WatermarkError::InvalidSpec("embed_strength must be > 0".into()));
        }
        if self.block_size == 0 {
            return Err(WatermarkError::InvalidSpec("block_size must be >= 1".into()));
        }
        if matches!(self.method, MethodId::Dct | MethodId::DwtDct) && self.block_size < 4 {
            return Err(WatermarkError::InvalidSpec(
                "DCT block size must be at least 4 for a mid-frequency band".into(),
            ));
        }
        Ok(())
    }

    /// Number of carrier slots available for an image of this shape.
    pub fn available_slots(&self, width: usize, height: usize, channels: usize) -> usize {
        match self.method {
            MethodId::SpreadSpectrum => spread::available(width, height, channels),
            _ => luma::available(self, width, height),
        }
    }

    fn keyed_seed(&self) -> u64 {
        self.key ^ self.method.salt()
    }

    fn check_capacity(&self, img: &Image) -> Result<(), WatermarkError> {
        self.validate()?;
        if self.method != MethodId::SpreadSpectrum && img.channels() != 3 {
            return Err(ImageError::ChannelCount {
                expected: 3,
                found: img.channels(),
            }
            .into());
        }
        let available = self.available_slots(img.width(), img.height(), img.channels());
        if self.capacity_bits > available {
            return Err(WatermarkError::CapacityOverflow {
                method: self.method.to_string(),
                needed: self.capacity_bits,
                available,
            });
        }
        Ok(())
    }
}

impl Watermarker for WatermarkerSpec {
    fn name(&self) -> String {
        self.method.to_string()
    }

    fn capacity(&self) -> usize {
        self.capacity_bits
    }

    fn embed(&self, cover: &Image, secret: &Secret) -> Result<Image, WatermarkError> {
        if secret.len() != self.capacity_bits {
            return Err(WatermarkError::LengthMismatch {
                expected: self.capacity_bits,
                found: secret.len(),
            });
        }
        self.check_capacity(cover)?;
        match self.method {
            MethodId::SpreadSpectrum => Ok(spread::embed(self, cover, secret)),
            _ => Ok(luma::embed(self, cover, secret)),
        }
    }

    fn extract(&self, img: &Image) -> Result<Secret, WatermarkError> {
        self.check_capacity(img)?;
        match self.method {
            MethodId::SpreadSpectrum => Ok(spread::extract(self, img)),
            _ => Ok(luma::extract(self, img)),
        }
    }

    /// Spread spectrum pairs with a second carrier key; the QIM methods reuse their key.
    fn self_pair_partner(&self) -> Option<Arc<dyn Watermarker>> {
        match self.method {
            MethodId::SpreadSpectrum => Some(Arc::new(
                self.clone()
                    .with_key(self.key.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(1)),
            )),
            _ => None,
        }
    }
}

/// Default-parameter watermarker for `method` behind a shared pointer.
pub fn default_watermarker(method: MethodId) -> Arc<dyn Watermarker> {
    Arc::new(WatermarkerSpec::new(method))
}
