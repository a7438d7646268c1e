use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Fixed-length message carried by a watermark.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Secret(Vec<bool>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HexError {
    #[error("invalid hex digit '{0}'")]
    InvalidDigit(char),
    #[error("hex string encodes {found} bits, expected {expected}")]
    Length { expected: usize, found: usize },
}

impl Secret {
    pub fn new(bits: Vec<bool>) -> Self {
        Secret(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Secret(vec![false; len])
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Secret((0..len).map(|_| rng.random::<bool>()).collect())
    }

    /// Parses `"0101"`-style strings; other characters are rejected.
    pub fn from_bit_str(s: &str) -> Option<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Secret)
    }

    /// Big-endian hex: the leftmost digit holds the first four bits.
    pub fn from_hex(s: &str) -> Result<Self, HexError> {
        let s = s.trim().trim_start_matches("0x");
        let mut bits = Vec::with_capacity(s.len() * 4);
        for ch in s.chars() {
            let v = ch.to_digit(16).ok_or(HexError::InvalidDigit(ch))?;
            for shift in (0..4).rev() {
                bits.push((v >> shift) & 1 == 1);
            }
        }
        Ok(Secret(bits))
    }

    /// Parses hex and fits it to `len` bits. Extra trailing padding bits
    /// (fewer than four, all zero) are dropped.
    pub fn from_hex_len(s: &str, len: usize) -> Result<Self, HexError> {
        let mut sec = Self::from_hex(s)?;
        let found = sec.len();
        if found == len {
            return Ok(sec);
        }
        if found > len && found - len < 4 && sec.0[len..].iter().all(|b| !b) {
            sec.0.truncate(len);
            return Ok(sec);
        }
        Err(HexError::Length {
            expected: len,
            found,
        })
    }

    /// Hex rendering, zero-padded at the end to a multiple of four bits.
    pub fn to_hex(&self) -> String {
        self.0
            .chunks(4)
            .map(|chunk| {
                let mut v = 0u32;
                for i in 0..4 {
                    v = (v << 1) | chunk.get(i).copied().unwrap_or(false) as u32;
                }
                std::char::from_digit(v, 16).expect("nibble")
            })
            .collect()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn hamming_distance(&self, other: &Secret) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
            + self.0.len().abs_diff(other.0.len())
    }

    /// Fraction of positions that agree.
    pub fn bit_accuracy(&self, other: &Secret) -> f64 {
        if self.0.is_empty() {
            return 1.0;
        }
        1.0 - self.hamming_distance(other) as f64 / self.0.len().max(other.0.len()) as f64
    }
}

impl fmt::Display for Secret {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl From<Vec<bool>> for Secret {
    fn from(bits: Vec<bool>) -> Self {
        Secret(bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_is_big_endian() {
        let s = Secret::from_hex("a3").unwrap();
        assert_eq!(s.to_string(), "10100011");
        assert_eq!(s.to_hex(), "a3");
    }

    #[test]
    fn hex_padding() {
        let s = Secret::from_bit_str("101").unwrap();
        assert_eq!(s.to_hex(), "a");
        assert_eq!(Secret::from_hex_len("a", 3).unwrap(), s);
        assert!(Secret::from_hex_len("b", 3).is_err());
        assert!(Secret::from_hex("xz").is_err());
    }

    #[test]
    fn distances() {
        let a = Secret::from_bit_str("1100").unwrap();
        let b = Secret::from_bit_str("1010").unwrap();
        assert_eq!(a.hamming_distance(&b), 2);
        assert_eq!(a.bit_accuracy(&b), 0.5);
    }
}
