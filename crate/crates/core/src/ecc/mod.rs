//! Binary linear block codes over GF(2).

mod build;
mod code;
mod file;
pub mod gf2;

pub use build::{
    build_code, cyclic, dual, extend, extended_hamming, hamming, parity, parse_poly,
    parse_positions, puncture, reed_muller_1, repetition, shorten,
};
pub use code::{minimum_distance, Decoded, DecoderStrategy, LinearCode};
pub use file::{load_code_file, parse_code_file, write_code_file};

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EccError {
    #[error("length mismatch: expected {expected} bits, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid code: {0}")]
    InvalidCode(String),
    #[error("invalid generator polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("unknown code '{0}' (expected repetition, parity, hamming, extended_hamming, reed_muller_1, cyclic, extend, shorten, puncture or dual)")]
    UnknownCode(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("no codeword within decoder reach")]
    DecodeFailure,
    #[error("io: {0}")]
    Io(String),
}

/// Splits a codeword: the first `m1` bits go to the first watermarker.
pub fn split_for_ensemble(
    codeword: &[bool],
    m1: usize,
    m2: usize,
) -> Result<(Vec<bool>, Vec<bool>), EccError> {
    if m1 + m2 != codeword.len() {
        return Err(EccError::LengthMismatch {
            expected: m1 + m2,
            found: codeword.len(),
        });
    }
    Ok((codeword[..m1].to_vec(), codeword[m1..].to_vec()))
}

pub fn join(first: &[bool], second: &[bool]) -> Vec<bool> {
    let mut out = Vec::with_capacity(first.len() + second.len());
    out.extend_from_slice(first);
    out.extend_from_slice(second);
    out
}
