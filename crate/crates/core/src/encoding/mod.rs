//! Ciphertext serialization.
//!
//! Units are turned into n-bit tokens packed MSB-first (see [`tokens`]) or
//! into a Golomb-Rice bit stream (see [`rice`]), and wrapped in a 16-byte
//! container header (see [`container`]). Every payload starts with the unit
//! count as a big-endian `u64`, so decoders never have to guess where the
//! zero padding begins.

pub mod bits;
pub mod container;
pub mod rice;
pub mod tokens;

use thiserror::Error;

use crate::key::KeyMaterial;

pub use container::{read_ciphertext, write_ciphertext, Header, Scheme, HEADER_LEN, MAGIC};
pub use rice::{compress_geometric, decompress_geometric, measure_compressed, rice_parameter, CompressedSize};
pub use tokens::{
    decode_fixed, decode_varlen, encode_fixed, encode_overflow, encode_varlen, fixed_tokens, varlen_tokens,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodingError {
    #[error("framing error: {0}")]
    Framing(String),
    #[error("stream truncated")]
    Truncated,
    #[error("invalid unit: {0}")]
    InvalidUnit(String),
    #[error("bad container header: {0}")]
    BadHeader(String),
}

/// Token-level parameters shared by encoder and decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodecParams {
    pub n0: u32,
    pub nmax: u32,
    pub n_bits: u32,
}

impl CodecParams {
    pub fn token_space(&self) -> u64 {
        1u64 << self.n_bits
    }
}

impl<T> From<&KeyMaterial<T>> for CodecParams {
    fn from(key: &KeyMaterial<T>) -> Self {
        Self { n0: key.n0, nmax: key.nmax, n_bits: key.n_bits }
    }
}

fn read_count(bytes: &[u8]) -> Result<(u64, &[u8]), EncodingError> {
    if bytes.len() < 8 {
        return Err(EncodingError::Truncated);
    }
    let (head, rest) = bytes.split_at(8);
    Ok((u64::from_be_bytes(head.try_into().expect("8 bytes")), rest))
}
