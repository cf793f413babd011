//! 16-byte container header.
//!
//! ```text
//! 0..4   magic "BTC1"
//! 4      scheme id
//! 5      token width n
//! 6..10  alphabet size, u32 BE
//! 10..16 reserved, zero
//! ```

use std::fmt;
use std::str::FromStr;

use super::EncodingError;
use crate::cipher::Variant;
use crate::key::MAX_N_BITS;

pub const MAGIC: [u8; 4] = *b"BTC1";
pub const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    OriginalFixed = 0,
    MaskedFixed = 1,
    RectifiedVarLen = 2,
    RectifiedCompressed = 3,
}

impl Scheme {
    pub const ALL: [Scheme; 4] =
        [Scheme::OriginalFixed, Scheme::MaskedFixed, Scheme::RectifiedVarLen, Scheme::RectifiedCompressed];

    pub fn variant(self) -> Variant {
        match self {
            Scheme::OriginalFixed => Variant::Original,
            Scheme::MaskedFixed => Variant::Masked,
            Scheme::RectifiedVarLen | Scheme::RectifiedCompressed => Variant::Rectified,
        }
    }

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.id() == id)
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::OriginalFixed => "original-fixed",
            Scheme::MaskedFixed => "masked-fixed",
            Scheme::RectifiedVarLen => "rectified-varlen",
            Scheme::RectifiedCompressed => "rectified-compressed",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = EncodingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| EncodingError::BadHeader(format!("unknown scheme {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub scheme: Scheme,
    pub n_bits: u8,
    pub alphabet: u32,
}

impl Header {
    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[..4].copy_from_slice(&MAGIC);
        out[4] = self.scheme.id();
        out[5] = self.n_bits;
        out[6..10].copy_from_slice(&self.alphabet.to_be_bytes());
        out
    }

    pub fn parse(bytes: &[u8]) -> Result<Self, EncodingError> {
        if bytes.len() < HEADER_LEN {
            return Err(EncodingError::Truncated);
        }
        if bytes[..4] != MAGIC {
            return Err(EncodingError::BadHeader("bad magic".into()));
        }
        let scheme = Scheme::from_id(bytes[4])
            .ok_or_else(|| EncodingError::BadHeader(format!("unknown scheme id {}", bytes[4])))?;
        let n_bits = bytes[5];
        if n_bits == 0 || u32::from(n_bits) > MAX_N_BITS {
            return Err(EncodingError::BadHeader(format!("token width {n_bits}")));
        }
        let alphabet = u32::from_be_bytes(bytes[6..10].try_into().expect("4 bytes"));
        if bytes[10..HEADER_LEN].iter().any(|&b| b != 0) {
            return Err(EncodingError::BadHeader("reserved bytes not zero".into()));
        }
        Ok(Self { scheme, n_bits, alphabet })
    }
}

pub fn write_ciphertext(header: &Header, payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.extend_from_slice(&header.to_bytes());
    out.extend_from_slice(payload);
    out
}

pub fn read_ciphertext(bytes: &[u8]) -> Result<(Header, &[u8]), EncodingError> {
    let header = Header::parse(bytes)?;
    Ok((header, &bytes[HEADER_LEN..]))
}
