//! The three cipher variants.
//!
//! Every variant encrypts a symbol by iterating the map from the previous
//! character's final state, skipping the first `N0` iterations, until the
//! state falls in the ε-interval associated with the symbol. The iteration
//! count `C̃` is what gets transmitted:
//!
//! * [`Variant::Original`] sends `C̃` itself.
//! * [`Variant::Masked`] sends `C̃ ⊕ f_be(x)`. Decryption accepts the first
//!   count whose masked value matches, which is wrong whenever an earlier
//!   count collides. **Do not use it for anything but experiments**; it is
//!   kept to reproduce that defect.
//! * [`Variant::Rectified`] sends the masked token together with how many
//!   times that token occurred during the search, which makes decryption
//!   exact.
//!
//! Counts above `Nmax` are split into a block number `q` and a residual
//! `r` (`C̃ = q·Nmax + r`, with `q = 0` whenever `C̃ ≤ Nmax`). Masking applies
//! to the residual and occurrence counters restart at every block, so a unit
//! is always `(q, token, occurrence)` with an n-bit token.

mod mask;
mod session;
mod table;

pub use mask::{f_be, Mask, MiddleBits, ZeroMask};
pub use session::{Decipher, Encipher, EtaSelector};
pub use table::OccurrenceTable;

use thiserror::Error;

use crate::chaos::ChaosError;
use crate::key::KeyMaterial;
use crate::partition::{Letter, Partition};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CipherError {
    #[error(transparent)]
    Chaos(#[from] ChaosError),
    #[error("symbol {symbol} is outside the {alphabet}-symbol alphabet")]
    InvalidSymbol { symbol: u16, alphabet: usize },
    #[error("key does not enable masking")]
    MaskDisabled,
    #[error("iteration count exceeded the largest representable count {limit}")]
    CountOverflow { limit: u64 },
    #[error("occurrence counter for token {token} overflowed 16 bits")]
    OccurrenceOverflow { token: u32 },
    #[error("corrupt ciphertext at unit {position}: {reason}")]
    CorruptCiphertext { position: usize, reason: String },
    #[error("decipher lost synchronisation at unit {position}: no match before the scan bound")]
    Desync { position: usize },
    #[error("ciphertext was produced by a different variant")]
    VariantMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Original,
    Masked,
    Rectified,
}

impl Variant {
    pub fn is_masked(self) -> bool {
        !matches!(self, Variant::Original)
    }
}

/// One ciphertext unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CipherUnit {
    /// Number of whole `Nmax` blocks; 0 unless the count exceeded `Nmax`.
    pub block: u32,
    /// Count residual, masked for the masked variants.
    pub token: u32,
    /// Occurrence index `B[token]`; 1 for the non-rectified variants.
    pub occurrence: u16,
}

impl CipherUnit {
    pub fn plain(count: u64, nmax: u32) -> Self {
        let (block, token) = decompose(count, nmax);
        Self { block, token, occurrence: 1 }
    }

    /// Total iteration count of an unmasked unit.
    pub fn count(&self, nmax: u32) -> u64 {
        compose(self.block, self.token, nmax)
    }
}

/// Splits an iteration count into `(block, residual)`.
#[inline]
pub fn decompose(count: u64, nmax: u32) -> (u32, u32) {
    let nmax = u64::from(nmax);
    if count <= nmax {
        (0, count as u32)
    } else {
        ((count / nmax) as u32, (count % nmax) as u32)
    }
}

#[inline]
pub fn compose(block: u32, residual: u32, nmax: u32) -> u64 {
    u64::from(block) * u64::from(nmax) + u64::from(residual)
}

fn encrypt_with<T: Scalar>(
    key: &KeyMaterial<T>,
    partition: &Partition<T>,
    plaintext: &[u16],
    variant: Variant,
) -> Result<Vec<CipherUnit>, CipherError> {
    let mut enc = Encipher::new(key, partition, variant)?;
    plaintext.iter().map(|&m| enc.encrypt_symbol(m)).collect()
}

pub fn encrypt_original<T: Scalar>(
    key: &KeyMaterial<T>,
    partition: &Partition<T>,
    plaintext: &[u16],
) -> Result<Vec<CipherUnit>, CipherError> {
    encrypt_with(key, partition, plaintext, Variant::Original)
}

pub fn decrypt_original<T: Scalar>(
    key: &KeyMaterial<T>,
    partition: &Partition<T>,
    units: &[CipherUnit],
) -> Result<Vec<u16>, CipherError> {
    let mut dec = Decipher::new(key, partition, Variant::Original)?;
    units.iter().map(|u| dec.decrypt_symbol(u)).collect()
}

/// Masked variant. Unsafe for real use: see the module docs.
pub fn encrypt_masked<T: Scalar>(
    key: &KeyMaterial<T>,
    partition: &Partition<T>,
    plaintext: &[u16],
) -> Result<Vec<CipherUnit>, CipherError> {
    encrypt_with(key, partition, plaintext, Variant::Masked)
}

/// First-match decryption of the masked variant. The result may silently
/// differ from the plaintext; β letters can appear once it has gone wrong.
pub fn decrypt_masked<T: Scalar>(
    key: &KeyMaterial<T>,
    partition: &Partition<T>,
    units: &[CipherUnit],
) -> Result<Vec<Letter>, CipherError> {
    let mut dec = Decipher::new(key, partition, Variant::Masked)?;
    units.iter().map(|u| dec.decrypt_unit(u)).collect()
}

pub fn encrypt_rectified<T: Scalar>(
    key: &KeyMaterial<T>,
    partition: &Partition<T>,
    plaintext: &[u16],
) -> Result<Vec<CipherUnit>, CipherError> {
    encrypt_with(key, partition, plaintext, Variant::Rectified)
}

pub fn decrypt_rectified<T: Scalar>(
    key: &KeyMaterial<T>,
    partition: &Partition<T>,
    units: &[CipherUnit],
) -> Result<Vec<u16>, CipherError> {
    let mut dec = Decipher::new(key, partition, Variant::Rectified)?;
    units.iter().map(|u| dec.decrypt_symbol(u)).collect()
}

#[cfg(test)]
mod tests;
