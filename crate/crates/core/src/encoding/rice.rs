//! Golomb-Rice stream for rectified units.
//!
//! Layout: unit count (`u64` BE), Rice parameter `k` (`u8`), then per unit
//! `Rice(v, k)` followed by `unary(b - 1)`, zero padded to a byte. With
//! `v = (q << n) | ((C - N0) mod 2ⁿ)` an unmasked count maps to `C̃ - N0`,
//! which is geometric, so Rice coding is close to its entropy.
//!
//! `Rice(v, k)` is `v >> k` zero bits, a one bit, then the low `k` bits of `v`.

use super::bits::{BitReader, BitWriter};
use super::{read_count, CodecParams, EncodingError};
use crate::cipher::CipherUnit;

/// Bits spent on one encoded stream, split by field.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CompressedSize {
    pub units: u64,
    pub header_bits: u64,
    pub count_bits: u64,
    pub occurrence_bits: u64,
}

impl CompressedSize {
    pub fn total_bits(&self) -> u64 {
        self.header_bits + self.count_bits + self.occurrence_bits
    }

    pub fn count_bits_per_unit(&self) -> f64 {
        self.count_bits as f64 / self.units.max(1) as f64
    }

    pub fn occurrence_bits_per_unit(&self) -> f64 {
        self.occurrence_bits as f64 / self.units.max(1) as f64
    }
}

fn value_of(unit: &CipherUnit, params: &CodecParams) -> u64 {
    let space = params.token_space();
    let shifted = (u64::from(unit.token) + space - u64::from(params.n0) % space) % space;
    (u64::from(unit.block) << params.n_bits) | shifted
}

fn unit_of(v: u64, occurrence: u16, params: &CodecParams) -> Result<CipherUnit, EncodingError> {
    let space = params.token_space();
    let block = u32::try_from(v >> params.n_bits)
        .ok()
        .filter(|&b| u64::from(b) < space)
        .ok_or_else(|| EncodingError::Framing(format!("value {v} exceeds the block range")))?;
    let token = ((v & (space - 1)) + u64::from(params.n0)) % space;
    Ok(CipherUnit { block, token: token as u32, occurrence })
}

fn check(unit: &CipherUnit, params: &CodecParams) -> Result<(), EncodingError> {
    let space = params.token_space();
    if u64::from(unit.token) >= space || u64::from(unit.block) >= space {
        return Err(EncodingError::InvalidUnit(format!("{unit:?} does not fit {}-bit tokens", params.n_bits)));
    }
    if unit.occurrence == 0 {
        return Err(EncodingError::InvalidUnit("occurrence index 0".into()));
    }
    Ok(())
}

/// `k = ⌊log₂ max(round(mean v), 1)⌋`.
pub fn rice_parameter(units: &[CipherUnit], params: &CodecParams) -> u8 {
    if units.is_empty() {
        return 0;
    }
    let sum: u128 = units.iter().map(|u| u128::from(value_of(u, params))).sum();
    let mean = (sum as f64 / units.len() as f64).round().max(1.0) as u64;
    mean.ilog2() as u8
}

fn rice_len(v: u64, k: u8) -> u64 {
    (v >> k) + 1 + u64::from(k)
}

/// Size accounting without materializing the stream.
pub fn measure_compressed(units: &[CipherUnit], params: &CodecParams) -> Result<CompressedSize, EncodingError> {
    let k = rice_parameter(units, params);
    let mut size = CompressedSize { units: units.len() as u64, header_bits: 72, ..Default::default() };
    for unit in units {
        check(unit, params)?;
        size.count_bits += rice_len(value_of(unit, params), k);
        size.occurrence_bits += u64::from(unit.occurrence);
    }
    Ok(size)
}

pub fn compress_geometric(units: &[CipherUnit], params: &CodecParams) -> Result<Vec<u8>, EncodingError> {
    let k = rice_parameter(units, params);
    let mut w = BitWriter::new();
    w.write(units.len() as u64, 64);
    w.write(u64::from(k), 8);
    for unit in units {
        check(unit, params)?;
        let v = value_of(unit, params);
        w.write_unary(v >> k);
        w.write(v & ((1u64 << k) - 1), u32::from(k));
        w.write_unary(u64::from(unit.occurrence) - 1);
    }
    Ok(w.finish())
}

pub fn decompress_geometric(bytes: &[u8], params: &CodecParams) -> Result<Vec<CipherUnit>, EncodingError> {
    let (count, rest) = read_count(bytes)?;
    let mut r = BitReader::new(rest);
    let k = r.read(8).ok_or(EncodingError::Truncated)? as u32;
    if k >= 2 * params.n_bits.max(1) {
        return Err(EncodingError::Framing(format!("Rice parameter {k} out of range")));
    }
    let mut units = Vec::new();
    for _ in 0..count {
        let q = r.read_unary(r.remaining()).ok_or(EncodingError::Truncated)?;
        let low = r.read(k).ok_or(EncodingError::Truncated)?;
        let v = q
            .checked_shl(k)
            .filter(|v| v >> k == q)
            .ok_or_else(|| EncodingError::Framing("Rice quotient overflow".into()))?
            | low;
        let extra = r.read_unary(u64::from(u16::MAX) - 1).ok_or(EncodingError::Truncated)?;
        units.push(unit_of(v, (extra + 1) as u16, params)?);
    }
    if !r.at_padding() {
        return Err(EncodingError::Framing("trailing data after the last unit".into()));
    }
    Ok(units)
}
