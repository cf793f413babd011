//! Fixed-width and variable-length token streams.
//!
//! `Nmax` is reserved as the escape token. Layouts per unit `(q, C, b)`:
//!
//! | scheme   | condition                                | tokens                    |
//! |----------|------------------------------------------|---------------------------|
//! | original | `N0 ≤ C̃ < Nmax`                          | `C̃`                       |
//! | original | `C̃ = Nmax`                               | `Nmax, 0`                 |
//! | original | `C̃ > Nmax`, `C̃ = q·Nmax + r`            | `Nmax, q, r`              |
//! | masked   | `q = 0`, `C ≠ Nmax`                      | `C`                       |
//! | masked   | otherwise                                | `Nmax, q, C`              |
//! | varlen   | `q = 0`, `b = 1`, `N0 ≤ C < Nmax`        | `C`                       |
//! | varlen   | `q = 0`, `b = 1`, `C = Nmax`             | `Nmax, 0`                 |
//! | varlen   | `q = 0`, otherwise                       | `Nmax, b, C`              |
//! | varlen   | `q ≥ 1`                                  | `Nmax, Nmax, q, b, C`     |
//!
//! Masked tokens can fall below `N0` or above `Nmax`; those are escaped with
//! `b = 1`. Decoders reject every non-canonical form so each unit sequence
//! has exactly one encoding.

use super::bits::{BitReader, BitWriter};
use super::{read_count, CodecParams, EncodingError};
use crate::cipher::{decompose, CipherUnit, Variant};

/// §-style overflow tuple for a total count `≥ Nmax`: `(Nmax, 0)` for exactly
/// `Nmax`, otherwise `(Nmax, q, r)` with `count = q·Nmax + r`, `0 ≤ r < Nmax`.
pub fn encode_overflow(count: u64, params: &CodecParams) -> Result<Vec<u32>, EncodingError> {
    let nmax = u64::from(params.nmax);
    if count < nmax {
        return Err(EncodingError::InvalidUnit(format!("count {count} needs no overflow tuple")));
    }
    if count == nmax {
        return Ok(vec![params.nmax, 0]);
    }
    let (q, r) = (count / nmax, count % nmax);
    if q >= params.token_space() {
        return Err(EncodingError::InvalidUnit(format!("count {count} exceeds the representable range")));
    }
    Ok(vec![params.nmax, q as u32, r as u32])
}

fn check_unit(unit: &CipherUnit, params: &CodecParams) -> Result<(), EncodingError> {
    if u64::from(unit.token) >= params.token_space() || u64::from(unit.block) >= params.token_space() {
        return Err(EncodingError::InvalidUnit(format!("{unit:?} does not fit {}-bit tokens", params.n_bits)));
    }
    if unit.occurrence == 0 {
        return Err(EncodingError::InvalidUnit("occurrence index 0".into()));
    }
    Ok(())
}

/// Fixed-width tokens for original (unmasked) or masked units.
pub fn fixed_tokens(units: &[CipherUnit], variant: Variant, params: &CodecParams) -> Result<Vec<u32>, EncodingError> {
    let mut out = Vec::with_capacity(units.len());
    for unit in units {
        check_unit(unit, params)?;
        if unit.occurrence != 1 {
            return Err(EncodingError::InvalidUnit("fixed-width schemes carry no occurrence index".into()));
        }
        match variant {
            Variant::Original => {
                let count = unit.count(params.nmax);
                if decompose(count, params.nmax) != (unit.block, unit.token) || count < u64::from(params.n0) {
                    return Err(EncodingError::InvalidUnit(format!("{unit:?} is not a valid count")));
                }
                if count < u64::from(params.nmax) {
                    out.push(unit.token);
                } else {
                    out.extend(encode_overflow(count, params)?);
                }
            }
            Variant::Masked => {
                if unit.block == 0 && unit.token != params.nmax {
                    out.push(unit.token);
                } else {
                    out.extend([params.nmax, unit.block, unit.token]);
                }
            }
            Variant::Rectified => {
                return Err(EncodingError::InvalidUnit("rectified units need the variable-length scheme".into()));
            }
        }
    }
    Ok(out)
}

/// Variable-length tokens for rectified units.
pub fn varlen_tokens(units: &[CipherUnit], params: &CodecParams) -> Result<Vec<u32>, EncodingError> {
    let nmax = params.nmax;
    let mut out = Vec::with_capacity(units.len());
    for unit in units {
        check_unit(unit, params)?;
        let b = u32::from(unit.occurrence);
        if b >= nmax {
            return Err(EncodingError::InvalidUnit(format!("occurrence {b} collides with the escape token")));
        }
        let (c, q) = (unit.token, unit.block);
        if q > 0 {
            out.extend([nmax, nmax, q, b, c]);
        } else if b == 1 && (params.n0..nmax).contains(&c) {
            out.push(c);
        } else if b == 1 && c == nmax {
            out.extend([nmax, 0]);
        } else {
            out.extend([nmax, b, c]);
        }
    }
    Ok(out)
}

fn pack(count: usize, tokens: &[u32], n_bits: u32) -> Vec<u8> {
    let mut w = BitWriter::new();
    w.write(count as u64, 64);
    for &t in tokens {
        w.write(u64::from(t), n_bits);
    }
    w.finish()
}

pub fn encode_fixed(units: &[CipherUnit], variant: Variant, params: &CodecParams) -> Result<Vec<u8>, EncodingError> {
    Ok(pack(units.len(), &fixed_tokens(units, variant, params)?, params.n_bits))
}

pub fn encode_varlen(units: &[CipherUnit], params: &CodecParams) -> Result<Vec<u8>, EncodingError> {
    Ok(pack(units.len(), &varlen_tokens(units, params)?, params.n_bits))
}

struct Tokens<'a> {
    reader: BitReader<'a>,
    n_bits: u32,
}

impl Tokens<'_> {
    fn next(&mut self) -> Result<u32, EncodingError> {
        self.reader.read(self.n_bits).map(|t| t as u32).ok_or(EncodingError::Truncated)
    }

    fn finish(&self) -> Result<(), EncodingError> {
        if self.reader.at_padding() {
            Ok(())
        } else {
            Err(EncodingError::Framing("trailing data after the last unit".into()))
        }
    }
}

fn unpack<'a>(bytes: &'a [u8], params: &CodecParams) -> Result<(u64, Tokens<'a>), EncodingError> {
    let (count, rest) = read_count(bytes)?;
    Ok((count, Tokens { reader: BitReader::new(rest), n_bits: params.n_bits }))
}

fn non_canonical(what: &str) -> EncodingError {
    EncodingError::Framing(format!("non-canonical {what}"))
}

pub fn decode_fixed(bytes: &[u8], variant: Variant, params: &CodecParams) -> Result<Vec<CipherUnit>, EncodingError> {
    let (count, mut tokens) = unpack(bytes, params)?;
    let nmax = params.nmax;
    let mut units = Vec::new();
    for _ in 0..count {
        let t = tokens.next()?;
        let unit = match variant {
            Variant::Original if t == nmax => match tokens.next()? {
                0 => CipherUnit::plain(u64::from(nmax), nmax),
                q => {
                    let r = tokens.next()?;
                    if r >= nmax {
                        return Err(EncodingError::Framing(format!("overflow residual {r} not below Nmax")));
                    }
                    if q == 1 && r == 0 {
                        return Err(non_canonical("overflow tuple"));
                    }
                    CipherUnit { block: q, token: r, occurrence: 1 }
                }
            },
            Variant::Original => {
                if !(params.n0..nmax).contains(&t) {
                    return Err(EncodingError::Framing(format!("bare token {t} outside [N0, Nmax)")));
                }
                CipherUnit { block: 0, token: t, occurrence: 1 }
            }
            Variant::Masked if t == nmax => {
                let q = tokens.next()?;
                let c = tokens.next()?;
                if q == 0 && c != nmax {
                    return Err(non_canonical("escape"));
                }
                CipherUnit { block: q, token: c, occurrence: 1 }
            }
            Variant::Masked => CipherUnit { block: 0, token: t, occurrence: 1 },
            Variant::Rectified => {
                return Err(EncodingError::InvalidUnit("rectified units need the variable-length scheme".into()));
            }
        };
        units.push(unit);
    }
    tokens.finish()?;
    Ok(units)
}

pub fn decode_varlen(bytes: &[u8], params: &CodecParams) -> Result<Vec<CipherUnit>, EncodingError> {
    let (count, mut tokens) = unpack(bytes, params)?;
    let nmax = params.nmax;
    let mut units = Vec::new();
    for _ in 0..count {
        let t = tokens.next()?;
        let unit = if t != nmax {
            if !(params.n0..nmax).contains(&t) {
                return Err(EncodingError::Framing(format!("bare token {t} outside [N0, Nmax)")));
            }
            CipherUnit { block: 0, token: t, occurrence: 1 }
        } else {
            match tokens.next()? {
                0 => CipherUnit { block: 0, token: nmax, occurrence: 1 },
                second if second == nmax => {
                    let q = tokens.next()?;
                    let b = tokens.next()?;
                    let c = tokens.next()?;
                    if q == 0 || b == 0 || b >= nmax {
                        return Err(EncodingError::Framing("bad overflow escape".into()));
                    }
                    CipherUnit { block: q, token: c, occurrence: b as u16 }
                }
                b => {
                    let c = tokens.next()?;
                    if b == 1 && (params.n0..=nmax).contains(&c) {
                        return Err(non_canonical("escape"));
                    }
                    let occurrence = u16::try_from(b)
                        .map_err(|_| EncodingError::Framing(format!("occurrence {b} exceeds 16 bits")))?;
                    CipherUnit { block: 0, token: c, occurrence }
                }
            }
        };
        units.push(unit);
    }
    tokens.finish()?;
    Ok(units)
}
