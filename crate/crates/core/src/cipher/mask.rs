//! Keystream words used to mask iteration counts.

use crate::scalar::Scalar;

/// A deterministic keystream word derived from the chaotic state.
pub trait Mask<T> {
    fn word(&self, x: T) -> u32;
}

/// Middle-bit extraction: scale `x` to `[0, 1)` over the defining interval,
/// multiply by 2³², truncate, and keep bits `8 .. 8 + n_bits`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiddleBits<T> {
    lo: T,
    span: T,
    n_bits: u32,
}

impl<T: Scalar> MiddleBits<T> {
    pub fn new(domain: (T, T), n_bits: u32) -> Self {
        assert!((1..=24).contains(&n_bits), "n_bits must be in 1..=24");
        Self { lo: domain.0, span: domain.1 - domain.0, n_bits }
    }
}

impl<T: Scalar> Mask<T> for MiddleBits<T> {
    #[inline]
    fn word(&self, x: T) -> u32 {
        let scaled = (x - self.lo) / self.span;
        let wide = (scaled * T::lit(4_294_967_296.0)).floor().to_u64().unwrap_or(0);
        ((wide >> 8) & ((1u64 << self.n_bits) - 1)) as u32
    }
}

/// The keystream word `f_be(x)` for a state on `domain`.
pub fn f_be<T: Scalar>(x: T, n_bits: u32, domain: (T, T)) -> u32 {
    MiddleBits::new(domain, n_bits).word(x)
}

/// Always zero; turns the masked variants back into the original cipher.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ZeroMask;

impl<T> Mask<T> for ZeroMask {
    #[inline]
    fn word(&self, _x: T) -> u32 {
        0
    }
}
