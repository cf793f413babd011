//! Floating-point scalar abstraction.
//!
//! Every map evaluation, partition lookup and keystream extraction is written
//! against [`Scalar`] so the same cipher can run in `f32` or `f64`. Both ends
//! of a session must use the same scalar type: the orbit is only reproducible
//! inside one arithmetic.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// A binary floating-point type usable as chaotic state.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + FromStr + Display + Debug + Default + Send + Sync + 'static
{
    /// Number of explicit mantissa bits.
    const MANTISSA_BITS: u32;

    /// Lossless-enough conversion from a small constant.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar")
    }

    fn from_u64_lossy(v: u64) -> Self {
        Self::from_u64(v).expect("u64 converts to float")
    }
}

impl Scalar for f32 {
    const MANTISSA_BITS: u32 = 23;
}

impl Scalar for f64 {
    const MANTISSA_BITS: u32 = 52;
}
