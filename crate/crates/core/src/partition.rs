//! ε-interval partition of the visiting interval and the keyed association
//! between intervals and plaintext symbols.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::chaos::ChaoticMap;
use crate::scalar::Scalar;

/// Largest supported alphabet.
pub const MAX_ALPHABET: usize = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PartitionError {
    #[error("visiting interval [{0}, {1}) is empty or outside the map's defining interval")]
    BadInterval(f64, f64),
    #[error("alphabet size {0} must be between 2 and 65536")]
    BadAlphabet(usize),
    #[error("association is not a permutation of 0..{0}")]
    NotBijective(usize),
}

/// Result of the extended association map: a plaintext symbol or the
/// out-of-range marker β.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    Symbol(u16),
    Beta,
}

impl Letter {
    pub fn symbol(self) -> Option<u16> {
        match self {
            Letter::Symbol(s) => Some(s),
            Letter::Beta => None,
        }
    }
}

/// `S` half-open ε-intervals tiling `[x_min, x_max)`.
///
/// Interval `i` is `[x_min + i·ε, x_min + (i+1)·ε)` with both endpoints
/// evaluated in `T` exactly as written, and the last interval closed off by
/// `x_max`. Membership is decided against those computed boundaries, so a
/// point that equals a boundary always belongs to the interval on its right.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition<T> {
    x_min: T,
    x_max: T,
    epsilon: T,
    association: Vec<u16>,
}

impl<T: Scalar> Partition<T> {
    pub fn new(
        x_min: T,
        x_max: T,
        association: Vec<u16>,
        map: &ChaoticMap<T>,
    ) -> Result<Self, PartitionError> {
        let (lo, hi) = map.domain();
        if !(x_min < x_max && x_min >= lo && x_max <= hi) {
            return Err(PartitionError::BadInterval(
                x_min.to_f64().unwrap_or(f64::NAN),
                x_max.to_f64().unwrap_or(f64::NAN),
            ));
        }
        let s = association.len();
        if !(2..=MAX_ALPHABET).contains(&s) {
            return Err(PartitionError::BadAlphabet(s));
        }
        let mut seen = vec![false; s];
        for &a in &association {
            let a = a as usize;
            if a >= s || seen[a] {
                return Err(PartitionError::NotBijective(s));
            }
            seen[a] = true;
        }
        let epsilon = (x_max - x_min) / T::from_usize(s).expect("alphabet size fits scalar");
        Ok(Self { x_min, x_max, epsilon, association })
    }

    /// Partition with the identity association.
    pub fn identity(x_min: T, x_max: T, s: usize, map: &ChaoticMap<T>) -> Result<Self, PartitionError> {
        if !(2..=MAX_ALPHABET).contains(&s) {
            return Err(PartitionError::BadAlphabet(s));
        }
        Self::new(x_min, x_max, (0..s).map(|i| i as u16).collect(), map)
    }

    pub fn x_min(&self) -> T {
        self.x_min
    }

    pub fn x_max(&self) -> T {
        self.x_max
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn alphabet_size(&self) -> usize {
        self.association.len()
    }

    pub fn association(&self) -> &[u16] {
        &self.association
    }

    /// Left boundary of interval `i` (`x_max` for `i == S`).
    pub fn boundary(&self, i: usize) -> T {
        if i >= self.association.len() {
            self.x_max
        } else {
            self.x_min + T::from_usize(i).expect("index fits scalar") * self.epsilon
        }
    }

    /// Index of the ε-interval containing `x`, or `None` outside `[x_min, x_max)`.
    #[inline]
    pub fn index_of(&self, x: T) -> Option<usize> {
        if !(x >= self.x_min && x < self.x_max) {
            return None;
        }
        let s = self.association.len();
        let mut idx = ((x - self.x_min) / self.epsilon).to_usize().unwrap_or(0).min(s - 1);
        // Rounding in the division can land one cell off near a boundary.
        while idx + 1 < s && x >= self.boundary(idx + 1) {
            idx += 1;
        }
        while idx > 0 && x < self.boundary(idx) {
            idx -= 1;
        }
        Some(idx)
    }

    /// The extended association map: symbol of the interval containing `x`,
    /// β outside the visiting interval.
    #[inline]
    pub fn interval_of(&self, x: T) -> Letter {
        match self.index_of(x) {
            Some(i) => Letter::Symbol(self.association[i]),
            None => Letter::Beta,
        }
    }
}

/// Keyed Fisher-Yates shuffle of `0..s`.
///
/// The 128-bit seed fills the first half of a ChaCha20 key (little-endian),
/// the second half is the fixed label `b"assoc-fisher-ya\0"`. Swap positions
/// are drawn for `i = s-1 .. 1` by rejection sampling on `next_u64` so every
/// position in `0..=i` is equally likely.
pub fn derive_association(seed: u128, s: usize) -> Vec<u16> {
    assert!((2..=MAX_ALPHABET).contains(&s), "alphabet size {s} out of range");
    let mut key = [0u8; 32];
    key[..16].copy_from_slice(&seed.to_le_bytes());
    key[16..].copy_from_slice(b"assoc-fisher-ya\0");
    let mut rng = ChaCha20Rng::from_seed(key);
    let mut perm: Vec<u16> = (0..s).map(|i| i as u16).collect();
    for i in (1..s).rev() {
        let j = bounded(&mut rng, i as u64 + 1) as usize;
        perm.swap(i, j);
    }
    perm
}

fn bounded(rng: &mut impl RngCore, n: u64) -> u64 {
    let rem = (u64::MAX % n + 1) % n;
    let limit = 0u64.wrapping_sub(rem);
    loop {
        let v = rng.next_u64();
        if rem == 0 || v < limit {
            return v % n;
        }
    }
}
