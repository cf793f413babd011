//! Baptista-type chaotic ciphers.
//!
//! The crate is a laboratory for the family of search-based chaotic ciphers
//! that encrypt a symbol by counting how many iterations of a chaotic map it
//! takes to land in the ε-interval associated with that symbol:
//!
//! * [`chaos`]: logistic, skew tent and general onto piecewise-linear maps with
//!   optional pseudo-random perturbation,
//! * [`partition`]: ε-interval partition of the visiting interval and the
//!   keyed association between intervals and symbols,
//! * [`key`]: key material and its text file format,
//! * [`cipher`]: the original counter cipher, the XOR-masked variant (kept
//!   because it decrypts wrongly with small probability) and the rectified
//!   variant with per-token occurrence counters,
//! * [`encoding`]: fixed-width, variable-length, overflow and Golomb-Rice
//!   ciphertext encodings plus the container header,
//! * [`analysis`]: closed-form error probabilities, Monte Carlo harnesses,
//!   chi-square tests and map diagnostics.
//!
//! All numeric code is generic over [`Scalar`] (`f32` and `f64`); the `*64`
//! and `*32` aliases below pin the common instantiations.

pub mod analysis;
pub mod chaos;
pub mod cipher;
pub mod encoding;
pub mod key;
pub mod partition;
pub mod scalar;
pub mod seed;

pub use chaos::{ChaosError, ChaoticMap, OrbitState, PerturbConfig};
pub use cipher::{CipherError, CipherUnit, Variant};
pub use encoding::EncodingError;
pub use key::{KeyError, KeyMaterial};
pub use partition::{Letter, Partition, PartitionError};
pub use scalar::Scalar;

pub type ChaoticMap64 = ChaoticMap<f64>;
pub type OrbitState64 = OrbitState<f64>;
pub type Partition64 = Partition<f64>;
pub type KeyMaterial64 = KeyMaterial<f64>;

pub type ChaoticMap32 = ChaoticMap<f32>;
pub type OrbitState32 = OrbitState<f32>;
pub type Partition32 = Partition<f32>;
pub type KeyMaterial32 = KeyMaterial<f32>;
