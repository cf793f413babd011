//! Key material and the `name = value` key file format.
//!
//! ```text
//! map_kind = skew_tent
//! p = 0.3712
//! x0 = 0.61803
//! assoc_seed = 0x000000000000000000000000deadbeef
//! eta = 0
//! n0 = 250
//! nmax = 65532
//! n_bits = 16
//! perturb_delta = 16
//! perturb_seed = 0x0000000000000001
//! perturb_bits = 8
//! mask_enabled = true
//! ```
//!
//! `map_kind` is one of `logistic` (needs `b`), `skew_tent` (needs `p`) or
//! `pwlcm` (needs `breakpoints`, a comma-separated list of `end:inc` /
//! `end:dec` branches). `perturb_delta = 0` disables perturbation. Blank
//! lines and lines starting with `#` are ignored; unknown or repeated names
//! are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::chaos::{Branch, ChaosError, ChaoticMap, MapKind, PerturbConfig};
use crate::partition::{derive_association, Partition, PartitionError};
use crate::scalar::Scalar;

pub const DEFAULT_N0: u32 = 250;
pub const DEFAULT_NMAX: u32 = 65532;
pub const DEFAULT_N_BITS: u32 = 16;
pub const DEFAULT_ALPHABET: usize = 256;
/// `f_be` extracts `n_bits` starting at bit 8 of a 32-bit word.
pub const MAX_N_BITS: u32 = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KeyError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown key name `{0}`")]
    UnknownName(String),
    #[error("key name `{0}` given twice")]
    Duplicate(String),
    #[error("missing key name `{0}`")]
    Missing(&'static str),
    #[error("bad value for `{name}`: {value}")]
    BadValue { name: &'static str, value: String },
    #[error("inconsistent key: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Map(#[from] ChaosError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// All secret and public cipher parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyMaterial<T> {
    pub map: ChaoticMap<T>,
    pub x0: T,
    /// Seeds the keyed shuffle that yields the association map.
    pub assoc_seed: u128,
    pub eta: T,
    pub n0: u32,
    pub nmax: u32,
    pub perturb: PerturbConfig,
    pub mask_enabled: bool,
    /// Ciphertext token width.
    pub n_bits: u32,
}

impl<T: Scalar> KeyMaterial<T> {
    /// Key with the classic parameters (N0 = 250, Nmax = 65532, 16-bit tokens)
    /// and default perturbation.
    pub fn new(map: ChaoticMap<T>, x0: T, assoc_seed: u128) -> Result<Self, KeyError> {
        let key = Self {
            map,
            x0,
            assoc_seed,
            eta: T::zero(),
            n0: DEFAULT_N0,
            nmax: DEFAULT_NMAX,
            perturb: PerturbConfig::default(),
            mask_enabled: true,
            n_bits: DEFAULT_N_BITS,
        };
        key.validate()?;
        Ok(key)
    }

    pub fn validate(&self) -> Result<(), KeyError> {
        self.perturb.validate::<T>()?;
        if !self.map.contains(self.x0) {
            return Err(KeyError::Inconsistent(format!("x0 = {} outside the defining interval", self.x0)));
        }
        if !(self.eta >= T::zero() && self.eta < T::one()) {
            return Err(KeyError::Inconsistent(format!("eta = {} must lie in [0, 1)", self.eta)));
        }
        if !(1..=MAX_N_BITS).contains(&self.n_bits) {
            return Err(KeyError::Inconsistent(format!("n_bits = {} must be in 1..=24", self.n_bits)));
        }
        if !(1 <= self.n0 && self.n0 < self.nmax) {
            return Err(KeyError::Inconsistent(format!("need 1 <= n0 < nmax, got {} and {}", self.n0, self.nmax)));
        }
        if u64::from(self.nmax) >= 1u64 << self.n_bits {
            return Err(KeyError::Inconsistent(format!(
                "nmax = {} does not fit below 2^{}",
                self.nmax, self.n_bits
            )));
        }
        Ok(())
    }

    /// Default visiting interval: `[0.2, 0.8)` for the logistic map,
    /// `[0.05, 0.95)` for piecewise-linear maps.
    pub fn default_visiting_interval(&self) -> (T, T) {
        match self.map.kind() {
            MapKind::Logistic { .. } => (T::lit(0.2), T::lit(0.8)),
            _ => (T::lit(0.05), T::lit(0.95)),
        }
    }

    /// Partition over the default visiting interval with a 256-symbol
    /// alphabet.
    pub fn partition(&self) -> Result<Partition<T>, KeyError> {
        let (lo, hi) = self.default_visiting_interval();
        self.partition_with(lo, hi, DEFAULT_ALPHABET)
    }

    pub fn partition_with(&self, x_min: T, x_max: T, alphabet: usize) -> Result<Partition<T>, KeyError> {
        if !(2..=crate::partition::MAX_ALPHABET).contains(&alphabet) {
            return Err(PartitionError::BadAlphabet(alphabet).into());
        }
        let part = Partition::new(x_min, x_max, derive_association(self.assoc_seed, alphabet), &self.map)?;
        if self.perturb.max_displacement::<T>() >= part.epsilon() {
            return Err(KeyError::Inconsistent("perturbation magnitude reaches the interval width".into()));
        }
        Ok(part)
    }

    /// Fresh random key of the given map family with default parameters.
    pub fn generate<R: Rng + ?Sized>(rng: &mut R, family: MapFamily) -> Self {
        let map = match family {
            MapFamily::Logistic => ChaoticMap::logistic(T::lit(rng.random_range(3.99..4.0))),
            MapFamily::SkewTent => ChaoticMap::skew_tent(T::lit(rng.random_range(0.05..0.95))),
            MapFamily::Pwlcm => {
                let mut ends: Vec<f64> = (0..3).map(|_| rng.random_range(0.05..0.95)).collect();
                ends.sort_by(f64::total_cmp);
                ends.push(1.0);
                ChaoticMap::pwlcm(
                    ends.iter()
                        .enumerate()
                        .map(|(i, &e)| Branch { end: T::lit(e), increasing: i % 2 == 0 })
                        .collect(),
                )
            }
        }
        .expect("generated parameters are in range");
        let mut key = Self::new(map, T::lit(rng.random_range(0.01..0.99)), rng.random())
            .expect("generated key is valid");
        key.perturb.prng_seed = rng.random();
        key
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapFamily {
    Logistic,
    SkewTent,
    Pwlcm,
}

const NAMES: &[&str] = &[
    "map_kind",
    "b",
    "p",
    "breakpoints",
    "x0",
    "assoc_seed",
    "eta",
    "n0",
    "nmax",
    "n_bits",
    "perturb_delta",
    "perturb_seed",
    "perturb_bits",
    "mask_enabled",
];

impl<T: Scalar> fmt::Display for KeyMaterial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.map.kind() {
            MapKind::Logistic { b } => writeln!(f, "map_kind = logistic\nb = {b}")?,
            MapKind::SkewTent { p } => writeln!(f, "map_kind = skew_tent\np = {p}")?,
            MapKind::Pwlcm { branches } => {
                let list: Vec<String> = branches
                    .iter()
                    .map(|br| format!("{}:{}", br.end, if br.increasing { "inc" } else { "dec" }))
                    .collect();
                writeln!(f, "map_kind = pwlcm\nbreakpoints = {}", list.join(","))?
            }
        }
        writeln!(f, "x0 = {}", self.x0)?;
        writeln!(f, "assoc_seed = {:#034x}", self.assoc_seed)?;
        writeln!(f, "eta = {}", self.eta)?;
        writeln!(f, "n0 = {}", self.n0)?;
        writeln!(f, "nmax = {}", self.nmax)?;
        writeln!(f, "n_bits = {}", self.n_bits)?;
        writeln!(f, "perturb_delta = {}", if self.perturb.enabled { self.perturb.delta } else { 0 })?;
        writeln!(f, "perturb_seed = {:#018x}", self.perturb.prng_seed)?;
        writeln!(f, "perturb_bits = {}", self.perturb.magnitude_bits)?;
        writeln!(f, "mask_enabled = {}", self.mask_enabled)
    }
}

impl<T: Scalar> FromStr for KeyMaterial<T> {
    type Err = KeyError;

    fn from_str(text: &str) -> Result<Self, KeyError> {
        let mut fields: BTreeMap<&'static str, String> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, value) = line.split_once('=').ok_or_else(|| KeyError::Syntax {
                line: i + 1,
                msg: "expected `name = value`".into(),
            })?;
            let name = name.trim();
            let canonical = NAMES
                .iter()
                .copied()
                .find(|n| *n == name)
                .ok_or_else(|| KeyError::UnknownName(name.to_string()))?;
            if fields.insert(canonical, value.trim().to_string()).is_some() {
                return Err(KeyError::Duplicate(canonical.to_string()));
            }
        }

        let map = match take(&mut fields, "map_kind")?.as_str() {
            "logistic" => ChaoticMap::logistic(parse_num(&take(&mut fields, "b")?, "b")?)?,
            "skew_tent" => ChaoticMap::skew_tent(parse_num(&take(&mut fields, "p")?, "p")?)?,
            "pwlcm" => ChaoticMap::pwlcm(parse_breakpoints(&take(&mut fields, "breakpoints")?)?)?,
            other => {
                return Err(KeyError::BadValue { name: "map_kind", value: other.to_string() });
            }
        };
        let x0 = parse_num(&take(&mut fields, "x0")?, "x0")?;
        let assoc_seed = parse_hex_u128(&take(&mut fields, "assoc_seed")?, "assoc_seed")?;
        let eta = parse_num(&take(&mut fields, "eta")?, "eta")?;
        let n0 = parse_num(&take(&mut fields, "n0")?, "n0")?;
        let nmax = parse_num(&take(&mut fields, "nmax")?, "nmax")?;
        let n_bits = parse_num(&take(&mut fields, "n_bits")?, "n_bits")?;
        let delta: u32 = parse_num(&take(&mut fields, "perturb_delta")?, "perturb_delta")?;
        let prng_seed = parse_hex_u128(&take(&mut fields, "perturb_seed")?, "perturb_seed")?;
        let prng_seed = u64::try_from(prng_seed)
            .map_err(|_| KeyError::BadValue { name: "perturb_seed", value: format!("{prng_seed:#x}") })?;
        let magnitude_bits = parse_num(&take(&mut fields, "perturb_bits")?, "perturb_bits")?;
        let mask_enabled = parse_num(&take(&mut fields, "mask_enabled")?, "mask_enabled")?;

        // Parameters of other map kinds must not be present.
        if let Some((name, _)) = fields.into_iter().next() {
            return Err(KeyError::Inconsistent(format!("`{name}` does not belong to this map kind")));
        }

        let key = KeyMaterial {
            map,
            x0,
            assoc_seed,
            eta,
            n0,
            nmax,
            perturb: PerturbConfig { enabled: delta > 0, delta, prng_seed, magnitude_bits },
            mask_enabled,
            n_bits,
        };
        key.validate()?;
        Ok(key)
    }
}

fn take(fields: &mut BTreeMap<&'static str, String>, name: &'static str) -> Result<String, KeyError> {
    fields.remove(name).ok_or(KeyError::Missing(name))
}

fn parse_num<V: FromStr>(value: &str, name: &'static str) -> Result<V, KeyError> {
    value.parse().map_err(|_| KeyError::BadValue { name, value: value.to_string() })
}

fn parse_hex_u128(value: &str, name: &'static str) -> Result<u128, KeyError> {
    let digits = value.strip_prefix("0x").or_else(|| value.strip_prefix("0X")).unwrap_or(value);
    u128::from_str_radix(digits, 16).map_err(|_| KeyError::BadValue { name, value: value.to_string() })
}

fn parse_breakpoints<T: Scalar>(value: &str) -> Result<Vec<Branch<T>>, KeyError> {
    value
        .split(',')
        .map(|item| {
            let bad = || KeyError::BadValue { name: "breakpoints", value: item.to_string() };
            let (end, dir) = item.trim().split_once(':').ok_or_else(bad)?;
            let increasing = match dir.trim() {
                "inc" => true,
                "dec" => false,
                _ => return Err(bad()),
            };
            Ok(Branch { end: end.trim().parse().map_err(|_| bad())?, increasing })
        })
        .collect()
}
