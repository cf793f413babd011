//! One-dimensional chaotic maps and their deterministic iteration.
//!
//! Arithmetic contract: every map is evaluated in the session's [`Scalar`]
//! type with the fixed operation order documented on [`ChaoticMap::apply`]
//! and without fused multiply-add (Rust never contracts float expressions).
//! Encipher and decipher share this contract, so an orbit replayed from the
//! same [`OrbitState`] is bit-identical on both ends.

use thiserror::Error;

use crate::scalar::Scalar;

/// Lower bound of the logistic parameter for which the map is chaotic.
pub const LOGISTIC_CHAOS_ONSET: f64 = 3.5699;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChaosError {
    #[error("state {x} lies outside the defining interval [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },
    #[error("logistic parameter b = {0} must satisfy 3.5699 < b <= 4")]
    LogisticParameter(f64),
    #[error("skew tent parameter p = {0} must satisfy 0 < p < 1")]
    TentParameter(f64),
    #[error("invalid piecewise-linear map: {0}")]
    InvalidPwlcm(String),
    #[error("invalid perturbation config: {0}")]
    InvalidPerturbation(String),
    #[error("no closed-form Lyapunov exponent for the logistic map")]
    UnsupportedMap,
}

/// One linear branch of an onto piecewise-linear map.
///
/// The branch starts where the previous one ends (or at 0) and maps
/// `[start, end]` linearly onto the whole defining interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch<T> {
    pub end: T,
    pub increasing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapKind<T> {
    Logistic { b: T },
    SkewTent { p: T },
    Pwlcm { branches: Vec<Branch<T>> },
}

/// A validated chaotic map on the unit interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ChaoticMap<T> {
    kind: MapKind<T>,
}

impl<T: Scalar> ChaoticMap<T> {
    pub fn logistic(b: T) -> Result<Self, ChaosError> {
        if !(b > T::lit(LOGISTIC_CHAOS_ONSET) && b <= T::lit(4.0)) {
            return Err(ChaosError::LogisticParameter(to_f64(b)));
        }
        Ok(Self { kind: MapKind::Logistic { b } })
    }

    pub fn skew_tent(p: T) -> Result<Self, ChaosError> {
        if !(p > T::zero() && p < T::one()) {
            return Err(ChaosError::TentParameter(to_f64(p)));
        }
        Ok(Self { kind: MapKind::SkewTent { p } })
    }

    /// General onto PWLCM. Branch ends must be strictly increasing and the
    /// last one must be the right end of the defining interval, so the branch
    /// lengths tile it exactly. Each branch maps onto the full interval by
    /// construction.
    pub fn pwlcm(branches: Vec<Branch<T>>) -> Result<Self, ChaosError> {
        if branches.len() < 2 {
            return Err(ChaosError::InvalidPwlcm("at least two branches are needed".into()));
        }
        let mut start = T::zero();
        for (i, br) in branches.iter().enumerate() {
            // Negated so that a NaN end is rejected too.
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(br.end > start) {
                return Err(ChaosError::InvalidPwlcm(format!(
                    "branch {i} ends at {} which does not exceed its start {start}",
                    br.end
                )));
            }
            start = br.end;
        }
        if start != T::one() {
            return Err(ChaosError::InvalidPwlcm(format!("last branch ends at {start}, not 1")));
        }
        Ok(Self { kind: MapKind::Pwlcm { branches } })
    }

    /// `m` branches of equal length with alternating slope sign.
    pub fn uniform_pwlcm(m: usize) -> Result<Self, ChaosError> {
        let mt = T::from_usize(m).expect("branch count fits scalar");
        let branches = (1..=m)
            .map(|i| Branch {
                end: if i == m {
                    T::one()
                } else {
                    T::from_usize(i).expect("index fits scalar") / mt
                },
                increasing: i % 2 == 1,
            })
            .collect();
        Self::pwlcm(branches)
    }

    pub fn kind(&self) -> &MapKind<T> {
        &self.kind
    }

    /// Defining interval `[lo, hi]`. All supported maps live on `[0, 1]`.
    pub fn domain(&self) -> (T, T) {
        (T::zero(), T::one())
    }

    pub fn contains(&self, x: T) -> bool {
        let (lo, hi) = self.domain();
        x >= lo && x <= hi
    }

    /// One application of the map.
    ///
    /// * logistic: `b * (x * (1 - x))`
    /// * skew tent: `x / p` on `[0, p]`, `(1 - x) / (1 - p)` on `(p, 1]`
    /// * PWLCM branch `[a, e]`: `(x - a) / (e - a)` when increasing,
    ///   `(e - x) / (e - a)` when decreasing; a point equal to a branch end
    ///   belongs to that branch.
    #[inline]
    pub fn apply(&self, x: T) -> T {
        match &self.kind {
            MapKind::Logistic { b } => *b * (x * (T::one() - x)),
            MapKind::SkewTent { p } => {
                if x <= *p {
                    x / *p
                } else {
                    (T::one() - x) / (T::one() - *p)
                }
            }
            MapKind::Pwlcm { branches } => {
                let mut start = T::zero();
                for br in branches {
                    if x <= br.end {
                        let width = br.end - start;
                        return if br.increasing { (x - start) / width } else { (br.end - x) / width };
                    }
                    start = br.end;
                }
                // x == 1 is always caught by the last branch; anything else was
                // rejected by the domain check.
                T::zero()
            }
        }
    }

    /// Branch lengths for piecewise-linear maps.
    pub fn branch_lengths(&self) -> Option<Vec<T>> {
        match &self.kind {
            MapKind::Logistic { .. } => None,
            MapKind::SkewTent { p } => Some(vec![*p, T::one() - *p]),
            MapKind::Pwlcm { branches } => {
                let mut start = T::zero();
                Some(
                    branches
                        .iter()
                        .map(|br| {
                            let len = br.end - start;
                            start = br.end;
                            len
                        })
                        .collect(),
                )
            }
        }
    }
}

/// Closed-form Lyapunov exponent `-Σ lᵢ ln lᵢ` of an onto PWLCM, where `lᵢ`
/// are the branch lengths relative to the defining interval.
pub fn lyapunov_pwlcm<T: Scalar>(map: &ChaoticMap<T>) -> Result<T, ChaosError> {
    let lengths = map.branch_lengths().ok_or(ChaosError::UnsupportedMap)?;
    let (lo, hi) = map.domain();
    let total = hi - lo;
    Ok(-lengths
        .into_iter()
        .map(|l| {
            let rel = l / total;
            rel * rel.ln()
        })
        .fold(T::zero(), |acc, v| acc + v))
}

/// Periodic pseudo-random perturbation against dynamical degradation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PerturbConfig {
    pub enabled: bool,
    /// Perturbation period Δ in iterations.
    pub delta: u32,
    pub prng_seed: u64,
    /// Displacement is drawn from `0..2^magnitude_bits` units of machine
    /// epsilon, scaled to the defining interval.
    pub magnitude_bits: u32,
}

impl Default for PerturbConfig {
    fn default() -> Self {
        Self { enabled: true, delta: 16, prng_seed: 0, magnitude_bits: 8 }
    }
}

impl PerturbConfig {
    pub fn disabled() -> Self {
        Self { enabled: false, ..Self::default() }
    }

    pub fn validate<T: Scalar>(&self) -> Result<(), ChaosError> {
        if !self.enabled {
            return Ok(());
        }
        if self.delta == 0 {
            return Err(ChaosError::InvalidPerturbation("period must be at least 1".into()));
        }
        if self.magnitude_bits > T::MANTISSA_BITS {
            return Err(ChaosError::InvalidPerturbation(format!(
                "magnitude of {} bits exceeds the {}-bit mantissa",
                self.magnitude_bits,
                T::MANTISSA_BITS
            )));
        }
        Ok(())
    }

    /// Upper bound on one perturbation displacement, relative to the
    /// defining interval length.
    pub fn max_displacement<T: Scalar>(&self) -> T {
        if !self.enabled {
            return T::zero();
        }
        T::from_u64_lossy((1u64 << self.magnitude_bits) - 1) * T::epsilon()
    }
}

/// xorshift64* generator (Marsaglia shifts 12/25/27, Vigna multiplier).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct XorShift64Star {
    state: u64,
}

impl XorShift64Star {
    /// Seeds through one SplitMix64 step so that nearby seeds diverge and the
    /// all-zero state cannot occur.
    pub fn new(seed: u64) -> Self {
        let s = splitmix64(seed);
        Self { state: if s == 0 { 0x9E37_79B9_7F4A_7C15 } else { s } }
    }

    pub fn from_state(state: u64) -> Self {
        Self { state }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }
}

pub fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Position on a chaotic orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitState<T> {
    pub x: T,
    pub total_iters: u64,
    /// Iterations left until the next perturbation.
    pub perturb_counter: u32,
    /// State of the perturbation generator.
    pub prng: u64,
}

impl<T: Scalar> OrbitState<T> {
    pub fn new(x0: T, perturb: &PerturbConfig) -> Self {
        Self {
            x: x0,
            total_iters: 0,
            perturb_counter: perturb.delta,
            prng: XorShift64Star::new(perturb.prng_seed).state(),
        }
    }

    /// Exact bit pattern of the state, for comparisons across sessions.
    pub fn fingerprint(&self) -> (u64, u64, u32, u64) {
        let bits = self.x.to_f64().map(f64::to_bits).unwrap_or(u64::MAX);
        (bits, self.total_iters, self.perturb_counter, self.prng)
    }
}

/// A map together with its perturbation schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct Dynamics<T> {
    pub map: ChaoticMap<T>,
    pub perturb: PerturbConfig,
}

impl<T: Scalar> Dynamics<T> {
    pub fn new(map: ChaoticMap<T>, perturb: PerturbConfig) -> Result<Self, ChaosError> {
        perturb.validate::<T>()?;
        Ok(Self { map, perturb })
    }

    pub fn start(&self, x0: T) -> Result<OrbitState<T>, ChaosError> {
        self.check(x0)?;
        Ok(OrbitState::new(x0, &self.perturb))
    }

    #[inline]
    fn check(&self, x: T) -> Result<(), ChaosError> {
        if self.map.contains(x) {
            Ok(())
        } else {
            let (lo, hi) = self.map.domain();
            Err(ChaosError::OutOfDomain { x: to_f64(x), lo: to_f64(lo), hi: to_f64(hi) })
        }
    }

    /// Advances `state` by one iteration in place.
    #[inline]
    pub fn step(&self, state: &mut OrbitState<T>) -> Result<(), ChaosError> {
        self.check(state.x)?;
        state.x = self.map.apply(state.x);
        state.total_iters += 1;
        if self.perturb.enabled {
            state.perturb_counter -= 1;
            if state.perturb_counter == 0 {
                let mut rng = XorShift64Star::from_state(state.prng);
                let raw = rng.next_u64();
                state.prng = rng.state();
                state.x = self.displace(state.x, raw);
                state.perturb_counter = self.perturb.delta;
            }
        }
        Ok(())
    }

    #[inline]
    fn displace(&self, x: T, raw: u64) -> T {
        let (lo, hi) = self.map.domain();
        let span = hi - lo;
        let low = if self.perturb.magnitude_bits >= 64 {
            raw
        } else {
            raw & ((1u64 << self.perturb.magnitude_bits) - 1)
        };
        let d = T::from_u64_lossy(low) * T::epsilon() * span;
        let moved = x + d;
        if moved > hi {
            moved - span
        } else {
            moved
        }
    }

    pub fn step_n(&self, state: &mut OrbitState<T>, n: u64) -> Result<(), ChaosError> {
        for _ in 0..n {
            self.step(state)?;
        }
        Ok(())
    }
}

/// Pure single-step transition.
pub fn iterate<T: Scalar>(
    state: OrbitState<T>,
    map: &ChaoticMap<T>,
    perturb: &PerturbConfig,
) -> Result<OrbitState<T>, ChaosError> {
    let dynamics = Dynamics { map: map.clone(), perturb: *perturb };
    let mut next = state;
    dynamics.step(&mut next)?;
    Ok(next)
}

/// `n` successive applications of [`iterate`].
pub fn iterate_n<T: Scalar>(
    state: OrbitState<T>,
    map: &ChaoticMap<T>,
    perturb: &PerturbConfig,
    n: u64,
) -> Result<OrbitState<T>, ChaosError> {
    let dynamics = Dynamics { map: map.clone(), perturb: *perturb };
    let mut next = state;
    dynamics.step_n(&mut next, n)?;
    Ok(next)
}

fn to_f64<T: Scalar>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}
