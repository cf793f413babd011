//! Orbit diagnostics: occupancy, autocorrelation and mask-match
//! independence.

use crate::chaos::{Dynamics, PerturbConfig};
use crate::cipher::{Mask, MiddleBits};
use crate::key::KeyMaterial;
use crate::scalar::Scalar;
use crate::ChaoticMap;

use super::stats::{chi_square_uniform, ChiSquare};
use super::AnalysisError;

/// `len` successive iterates after `x0` (x0 itself excluded).
pub fn orbit<T: Scalar>(
    map: &ChaoticMap<T>,
    perturb: PerturbConfig,
    x0: T,
    len: usize,
) -> Result<Vec<T>, AnalysisError> {
    let dynamics = Dynamics::new(map.clone(), perturb)?;
    let mut state = dynamics.start(x0)?;
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        dynamics.step(&mut state)?;
        out.push(state.x);
    }
    Ok(out)
}

/// Sample autocorrelation `τ(k)` for `k = 1..=max_lag`, using the sample
/// mean and (biased) sample variance of the whole sequence.
pub fn autocorrelation<T: Scalar>(orbit: &[T], max_lag: usize) -> Result<Vec<f64>, AnalysisError> {
    let n = orbit.len();
    if n < 2 || max_lag >= n {
        return Err(AnalysisError::InsufficientData { needed: max_lag + 2, got: n });
    }
    let xs: Vec<f64> = orbit.iter().map(|x| x.to_f64().expect("finite scalar")).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let centred: Vec<f64> = xs.iter().map(|x| x - mean).collect();
    let var = centred.iter().map(|d| d * d).sum::<f64>() / n as f64;
    if var == 0.0 || !var.is_finite() {
        return Err(AnalysisError::Degenerate("orbit has zero variance".into()));
    }
    Ok((1..=max_lag)
        .map(|k| {
            let cov = centred[..n - k].iter().zip(&centred[k..]).map(|(a, b)| a * b).sum::<f64>() / (n - k) as f64;
            cov / var
        })
        .collect())
}

/// Equal-width histogram over `[lo, hi)`; out-of-range samples are dropped.
pub fn histogram<T: Scalar>(samples: &[T], bins: usize, lo: f64, hi: f64) -> Vec<u64> {
    let mut counts = vec![0u64; bins];
    let width = (hi - lo) / bins as f64;
    for x in samples {
        let x = x.to_f64().expect("finite scalar");
        if (lo..hi).contains(&x) {
            counts[(((x - lo) / width) as usize).min(bins - 1)] += 1;
        }
    }
    counts
}

/// Per-bin occupancy check against the uniform density.
#[derive(Debug, Clone, PartialEq)]
pub struct Occupancy {
    pub counts: Vec<u64>,
    pub expected: f64,
    pub sigma: f64,
    /// Largest `|count - expected| / sigma` over all bins.
    pub max_abs_z: f64,
    pub chi_square: ChiSquare,
}

impl Occupancy {
    pub fn within(&self, sigmas: f64) -> bool {
        self.max_abs_z <= sigmas
    }
}

/// Occupancy of `bins` equal bins of `[0, 1)`.
pub fn occupancy<T: Scalar>(samples: &[T], bins: usize) -> Result<Occupancy, AnalysisError> {
    if samples.is_empty() || bins < 2 {
        return Err(AnalysisError::InsufficientData { needed: 1, got: samples.len() });
    }
    let counts = histogram(samples, bins, 0.0, 1.0);
    let n = samples.len() as f64;
    let p = 1.0 / bins as f64;
    let expected = n * p;
    let sigma = (n * p * (1.0 - p)).sqrt();
    let max_abs_z = counts.iter().map(|&c| (c as f64 - expected).abs() / sigma).fold(0.0, f64::max);
    Ok(Occupancy { chi_square: chi_square_uniform(&counts)?, counts, expected, sigma, max_abs_z })
}

/// Empirical check of the assumption that mask matches at different counts
/// are independent events with the uniform rate.
///
/// The n-bit match `f_be(x_k) = k ⊕ C` is too rare to estimate
/// correlations from, so the audit uses the low `probe_bits` bits of both
/// sides, where matches happen at rate `2^-probe_bits`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskAudit {
    pub iterations: usize,
    pub probe_bits: u32,
    pub match_rate: f64,
    pub expected_rate: f64,
    /// Pearson correlation of match indicators at lags `1..=max_lag`.
    pub lag_correlation: Vec<f64>,
    /// Pearson correlation of successive full mask words.
    pub word_correlation: f64,
}

impl MaskAudit {
    /// `|correlation|` bound implied by `sigmas` standard errors.
    pub fn correlation_bound(&self, sigmas: f64) -> f64 {
        sigmas / (self.iterations as f64).sqrt()
    }
}

pub fn mask_independence_audit<T: Scalar>(
    key: &KeyMaterial<T>,
    target: u32,
    iterations: usize,
    probe_bits: u32,
    max_lag: usize,
) -> Result<MaskAudit, AnalysisError> {
    if iterations <= max_lag + 1 {
        return Err(AnalysisError::InsufficientData { needed: max_lag + 2, got: iterations });
    }
    assert!(probe_bits >= 1 && probe_bits <= key.n_bits, "probe width {probe_bits}");
    let dynamics = Dynamics::new(key.map.clone(), key.perturb)?;
    let mut state = dynamics.start(key.x0)?;
    let mask = MiddleBits::new(key.map.domain(), key.n_bits);
    let probe = (1u32 << probe_bits) - 1;
    let space = 1u64 << key.n_bits;
    let mut hits = Vec::with_capacity(iterations);
    let mut words = Vec::with_capacity(iterations);
    for k in 0..iterations as u64 {
        dynamics.step(&mut state)?;
        let w = mask.word(state.x);
        let residual = ((k + 1) % space) as u32;
        hits.push(f64::from(u8::from((w ^ residual ^ target) & probe == 0)));
        words.push(f64::from(w));
    }
    let match_rate = hits.iter().sum::<f64>() / iterations as f64;
    let lag_correlation = match autocorrelation(&hits, max_lag) {
        Ok(v) => v,
        Err(AnalysisError::Degenerate(_)) => vec![0.0; max_lag],
        Err(e) => return Err(e),
    };
    Ok(MaskAudit {
        iterations,
        probe_bits,
        match_rate,
        expected_rate: 2f64.powi(-(probe_bits as i32)),
        lag_correlation,
        word_correlation: autocorrelation(&words, 1)?[0],
    })
}
