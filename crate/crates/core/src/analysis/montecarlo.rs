//! Monte Carlo harnesses.
//!
//! Trial `i` draws everything it needs from [`trial_seed`]`(master, i)`,
//! and aggregates are integer sums, so results do not depend on how rayon
//! schedules the trials.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cipher::{CipherError, CipherUnit, Decipher, Encipher, Variant};
use crate::key::KeyMaterial;
use crate::partition::{Letter, Partition};
use crate::scalar::Scalar;
use crate::seed::{derive_seed, trial_seed};

use super::report::{AnalysisReport, PositionRate};
use super::stats::{chi_square_test, chi_square_uniform, BinomialEstimate};
use super::theory::{expected_count, p_from_mean, pc_first_with_p, pc_position};
use super::AnalysisError;

/// Fewest samples accepted by [`count_distribution_test`].
pub const MIN_COUNT_SAMPLES: usize = 10_000;
/// Fewest trials accepted by [`masked_error_rate`].
pub const MIN_ERROR_TRIALS: usize = 10_000;
/// Upper limit on the number of chi-square bins.
pub const MAX_BINS: usize = 64;

/// Copy of `key` with a fresh initial condition and perturbation seed.
pub fn trial_key<T: Scalar, R: Rng>(key: &KeyMaterial<T>, rng: &mut R) -> KeyMaterial<T> {
    let mut k = key.clone();
    k.x0 = T::lit(rng.random_range(0.01..0.99));
    k.perturb.prng_seed = rng.random();
    k
}

fn trial_rng(master: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(master, index as u64))
}

/// Encrypts one random symbol per trial, each from a fresh initial
/// condition, and returns the units.
pub fn single_character_units<T: Scalar>(
    key: &KeyMaterial<T>,
    partition: &Partition<T>,
    variant: Variant,
    samples: usize,
    master_seed: u64,
) -> Result<Vec<CipherUnit>, AnalysisError> {
    let alphabet = partition.alphabet_size();
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(master_seed, i);
            let k = trial_key(key, &mut rng);
            let symbol = rng.random_range(0..alphabet) as u16;
            Ok(Encipher::new(&k, partition, variant)?.encrypt_symbol(symbol)?)
        })
        .collect()
}

/// Original-cipher counts `C̃` of [`single_character_units`].
pub fn count_samples<T: Scalar>(
    key: &KeyMaterial<T>,
    partition: &Partition<T>,
    samples: usize,
    master_seed: u64,
) -> Result<Vec<u64>, AnalysisError> {
    let units = single_character_units(key, partition, Variant::Original, samples, master_seed)?;
    Ok(units.iter().map(|u| u.count(key.nmax)).collect())
}

/// Average probability per iteration that the orbit lands in one given
/// interval: the visiting-interval occupancy divided by the alphabet size.
pub fn interval_hit_probability<T: Scalar>(
    key: &KeyMaterial<T>,
    partition: &Partition<T>,
    iterations: usize,
) -> Result<f64, AnalysisError> {
    let orbit = super::diagnostics::orbit(&key.map, key.perturb, key.x0, iterations)?;
    let inside = orbit.iter().filter(|&&x| partition.index_of(x).is_some()).count();
    Ok(inside as f64 / iterations as f64 / partition.alphabet_size() as f64)
}

/// Bin edges `e_0 = 0 < e_1 < ...` on the offsets `C̃ - N0` giving nearly
/// equal geometric(p) mass per bin; the last bin is open.
fn geometric_edges(p: f64, bins: usize) -> Vec<u64> {
    let ln_q = (1.0 - p).ln();
    let mut edges: Vec<u64> = (0..bins).map(|i| ((1.0 - i as f64 / bins as f64).ln() / ln_q).ceil() as u64).collect();
    edges.dedup();
    edges
}

/// Chi-square goodness of fit of `C̃ - N0` to geometric(p̂), p̂ the maximum
/// likelihood estimate `1 / (1 + mean)`. The mean is also compared with the
/// geometric mean implied by `reference_p`, an independently measured hit
/// probability.
pub fn count_distribution_test(samples: &[u64], n0: u32, reference_p: f64) -> Result<AnalysisReport, AnalysisError> {
    let n = samples.len();
    if n < MIN_COUNT_SAMPLES {
        return Err(AnalysisError::InsufficientData { needed: MIN_COUNT_SAMPLES, got: n });
    }
    if let Some(&c) = samples.iter().find(|&&c| c < u64::from(n0)) {
        return Err(AnalysisError::Degenerate(format!("count {c} below N0")));
    }
    let offsets: Vec<u64> = samples.iter().map(|&c| c - u64::from(n0)).collect();
    let mean_offset = offsets.iter().map(|&d| d as f64).sum::<f64>() / n as f64;
    let p_hat = p_from_mean(mean_offset + f64::from(n0), n0);

    let bins = (n / 50).clamp(2, MAX_BINS);
    let edges = geometric_edges(p_hat, bins);
    let mut observed = vec![0u64; edges.len()];
    for &d in &offsets {
        observed[edges.partition_point(|&e| e <= d) - 1] += 1;
    }
    let tail = |e: u64| (1.0 - p_hat).powf(e as f64);
    let expected: Vec<f64> = edges
        .iter()
        .enumerate()
        .map(|(i, &e)| n as f64 * (tail(e) - edges.get(i + 1).map_or(0.0, |&next| tail(next))))
        .collect();
    let chi = chi_square_test(&observed, &expected, 1)?;

    let ref_mean = expected_count(reference_p, n0);
    let ref_sd = (1.0 - reference_p).sqrt() / reference_p / (n as f64).sqrt();
    let mean = mean_offset + f64::from(n0);

    let mut report = AnalysisReport::new("count distribution");
    report.samples = n as u64;
    report.histogram = observed;
    report.chi_square = Some(chi);
    report.note("samples", n);
    report.note("mean_count", mean);
    report.note("p_hat", p_hat);
    report.note("reference_p", reference_p);
    report.note("reference_mean", ref_mean);
    report.note("mean_z", (mean - ref_mean) / ref_sd);
    report.note("decay_per_iteration", 1.0 - p_hat);
    report.note("exponential_decay", if chi.pass { "consistent" } else { "rejected" });
    Ok(report)
}

/// Chi-square uniformity of the top `coarse_bits` of `value_bits`-bit values.
pub fn coarse_uniformity(values: &[u32], value_bits: u32, coarse_bits: u32) -> Result<AnalysisReport, AnalysisError> {
    if values.is_empty() {
        return Err(AnalysisError::InsufficientData { needed: 1, got: 0 });
    }
    assert!(coarse_bits <= value_bits, "{coarse_bits} coarse bits of {value_bits}");
    let mut hist = vec![0u64; 1 << coarse_bits];
    for &v in values {
        let bin = (u64::from(v) >> (value_bits - coarse_bits)) as usize;
        let slot = hist
            .get_mut(bin)
            .ok_or_else(|| AnalysisError::Degenerate(format!("value {v} wider than {value_bits} bits")))?;
        *slot += 1;
    }
    let mut report = AnalysisReport::new("coarse uniformity");
    report.samples = values.len() as u64;
    report.chi_square = Some(chi_square_uniform(&hist)?);
    report.histogram = hist;
    report.note("bins", 1u64 << coarse_bits);
    Ok(report)
}

/// Raw tallies of an error-rate run.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRun {
    pub variant: Variant,
    pub trials: u64,
    pub message_len: usize,
    /// Correctly decrypted messages per position.
    pub correct: Vec<u64>,
    /// Trials in which the decipher lost track of the orbit.
    pub desyncs: u64,
    /// Sum and number of the `C̃` values seen by the encipher.
    pub count_sum: u128,
    pub count_n: u64,
    pub n0: u32,
    pub nmax: u32,
    pub n_bits: u32,
}

impl ErrorRun {
    fn empty(key: &KeyMaterial<impl Scalar>, variant: Variant, message_len: usize) -> Self {
        Self {
            variant,
            trials: 0,
            message_len,
            correct: vec![0; message_len],
            desyncs: 0,
            count_sum: 0,
            count_n: 0,
            n0: key.n0,
            nmax: key.nmax,
            n_bits: key.n_bits,
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.trials += other.trials;
        self.desyncs += other.desyncs;
        self.count_sum += other.count_sum;
        self.count_n += other.count_n;
        for (a, b) in self.correct.iter_mut().zip(other.correct) {
            *a += b;
        }
        self
    }

    pub fn mean_count(&self) -> f64 {
        self.count_sum as f64 / self.count_n.max(1) as f64
    }

    /// Hit probability measured from the mean count.
    pub fn p_hat(&self) -> f64 {
        p_from_mean(self.mean_count(), self.n0)
    }

    /// Closed-form first-character correctness for the measured p̂.
    pub fn pc1_theory(&self) -> f64 {
        pc_first_with_p(self.p_hat(), self.n_bits, self.n0, self.nmax)
    }

    pub fn estimate(&self, position: u32) -> BinomialEstimate {
        BinomialEstimate::new(self.correct[position as usize - 1], self.trials)
    }

    pub fn report(&self) -> AnalysisReport {
        let pc1 = self.pc1_theory();
        let masked = self.variant == Variant::Masked;
        let mut report = AnalysisReport::new(format!("{:?} cipher decryption", self.variant).to_lowercase());
        report.theory_curve = (1..=self.message_len as u32).map(|i| if masked { pc_position(i, pc1) } else { 1.0 }).collect();
        report.error_rates = (1..=self.message_len as u32)
            .map(|i| PositionRate {
                position: i,
                estimate: self.estimate(i),
                theory: Some(report.theory_curve[i as usize - 1]),
            })
            .collect();
        report.note("trials", self.trials);
        report.note("message_len", self.message_len);
        report.note("mean_count", self.mean_count());
        report.note("p_hat", self.p_hat());
        report.note("pc1_theory", if masked { pc1 } else { 1.0 });
        report.note("desyncs", self.desyncs);
        report
    }
}

fn run_trial<T: Scalar>(
    key: &KeyMaterial<T>,
    partition: &Partition<T>,
    variant: Variant,
    message_len: usize,
    master_seed: u64,
    index: usize,
) -> Result<ErrorRun, AnalysisError> {
    let mut rng = trial_rng(master_seed, index);
    let k = trial_key(key, &mut rng);
    let alphabet = partition.alphabet_size();
    let message: Vec<u16> = (0..message_len).map(|_| rng.random_range(0..alphabet) as u16).collect();

    let mut run = ErrorRun::empty(key, variant, message_len);
    run.trials = 1;
    let mut enc = Encipher::new(&k, partition, variant)?.with_kappa_seed(derive_seed(rng.random(), "kappa"));
    let mut units = Vec::with_capacity(message_len);
    for &m in &message {
        let before = enc.state().total_iters;
        units.push(enc.encrypt_symbol(m)?);
        run.count_sum += u128::from(enc.state().total_iters - before);
        run.count_n += 1;
    }

    let mut dec = Decipher::new(&k, partition, variant)?;
    for (i, (unit, &m)) in units.iter().zip(&message).enumerate() {
        match dec.decrypt_unit(unit) {
            Ok(Letter::Symbol(s)) if s == m => run.correct[i] += 1,
            Ok(_) => {}
            Err(CipherError::Desync { .. } | CipherError::CorruptCiphertext { .. }) => {
                run.desyncs += 1;
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(run)
}

/// Encrypts and decrypts `trials` random messages, each from a fresh
/// initial condition, and tallies per-position correctness. A decipher
/// that loses the orbit counts as wrong for the rest of its message.
pub fn error_rate_experiment<T: Scalar>(
    key: &KeyMaterial<T>,
    variant: Variant,
    trials: usize,
    message_len: usize,
    master_seed: u64,
) -> Result<ErrorRun, AnalysisError> {
    if trials == 0 || message_len == 0 {
        return Err(AnalysisError::InsufficientData { needed: 1, got: 0 });
    }
    let partition = key.partition()?;
    let seed = derive_seed(master_seed, &format!("error-rate/{variant:?}"));
    (0..trials)
        .into_par_iter()
        .map(|i| run_trial(key, &partition, variant, message_len, seed, i))
        .try_reduce(|| ErrorRun::empty(key, variant, message_len), |a, b| Ok(a.merge(b)))
}

/// [`error_rate_experiment`] for the masked cipher, rendered as a report
/// with the closed-form curve for the measured hit probability.
pub fn masked_error_rate<T: Scalar>(
    key: &KeyMaterial<T>,
    trials: usize,
    message_len: usize,
    master_seed: u64,
) -> Result<AnalysisReport, AnalysisError> {
    if trials < MIN_ERROR_TRIALS {
        return Err(AnalysisError::InsufficientData { needed: MIN_ERROR_TRIALS, got: trials });
    }
    Ok(error_rate_experiment(key, Variant::Masked, trials, message_len, master_seed)?.report())
}
