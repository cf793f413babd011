//! Closed-form decryption probabilities of the masked cipher.
//!
//! With the orbit hitting a symbol's interval with probability `p` per
//! iteration, the count offset `C̃ - N0` is geometric(p). Each of those
//! offsets is a chance for an earlier masked value to collide, each with
//! probability `2⁻ⁿ`.

/// `(1 - 2⁻ⁿ)^(count - N0)`: probability that no earlier count collides.
pub fn pc_single(count: u64, n_bits: u32, n0: u64) -> f64 {
    assert!(count >= n0, "count {count} below N0 = {n0}");
    let miss = 1.0 - 2f64.powi(-(n_bits as i32));
    let e = count - n0;
    if e <= i32::MAX as u64 {
        miss.powi(e as i32)
    } else {
        miss.powf(e as f64)
    }
}

/// First-character correct-decryption probability for a hit probability
/// `p`: `p·(1 - q^(Nmax-N0)) / (1 - q)` with `q = (1-p)(1-2⁻ⁿ)`.
pub fn pc_first_with_p(p: f64, n_bits: u32, n0: u32, nmax: u32) -> f64 {
    assert!(p > 0.0 && p <= 1.0, "hit probability {p} outside (0, 1]");
    let m = 2f64.powi(-(n_bits as i32));
    // 1 - q evaluated without cancellation.
    let one_minus_q = p + m - p * m;
    let q = (1.0 - p) * (1.0 - m);
    let tail = q.powf(f64::from(nmax - n0));
    p * (1.0 - tail) / one_minus_q
}

/// [`pc_first_with_p`] for an alphabet of `s` equiprobable intervals.
pub fn pc_first(s: u32, n_bits: u32, n0: u32, nmax: u32) -> f64 {
    assert!(s >= 2, "alphabet size {s} < 2");
    pc_first_with_p(1.0 / f64::from(s), n_bits, n0, nmax)
}

/// `pc1^i`: correct decryption of the i-th character, errors propagating.
pub fn pc_position(i: u32, pc1: f64) -> f64 {
    assert!((0.0..=1.0).contains(&pc1), "pc1 = {pc1} outside [0, 1]");
    pc1.powf(f64::from(i))
}

/// Smallest position at which decryption is no better than guessing among
/// `s` symbols.
pub fn random_guess_crossover(pc1: f64, s: u32) -> Option<u32> {
    if pc1 >= 1.0 {
        return None;
    }
    let floor = 1.0 / f64::from(s);
    let mut i = (floor.ln() / pc1.ln()).ceil().max(1.0) as u32;
    // Nudge across the boundary in case the logarithms rounded the wrong way.
    while i > 1 && pc_position(i - 1, pc1) < floor {
        i -= 1;
    }
    while pc_position(i, pc1) >= floor {
        i += 1;
    }
    Some(i)
}

/// Mean of `C̃` when `C̃ - N0` is geometric(p).
pub fn expected_count(p: f64, n0: u32) -> f64 {
    f64::from(n0) + (1.0 - p) / p
}

/// Hit probability that reproduces a measured mean count.
pub fn p_from_mean(mean_count: f64, n0: u32) -> f64 {
    1.0 / (1.0 + (mean_count - f64::from(n0)))
}

/// Entropy in bits of geometric(p) on `{0, 1, ...}`.
pub fn geometric_entropy(p: f64) -> f64 {
    let q = 1.0 - p;
    (-(q * q.log2()) - p * p.log2()) / p
}

/// Entropy in bits of the occurrence index of a rectified unit: `b - 1` is
/// geometric with success probability `1 - 2⁻ⁿ`, so the value is tiny.
pub fn occurrence_entropy(n_bits: u32) -> f64 {
    geometric_entropy(1.0 - 2f64.powi(-(n_bits as i32)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Direct evaluation of Σ_{k=N0}^{Nmax} p(1-p)^(k-N0) (1-2⁻ⁿ)^(k-N0)
    /// with compensated summation.
    fn direct_sum(p: f64, n_bits: u32, n0: u32, nmax: u32) -> f64 {
        let m = 2f64.powi(-(n_bits as i32));
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for k in n0..=nmax {
            let e = f64::from(k - n0);
            let term = p * (1.0 - p).powf(e) * (1.0 - m).powf(e);
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        sum
    }

    #[test]
    fn pc_single_examples() {
        assert_eq!(pc_single(250, 16, 250), 1.0);
        assert_eq!(pc_single(251, 16, 250), 0.9999847412109375);
        let mut prev = 1.0;
        for c in (250..2_000_000).step_by(9973) {
            let v = pc_single(c, 16, 250);
            assert!(v <= prev);
            prev = v;
        }
        assert!(pc_single(10_000_000, 16, 250) < 1e-60);
    }

    #[test]
    fn pc_first_reference_value() {
        let v = pc_first(256, 16, 250, 65532);
        assert_relative_eq!(v, 0.9961240899211138, max_relative = 5e-16);
        let every_n = 1.0 / (1.0 - v);
        assert_eq!(every_n.round(), 258.0);
    }

    #[test]
    fn pc_first_matches_direct_sum() {
        let closed = pc_first(256, 16, 250, 65532);
        let direct = direct_sum(1.0 / 256.0, 16, 250, 65532);
        assert_relative_eq!(closed, direct, max_relative = 1e-12);
        let closed24 = pc_first(256, 24, 250, 65532);
        assert_relative_eq!(closed24, direct_sum(1.0 / 256.0, 24, 250, 65532), max_relative = 1e-12);
    }

    #[test]
    fn closed_form_omits_the_k_equals_nmax_term() {
        // The closed form sums k' = 0..Nmax-N0-1; the direct sum also has
        // k = Nmax, whose weight p·q^(Nmax-N0) only matters for tiny Nmax.
        for (s, n, n0, nmax) in [(2u32, 4u32, 3u32, 15u32), (64, 8, 10, 255)] {
            let p = 1.0 / f64::from(s);
            let q = (1.0 - p) * (1.0 - 2f64.powi(-(n as i32)));
            let last = p * q.powi((nmax - n0) as i32);
            assert_relative_eq!(pc_first(s, n, n0, nmax) + last, direct_sum(p, n, n0, nmax), max_relative = 1e-12);
        }
    }

    #[test]
    fn wide_tokens_approach_certainty() {
        let p: f64 = 1.0 / 256.0;
        let limit = 1.0 - (1.0 - p).powi(65532 - 250);
        assert_relative_eq!(pc_first_with_p(p, 60, 250, 65532), limit, max_relative = 1e-12);
    }

    #[test]
    fn crossover_matches_a_linear_scan() {
        let pc1 = pc_first(256, 16, 250, 65532);
        let mut power = 1.0f64;
        let mut scan = 0;
        for i in 1.. {
            power *= pc1;
            if power < 1.0 / 256.0 {
                scan = i;
                break;
            }
        }
        assert_eq!(random_guess_crossover(pc1, 256), Some(scan));
        assert_eq!(scan, 1428);
        assert_eq!(random_guess_crossover(1.0, 256), None);
        assert_eq!(pc_position(1, pc1), pc1);
        assert_eq!(pc_position(1000, 1.0), 1.0);
    }

    #[test]
    fn geometric_helpers() {
        let p = 1.0 / 256.0;
        assert_relative_eq!(p_from_mean(expected_count(p, 250), 250), p, max_relative = 1e-12);
        // Entropy oracle: -Σ P(k) log2 P(k) summed directly.
        let direct: f64 = (0..200_000)
            .map(|k| {
                let pk = p * (1.0 - p).powi(k);
                if pk > 0.0 { -pk * pk.log2() } else { 0.0 }
            })
            .sum();
        assert_relative_eq!(geometric_entropy(p), direct, max_relative = 1e-9);
        assert!((9.43..9.45).contains(&geometric_entropy(p)));
        assert!(occurrence_entropy(16) < 1e-3);
    }
}
