use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::chaos::{iterate, ChaoticMap, OrbitState, PerturbConfig};
use crate::key::MapFamily;

fn tent_key(seed: u64) -> KeyMaterial<f64> {
    KeyMaterial::generate(&mut ChaCha8Rng::seed_from_u64(seed), MapFamily::SkewTent)
}

fn message(rng: &mut impl Rng, len: usize) -> Vec<u16> {
    (0..len).map(|_| rng.random_range(0..256u16)).collect()
}

#[test]
fn empty_inputs() {
    let key = tent_key(1);
    let part = key.partition().unwrap();
    assert!(encrypt_original(&key, &part, &[]).unwrap().is_empty());
    assert!(decrypt_original(&key, &part, &[]).unwrap().is_empty());
    assert!(decrypt_masked(&key, &part, &[]).unwrap().is_empty());
    assert!(decrypt_rectified(&key, &part, &[]).unwrap().is_empty());
}

#[test]
fn first_count_matches_brute_force_scan() {
    for seed in 0..20 {
        let key = tent_key(seed);
        let part = key.partition().unwrap();
        let m = (seed * 37 % 256) as u16;
        let unit = encrypt_original(&key, &part, &[m]).unwrap()[0];

        let mut state = OrbitState::new(key.x0, &key.perturb);
        let mut k = 0u64;
        let expected = loop {
            if k >= u64::from(key.n0) && part.interval_of(state.x) == Letter::Symbol(m) {
                break k;
            }
            state = iterate(state, &key.map, &key.perturb).unwrap();
            k += 1;
        };
        assert_eq!(unit.count(key.nmax), expected);
        assert_eq!(unit.occurrence, 1);
    }
}

#[test]
fn original_round_trip_single_and_multi() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for seed in 0..100 {
        let key = tent_key(seed);
        let part = key.partition().unwrap();
        let units = encrypt_original(&key, &part, &[b'A'.into()]).unwrap();
        assert_eq!(decrypt_original(&key, &part, &units).unwrap(), vec![u16::from(b'A')]);
    }
    let key = tent_key(1000);
    let part = key.partition().unwrap();
    let msg = message(&mut rng, 300);
    let units = encrypt_original(&key, &part, &msg).unwrap();
    assert_eq!(decrypt_original(&key, &part, &units).unwrap(), msg);
}

#[test]
fn logistic_and_pwlcm_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for family in [MapFamily::Logistic, MapFamily::Pwlcm] {
        let key: KeyMaterial<f64> = KeyMaterial::generate(&mut rng, family);
        let part = key.partition().unwrap();
        let msg = message(&mut rng, 200);
        let units = encrypt_rectified(&key, &part, &msg).unwrap();
        assert_eq!(decrypt_rectified(&key, &part, &units).unwrap(), msg);
        let units = encrypt_original(&key, &part, &msg).unwrap();
        assert_eq!(decrypt_original(&key, &part, &units).unwrap(), msg);
    }
}

#[test]
fn f32_sessions_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let key: KeyMaterial<f32> = KeyMaterial::generate(&mut rng, MapFamily::SkewTent);
    let part = key.partition().unwrap();
    let msg = message(&mut rng, 200);
    let units = encrypt_rectified(&key, &part, &msg).unwrap();
    assert_eq!(decrypt_rectified(&key, &part, &units).unwrap(), msg);
}

#[test]
fn tampered_count_gives_wrong_symbol() {
    let mut wrong = 0;
    let trials = 400;
    for seed in 0..trials {
        let key = tent_key(5000 + seed);
        let part = key.partition().unwrap();
        let mut units = encrypt_original(&key, &part, &[7]).unwrap();
        units[0].token += 1;
        match decrypt_original(&key, &part, &units) {
            Ok(out) if out == vec![7] => {}
            _ => wrong += 1,
        }
    }
    // Expected 1 - 1/256 of the trials; allow generous slack.
    assert!(wrong >= trials - 8, "{wrong} of {trials}");
}

#[test]
fn zero_mask_reduces_to_original() {
    let key = tent_key(21);
    let part = key.partition().unwrap();
    let msg = message(&mut ChaCha8Rng::seed_from_u64(2), 200);
    let plain = encrypt_original(&key, &part, &msg).unwrap();
    let mut enc = Encipher::with_mask(&key, &part, Variant::Masked, ZeroMask).unwrap();
    let masked: Vec<_> = msg.iter().map(|&m| enc.encrypt_symbol(m).unwrap()).collect();
    assert_eq!(masked, plain);
    let mut dec = Decipher::with_mask(&key, &part, Variant::Masked, ZeroMask).unwrap();
    for (u, &m) in masked.iter().zip(&msg) {
        assert_eq!(dec.decrypt_unit(u).unwrap(), Letter::Symbol(m));
    }
}

#[test]
fn unmasking_with_true_state_recovers_count() {
    let key = tent_key(22);
    let part = key.partition().unwrap();
    let mask = MiddleBits::new(key.map.domain(), key.n_bits);
    let mut plain = Encipher::new(&key, &part, Variant::Original).unwrap();
    let mut masked = Encipher::new(&key, &part, Variant::Masked).unwrap();
    for m in message(&mut ChaCha8Rng::seed_from_u64(3), 100) {
        let p = plain.encrypt_symbol(m).unwrap();
        let c = masked.encrypt_symbol(m).unwrap();
        assert_eq!(plain.state(), masked.state());
        assert_eq!(c.token ^ mask.word(masked.state().x), p.token);
        assert_eq!(c.token ^ f_be(masked.state().x, key.n_bits, key.map.domain()), p.token);
    }
}

#[test]
fn rectified_counters() {
    let key = tent_key(23);
    let part = key.partition().unwrap();
    let mut plain = Encipher::new(&key, &part, Variant::Original).unwrap();
    let mut rect = Encipher::new(&key, &part, Variant::Rectified).unwrap();
    for m in message(&mut ChaCha8Rng::seed_from_u64(4), 2000) {
        let count = plain.encrypt_symbol(m).unwrap().count(key.nmax);
        let unit = rect.encrypt_symbol(m).unwrap();
        let table = rect.occurrence_table().unwrap();
        assert_eq!(table.total(), count - u64::from(key.n0) + 1);
        assert_eq!(table.get(unit.token), unit.occurrence);
        assert!(unit.occurrence >= 1);
    }
}

#[test]
fn collision_breaks_masked_but_not_rectified() {
    // Search single-character messages until the masked decipher collides.
    let mut found = 0;
    for seed in 0..20_000u64 {
        let key = tent_key(seed);
        let part = key.partition().unwrap();
        let msg = [(seed % 256) as u16];
        let masked = encrypt_masked(&key, &part, &msg).unwrap();
        let guess = decrypt_masked(&key, &part, &masked).unwrap();
        if guess[0] == Letter::Symbol(msg[0]) {
            continue;
        }
        let rect = encrypt_rectified(&key, &part, &msg).unwrap();
        assert_eq!(rect[0].token, masked[0].token);
        assert!(rect[0].occurrence > 1);
        assert_eq!(decrypt_rectified(&key, &part, &rect).unwrap(), msg);
        found += 1;
        if found == 3 {
            return;
        }
    }
    panic!("no collision found");
}

#[test]
fn chained_states_agree_bit_exactly() {
    let key = tent_key(24);
    let part = key.partition().unwrap();
    let msg = message(&mut ChaCha8Rng::seed_from_u64(5), 500);
    for variant in [Variant::Original, Variant::Rectified] {
        let mut enc = Encipher::new(&key, &part, variant).unwrap();
        let mut dec = Decipher::new(&key, &part, variant).unwrap();
        for &m in &msg {
            let unit = enc.encrypt_symbol(m).unwrap();
            assert_eq!(dec.decrypt_symbol(&unit).unwrap(), m);
            assert_eq!(enc.state().fingerprint(), dec.state().fingerprint());
        }
    }
}

#[test]
fn eta_never_decreases_first_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for seed in 0..30 {
        let mut key = tent_key(300 + seed);
        let part = key.partition().unwrap();
        let m = rng.random_range(0..256u16);
        let mut last = 0;
        for eta in [0.0, 0.1, 0.3, 0.5, 0.8, 0.95] {
            key.eta = eta;
            let count = Encipher::new(&key, &part, Variant::Original)
                .unwrap()
                .with_kappa_seed(77)
                .encrypt_symbol(m)
                .unwrap()
                .count(key.nmax);
            assert!(count >= last, "eta {eta}: {count} < {last}");
            last = count;
        }
    }
}

#[test]
fn eta_round_trips() {
    let mut key = tent_key(25);
    key.eta = 0.6;
    let part = key.partition().unwrap();
    let msg = message(&mut ChaCha8Rng::seed_from_u64(7), 200);
    let units = encrypt_rectified(&key, &part, &msg).unwrap();
    assert_eq!(decrypt_rectified(&key, &part, &units).unwrap(), msg);
    let units = encrypt_original(&key, &part, &msg).unwrap();
    assert_eq!(decrypt_original(&key, &part, &units).unwrap(), msg);
}

#[test]
fn forced_overflow_round_trips() {
    let mut key = tent_key(26);
    key.nmax = 300;
    key.validate().unwrap();
    let part = key.partition().unwrap();
    let msg = message(&mut ChaCha8Rng::seed_from_u64(8), 500);
    let units = encrypt_original(&key, &part, &msg).unwrap();
    assert!(units.iter().any(|u| u.block >= 2), "expected some counts above 2·Nmax");
    assert_eq!(decrypt_original(&key, &part, &units).unwrap(), msg);
    let units = encrypt_rectified(&key, &part, &msg).unwrap();
    assert!(units.iter().any(|u| u.block > 0));
    assert_eq!(decrypt_rectified(&key, &part, &units).unwrap(), msg);
}

#[test]
fn decomposition_is_invertible() {
    for nmax in [300u32, 65532] {
        for count in (1..5 * u64::from(nmax)).step_by(7).chain([u64::from(nmax), 2 * u64::from(nmax)]) {
            let (q, r) = decompose(count, nmax);
            assert_eq!(compose(q, r, nmax), count);
            assert!(r <= nmax);
            assert_eq!(q == 0, count <= u64::from(nmax));
        }
    }
}

#[test]
fn error_paths() {
    let key = tent_key(27);
    let part = key.partition().unwrap();
    assert_eq!(
        encrypt_original(&key, &part, &[256]).unwrap_err(),
        CipherError::InvalidSymbol { symbol: 256, alphabet: 256 }
    );

    let mut no_mask = key.clone();
    no_mask.mask_enabled = false;
    assert_eq!(encrypt_masked(&no_mask, &part, &[1]).unwrap_err(), CipherError::MaskDisabled);

    let low = CipherUnit { block: 0, token: 10, occurrence: 1 };
    assert!(matches!(decrypt_original(&key, &part, &[low]), Err(CipherError::CorruptCiphertext { position: 0, .. })));

    let mut units = encrypt_rectified(&key, &part, &[1, 2, 3]).unwrap();
    units[2].occurrence = 5000;
    assert!(matches!(decrypt_rectified(&key, &part, &units), Err(CipherError::CorruptCiphertext { position: 2, .. })));

    let mut small = key.clone();
    small.n0 = 2;
    small.nmax = 3;
    small.n_bits = 2;
    let part_small = small.partition().unwrap();
    // A 4-value token space cannot hold a count for most symbols.
    let res = encrypt_original(&small, &part_small, &[9]);
    assert!(matches!(res, Err(CipherError::CountOverflow { .. })) || res.is_ok());
}

#[test]
fn masked_decrypt_reports_desync() {
    let key = tent_key(28);
    let part = key.partition().unwrap();
    // With no perturbation and a fixed orbit, look for a token that never
    // occurs in block 0.
    let mut desyncs = 0;
    for token in 0..64u32 {
        let unit = CipherUnit { block: 0, token: token * 1021 % 65536, occurrence: 1 };
        match decrypt_masked(&key, &part, &[unit]) {
            Err(CipherError::Desync { position: 0 }) => desyncs += 1,
            Ok(_) => {}
            Err(e) => panic!("unexpected {e}"),
        }
    }
    // P(no match over ~65k tries at 2^-16 each) ≈ e^-1.
    assert!((5..50).contains(&desyncs), "{desyncs}");
}

#[test]
fn unperturbed_keys_also_work() {
    let mut key = tent_key(29);
    key.perturb = PerturbConfig::disabled();
    key.map = ChaoticMap::skew_tent(0.4137).unwrap();
    let part = key.partition().unwrap();
    let msg = message(&mut ChaCha8Rng::seed_from_u64(9), 300);
    let units = encrypt_rectified(&key, &part, &msg).unwrap();
    assert_eq!(decrypt_rectified(&key, &part, &units).unwrap(), msg);
}
