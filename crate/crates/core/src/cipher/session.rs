use crate::chaos::{Dynamics, OrbitState, XorShift64Star};
use crate::key::KeyMaterial;
use crate::partition::{Letter, Partition};
use crate::scalar::Scalar;
use crate::seed::derive_seed;

use super::{decompose, CipherError, CipherUnit, Mask, MiddleBits, OccurrenceTable, Variant};

/// Draws κ ~ U[0, 1) at match candidates when η ≠ 0.
///
/// κ is `(next_u64 >> 11) · 2⁻⁵³` from its own xorshift64* stream; it only
/// exists on the encipher side.
#[derive(Debug, Clone)]
pub struct EtaSelector<T> {
    eta: T,
    rng: XorShift64Star,
}

impl<T: Scalar> EtaSelector<T> {
    pub fn new(eta: T, kappa_seed: u64) -> Self {
        Self { eta, rng: XorShift64Star::new(kappa_seed) }
    }

    pub fn draw(&mut self) -> T {
        T::from_u64_lossy(self.rng.next_u64() >> 11) * T::lit(1.0 / 9_007_199_254_740_992.0)
    }

    /// Whether a candidate state is accepted. No draw happens when η = 0.
    #[inline]
    pub fn accept(&mut self) -> bool {
        self.eta == T::zero() || self.draw() >= self.eta
    }
}

fn default_kappa_seed<T>(key: &KeyMaterial<T>) -> u64 {
    derive_seed((key.assoc_seed as u64) ^ ((key.assoc_seed >> 64) as u64), "kappa")
}

struct Shared<'a, T> {
    dynamics: Dynamics<T>,
    partition: &'a Partition<T>,
    n0: u32,
    nmax: u32,
    n_bits: u32,
    variant: Variant,
    state: OrbitState<T>,
    position: usize,
}

impl<'a, T: Scalar> Shared<'a, T> {
    fn new(key: &KeyMaterial<T>, partition: &'a Partition<T>, variant: Variant) -> Result<Self, CipherError> {
        if variant.is_masked() && !key.mask_enabled {
            return Err(CipherError::MaskDisabled);
        }
        let dynamics = Dynamics::new(key.map.clone(), key.perturb)?;
        let state = dynamics.start(key.x0)?;
        Ok(Self {
            dynamics,
            partition,
            n0: key.n0,
            nmax: key.nmax,
            n_bits: key.n_bits,
            variant,
            state,
            position: 0,
        })
    }

    /// Counts must stay below `2ⁿ · Nmax` so the block number fits a token.
    fn count_limit(&self) -> u64 {
        (1u64 << self.n_bits) * u64::from(self.nmax)
    }

    fn skip(&mut self, n: u64) -> Result<(), CipherError> {
        self.dynamics.step_n(&mut self.state, n)?;
        Ok(())
    }
}

/// Encryption session: owns the orbit and, for the rectified variant, the
/// occurrence table.
pub struct Encipher<'a, T, M = MiddleBits<T>> {
    shared: Shared<'a, T>,
    mask: M,
    eta: EtaSelector<T>,
    table: Option<OccurrenceTable>,
}

impl<'a, T: Scalar> Encipher<'a, T> {
    pub fn new(key: &KeyMaterial<T>, partition: &'a Partition<T>, variant: Variant) -> Result<Self, CipherError> {
        let mask = MiddleBits::new(key.map.domain(), key.n_bits);
        Self::with_mask(key, partition, variant, mask)
    }
}

impl<'a, T: Scalar, M: Mask<T>> Encipher<'a, T, M> {
    pub fn with_mask(
        key: &KeyMaterial<T>,
        partition: &'a Partition<T>,
        variant: Variant,
        mask: M,
    ) -> Result<Self, CipherError> {
        let shared = Shared::new(key, partition, variant)?;
        let table = (variant == Variant::Rectified).then(|| OccurrenceTable::new(key.n_bits));
        Ok(Self { shared, mask, eta: EtaSelector::new(key.eta, default_kappa_seed(key)), table })
    }

    /// Replaces the κ stream seed (the default is derived from the key).
    pub fn with_kappa_seed(mut self, seed: u64) -> Self {
        self.eta = EtaSelector::new(self.eta.eta, seed);
        self
    }

    pub fn state(&self) -> &OrbitState<T> {
        &self.shared.state
    }

    pub fn encrypt_symbol(&mut self, symbol: u16) -> Result<CipherUnit, CipherError> {
        let sh = &mut self.shared;
        let alphabet = sh.partition.alphabet_size();
        if usize::from(symbol) >= alphabet {
            return Err(CipherError::InvalidSymbol { symbol, alphabet });
        }
        let target = Letter::Symbol(symbol);
        let limit = sh.count_limit();
        let masked = sh.variant.is_masked();
        sh.skip(u64::from(sh.n0))?;
        if let Some(table) = self.table.as_mut() {
            table.reset();
        }
        let mut k = u64::from(sh.n0);
        let mut current_block = 0;
        loop {
            let (block, residual) = decompose(k, sh.nmax);
            let occurrence = match self.table.as_mut() {
                Some(table) => {
                    if block != current_block {
                        current_block = block;
                        table.reset();
                    }
                    table.bump(residual ^ self.mask.word(sh.state.x))?
                }
                None => 1,
            };
            if sh.partition.interval_of(sh.state.x) == target && self.eta.accept() {
                let token = if masked { residual ^ self.mask.word(sh.state.x) } else { residual };
                sh.position += 1;
                return Ok(CipherUnit { block, token, occurrence });
            }
            if k + 1 >= limit {
                return Err(CipherError::CountOverflow { limit: limit - 1 });
            }
            sh.dynamics.step(&mut sh.state)?;
            k += 1;
        }
    }

    /// Table of the character just encrypted (rectified variant only).
    pub fn occurrence_table(&self) -> Option<&OccurrenceTable> {
        self.table.as_ref()
    }
}

/// Decryption session.
pub struct Decipher<'a, T, M = MiddleBits<T>> {
    shared: Shared<'a, T>,
    mask: M,
}

impl<'a, T: Scalar> Decipher<'a, T> {
    pub fn new(key: &KeyMaterial<T>, partition: &'a Partition<T>, variant: Variant) -> Result<Self, CipherError> {
        let mask = MiddleBits::new(key.map.domain(), key.n_bits);
        Self::with_mask(key, partition, variant, mask)
    }
}

impl<'a, T: Scalar, M: Mask<T>> Decipher<'a, T, M> {
    pub fn with_mask(
        key: &KeyMaterial<T>,
        partition: &'a Partition<T>,
        variant: Variant,
        mask: M,
    ) -> Result<Self, CipherError> {
        Ok(Self { shared: Shared::new(key, partition, variant)?, mask })
    }

    pub fn state(&self) -> &OrbitState<T> {
        &self.shared.state
    }

    fn corrupt(&self, reason: impl Into<String>) -> CipherError {
        CipherError::CorruptCiphertext { position: self.shared.position, reason: reason.into() }
    }

    /// Decrypts one unit to a letter. Only the masked variant can yield β
    /// without error, because its first-match search may land anywhere.
    pub fn decrypt_unit(&mut self, unit: &CipherUnit) -> Result<Letter, CipherError> {
        let letter = match self.shared.variant {
            Variant::Original => self.replay(unit)?,
            Variant::Masked | Variant::Rectified => self.search(unit)?,
        };
        self.shared.position += 1;
        Ok(letter)
    }

    /// Decrypts one unit; a β result means the ciphertext is corrupt.
    pub fn decrypt_symbol(&mut self, unit: &CipherUnit) -> Result<u16, CipherError> {
        match self.decrypt_unit(unit)? {
            Letter::Symbol(s) => Ok(s),
            Letter::Beta => Err(CipherError::CorruptCiphertext {
                position: self.shared.position - 1,
                reason: "state outside the visiting interval".into(),
            }),
        }
    }

    fn replay(&mut self, unit: &CipherUnit) -> Result<Letter, CipherError> {
        let sh = &self.shared;
        if unit.occurrence != 1 {
            return Err(self.corrupt("occurrence index on an unmasked unit"));
        }
        let in_range = if unit.block == 0 {
            (sh.n0..=sh.nmax).contains(&unit.token)
        } else {
            unit.token < sh.nmax && unit.count(sh.nmax) > u64::from(sh.nmax)
        };
        if !in_range {
            return Err(self.corrupt(format!("count {} outside [N0, Nmax]", unit.count(sh.nmax))));
        }
        if unit.count(sh.nmax) >= sh.count_limit() {
            return Err(self.corrupt("count beyond the representable range"));
        }
        let count = unit.count(sh.nmax);
        self.shared.skip(count)?;
        Ok(self.shared.partition.interval_of(self.shared.state.x))
    }

    /// Scans block `unit.block` for the `unit.occurrence`-th count whose
    /// masked residual equals `unit.token`. The scan never leaves the block,
    /// which bounds it by `Nmax` iterations per unit.
    fn search(&mut self, unit: &CipherUnit) -> Result<Letter, CipherError> {
        let (n0, nmax) = (u64::from(self.shared.n0), u64::from(self.shared.nmax));
        if u64::from(unit.token) >= 1u64 << self.shared.n_bits || unit.occurrence == 0 {
            return Err(self.corrupt("token or occurrence out of range"));
        }
        if self.shared.variant == Variant::Masked && unit.occurrence != 1 {
            return Err(self.corrupt("occurrence index on a masked unit"));
        }
        let (start, end) = match unit.block {
            0 => (n0, nmax),
            q => (
                (u64::from(q) * nmax).max(nmax + 1),
                (u64::from(q) + 1) * nmax - 1,
            ),
        };
        if end >= self.shared.count_limit() {
            return Err(self.corrupt("block beyond the representable range"));
        }
        self.shared.skip(start)?;
        let mut k = start;
        let mut seen = 0u16;
        loop {
            let (_, residual) = decompose(k, self.shared.nmax);
            if residual ^ self.mask.word(self.shared.state.x) == unit.token {
                seen += 1;
                if seen == unit.occurrence {
                    return Ok(self.shared.partition.interval_of(self.shared.state.x));
                }
            }
            if k == end {
                return Err(match self.shared.variant {
                    Variant::Masked => CipherError::Desync { position: self.shared.position },
                    _ => self.corrupt(format!("fewer than {} matches in the block", unit.occurrence)),
                });
            }
            self.shared.dynamics.step(&mut self.shared.state)?;
            k += 1;
        }
    }

    /// Number of units consumed so far.
    pub fn position(&self) -> usize {
        self.shared.position
    }
}
