use super::CipherError;

/// Per-character occurrence counters `B[token]` of the rectified cipher.
///
/// Indexed by the full n-bit masked token. Reset only clears the entries
/// touched since the last reset, so a character costs O(iterations) rather
/// than O(2ⁿ).
#[derive(Debug, Clone)]
pub struct OccurrenceTable {
    counts: Vec<u16>,
    touched: Vec<u32>,
}

impl OccurrenceTable {
    pub fn new(n_bits: u32) -> Self {
        Self { counts: vec![0; 1usize << n_bits], touched: Vec::new() }
    }

    pub fn reset(&mut self) {
        for &t in &self.touched {
            self.counts[t as usize] = 0;
        }
        self.touched.clear();
    }

    /// Increments `B[token]` and returns the new value.
    #[inline]
    pub fn bump(&mut self, token: u32) -> Result<u16, CipherError> {
        let slot = &mut self.counts[token as usize];
        if *slot == 0 {
            self.touched.push(token);
        }
        *slot = slot.checked_add(1).ok_or(CipherError::OccurrenceOverflow { token })?;
        Ok(*slot)
    }

    pub fn get(&self, token: u32) -> u16 {
        self.counts[token as usize]
    }

    /// Sum of all counters.
    pub fn total(&self) -> u64 {
        self.touched.iter().map(|&t| u64::from(self.counts[t as usize])).sum()
    }

    pub fn is_clear(&self) -> bool {
        self.touched.is_empty() && self.counts.iter().all(|&c| c == 0)
    }
}
