//! MSB-first bit packing.

#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    bytes: Vec<u8>,
    acc: u64,
    pending: u32,
    written: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends the low `width` bits of `value`, most significant first.
    pub fn write(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 64);
        if width == 0 {
            return;
        }
        debug_assert!(width == 64 || value >> width == 0, "value wider than {width} bits");
        // Split wide writes so the accumulator never holds more than 63 bits.
        if width > 32 {
            self.write(value >> 32, width - 32);
            self.write(value & 0xFFFF_FFFF, 32);
            return;
        }
        self.acc = (self.acc << width) | value;
        self.pending += width;
        self.written += u64::from(width);
        while self.pending >= 8 {
            self.pending -= 8;
            self.bytes.push((self.acc >> self.pending) as u8);
        }
        self.acc &= (1u64 << self.pending) - 1;
    }

    /// `n` zero bits followed by a one bit.
    pub fn write_unary(&mut self, n: u64) {
        let mut left = n;
        while left >= 32 {
            self.write(0, 32);
            left -= 32;
        }
        self.write(1, left as u32 + 1);
    }

    pub fn bits_written(&self) -> u64 {
        self.written
    }

    /// Flushes with zero padding up to the next byte boundary.
    pub fn finish(mut self) -> Vec<u8> {
        if self.pending > 0 {
            self.bytes.push((self.acc << (8 - self.pending)) as u8);
        }
        self.bytes
    }
}

#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    data: &'a [u8],
    pos: u64,
}

impl<'a> BitReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    pub fn remaining(&self) -> u64 {
        self.data.len() as u64 * 8 - self.pos
    }

    pub fn read(&mut self, width: u32) -> Option<u64> {
        if u64::from(width) > self.remaining() {
            return None;
        }
        let mut out = 0u64;
        for _ in 0..width {
            let byte = self.data[(self.pos / 8) as usize];
            let bit = (byte >> (7 - (self.pos % 8))) & 1;
            out = (out << 1) | u64::from(bit);
            self.pos += 1;
        }
        Some(out)
    }

    /// Counts zero bits up to and including the terminating one bit. Gives
    /// up past `limit` zeros.
    pub fn read_unary(&mut self, limit: u64) -> Option<u64> {
        let mut zeros = 0u64;
        loop {
            match self.read(1)? {
                1 => return Some(zeros),
                _ => {
                    zeros += 1;
                    if zeros > limit {
                        return None;
                    }
                }
            }
        }
    }

    /// True when only zero padding (less than a byte) is left.
    pub fn at_padding(&self) -> bool {
        let rem = self.remaining();
        if rem >= 8 {
            return false;
        }
        rem == 0 || {
            let last = self.data[self.data.len() - 1];
            last & ((1u8 << rem) - 1) == 0
        }
    }
}
