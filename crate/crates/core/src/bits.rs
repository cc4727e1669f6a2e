//! Bit-packed truth tables of functions F_2^N -> F_2.
//!
//! Bit `x` of the table is the value at the point whose coordinate `j` is
//! bit `j` of `x`, the same order as the dense tables in [`crate::functions`].

const LOW_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitTable {
    nvars: usize,
    words: Vec<u64>,
}

impl BitTable {
    pub fn zeros(nvars: usize) -> Self {
        assert!(nvars < usize::BITS as usize - 7, "table too large");
        BitTable {
            nvars,
            words: vec![0; ((1usize << nvars) / 64).max(1)],
        }
    }

    pub fn from_fn(nvars: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut t = Self::zeros(nvars);
        for x in 0..(1usize << nvars) {
            if f(x) {
                t.set(x, true);
            }
        }
        t
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    #[inline]
    pub fn len(&self) -> usize {
        1 << self.nvars
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, x: usize) -> bool {
        (self.words[x / 64] >> (x % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, x: usize, v: bool) {
        let bit = 1u64 << (x % 64);
        if v {
            self.words[x / 64] |= bit;
        } else {
            self.words[x / 64] &= !bit;
        }
    }

    pub fn xor_assign(&mut self, other: &BitTable) {
        debug_assert_eq!(self.nvars, other.nvars);
        self.words.iter_mut().zip(&other.words).for_each(|(a, b)| *a ^= b);
    }

    /// Number of points where the function is 1.
    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    /// Number of points where `self` and `other` differ.
    pub fn distance(&self, other: &BitTable) -> u64 {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| u64::from((a ^ b).count_ones()))
            .sum()
    }

    /// `sum_x (-1)^{f(x)}`.
    pub fn signed_sum(&self) -> i64 {
        self.len() as i64 - 2 * self.count_ones() as i64
    }

    /// In-place binary Moebius transform. Maps algebraic normal form
    /// coefficients (bit `m` = coefficient of the monomial with variable set
    /// `m`) to the truth table and back; it is an involution.
    pub fn moebius(&mut self) {
        let n = self.nvars;
        for (v, &mask) in LOW_MASKS.iter().enumerate().take(n.min(6)) {
            let shift = 1 << v;
            for w in &mut self.words {
                *w ^= (*w & mask) << shift;
            }
        }
        for v in 6..n {
            let stride = 1usize << (v - 6);
            for block in self.words.chunks_mut(2 * stride) {
                let (lo, hi) = block.split_at_mut(stride);
                hi.iter_mut().zip(lo.iter()).for_each(|(h, l)| *h ^= l);
            }
        }
    }
}
