//! Dense indexing of Σ_q^n and the enumeration budget.
//!
//! A word is identified with its base-q value, first symbol most significant,
//! so numeric order on indices is lexicographic order on words.

use crate::error::{Error, Result};
use crate::word::Word;

/// Default cap on ball-membership evaluations for exhaustive routines.
pub const DEFAULT_BUDGET: u128 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_evaluations: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_evaluations: DEFAULT_BUDGET,
        }
    }
}

impl Budget {
    pub fn new(max_evaluations: u128) -> Self {
        Budget { max_evaluations }
    }

    pub fn unlimited() -> Self {
        Budget {
            max_evaluations: u128::MAX,
        }
    }

    pub fn check(&self, required: u128) -> Result<()> {
        if required > self.max_evaluations {
            Err(Error::TooLarge {
                required,
                budget: self.max_evaluations,
            })
        } else {
            Ok(())
        }
    }
}

/// Σ_q^n with base-q indices.
#[derive(Debug, Clone)]
pub struct Space {
    n: usize,
    q: u64,
    pow: Vec<u64>,
}

impl Space {
    pub fn new(n: usize, q: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidAlphabet(q));
        }
        let q = q as u64;
        let mut pow = Vec::with_capacity(n + 1);
        let mut p: u64 = 1;
        pow.push(1);
        for _ in 0..n {
            p = p.checked_mul(q).ok_or(Error::TooLarge {
                required: (q as u128).saturating_pow(n as u32),
                budget: u64::MAX as u128,
            })?;
            pow.push(p);
        }
        Ok(Space { n, q, pow })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q as usize
    }

    pub fn size(&self) -> u64 {
        self.pow[self.n]
    }

    /// Symbol at 0-based position `i`.
    #[inline]
    pub fn symbol(&self, v: u64, i: usize) -> u64 {
        (v / self.pow[self.n - 1 - i]) % self.q
    }

    /// Index in Σ_q^{n-1} after removing 0-based position `i`.
    #[inline]
    pub fn delete(&self, v: u64, i: usize) -> u64 {
        let low_width = self.pow[self.n - 1 - i];
        let hi = v / (low_width * self.q);
        hi * low_width + v % low_width
    }

    /// Replace the symbol at position `i` (currently `old`) by `new`.
    #[inline]
    pub fn replace(&self, v: u64, i: usize, old: u64, new: u64) -> u64 {
        let p = self.pow[self.n - 1 - i];
        v - old * p + new * p
    }

    /// Swap positions `i` and `i + 1`.
    #[inline]
    pub fn transpose(&self, v: u64, i: usize) -> u64 {
        let a = self.symbol(v, i);
        let b = self.symbol(v, i + 1);
        if a == b {
            return v;
        }
        let v = self.replace(v, i, a, b);
        self.replace(v, i + 1, b, a)
    }

    pub fn index_of(&self, symbols: &[u8]) -> u64 {
        debug_assert_eq!(symbols.len(), self.n);
        symbols
            .iter()
            .fold(0u64, |acc, &s| acc * self.q + s as u64)
    }

    pub fn symbols(&self, v: u64) -> Vec<u8> {
        (0..self.n).map(|i| self.symbol(v, i) as u8).collect()
    }

    pub fn word(&self, v: u64) -> Word {
        Word::from_trusted(self.symbols(v), self.q as usize)
    }

    pub fn index_of_word(&self, w: &Word) -> Result<u64> {
        if w.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: w.len(),
            });
        }
        if w.q() != self.q as usize {
            return Err(Error::AlphabetMismatch {
                expected: self.q as usize,
                found: w.q(),
            });
        }
        Ok(self.index_of(w.symbols()))
    }

    /// Run count of the word at index `v` (n ≥ 1).
    pub fn run_count(&self, v: u64) -> usize {
        let mut runs = 1;
        let mut prev = self.symbol(v, 0);
        for i in 1..self.n {
            let s = self.symbol(v, i);
            if s != prev {
                runs += 1;
                prev = s;
            }
        }
        runs
    }
}
