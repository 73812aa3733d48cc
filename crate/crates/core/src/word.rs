//! Words over Σ_q = {0, …, q−1} and the run/complement/signature primitives.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// An immutable q-ary word.
///
/// Ordering is lexicographic on the symbols (all words compared in this crate
/// share length and alphabet).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    symbols: Vec<u8>,
    q: usize,
}

impl Word {
    pub fn new(symbols: Vec<u8>, q: usize) -> Result<Self> {
        if !(2..=256).contains(&q) {
            return Err(Error::InvalidAlphabet(q));
        }
        if let Some(&s) = symbols.iter().find(|&&s| s as usize >= q) {
            return Err(Error::SymbolOutOfRange {
                symbol: s as usize,
                q,
            });
        }
        Ok(Word { symbols, q })
    }

    pub fn binary(bits: &[u8]) -> Result<Self> {
        Word::new(bits.to_vec(), 2)
    }

    pub(crate) fn from_trusted(symbols: Vec<u8>, q: usize) -> Self {
        debug_assert!(symbols.iter().all(|&s| (s as usize) < q));
        Word { symbols, q }
    }

    pub fn zeros(n: usize, q: usize) -> Result<Self> {
        Word::new(vec![0; n], q)
    }

    /// Parse the text form: a digit string for q ≤ 10, comma-separated
    /// integers otherwise. The empty string is the empty word.
    pub fn parse(text: &str, q: usize) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Word::new(Vec::new(), q);
        }
        let bad = || Error::ParseWord(text.to_string());
        let symbols: Vec<usize> = if q <= 10 {
            text.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
                .collect::<Result<_>>()?
        } else {
            text.split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|_| bad()))
                .collect::<Result<_>>()?
        };
        if let Some(&s) = symbols.iter().find(|&&s| s >= q) {
            return Err(Error::SymbolOutOfRange { symbol: s, q });
        }
        Word::new(symbols.into_iter().map(|s| s as u8).collect(), q)
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn into_symbols(self) -> Vec<u8> {
        self.symbols
    }

    pub fn hamming_distance(&self, other: &Word) -> Option<usize> {
        if self.len() != other.len() {
            return None;
        }
        Some(
            self.symbols
                .iter()
                .zip(&other.symbols)
                .filter(|(a, b)| a != b)
                .count(),
        )
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q <= 10 {
            for s in &self.symbols {
                write!(f, "{s}")?;
            }
        } else {
            for (i, s) in self.symbols.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{s}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Maximal constant segments of a word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunProfile {
    pub run_count: usize,
    /// 0-based start index of every run.
    pub run_boundaries: Vec<usize>,
}

impl RunProfile {
    pub fn of(w: &Word) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::EmptyWord);
        }
        let s = w.symbols();
        let run_boundaries: Vec<usize> = std::iter::once(0)
            .chain((1..s.len()).filter(|&i| s[i] != s[i - 1]))
            .collect();
        Ok(RunProfile {
            run_count: run_boundaries.len(),
            run_boundaries,
        })
    }
}

/// r(w), the number of runs.
pub fn run_count(w: &Word) -> Result<usize> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    Ok(run_count_of(w.symbols()))
}

pub(crate) fn run_count_of(s: &[u8]) -> usize {
    if s.is_empty() {
        return 0;
    }
    1 + s.windows(2).filter(|p| p[0] != p[1]).count()
}

/// Bitwise complement of a binary word.
pub fn complement(w: &Word) -> Result<Word> {
    if w.q() != 2 {
        return Err(Error::NotBinary);
    }
    Ok(Word::from_trusted(
        w.symbols().iter().map(|&b| 1 - b).collect(),
        2,
    ))
}

/// Ascent indicator word: first symbol 1, then 1 exactly where z_i > z_{i-1}.
pub fn binary_signature(z: &Word) -> Result<Word> {
    if z.is_empty() {
        return Err(Error::EmptyWord);
    }
    Ok(Word::from_trusted(signature_of(z.symbols()), 2))
}

pub(crate) fn signature_of(s: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(s.len());
    if s.is_empty() {
        return out;
    }
    out.push(1);
    out.extend(s.windows(2).map(|p| u8::from(p[1] > p[0])));
    out
}
