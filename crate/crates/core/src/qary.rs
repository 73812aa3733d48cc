//! q-ary single-deletion single-substitution code: the binary signature lies
//! in an inner code C₂ correcting one deletion plus either one substitution
//! or one adjacent transposition, and three symbol-sum congruences hold.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::ball::{apply_del_sub, find_pattern, BallSpec};
use crate::binary::{explain, DecodeOutcome};
use crate::error::{Error, Result};
use crate::lab::{greedy_code_in_order, verify_code_with, verify_key_classes, Certificate, Confusion};
use crate::space::{Budget, Space};
use crate::word::{signature_of, Word};

/// How the signature of y relates to the signature of x when
/// y ∈ B^{DS}_{1,1}(x).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignatureErrorKind {
    Deletion = 1,
    DeletionSubstitution = 2,
    DeletionTransposition = 3,
}

/// First kind (in order 1, 2, 3) relating x^{01} to y^{01}; `Ok(None)` means
/// none applies, which would falsify the signature lemma.
pub fn signature_error_classify(x: &Word, y: &Word) -> Result<Option<SignatureErrorKind>> {
    if x.q() != y.q() {
        return Err(Error::AlphabetMismatch {
            expected: x.q(),
            found: y.q(),
        });
    }
    if find_pattern(x, y, BallSpec::del_sub(1, 1)).is_none() {
        return Err(Error::Precondition(format!(
            "{y} is not reachable from {x} by one deletion and at most one substitution"
        )));
    }
    let sx = Word::from_trusted(signature_of(x.symbols()), 2);
    let sy = Word::from_trusted(signature_of(y.symbols()), 2);
    let kinds = [
        (BallSpec::del_sub(1, 0), SignatureErrorKind::Deletion),
        (BallSpec::del_sub(1, 1), SignatureErrorKind::DeletionSubstitution),
        (BallSpec::del_transposition(1), SignatureErrorKind::DeletionTransposition),
    ];
    Ok(kinds
        .into_iter()
        .find(|(spec, _)| find_pattern(&sx, &sy, *spec).is_some())
        .map(|(_, k)| k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Searched,
    External,
}

/// Binary inner code with pairwise disjoint B^{DS}_{1,1} ∪ B^{DT}_1 balls.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InnerCodeC2 {
    n: usize,
    words: Vec<Word>,
    member: Vec<bool>,
    provenance: Provenance,
}

impl InnerCodeC2 {
    fn from_words(n: usize, mut words: Vec<Word>, provenance: Provenance) -> Result<Self> {
        let space = Space::new(n, 2)?;
        words.sort();
        words.dedup();
        let mut member = vec![false; space.size() as usize];
        for w in &words {
            member[space.index_of_word(w)? as usize] = true;
        }
        Ok(InnerCodeC2 {
            n,
            words,
            member,
            provenance,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn contains_bits(&self, bits: &[u8]) -> bool {
        bits.len() == self.n
            && self
                .member
                .get(index_bits(bits) as usize)
                .copied()
                .unwrap_or(false)
    }

    pub fn contains(&self, w: &Word) -> bool {
        w.q() == 2 && self.contains_bits(w.symbols())
    }

    /// Re-check the disjointness invariant from scratch.
    pub fn verify(&self, budget: &Budget) -> Result<Certificate> {
        verify_code_with(&self.words, Confusion::DelSubOrTransposition, budget)
    }

    /// Parse the file format: "n=<int>" then one binary word per line.
    /// Blank lines are ignored. The invariant is re-verified.
    pub fn parse(text: &str, budget: &Budget) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse {
            what: "code file",
            detail: "missing n=<int> header".into(),
        })?;
        let n: usize = header
            .strip_prefix("n=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::Parse {
                what: "code file",
                detail: format!("bad header {header:?}"),
            })?;
        let words = lines
            .map(|l| {
                let w = Word::parse(l, 2)?;
                if w.len() != n {
                    return Err(Error::LengthMismatch {
                        expected: n,
                        found: w.len(),
                    });
                }
                Ok(w)
            })
            .collect::<Result<Vec<_>>>()?;
        let code = InnerCodeC2::from_words(n, words, Provenance::External)?;
        let cert = code.verify(budget)?;
        if let Some(w) = cert.witness {
            return Err(Error::InfeasibleSpec(format!(
                "inner code balls intersect: {} and {} both reach {}",
                w.x, w.y, w.z
            )));
        }
        Ok(code)
    }

    pub fn load(path: &Path, budget: &Budget) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        InnerCodeC2::parse(&text, budget)
    }

    /// File text accepted by [`InnerCodeC2::parse`].
    pub fn to_file_text(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for w in &self.words {
            out.push_str(&w.to_string());
            out.push('\n');
        }
        out
    }
}

fn index_bits(bits: &[u8]) -> u64 {
    bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
}

/// Greedy C₂ of length n, maximal in Σ_2^n. Words starting with 1 (the only
/// possible signatures) are scanned first, each half in lexicographic order.
pub fn build_inner_code_searched(n: usize, budget: &Budget) -> Result<InnerCodeC2> {
    let ball = if n < 2 {
        // every ball is the empty word
        Confusion::Spec(BallSpec::del_sub(1, 0))
    } else {
        Confusion::DelSubOrTransposition
    };
    let half = Space::new(n, 2)?.size() / 2;
    let order = (half..2 * half).chain(0..half);
    let words = greedy_code_in_order(n, 2, ball, order, budget)?;
    InnerCodeC2::from_words(n, words, Provenance::Searched)
}

pub type QaryParams = [u64; 3];

pub fn moduli_q(n: usize, q: usize) -> [u64; 3] {
    let (n, q) = (n as u64, q as u64);
    [2 * q + 1, 2 * n * q + 1, 2 * n * n * q + 1]
}

/// (Σx_j, Σj·x_j, Σj²·x_j) reduced by the moduli, 1-based j.
pub fn syndrome_q(symbols: &[u8], q: usize) -> [u64; 3] {
    let m = moduli_q(symbols.len(), q);
    let mut sums = [0u128; 3];
    for (k, &x) in symbols.iter().enumerate() {
        let j = k as u128 + 1;
        let x = x as u128;
        sums[0] += x;
        sums[1] += j * x;
        sums[2] += j * j * x;
    }
    [
        (sums[0] % m[0] as u128) as u64,
        (sums[1] % m[1] as u128) as u64,
        (sums[2] % m[2] as u128) as u64,
    ]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QaryDelSubCode {
    pub n: usize,
    pub q: usize,
    /// (a, b, c)
    pub params: QaryParams,
    pub inner: InnerCodeC2,
}

#[derive(Serialize)]
struct QarySummary {
    n: usize,
    q: usize,
    params: QaryParams,
    moduli: [u64; 3],
    inner_size: usize,
    inner_provenance: Provenance,
}

impl Serialize for QaryDelSubCode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QarySummary {
            n: self.n,
            q: self.q,
            params: self.params,
            moduli: moduli_q(self.n, self.q),
            inner_size: self.inner.len(),
            inner_provenance: self.inner.provenance(),
        }
        .serialize(s)
    }
}

impl QaryDelSubCode {
    pub fn new(n: usize, q: usize, params: QaryParams, inner: InnerCodeC2) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidAlphabet(q));
        }
        if inner.n() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: inner.n(),
            });
        }
        for (k, (&p, m)) in params.iter().zip(moduli_q(n, q)).enumerate() {
            if p >= m {
                return Err(Error::Domain(format!(
                    "residue {} = {p} outside [0, {m})",
                    ["a", "b", "c"][k]
                )));
            }
        }
        Ok(QaryDelSubCode { n, q, params, inner })
    }

    pub fn moduli(&self) -> [u64; 3] {
        moduli_q(self.n, self.q)
    }

    fn member_symbols(&self, s: &[u8]) -> bool {
        syndrome_q(s, self.q) == self.params && self.inner.contains_bits(&signature_of(s))
    }

    pub fn is_codeword_q(&self, x: &Word) -> Result<bool> {
        if x.q() != self.q {
            return Err(Error::AlphabetMismatch {
                expected: self.q,
                found: x.q(),
            });
        }
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        Ok(self.member_symbols(x.symbols()))
    }

    pub fn enumerate(&self, budget: &Budget) -> Result<Vec<Word>> {
        let space = Space::new(self.n, self.q)?;
        budget.check(space.size() as u128)?;
        Ok((0..space.size())
            .into_par_iter()
            .filter_map(|v| {
                let s = space.symbols(v);
                self.member_symbols(&s).then(|| Word::from_trusted(s, self.q))
            })
            .collect())
    }

    /// Residues maximizing the code size for a fixed inner code; smallest
    /// triple on ties.
    pub fn best_params_q(
        n: usize,
        q: usize,
        inner: &InnerCodeC2,
        budget: &Budget,
    ) -> Result<(QaryParams, usize)> {
        if inner.n() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: inner.n(),
            });
        }
        let space = Space::new(n, q)?;
        budget.check(space.size() as u128)?;
        let counts = (0..space.size())
            .into_par_iter()
            .fold(HashMap::new, |mut acc: HashMap<QaryParams, usize>, v| {
                let s = space.symbols(v);
                if inner.contains_bits(&signature_of(&s)) {
                    *acc.entry(syndrome_q(&s, q)).or_default() += 1;
                }
                acc
            })
            .reduce(HashMap::new, |mut a, b| {
                for (k, c) in b {
                    *a.entry(k).or_default() += c;
                }
                a
            });
        Ok(counts
            .into_iter()
            .max_by(|(pa, ca), (pb, cb)| ca.cmp(cb).then(pb.cmp(pa)))
            .unwrap_or(([0, 0, 0], 0)))
    }

    pub fn best(n: usize, q: usize, inner: InnerCodeC2, budget: &Budget) -> Result<Self> {
        let (params, _) = Self::best_params_q(n, q, &inner, budget)?;
        QaryDelSubCode::new(n, q, params, inner)
    }

    /// Decode a word of length n−1 (one deletion, at most one substitution).
    pub fn decode_q(&self, received: &Word) -> Result<DecodeOutcome> {
        if received.q() != self.q {
            return Err(Error::AlphabetMismatch {
                expected: self.q,
                found: received.q(),
            });
        }
        if received.len() + 1 != self.n {
            return Err(Error::Precondition(format!(
                "q-ary decoding takes length n-1 = {}, got {}",
                self.n - 1,
                received.len()
            )));
        }
        let q = self.q as u8;
        let r = received.symbols();
        let modulus = self.moduli()[0] as i64;
        let base_sum: i64 = r.iter().map(|&c| c as i64).sum();
        let mut found = Vec::new();
        let mut undo: Vec<(Vec<u8>, i64)> = vec![(r.to_vec(), base_sum)];
        for j in 0..r.len() {
            for c in 0..q {
                if c != r[j] {
                    let mut v = r.to_vec();
                    v[j] = c;
                    undo.push((v, base_sum - r[j] as i64 + c as i64));
                }
            }
        }
        for (base, sum) in undo {
            for p in 0..=base.len() {
                for c in 0..q {
                    if (sum + c as i64).rem_euclid(modulus) as u64 != self.params[0] {
                        continue;
                    }
                    let mut cand = base.clone();
                    cand.insert(p, c);
                    if self.member_symbols(&cand) {
                        found.push(Word::from_trusted(cand, self.q));
                    }
                }
            }
        }
        Ok(DecodeOutcome::from_candidates(found, |x| explain(x, received)))
    }

    /// The received word for codeword x after deletion d and substitution e.
    pub fn channel(&self, x: &Word, d: usize, e: Option<(usize, u8)>) -> Result<Word> {
        apply_del_sub(x, d, e.map(|p| p.0), e.map(|p| p.1))
    }
}

/// Checks every C_{a,b,c} over the given inner code at once: two words
/// with signatures in C₂ and intersecting B^{DS}_{1,1} balls must differ in
/// their residue triple.
pub fn verify_all_params_q(n: usize, q: usize, inner: &InnerCodeC2, budget: &Budget) -> Result<Certificate> {
    let space = Space::new(n, q)?;
    budget.check(space.size() as u128)?;
    let words: Vec<Word> = (0..space.size())
        .map(|v| space.word(v))
        .filter(|w| inner.contains_bits(&signature_of(w.symbols())))
        .collect();
    verify_key_classes(
        &words,
        Confusion::Spec(BallSpec::del_sub(1, 1)),
        |w| syndrome_q(w.symbols(), q),
        budget,
    )
}

impl fmt::Display for QaryDelSubCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.params;
        write!(f, "n={};q={};a={a};b={b};c={c}", self.n, self.q)
    }
}
