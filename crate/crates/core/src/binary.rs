//! Binary single-deletion single-substitution code C_{a,b,c,d}: four weighted
//! congruences with weights α_i = i, β_i = Σ_{j≤i} j, η_i = Σ_{j≤i} j² and
//! 𝟙_i = 1, moduli 3n+1, 3n²+1, 3n³+1 and 5.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::ball::{apply_del_sub, BallSpec, ErrorPattern};
use crate::congruent::CongruentConstraint;
use crate::error::{Error, Result};
use crate::lab::{verify_key_classes, Certificate, Confusion};
use crate::space::{Budget, Space};
use crate::word::Word;

pub type BinaryParams = [u64; 4];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BinaryDelSubCode {
    pub n: usize,
    /// (a, b, c, d)
    pub params: BinaryParams,
}

/// 1-based weights α_i, β_i, η_i.
pub fn alpha(i: u128) -> u128 {
    i
}

pub fn beta(i: u128) -> u128 {
    i * (i + 1) / 2
}

pub fn eta(i: u128) -> u128 {
    i * (i + 1) * (2 * i + 1) / 6
}

pub fn moduli(n: usize) -> [u64; 4] {
    let n = n as u64;
    [3 * n + 1, 3 * n * n + 1, 3 * n * n * n + 1, 5]
}

/// Residues (Σα_i x_i, Σβ_i x_i, Ση_i x_i, Σx_i) modulo the code moduli.
pub fn syndrome(bits: &[u8]) -> [u64; 4] {
    let m = moduli(bits.len());
    let mut sums = [0u128; 4];
    for (k, &b) in bits.iter().enumerate() {
        if b != 0 {
            let i = k as u128 + 1;
            sums[0] += alpha(i);
            sums[1] += beta(i);
            sums[2] += eta(i);
            sums[3] += 1;
        }
    }
    [
        (sums[0] % m[0] as u128) as u64,
        (sums[1] % m[1] as u128) as u64,
        (sums[2] % m[2] as u128) as u64,
        (sums[3] % m[3] as u128) as u64,
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeStatus {
    Decoded,
    NotACodewordChannelOutput,
    Ambiguous,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodeOutcome {
    pub status: DecodeStatus,
    pub codeword: Option<Word>,
    pub inferred_errors: Option<ErrorPattern>,
    /// All surviving candidates when ambiguous.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub candidates: Vec<Word>,
}

impl DecodeOutcome {
    pub(crate) fn from_candidates(
        mut found: Vec<Word>,
        pattern: impl FnOnce(&Word) -> Option<ErrorPattern>,
    ) -> Self {
        found.sort();
        found.dedup();
        match found.len() {
            0 => DecodeOutcome {
                status: DecodeStatus::NotACodewordChannelOutput,
                codeword: None,
                inferred_errors: None,
                candidates: Vec::new(),
            },
            1 => {
                let x = found.pop().expect("one candidate");
                DecodeOutcome {
                    status: DecodeStatus::Decoded,
                    inferred_errors: pattern(&x),
                    codeword: Some(x),
                    candidates: Vec::new(),
                }
            }
            _ => DecodeOutcome {
                status: DecodeStatus::Ambiguous,
                codeword: None,
                inferred_errors: None,
                candidates: found,
            },
        }
    }
}

/// Error pattern explaining `received` from codeword `x`: for length n−1 a
/// deletion and at most one substitution, for n at most one substitution,
/// for n+1 an insertion and at most one substitution.
pub fn explain(x: &Word, received: &Word) -> Option<ErrorPattern> {
    let n = x.len();
    let m = received.len();
    let q = x.q() as u8;
    if m + 1 == n {
        for d in 1..=n {
            let base = apply_del_sub(x, d, None, None).ok()?;
            match base.hamming_distance(received)? {
                0 => return Some(ErrorPattern::del_sub(d, None)),
                1 => {
                    let e = base
                        .symbols()
                        .iter()
                        .zip(received.symbols())
                        .position(|(a, b)| a != b)?;
                    return Some(ErrorPattern::del_sub(
                        d,
                        Some((e + 1, received.symbols()[e])),
                    ));
                }
                _ => {}
            }
        }
        None
    } else if m == n {
        let diffs: Vec<(usize, u8)> = x
            .symbols()
            .iter()
            .zip(received.symbols())
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(i, (_, &b))| (i + 1, b))
            .collect();
        (diffs.len() <= 1).then(|| ErrorPattern {
            substituted_positions: diffs,
            ..Default::default()
        })
    } else if m == n + 1 {
        for p in 1..=m {
            for sym in 0..q {
                let mut s = x.symbols().to_vec();
                s.insert(p - 1, sym);
                let diffs: Vec<(usize, u8)> = s
                    .iter()
                    .zip(received.symbols())
                    .enumerate()
                    .filter(|(_, (a, b))| a != b)
                    .map(|(i, (_, &b))| (i + 1, b))
                    .collect();
                if diffs.len() <= 1 {
                    return Some(ErrorPattern {
                        inserted_positions: vec![(p, sym)],
                        substituted_positions: diffs,
                        ..Default::default()
                    });
                }
            }
        }
        None
    } else {
        None
    }
}

impl BinaryDelSubCode {
    pub fn new(n: usize, params: BinaryParams) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("code length must be >= 1".into()));
        }
        let m = moduli(n);
        for (k, (&p, &md)) in params.iter().zip(&m).enumerate() {
            if p >= md {
                return Err(Error::Domain(format!(
                    "residue {} = {p} outside [0, {md})",
                    ["a", "b", "c", "d"][k]
                )));
            }
        }
        Ok(BinaryDelSubCode { n, params })
    }

    pub fn moduli(&self) -> [u64; 4] {
        moduli(self.n)
    }

    /// The four defining congruences as generic constraints.
    pub fn constraints(&self) -> Vec<CongruentConstraint> {
        let idx = 1..=self.n as u128;
        let vectors: [Vec<i64>; 4] = [
            idx.clone().map(|i| alpha(i) as i64).collect(),
            idx.clone().map(|i| beta(i) as i64).collect(),
            idx.clone().map(|i| eta(i) as i64).collect(),
            idx.map(|_| 1).collect(),
        ];
        vectors
            .into_iter()
            .zip(self.params.iter().zip(self.moduli()))
            .map(|(g, (&a, m))| CongruentConstraint::new(g, a, m).expect("validated residues"))
            .collect()
    }

    fn check_shape(&self, x: &Word) -> Result<()> {
        if x.q() != 2 {
            return Err(Error::NotBinary);
        }
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        Ok(())
    }

    pub fn is_codeword(&self, x: &Word) -> Result<bool> {
        self.check_shape(x)?;
        Ok(syndrome(x.symbols()) == self.params)
    }

    pub fn enumerate(&self, budget: &Budget) -> Result<Vec<Word>> {
        let space = Space::new(self.n, 2)?;
        budget.check(space.size() as u128)?;
        Ok((0..space.size())
            .into_par_iter()
            .filter_map(|v| {
                let s = space.symbols(v);
                (syndrome(&s) == self.params).then(|| Word::from_trusted(s, 2))
            })
            .collect())
    }

    /// Parameters of the largest code of length n, smallest tuple on ties,
    /// found by bucketing all 2^n words by syndrome in one pass.
    pub fn best_params(n: usize, budget: &Budget) -> Result<(BinaryParams, usize)> {
        let space = Space::new(n, 2)?;
        budget.check(space.size() as u128)?;
        let counts = (0..space.size())
            .into_par_iter()
            .fold(HashMap::new, |mut acc: HashMap<[u64; 4], usize>, v| {
                *acc.entry(syndrome(&space.symbols(v))).or_default() += 1;
                acc
            })
            .reduce(HashMap::new, |mut a, b| {
                for (k, c) in b {
                    *a.entry(k).or_default() += c;
                }
                a
            });
        counts
            .into_iter()
            .max_by(|(pa, ca), (pb, cb)| ca.cmp(cb).then(pb.cmp(pa)))
            .ok_or_else(|| Error::Domain("empty word space".into()))
    }

    pub fn best(n: usize, budget: &Budget) -> Result<Self> {
        let (params, _) = Self::best_params(n, budget)?;
        BinaryDelSubCode::new(n, params)
    }

    /// Redundancy n − log₂|C| for a code of the given size.
    pub fn redundancy(n: usize, size: usize) -> f64 {
        n as f64 - (size as f64).log2()
    }

    /// Decode a channel output of length n−1, n or n+1.
    pub fn decode(&self, received: &Word) -> Result<DecodeOutcome> {
        if received.q() != 2 {
            return Err(Error::NotBinary);
        }
        let n = self.n;
        let m = received.len();
        let r = received.symbols();
        let target_weight = self.params[3];
        let weight_r = r.iter().filter(|&&b| b == 1).count() as i64;
        let mut found = Vec::new();
        let mut consider = |cand: Vec<u8>, weight: i64| {
            // cheap weight (mod 5) filter before the full syndrome
            if weight.rem_euclid(5) as u64 == target_weight && syndrome(&cand) == self.params {
                found.push(Word::from_trusted(cand, 2));
            }
        };
        if m + 1 == n {
            // undo at most one substitution, then insert one bit
            for flip in std::iter::once(None).chain((0..m).map(Some)) {
                let mut base = r.to_vec();
                let mut w = weight_r;
                if let Some(j) = flip {
                    base[j] ^= 1;
                    w += if base[j] == 1 { 1 } else { -1 };
                }
                for p in 0..=m {
                    for bit in 0..2u8 {
                        let mut cand = base.clone();
                        cand.insert(p, bit);
                        consider(cand, w + bit as i64);
                    }
                }
            }
        } else if m == n {
            consider(r.to_vec(), weight_r);
            for j in 0..m {
                let mut cand = r.to_vec();
                cand[j] ^= 1;
                consider(cand, weight_r + if r[j] == 0 { 1 } else { -1 });
            }
        } else if m == n + 1 {
            // delete one symbol, then undo at most one substitution
            for p in 0..m {
                if p > 0 && r[p] == r[p - 1] {
                    continue;
                }
                let mut base = r.to_vec();
                let removed = base.remove(p);
                let w = weight_r - removed as i64;
                consider(base.clone(), w);
                for j in 0..n {
                    let mut cand = base.clone();
                    cand[j] ^= 1;
                    consider(cand, w + if base[j] == 0 { 1 } else { -1 });
                }
            }
        } else {
            return Err(Error::Precondition(format!(
                "received length {m} not in {{n-1, n, n+1}} for n = {n}"
            )));
        }
        Ok(DecodeOutcome::from_candidates(found, |x| explain(x, received)))
    }
}

/// Checks every C_{a,b,c,d} of length n at once: any two words with
/// intersecting B^{DS}_{1,1} balls must differ in syndrome.
pub fn verify_all_params(n: usize, budget: &Budget) -> Result<Certificate> {
    let space = Space::new(n, 2)?;
    budget.check(space.size() as u128)?;
    let words: Vec<Word> = (0..space.size()).map(|v| space.word(v)).collect();
    verify_key_classes(
        &words,
        Confusion::Spec(BallSpec::del_sub(1, 1)),
        |w| syndrome(w.symbols()),
        budget,
    )
}

impl fmt::Display for BinaryDelSubCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.params;
        write!(f, "n={};a={a};b={b};c={c};d={d}", self.n)
    }
}

/// Text form `n=<int>;a=..;b=..;c=..;d=..` or `n=<int>;params=auto`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BinaryCodeSpec {
    Explicit(BinaryDelSubCode),
    Auto { n: usize },
}

impl BinaryCodeSpec {
    pub fn resolve(&self, budget: &Budget) -> Result<BinaryDelSubCode> {
        match self {
            BinaryCodeSpec::Explicit(code) => Ok(code.clone()),
            BinaryCodeSpec::Auto { n } => BinaryDelSubCode::best(*n, budget),
        }
    }
}

impl FromStr for BinaryCodeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |detail: String| Error::Parse {
            what: "code spec",
            detail,
        };
        let mut fields: HashMap<&str, &str> = HashMap::new();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got {part:?}")))?;
            fields.insert(k.trim(), v.trim());
        }
        let num = |k: &str| -> Result<u64> {
            fields
                .get(k)
                .ok_or_else(|| bad(format!("missing {k}")))?
                .parse::<u64>()
                .map_err(|e| bad(format!("{k}: {e}")))
        };
        let n = num("n")? as usize;
        if let Some(&p) = fields.get("params") {
            return if p == "auto" {
                Ok(BinaryCodeSpec::Auto { n })
            } else {
                Err(bad(format!("params must be 'auto', got {p:?}")))
            };
        }
        let params = [num("a")?, num("b")?, num("c")?, num("d")?];
        Ok(BinaryCodeSpec::Explicit(BinaryDelSubCode::new(n, params)?))
    }
}

/// Lexicographically ranked codebook: index ↔ codeword.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    words: Vec<Word>,
}

impl Codebook {
    pub fn new(words: Vec<Word>) -> Self {
        let words: Vec<Word> = words.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        Codebook { words }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn encode(&self, index: usize) -> Result<Word> {
        self.words
            .get(index)
            .cloned()
            .ok_or(Error::IndexOutOfRange {
                index,
                len: self.words.len(),
            })
    }

    pub fn rank(&self, word: &Word) -> Option<usize> {
        self.words.binary_search(word).ok()
    }
}

impl BinaryDelSubCode {
    pub fn codebook(&self, budget: &Budget) -> Result<Codebook> {
        Ok(Codebook::new(self.enumerate(budget)?))
    }

    /// The index-th codeword in lexicographic order.
    pub fn encode(&self, index: usize, budget: &Budget) -> Result<Word> {
        self.codebook(budget)?.encode(index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruent;

    fn w(text: &str) -> Word {
        Word::parse(text, 2).unwrap()
    }

    #[test]
    fn weight_vectors() {
        let b: Vec<u128> = (1..=5).map(beta).collect();
        assert_eq!(b, vec![1, 3, 6, 10, 15]);
        let e: Vec<u128> = (1..=5).map(eta).collect();
        assert_eq!(e, vec![1, 5, 14, 30, 55]);
        for i in 1..=50u128 {
            assert_eq!(beta(i), (1..=i).sum::<u128>());
            assert_eq!(eta(i), (1..=i).map(|j| j * j).sum::<u128>());
        }
        assert_eq!(moduli(8), [25, 193, 1537, 5]);
    }

    #[test]
    fn membership_examples() {
        let zero = w("00000000");
        assert!(BinaryDelSubCode::new(8, [0, 0, 0, 0]).unwrap().is_codeword(&zero).unwrap());
        assert!(!BinaryDelSubCode::new(8, [0, 0, 0, 1]).unwrap().is_codeword(&zero).unwrap());

        let ones = w("11111111");
        // α-sum 36, β-sum 120, η-sum 540, weight 8
        assert_eq!(syndrome(ones.symbols()), [11, 120, 540, 3]);
        let code = BinaryDelSubCode::new(8, [11, 120, 540, 3]).unwrap();
        assert!(code.is_codeword(&ones).unwrap());
        let other = BinaryDelSubCode::new(8, [11, 120, 540, 4]).unwrap();
        assert!(!other.is_codeword(&ones).unwrap());

        assert!(code.is_codeword(&w("1111111")).is_err());
        assert!(BinaryDelSubCode::new(8, [25, 0, 0, 0]).is_err());
    }

    #[test]
    fn enumerate_matches_generic_filter() {
        let b = Budget::default();
        let code = BinaryDelSubCode::new(8, [0, 0, 0, 0]).unwrap();
        let fast = code.enumerate(&b).unwrap();
        let generic = congruent::enumerate(&code.constraints(), 2, 8, &b).unwrap();
        assert_eq!(fast, generic);
        assert!(fast.contains(&w("00000000")));
    }

    #[test]
    fn best_params_pigeonhole() {
        let b = Budget::default();
        for n in 4..=12 {
            let (params, size) = BinaryDelSubCode::best_params(n, &b).unwrap();
            let m = moduli(n);
            let tuples: u128 = m.iter().map(|&v| v as u128).product();
            assert!((size as u128) * tuples >= 1u128 << n);
            let code = BinaryDelSubCode::new(n, params).unwrap();
            assert_eq!(code.enumerate(&b).unwrap().len(), size);
        }
    }

    #[test]
    fn every_parameter_tuple_is_correcting() {
        let b = Budget::default();
        for n in 6..=14 {
            let cert = verify_all_params(n, &b).unwrap();
            assert_eq!(cert.stats.pairs_checked > 0, n >= 12);
            assert!(cert.passed(), "n={n}: {:?}", cert.witness);
        }
    }

    #[test]
    fn code_spec_text_form() {
        let spec: BinaryCodeSpec = "n=8;a=11;b=120;c=540;d=3".parse().unwrap();
        assert_eq!(
            spec,
            BinaryCodeSpec::Explicit(BinaryDelSubCode::new(8, [11, 120, 540, 3]).unwrap())
        );
        assert_eq!(
            "n=10;params=auto".parse::<BinaryCodeSpec>().unwrap(),
            BinaryCodeSpec::Auto { n: 10 }
        );
        assert!("n=8;a=1".parse::<BinaryCodeSpec>().is_err());
        assert!("n=8;a=99;b=0;c=0;d=0".parse::<BinaryCodeSpec>().is_err());
        let code = BinaryDelSubCode::new(8, [11, 120, 540, 3]).unwrap();
        assert_eq!(code.to_string().parse::<BinaryCodeSpec>().unwrap(), BinaryCodeSpec::Explicit(code));
    }

    #[test]
    fn codebook_round_trip() {
        let b = Budget::default();
        for n in 6..=12 {
            let code = BinaryDelSubCode::best(n, &b).unwrap();
            let book = code.codebook(&b).unwrap();
            assert_eq!(book.encode(0).unwrap(), book.words()[0]);
            assert_eq!(book.encode(book.len() - 1).unwrap(), *book.words().last().unwrap());
            for i in 0..book.len() {
                assert_eq!(book.rank(&book.encode(i).unwrap()), Some(i));
            }
            assert!(book.encode(book.len()).is_err());
        }
    }

    #[test]
    fn decode_unchanged_and_flipped() {
        let b = Budget::default();
        let code = BinaryDelSubCode::best(10, &b).unwrap();
        for x in code.enumerate(&b).unwrap() {
            let out = code.decode(&x).unwrap();
            assert_eq!(out.status, DecodeStatus::Decoded);
            assert_eq!(out.codeword.as_ref(), Some(&x));
            assert!(out.inferred_errors.unwrap().is_empty());
            for j in 0..x.len() {
                let mut s = x.symbols().to_vec();
                s[j] ^= 1;
                let out = code.decode(&Word::binary(&s).unwrap()).unwrap();
                assert_eq!(out.codeword, Some(x.clone()));
            }
        }
    }

    #[test]
    fn decode_rejects_bad_lengths_and_non_outputs() {
        let code = BinaryDelSubCode::new(8, [0, 0, 0, 0]).unwrap();
        assert!(code.decode(&w("0101")).is_err());
        assert!(code.decode(&Word::parse("0120000", 3).unwrap()).is_err());
        // nothing in C_{0,0,0,1} at n=8 has weight ≡ 1 mod 5 near the all-zero word
        let code = BinaryDelSubCode::new(8, [0, 0, 0, 1]).unwrap();
        let out = code.decode(&w("0000000")).unwrap();
        assert_eq!(out.status, DecodeStatus::NotACodewordChannelOutput);
    }

    #[test]
    fn decode_large_n() {
        // membership and decoding work without enumeration
        let n = 200;
        let mut bits = vec![0u8; n];
        for i in (0..n).step_by(7) {
            bits[i] = 1;
        }
        let x = Word::binary(&bits).unwrap();
        let code = BinaryDelSubCode::new(n, syndrome(&bits)).unwrap();
        let z = apply_del_sub(&x, 100, Some(37), None).unwrap();
        let out = code.decode(&z).unwrap();
        assert_eq!(out.status, DecodeStatus::Decoded);
        assert_eq!(out.codeword, Some(x.clone()));
        let p = out.inferred_errors.unwrap();
        assert_eq!(p.apply(&x).unwrap(), z);
    }
}
