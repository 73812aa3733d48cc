//! Fractional transversals of the single-deletion s-substitution channel
//! hypergraph and the closed-form cardinality bounds derived from them.
//!
//! Everything here is exact: weights, sums and bounds are big rationals.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ball::{binomial, del_sub_ids};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::space::{Budget, Space};
use crate::word::{run_count, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransversalKind {
    /// w¹: one substitution, any alphabet.
    SingleSubQary,
    /// wˢ: s substitutions, binary.
    SSubBinary,
}

/// Run-count based transversal weights on Σ_q^{n−1} for code length `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TransversalWeights {
    pub kind: TransversalKind,
    pub q: usize,
    pub n: usize,
    pub s: usize,
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

impl TransversalWeights {
    pub fn single_sub(n: usize, q: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!("w1 needs code length n >= 3, got {n}")));
        }
        if q < 2 {
            return Err(Error::InvalidAlphabet(q));
        }
        Ok(TransversalWeights {
            kind: TransversalKind::SingleSubQary,
            q,
            n,
            s: 1,
        })
    }

    pub fn s_sub_binary(n: usize, s: usize) -> Result<Self> {
        if s == 0 || n < 2 * s + 1 {
            return Err(Error::Domain(format!(
                "ws needs s >= 1 and n >= 2s+1 (n={n}, s={s})"
            )));
        }
        Ok(TransversalWeights {
            kind: TransversalKind::SSubBinary,
            q: 2,
            n,
            s,
        })
    }

    /// Weight of any y ∈ Σ_q^{n−1} with `r` runs.
    pub fn weight_for_runs(&self, r: usize) -> BigRational {
        let n = self.n as i64;
        let r = r as i64;
        match self.kind {
            TransversalKind::SingleSubQary => {
                let q = self.q as i64;
                if r <= 3 {
                    ratio(1, (n - 1) * (q - 1) + 1)
                } else {
                    ratio(1, (r - 2) * ((n - 3) * (q - 1) + (q - 2)) + (q + 2))
                }
            }
            TransversalKind::SSubBinary => {
                let s = self.s as i64;
                let c = BigInt::from(binomial(self.n - self.s - 1, self.s));
                if r <= 2 * s + 1 {
                    BigRational::new(BigInt::one(), c)
                } else {
                    BigRational::new(BigInt::one(), c * BigInt::from(r - 2 * s))
                }
            }
        }
    }

    pub fn weight(&self, y: &Word) -> Result<BigRational> {
        if y.len() + 1 != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n - 1,
                found: y.len(),
            });
        }
        if y.q() != self.q {
            return Err(Error::AlphabetMismatch {
                expected: self.q,
                found: y.q(),
            });
        }
        Ok(self.weight_for_runs(run_count(y)?))
    }
}

/// w¹_y for y ∈ Σ_q^{n−1} (code length n = |y| + 1 ≥ 3).
pub fn weight_w1(y: &Word) -> Result<BigRational> {
    TransversalWeights::single_sub(y.len() + 1, y.q())?.weight(y)
}

/// wˢ_y for binary y (code length n = |y| + 1 ≥ 2s + 1).
pub fn weight_ws(y: &Word, s: usize) -> Result<BigRational> {
    if y.q() != 2 {
        return Err(Error::NotBinary);
    }
    TransversalWeights::s_sub_binary(y.len() + 1, s)?.weight(y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransversalViolation {
    pub x: Word,
    pub sum: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransversalCertificate {
    pub n: usize,
    pub q: usize,
    pub s: usize,
    pub verdict: Verdict,
    pub words_checked: u64,
    /// Smallest ball weight sum and the first word attaining it.
    pub min_sum: Rational,
    pub min_word: Word,
    pub violation: Option<TransversalViolation>,
}

/// Check Σ_{y ∈ B^{DS}_{1,s}(x)} w_y ≥ 1 for every x ∈ Σ_q^n.
pub fn verify_transversal<F>(
    n: usize,
    q: usize,
    s: usize,
    weight: F,
    budget: &Budget,
) -> Result<TransversalCertificate>
where
    F: Fn(&Word) -> BigRational,
{
    if n < 1 + s {
        return Err(Error::Domain(format!("need n >= s + 1 (n={n}, s={s})")));
    }
    let src = Space::new(n, q)?;
    let dst = Space::new(n - 1, q)?;
    let per_ball = (n as u128) * ((n as u128 - 1) * (q as u128 - 1) + 1).pow(s as u32);
    budget.check(src.size() as u128 * per_ball)?;

    // weights take few distinct values; classify once
    let mut classes: BTreeMap<BigRational, u32> = BTreeMap::new();
    let class_of: Vec<u32> = (0..dst.size())
        .map(|v| {
            let w = weight(&dst.word(v));
            let next = classes.len() as u32;
            *classes.entry(w).or_insert(next)
        })
        .collect();
    let mut class_values = vec![BigRational::zero(); classes.len()];
    for (w, k) in classes {
        class_values[k as usize] = w;
    }

    let one = BigRational::one();
    let (min, first_violation) = (0..src.size())
        .into_par_iter()
        .map_init(
            || (Vec::new(), vec![0u64; class_values.len()]),
            |(ball, counts), x| {
                del_sub_ids(&src, &dst, x, 1, s, ball);
                counts.iter_mut().for_each(|c| *c = 0);
                for &y in ball.iter() {
                    counts[class_of[y as usize] as usize] += 1;
                }
                let sum: BigRational = counts
                    .iter()
                    .zip(&class_values)
                    .filter(|(c, _)| **c > 0)
                    .map(|(&c, w)| w * int(c))
                    .sum();
                let violation = (sum < one).then_some(x);
                ((sum, x), violation)
            },
        )
        .reduce_with(|(a, va), (b, vb)| {
            let min = if (&b.0, b.1) < (&a.0, a.1) { b } else { a };
            let v = match (va, vb) {
                (Some(p), Some(q)) => Some(p.min(q)),
                (p, q) => p.or(q),
            };
            (min, v)
        })
        .ok_or_else(|| Error::Domain("empty word space".into()))?;

    let violation = first_violation.map(|x| {
        let mut ball = Vec::new();
        del_sub_ids(&src, &dst, x, 1, s, &mut ball);
        let sum: BigRational = ball.iter().map(|&y| weight(&dst.word(y))).sum();
        TransversalViolation {
            x: src.word(x),
            sum: sum.into(),
        }
    });
    Ok(TransversalCertificate {
        n,
        q,
        s,
        verdict: if violation.is_none() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        words_checked: src.size(),
        min_sum: min.0.into(),
        min_word: src.word(min.1),
        violation,
    })
}

/// Number of words in Σ_q^m with exactly r runs: q(q−1)^{r−1}·C(m−1, r−1).
pub fn words_with_runs(m: usize, q: usize, r: usize) -> BigInt {
    if m == 0 || r == 0 || r > m {
        return BigInt::zero();
    }
    BigInt::from(q) * num::pow(BigInt::from(q - 1), r - 1) * BigInt::from(binomial(m - 1, r - 1))
}

/// Σ_y w_y over Σ_q^{n−1}, summed by run count.
pub fn weight_sum(weights: &TransversalWeights) -> BigRational {
    let m = weights.n - 1;
    (1..=m)
        .map(|r| int(words_with_runs(m, weights.q, r)) * weights.weight_for_runs(r))
        .sum()
}

/// The transversal used for (n, q, s): w¹ when s = 1, wˢ when q = 2.
pub fn default_weights(n: usize, q: usize, s: usize) -> Result<TransversalWeights> {
    match (q, s) {
        (_, 1) => TransversalWeights::single_sub(n, q),
        (2, s) => TransversalWeights::s_sub_binary(n, s),
        _ => Err(Error::Domain(format!(
            "no transversal for q={q}, s={s}; supported: s=1 or q=2"
        ))),
    }
}

pub fn exact_weight_sum(n: usize, q: usize, s: usize) -> Result<BigRational> {
    Ok(weight_sum(&default_weights(n, q, s)?))
}

/// 3·q^{n−1} / ((n−5)(n−3)(q−1)) + 5q, valid for q ≤ n, n ≥ 6.
pub fn bound_theorem1(n: usize, q: usize) -> Result<BigRational> {
    if n < 6 || q < 2 || q > n {
        return Err(Error::Domain(format!(
            "theorem-1 bound needs 2 <= q <= n and n >= 6 (n={n}, q={q})"
        )));
    }
    let num = BigInt::from(3) * num::pow(BigInt::from(q), n - 1);
    let den = BigInt::from((n - 5) * (n - 3) * (q - 1));
    Ok(BigRational::new(num, den) + int(5 * q))
}

/// s!(2s+1) / ((n−2s)^s (n−1)) · [2^n + 2(n−1)^{2s+1}/(2s+1)].
pub fn bound_theorem2(n: usize, s: usize) -> Result<BigRational> {
    if s == 0 || n < 3 || n < 2 * s + 1 {
        return Err(Error::Domain(format!(
            "theorem-2 bound needs s >= 1, n >= 3 and n >= 2s+1 (n={n}, s={s})"
        )));
    }
    let fact: BigInt = (1..=s).map(BigInt::from).product();
    let lead = BigRational::new(
        fact * BigInt::from(2 * s + 1),
        num::pow(BigInt::from(n - 2 * s), s) * BigInt::from(n - 1),
    );
    let tail = BigRational::new(
        BigInt::from(2) * num::pow(BigInt::from(n - 1), 2 * s + 1),
        BigInt::from(2 * s + 1),
    );
    Ok(lead * (int(num::pow(BigInt::from(2), n)) + tail))
}

/// The closed form reported for (n, q, s): the one-substitution bound for
/// s = 1, the binary s-substitution bound for s ≥ 2; `None` outside their
/// domains.
pub fn closed_form_bound(n: usize, q: usize, s: usize) -> Option<BigRational> {
    match s {
        1 => bound_theorem1(n, q).ok(),
        _ if q == 2 => bound_theorem2(n, s).ok(),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Claim4Check {
    pub n: usize,
    pub q: usize,
    pub holds: bool,
    pub lhs: Rational,
    pub rhs: Rational,
    pub slack: Rational,
}

/// Σ_{k=1}^n C(n,k)(q−1)^k / k ≤ q^{n+1} / ((q−1)(n−2)), evaluated exactly.
pub fn check_claim4(n: usize, q: usize) -> Result<Claim4Check> {
    if q < 2 || n < 5 || n < q {
        return Err(Error::Domain(format!(
            "binomial inequality needs q >= 2, n >= 5, n >= q (n={n}, q={q})"
        )));
    }
    let lhs: BigRational = (1..=n)
        .map(|k| {
            BigRational::new(
                BigInt::from(binomial(n, k)) * num::pow(BigInt::from(q - 1), k),
                BigInt::from(k),
            )
        })
        .sum();
    let rhs = BigRational::new(
        num::pow(BigInt::from(q), n + 1),
        BigInt::from((q - 1) * (n - 2)),
    );
    let slack = &rhs - &lhs;
    Ok(Claim4Check {
        n,
        q,
        holds: lhs <= rhs,
        lhs: lhs.into(),
        rhs: rhs.into(),
        slack: slack.into(),
    })
}

/// One row of a DS_{s,q}(n) table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub q: usize,
    pub s: usize,
    pub closed_form_bound: Option<Rational>,
    pub exact_weight_sum: Rational,
    pub greedy_code_size: Option<u64>,
    pub constructed_code_size: Option<u64>,
}

pub const CSV_HEADER: &str = "n,q,s,theorem_bound,weight_sum,greedy_size,constructed_size";

impl BoundReport {
    pub fn csv_row(&self, float: bool) -> String {
        let rat = |r: &Rational| {
            if float {
                format!("{}", r.to_f64())
            } else {
                r.to_string()
            }
        };
        let opt = |v: Option<u64>| v.map(|v| v.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.n,
            self.q,
            self.s,
            self.closed_form_bound.as_ref().map(rat).unwrap_or_default(),
            rat(&self.exact_weight_sum),
            opt(self.greedy_code_size),
            opt(self.constructed_code_size)
        )
    }
}

pub fn to_csv(rows: &[BoundReport], float: bool) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_row(float));
        out.push('\n');
    }
    out
}
