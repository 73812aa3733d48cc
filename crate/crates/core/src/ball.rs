//! Error balls: deletions, substitutions and adjacent transpositions.
//!
//! Positions in the public API are 1-based. A del-sub error is applied in the
//! canonical order deletion first, then substitution; the substitution index
//! refers to the post-deletion word.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::Space;
use crate::word::{run_count, Word};

/// Error-model descriptor: exactly `deletions` deletions, at most
/// `max_substitutions` substitutions, at most `max_adjacent_transpositions`
/// adjacent swaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BallSpec {
    pub deletions: usize,
    pub max_substitutions: usize,
    pub max_adjacent_transpositions: usize,
}

impl BallSpec {
    pub const fn del_sub(deletions: usize, max_substitutions: usize) -> Self {
        BallSpec {
            deletions,
            max_substitutions,
            max_adjacent_transpositions: 0,
        }
    }

    pub const fn del_transposition(deletions: usize) -> Self {
        BallSpec {
            deletions,
            max_substitutions: 0,
            max_adjacent_transpositions: 1,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.deletions > 1 {
            return Err(Error::InfeasibleSpec(format!(
                "{} deletions requested; only t in {{0,1}} is supported",
                self.deletions
            )));
        }
        if self.max_adjacent_transpositions > 1 {
            return Err(Error::InfeasibleSpec(
                "at most one adjacent transposition is supported".into(),
            ));
        }
        if self.max_adjacent_transpositions == 1 {
            if self.max_substitutions != 0 {
                return Err(Error::InfeasibleSpec(
                    "adjacent transpositions cannot be combined with substitutions".into(),
                ));
            }
            if n < 2 {
                return Err(Error::InfeasibleSpec(format!(
                    "adjacent transposition needs length >= 2, word has length {n}"
                )));
            }
        }
        if self.deletions + self.max_substitutions > n {
            return Err(Error::InfeasibleSpec(format!(
                "t + s = {} exceeds word length {n}",
                self.deletions + self.max_substitutions
            )));
        }
        Ok(())
    }
}

/// A concrete error event. Application order: transposition (indices of the
/// original word), deletions (original word), insertions (in increasing
/// final position), substitutions (indices of the word at that point).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ErrorPattern {
    pub deleted_positions: Vec<usize>,
    pub substituted_positions: Vec<(usize, u8)>,
    pub transposed_position: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub inserted_positions: Vec<(usize, u8)>,
}

impl ErrorPattern {
    pub fn is_empty(&self) -> bool {
        self.deleted_positions.is_empty()
            && self.substituted_positions.is_empty()
            && self.transposed_position.is_none()
            && self.inserted_positions.is_empty()
    }

    pub fn del_sub(d: usize, sub: Option<(usize, u8)>) -> Self {
        ErrorPattern {
            deleted_positions: vec![d],
            substituted_positions: sub.into_iter().collect(),
            ..Default::default()
        }
    }

    pub fn apply(&self, x: &Word) -> Result<Word> {
        let q = x.q();
        let mut s = x.symbols().to_vec();
        if let Some(t) = self.transposed_position {
            if t == 0 || t >= s.len() {
                return Err(Error::IndexOutOfRange {
                    index: t,
                    len: s.len().saturating_sub(1),
                });
            }
            s.swap(t - 1, t);
        }
        let mut dels = self.deleted_positions.clone();
        dels.sort_unstable();
        dels.dedup();
        for &d in dels.iter().rev() {
            if d == 0 || d > s.len() {
                return Err(Error::IndexOutOfRange {
                    index: d,
                    len: s.len(),
                });
            }
            s.remove(d - 1);
        }
        let mut ins = self.inserted_positions.clone();
        ins.sort_unstable();
        for &(p, sym) in &ins {
            if p == 0 || p > s.len() + 1 {
                return Err(Error::IndexOutOfRange {
                    index: p,
                    len: s.len() + 1,
                });
            }
            if sym as usize >= q {
                return Err(Error::SymbolOutOfRange {
                    symbol: sym as usize,
                    q,
                });
            }
            s.insert(p - 1, sym);
        }
        for &(e, sym) in &self.substituted_positions {
            if e == 0 || e > s.len() {
                return Err(Error::IndexOutOfRange {
                    index: e,
                    len: s.len(),
                });
            }
            if sym as usize >= q {
                return Err(Error::SymbolOutOfRange {
                    symbol: sym as usize,
                    q,
                });
            }
            if s[e - 1] == sym {
                return Err(Error::NoOpSubstitution { index: e });
            }
            s[e - 1] = sym;
        }
        Ok(Word::from_trusted(s, q))
    }
}

/// x(d, e): delete 1-based position `d`, then substitute position `e` of the
/// shortened word. For binary words `new_symbol` may be omitted (bit flip).
pub fn apply_del_sub(
    x: &Word,
    d: usize,
    e: Option<usize>,
    new_symbol: Option<u8>,
) -> Result<Word> {
    let n = x.len();
    if d == 0 || d > n {
        return Err(Error::IndexOutOfRange { index: d, len: n });
    }
    let mut s = x.symbols().to_vec();
    s.remove(d - 1);
    if let Some(e) = e {
        if e == 0 || e > s.len() {
            return Err(Error::IndexOutOfRange {
                index: e,
                len: s.len(),
            });
        }
        let old = s[e - 1];
        let new = match new_symbol {
            Some(v) => v,
            None if x.q() == 2 => 1 - old,
            None => {
                return Err(Error::Precondition(
                    "substitution symbol required for q > 2".into(),
                ))
            }
        };
        if new as usize >= x.q() {
            return Err(Error::SymbolOutOfRange {
                symbol: new as usize,
                q: x.q(),
            });
        }
        if new == old {
            return Err(Error::NoOpSubstitution { index: e });
        }
        s[e - 1] = new;
    }
    Ok(Word::from_trusted(s, x.q()))
}

/// B^{DS}_{t,s}(x) by direct generate-and-dedupe on symbol vectors.
pub fn ball_del_sub(x: &Word, spec: BallSpec) -> Result<BTreeSet<Word>> {
    spec.validate(x.len())?;
    if spec.max_adjacent_transpositions != 0 {
        return Err(Error::InfeasibleSpec(
            "use ball_del_transposition for transposition balls".into(),
        ));
    }
    let q = x.q() as u8;
    let base: BTreeSet<Vec<u8>> = if spec.deletions == 0 {
        std::iter::once(x.symbols().to_vec()).collect()
    } else {
        (0..x.len())
            .map(|i| {
                let mut s = x.symbols().to_vec();
                s.remove(i);
                s
            })
            .collect()
    };
    let mut all = base.clone();
    let mut frontier: Vec<Vec<u8>> = base.into_iter().collect();
    for _ in 0..spec.max_substitutions {
        let mut next = Vec::new();
        for w in &frontier {
            for i in 0..w.len() {
                for c in 0..q {
                    if c == w[i] {
                        continue;
                    }
                    let mut v = w.clone();
                    v[i] = c;
                    if all.insert(v.clone()) {
                        next.push(v);
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(all
        .into_iter()
        .map(|s| Word::from_trusted(s, x.q()))
        .collect())
}

/// Words reachable by at most one adjacent swap followed by exactly `t`
/// deletions (t ∈ {0, 1}).
pub fn ball_del_transposition(x: &Word, t: usize) -> Result<BTreeSet<Word>> {
    if x.q() != 2 {
        return Err(Error::NotBinary);
    }
    BallSpec::del_transposition(t).validate(x.len())?;
    let mut swapped = vec![x.symbols().to_vec()];
    for i in 0..x.len() - 1 {
        let mut s = x.symbols().to_vec();
        s.swap(i, i + 1);
        swapped.push(s);
    }
    let mut out = BTreeSet::new();
    for s in swapped {
        if t == 0 {
            out.insert(Word::from_trusted(s, 2));
        } else {
            for i in 0..s.len() {
                let mut v = s.clone();
                v.remove(i);
                out.insert(Word::from_trusted(v, 2));
            }
        }
    }
    Ok(out)
}

/// Closed-form |B^{DS}_{1,1}(x)|; evaluated as written for every n ≥ 2.
pub fn ball_size_formula(x: &Word) -> Result<u64> {
    let n = x.len() as i64;
    if n < 2 {
        return Err(Error::Domain(format!(
            "ball size formula needs n >= 2, got {n}"
        )));
    }
    let q = x.q() as i64;
    let r = run_count(x)? as i64;
    let size = if r == 1 {
        (n - 1) * (q - 1) + 1
    } else {
        r * ((n - 3) * (q - 1) + (q - 2)) + (q + 2)
    };
    Ok(size as u64)
}

/// r(x)·C(n−1−s, s) for binary x. Stays below |B^{DS}_{1,s}(x)| for s = 2 and
/// n ≤ 11; with s = 1 it overshoots on some words once n ≥ 5 (01010: 15 vs 14).
pub fn ball_size_lower_bound(x: &Word, s: usize) -> Result<u128> {
    if x.q() != 2 {
        return Err(Error::NotBinary);
    }
    let n = x.len();
    if s == 0 || n < 2 * s + 1 {
        return Err(Error::Domain(format!(
            "lower bound needs s >= 1 and n >= 2s+1 (n={n}, s={s})"
        )));
    }
    Ok(run_count(x)? as u128 * binomial(n - 1 - s, s))
}

/// Admissible run-count interval (r(x) − (2+2s), r(x) + 2s) for outputs of
/// one deletion and at most `s` substitutions. The lower end is not clamped.
pub fn run_change_bounds(x: &Word, s: usize) -> Result<(i64, i64)> {
    Ok(run_interval(run_count(x)?, s))
}

pub fn run_interval(r: usize, s: usize) -> (i64, i64) {
    let r = r as i64;
    let s = s as i64;
    (r - (2 + 2 * s), r + 2 * s)
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Find an error pattern of the given kind mapping `x` to `z`, preferring the
/// smallest deletion (or transposition) position. Substitution and
/// transposition indices follow the conventions of [`ErrorPattern::apply`].
pub fn find_pattern(x: &Word, z: &Word, spec: BallSpec) -> Option<ErrorPattern> {
    let xs = x.symbols();
    let zs = z.symbols();
    if spec.deletions > 1 || xs.len() < spec.deletions || zs.len() + spec.deletions != xs.len()
    {
        return None;
    }
    if spec.max_adjacent_transpositions == 0 {
        let candidates: Vec<(Option<usize>, Vec<u8>)> = if spec.deletions == 0 {
            vec![(None, xs.to_vec())]
        } else {
            (0..xs.len())
                .map(|i| {
                    let mut s = xs.to_vec();
                    s.remove(i);
                    (Some(i + 1), s)
                })
                .collect()
        };
        for (d, s) in candidates {
            let diffs: Vec<(usize, u8)> = s
                .iter()
                .zip(zs)
                .enumerate()
                .filter(|(_, (a, b))| a != b)
                .map(|(i, (_, &b))| (i + 1, b))
                .collect();
            if diffs.len() <= spec.max_substitutions {
                return Some(ErrorPattern {
                    deleted_positions: d.into_iter().collect(),
                    substituted_positions: diffs,
                    ..Default::default()
                });
            }
        }
        None
    } else {
        let swaps = std::iter::once(None).chain((1..xs.len()).map(Some));
        for t in swaps {
            let mut s = xs.to_vec();
            if let Some(t) = t {
                if s[t - 1] == s[t] {
                    continue;
                }
                s.swap(t - 1, t);
            }
            let dels: Vec<Option<usize>> = if spec.deletions == 0 {
                vec![None]
            } else {
                (1..=s.len()).map(Some).collect()
            };
            for d in dels {
                let mut v = s.clone();
                if let Some(d) = d {
                    v.remove(d - 1);
                }
                if v == zs {
                    return Some(ErrorPattern {
                        deleted_positions: d.into_iter().collect(),
                        transposed_position: t,
                        ..Default::default()
                    });
                }
            }
        }
        None
    }
}

/// Fast kernel: B^{DS}_{t,s} on dense indices, written sorted and deduped
/// into `out`. `src` is Σ_q^n, `dst` is Σ_q^{n−t}.
pub fn del_sub_ids(
    src: &Space,
    dst: &Space,
    x: u64,
    t: usize,
    s: usize,
    out: &mut Vec<u64>,
) {
    out.clear();
    if t == 0 {
        out.push(x);
    } else {
        for i in 0..src.n() {
            // deleting inside a run gives the same word; keep run starts only
            if i > 0 && src.symbol(x, i) == src.symbol(x, i - 1) {
                continue;
            }
            out.push(src.delete(x, i));
        }
        out.sort_unstable();
        out.dedup();
    }
    let q = dst.q() as u64;
    let mut frontier_start = 0;
    for _ in 0..s {
        let frontier_end = out.len();
        for k in frontier_start..frontier_end {
            let w = out[k];
            for i in 0..dst.n() {
                let old = dst.symbol(w, i);
                for c in 0..q {
                    if c != old {
                        out.push(dst.replace(w, i, old, c));
                    }
                }
            }
        }
        let mut added = out.split_off(frontier_end);
        added.sort_unstable();
        added.dedup();
        out.append(&mut added);
        frontier_start = frontier_end;
    }
    out.sort_unstable();
    out.dedup();
}

/// Fast kernel: at most one adjacent swap, then `t` deletions, optionally
/// also deletion-then-swap (`both_orders`).
pub(crate) fn del_transposition_ids(
    src: &Space,
    dst: &Space,
    x: u64,
    t: usize,
    both_orders: bool,
    out: &mut Vec<u64>,
) {
    out.clear();
    let n = src.n();
    let mut swapped = vec![x];
    for i in 0..n.saturating_sub(1) {
        swapped.push(src.transpose(x, i));
    }
    for &v in &swapped {
        if t == 0 {
            out.push(v);
        } else {
            for i in 0..n {
                out.push(src.delete(v, i));
            }
        }
    }
    if both_orders && t == 1 {
        for i in 0..n {
            let d = src.delete(x, i);
            for j in 0..dst.n().saturating_sub(1) {
                out.push(dst.transpose(d, j));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
}
