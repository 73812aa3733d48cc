//! Exhaustive code verification: pairwise ball disjointness with canonical
//! witnesses, greedy maximal codes, and bound tables.

use std::collections::BTreeSet;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::ball::{binomial, del_sub_ids, del_transposition_ids, find_pattern, BallSpec, ErrorPattern};
use crate::binary::BinaryDelSubCode;
use crate::bounds::{closed_form_bound, exact_weight_sum, BoundReport, Verdict};
use crate::error::{Error, Result};
use crate::qary::{build_inner_code_searched, QaryDelSubCode};
use crate::space::{Budget, Space};
use crate::word::Word;

/// Which confusability ball a check uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Confusion {
    /// B^{DS}_{t,s}, or B^{DT}_t when the `BallSpec` carries a transposition.
    Spec(BallSpec),
    /// B^{DS}_{1,1} ∪ B^{DT}_1 with both swap/delete orders.
    DelSubOrTransposition,
}

impl Confusion {
    fn deletions(&self) -> usize {
        match self {
            Confusion::Spec(s) => s.deletions,
            Confusion::DelSubOrTransposition => 1,
        }
    }

    fn validate(&self, n: usize, q: usize) -> Result<()> {
        match self {
            Confusion::Spec(s) => {
                s.validate(n)?;
                if s.max_adjacent_transpositions > 0 && q != 2 {
                    return Err(Error::NotBinary);
                }
                Ok(())
            }
            Confusion::DelSubOrTransposition => {
                if q != 2 {
                    return Err(Error::NotBinary);
                }
                if n < 2 {
                    return Err(Error::Domain("combined ball needs n >= 2".into()));
                }
                Ok(())
            }
        }
    }

    /// Upper bound on one ball's size, for budget checks.
    fn ball_bound(&self, n: usize, q: usize) -> u128 {
        match self {
            Confusion::Spec(s) if s.max_adjacent_transpositions > 0 => (n as u128).pow(2),
            Confusion::Spec(s) => {
                let m = n - s.deletions;
                let subs: u128 = (0..=s.max_substitutions.min(m))
                    .map(|k| binomial(m, k) * (q as u128 - 1).pow(k as u32))
                    .sum();
                (n as u128).pow(s.deletions as u32) * subs
            }
            Confusion::DelSubOrTransposition => (n as u128) * (n as u128 + 2),
        }
    }

    fn kernel(&self, src: &Space, dst: &Space, x: u64, out: &mut Vec<u64>) {
        match *self {
            Confusion::Spec(s) if s.max_adjacent_transpositions > 0 => {
                del_transposition_ids(src, dst, x, s.deletions, false, out)
            }
            Confusion::Spec(s) => del_sub_ids(src, dst, x, s.deletions, s.max_substitutions, out),
            Confusion::DelSubOrTransposition => {
                let mut extra = Vec::new();
                del_sub_ids(src, dst, x, 1, 1, out);
                del_transposition_ids(src, dst, x, 1, true, &mut extra);
                out.extend(extra);
                out.sort_unstable();
                out.dedup();
            }
        }
    }

    /// An error pattern taking x to z, if one exists.
    pub fn explain(&self, x: &Word, z: &Word) -> Option<ErrorPattern> {
        match *self {
            Confusion::Spec(s) => find_pattern(x, z, s),
            Confusion::DelSubOrTransposition => find_pattern(x, z, BallSpec::del_sub(1, 1))
                .or_else(|| find_pattern(x, z, BallSpec::del_transposition(1))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub x: Word,
    pub y: Word,
    pub z: Word,
    pub pattern_x: ErrorPattern,
    pub pattern_y: ErrorPattern,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub pairs_checked: u64,
    pub balls_computed: u64,
    pub ball_elements: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub stats: Stats,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Record elapsed time (off by default so output stays reproducible).
    pub fn with_wall_time(mut self, start: Instant) -> Self {
        self.stats.wall_time_ms = Some(start.elapsed().as_millis() as u64);
        self
    }
}

fn common_shape(words: &[Word]) -> Result<(usize, usize)> {
    let first = words.first().expect("non-empty");
    let (n, q) = (first.len(), first.q());
    for w in words {
        if w.q() != q {
            return Err(Error::AlphabetMismatch {
                expected: q,
                found: w.q(),
            });
        }
        if w.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: w.len(),
            });
        }
    }
    Ok((n, q))
}

/// Pairwise disjointness of `spec`-balls over `words`.
pub fn verify_code(words: &[Word], spec: BallSpec, budget: &Budget) -> Result<Certificate> {
    verify_code_with(words, Confusion::Spec(spec), budget)
}

/// Pairwise disjointness under any supported confusability ball. Every
/// (ball element, owner) pair is sorted; the first element with two owners
/// gives the lexicographically first (z, x, y) witness.
pub fn verify_code_with(words: &[Word], ball: Confusion, budget: &Budget) -> Result<Certificate> {
    let words: Vec<Word> = words.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let count = words.len() as u64;
    let pairs_checked = count * count.saturating_sub(1) / 2;
    if words.len() < 2 {
        return Ok(Certificate {
            verdict: Verdict::Pass,
            witness: None,
            stats: Stats {
                pairs_checked,
                balls_computed: count,
                ball_elements: count,
                wall_time_ms: None,
            },
        });
    }
    let (n, q) = common_shape(&words)?;
    ball.validate(n, q)?;
    budget.check(words.len() as u128 * ball.ball_bound(n, q))?;
    let src = Space::new(n, q)?;
    let dst = Space::new(n - ball.deletions(), q)?;
    let ids: Vec<u64> = words.iter().map(|w| src.index_of(w.symbols())).collect();

    let mut pairs: Vec<(u64, u32)> = ids
        .par_iter()
        .enumerate()
        .map_init(Vec::new, |buf, (owner, &x)| {
            ball.kernel(&src, &dst, x, buf);
            buf.iter().map(|&z| (z, owner as u32)).collect::<Vec<_>>()
        })
        .flatten_iter()
        .collect();
    let ball_elements = pairs.len() as u64;
    pairs.par_sort_unstable();

    // owners ascend with the words, so the first shared z has x < y minimal
    let collision = pairs
        .par_windows(2)
        .filter(|p| p[0].0 == p[1].0 && p[0].1 != p[1].1)
        .map(|p| (p[0].0, p[0].1, p[1].1))
        .min();
    let witness = collision.map(|(z, i, j)| {
        let x = words[i as usize].clone();
        let y = words[j as usize].clone();
        let z = dst.word(z);
        let pattern_x = ball.explain(&x, &z).expect("ball element has a pattern");
        let pattern_y = ball.explain(&y, &z).expect("ball element has a pattern");
        Witness {
            x,
            y,
            z,
            pattern_x,
            pattern_y,
        }
    });
    Ok(Certificate {
        verdict: if witness.is_none() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        witness,
        stats: Stats {
            pairs_checked,
            balls_computed: count,
            ball_elements,
            wall_time_ms: None,
        },
    })
}

/// Check every code of a partition at once: no two words with the same key
/// may have intersecting balls. The witness is the lexicographically first
/// (z, x, y) over all classes.
pub fn verify_key_classes<K, F>(
    words: &[Word],
    ball: Confusion,
    key: F,
    budget: &Budget,
) -> Result<Certificate>
where
    K: Ord + Send + Sync,
    F: Fn(&Word) -> K + Sync,
{
    let words: Vec<Word> = words.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let keys: Vec<K> = words.par_iter().map(&key).collect();
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let classes: Vec<&[usize]> = order.chunk_by(|&a, &b| keys[a] == keys[b]).collect();
    let pairs_checked: u64 = classes
        .iter()
        .map(|c| (c.len() as u64) * (c.len() as u64 - 1) / 2)
        .sum();
    // singleton classes cannot collide
    let mut keep: Vec<usize> = classes.iter().filter(|c| c.len() > 1).flat_map(|c| c.iter().copied()).collect();
    keep.sort_unstable();
    let mut keys: Vec<Option<K>> = keys.into_iter().map(Some).collect();
    let keys: Vec<K> = keep.iter().map(|&i| keys[i].take().expect("kept once")).collect();
    let words: Vec<Word> = keep.iter().map(|&i| words[i].clone()).collect();
    let count = words.len() as u64;
    if words.len() < 2 {
        return Ok(Certificate {
            verdict: Verdict::Pass,
            witness: None,
            stats: Stats {
                pairs_checked,
                balls_computed: count,
                ball_elements: count,
                wall_time_ms: None,
            },
        });
    }
    let (n, q) = common_shape(&words)?;
    ball.validate(n, q)?;
    budget.check(words.len() as u128 * ball.ball_bound(n, q))?;
    let src = Space::new(n, q)?;
    let dst = Space::new(n - ball.deletions(), q)?;
    let mut pairs: Vec<(u64, u32)> = words
        .par_iter()
        .enumerate()
        .map_init(Vec::new, |buf, (owner, w)| {
            ball.kernel(&src, &dst, src.index_of(w.symbols()), buf);
            buf.iter().map(|&z| (z, owner as u32)).collect::<Vec<_>>()
        })
        .flatten_iter()
        .collect();
    let ball_elements = pairs.len() as u64;
    pairs.par_sort_unstable();
    let collision = pairs
        .chunk_by(|a, b| a.0 == b.0)
        .filter(|g| g.len() > 1)
        .find_map(|g| {
            g.iter().enumerate().find_map(|(k, &(z, i))| {
                g[k + 1..]
                    .iter()
                    .find(|&&(_, j)| keys[i as usize] == keys[j as usize])
                    .map(|&(_, j)| (z, i, j))
            })
        });
    let witness = collision.map(|(z, i, j)| {
        let x = words[i as usize].clone();
        let y = words[j as usize].clone();
        let z = dst.word(z);
        Witness {
            pattern_x: ball.explain(&x, &z).expect("ball element has a pattern"),
            pattern_y: ball.explain(&y, &z).expect("ball element has a pattern"),
            x,
            y,
            z,
        }
    });
    Ok(Certificate {
        verdict: if witness.is_none() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        witness,
        stats: Stats {
            pairs_checked,
            balls_computed: count,
            ball_elements,
            wall_time_ms: None,
        },
    })
}

/// Lexicographic greedy code: admit each word of Σ_q^n whose ball misses
/// every admitted ball. Re-verified before returning.
pub fn greedy_max_code_with(n: usize, q: usize, ball: Confusion, budget: &Budget) -> Result<Vec<Word>> {
    let size = Space::new(n, q)?.size();
    greedy_code_in_order(n, q, ball, 0..size, budget)
}

/// Greedy over dense indices in the given scan order; maximal when `order`
/// visits all of Σ_q^n.
pub fn greedy_code_in_order(
    n: usize,
    q: usize,
    ball: Confusion,
    order: impl IntoIterator<Item = u64>,
    budget: &Budget,
) -> Result<Vec<Word>> {
    ball.validate(n, q)?;
    let src = Space::new(n, q)?;
    let dst = Space::new(n - ball.deletions(), q)?;
    budget.check(src.size() as u128 * ball.ball_bound(n, q))?;
    let mut covered = vec![false; dst.size() as usize];
    let mut buf = Vec::new();
    let mut code = Vec::new();
    for x in order {
        ball.kernel(&src, &dst, x, &mut buf);
        if buf.iter().all(|&z| !covered[z as usize]) {
            for &z in &buf {
                covered[z as usize] = true;
            }
            code.push(src.word(x));
        }
    }
    code.sort();
    let cert = verify_code_with(&code, ball, &Budget::unlimited())?;
    if !cert.passed() {
        return Err(Error::Domain(format!(
            "greedy code failed verification: {:?}",
            cert.witness
        )));
    }
    Ok(code)
}

pub fn greedy_max_code(n: usize, q: usize, spec: BallSpec, budget: &Budget) -> Result<Vec<Word>> {
    greedy_max_code_with(n, q, Confusion::Spec(spec), budget)
}

/// DS_{s,q}(n) rows over `ns`. Greedy and constructed sizes are filled in
/// only when `greedy` is set; constructed sizes exist for s = 1.
pub fn ds_table(
    ns: impl IntoIterator<Item = usize>,
    q: usize,
    s: usize,
    greedy: bool,
    budget: &Budget,
) -> Result<Vec<BoundReport>> {
    ns.into_iter()
        .map(|n| {
            let exact = exact_weight_sum(n, q, s)?;
            let (greedy_code_size, constructed_code_size) = if greedy {
                let g = greedy_max_code(n, q, BallSpec::del_sub(1, s), budget)?.len() as u64;
                let c = match (q, s) {
                    (2, 1) => Some(BinaryDelSubCode::best_params(n, budget)?.1 as u64),
                    (_, 1) if n >= 2 => {
                        let inner = build_inner_code_searched(n, budget)?;
                        Some(QaryDelSubCode::best_params_q(n, q, &inner, budget)?.1 as u64)
                    }
                    _ => None,
                };
                (Some(g), c)
            } else {
                (None, None)
            };
            Ok(BoundReport {
                n,
                q,
                s,
                closed_form_bound: closed_form_bound(n, q, s).map(Into::into),
                exact_weight_sum: exact.into(),
                greedy_code_size,
                constructed_code_size,
            })
        })
        .collect()
}
