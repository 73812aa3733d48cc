//! (γ; a, N)-congruent codes and the collision congruences they satisfy.
//!
//! A [`CollisionWitness`] records z = x(d_x, e_x) = y(d_y, e_y) with the
//! substitution index in post-deletion coordinates, as [`apply_del_sub`]
//! takes it. The congruence identities are stated with each substitution
//! index expressed in the coordinates of its own (pre-deletion) word; the
//! checks below convert before evaluating.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ball::{apply_del_sub, ball_del_sub, BallSpec};
use crate::error::{Error, Result};
use crate::space::{Budget, Space};
use crate::word::{complement, Word};

/// Σ γ_i·c_i ≡ a (mod N), symbols used as integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruentConstraint {
    pub gamma: Vec<i64>,
    pub a: u64,
    #[serde(rename = "N")]
    pub modulus: u64,
}

impl CongruentConstraint {
    pub fn new(gamma: Vec<i64>, a: u64, modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::Domain("modulus must be >= 1".into()));
        }
        if a >= modulus {
            return Err(Error::Domain(format!(
                "residue {a} outside [0, {modulus})"
            )));
        }
        Ok(CongruentConstraint { gamma, a, modulus })
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    pub fn weighted_sum(&self, symbols: &[u8]) -> i128 {
        self.gamma
            .iter()
            .zip(symbols)
            .map(|(&g, &s)| g as i128 * s as i128)
            .sum()
    }

    pub fn residue_of(&self, symbols: &[u8]) -> u64 {
        self.weighted_sum(symbols).rem_euclid(self.modulus as i128) as u64
    }

    pub fn with_residue(&self, a: u64) -> Result<Self> {
        CongruentConstraint::new(self.gamma.clone(), a, self.modulus)
    }
}

impl fmt::Display for CongruentConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gamma: Vec<String> = self.gamma.iter().map(|g| g.to_string()).collect();
        write!(f, "gamma={};a={};N={}", gamma.join(","), self.a, self.modulus)
    }
}

impl FromStr for CongruentConstraint {
    type Err = Error;

    /// `gamma=<csv>;a=<int>;N=<int>`
    fn from_str(s: &str) -> Result<Self> {
        let bad = |detail: String| Error::Parse {
            what: "constraint",
            detail,
        };
        let (mut gamma, mut a, mut modulus) = (None, None, None);
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got {part:?}")))?;
            match key.trim() {
                "gamma" => {
                    let g: std::result::Result<Vec<i64>, _> = value
                        .split(',')
                        .filter(|t| !t.trim().is_empty())
                        .map(|t| t.trim().parse::<i64>())
                        .collect();
                    gamma = Some(g.map_err(|e| bad(format!("gamma: {e}")))?);
                }
                "a" => a = Some(value.trim().parse::<u64>().map_err(|e| bad(format!("a: {e}")))?),
                "N" => {
                    modulus =
                        Some(value.trim().parse::<u64>().map_err(|e| bad(format!("N: {e}")))?)
                }
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
        CongruentConstraint::new(
            gamma.ok_or_else(|| bad("missing gamma".into()))?,
            a.ok_or_else(|| bad("missing a".into()))?,
            modulus.ok_or_else(|| bad("missing N".into()))?,
        )
    }
}

pub fn is_member(x: &Word, c: &CongruentConstraint) -> Result<bool> {
    if x.len() != c.len() {
        return Err(Error::LengthMismatch {
            expected: c.len(),
            found: x.len(),
        });
    }
    Ok(c.residue_of(x.symbols()) == c.a)
}

/// All words of Σ_q^n satisfying every constraint, in lexicographic order.
pub fn enumerate(
    constraints: &[CongruentConstraint],
    q: usize,
    n: usize,
    budget: &Budget,
) -> Result<Vec<Word>> {
    if let Some(c) = constraints.iter().find(|c| c.len() != n) {
        return Err(Error::LengthMismatch {
            expected: n,
            found: c.len(),
        });
    }
    let space = Space::new(n, q)?;
    budget.check(space.size() as u128 * constraints.len().max(1) as u128)?;
    Ok((0..space.size())
        .into_par_iter()
        .filter_map(|v| {
            let s = space.symbols(v);
            constraints
                .iter()
                .all(|c| c.residue_of(&s) == c.a)
                .then(|| Word::from_trusted(s, q))
        })
        .collect())
}

/// z = x(d_x, e_x) = y(d_y, e_y) for binary x, y; all indices 1-based,
/// substitution indices in post-deletion coordinates, `None` for no
/// substitution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollisionWitness {
    pub x: Word,
    pub y: Word,
    pub d_x: usize,
    pub d_y: usize,
    pub e_x: Option<usize>,
    pub e_y: Option<usize>,
    pub z: Word,
}

/// Where a substitution falls relative to [d_x, d_y], in own-word
/// coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    Absent,
    Outside,
    Inside,
}

impl CollisionWitness {
    pub fn validate(&self) -> Result<()> {
        if self.x.q() != 2 || self.y.q() != 2 || self.z.q() != 2 {
            return Err(Error::NotBinary);
        }
        if self.x.len() != self.y.len() {
            return Err(Error::LengthMismatch {
                expected: self.x.len(),
                found: self.y.len(),
            });
        }
        if self.d_x > self.d_y {
            return Err(Error::Precondition("witness needs d_x <= d_y".into()));
        }
        let zx = apply_del_sub(&self.x, self.d_x, self.e_x, None)?;
        let zy = apply_del_sub(&self.y, self.d_y, self.e_y, None)?;
        if zx != self.z || zy != self.z {
            return Err(Error::Precondition(
                "witness does not replay to z from both words".into(),
            ));
        }
        Ok(())
    }

    /// Substitution index of x in x's own coordinates.
    pub fn own_e_x(&self) -> Option<usize> {
        self.e_x.map(|e| if e < self.d_x { e } else { e + 1 })
    }

    pub fn own_e_y(&self) -> Option<usize> {
        self.e_y.map(|e| if e < self.d_y { e } else { e + 1 })
    }

    fn place(&self, e: Option<usize>) -> Placement {
        match e {
            None => Placement::Absent,
            Some(e) if (self.d_x..=self.d_y).contains(&e) => Placement::Inside,
            Some(_) => Placement::Outside,
        }
    }

    pub fn placement(&self) -> (Placement, Placement) {
        (self.place(self.own_e_x()), self.place(self.own_e_y()))
    }

    /// Both substitutions hit the same position of z, so they cancel and z
    /// is also reachable from both words by the deletion alone.
    pub fn is_cancelling(&self) -> bool {
        matches!((self.e_x, self.e_y), (Some(a), Some(b)) if a == b)
    }

    /// 1-based accessors.
    fn xi(&self, i: usize) -> i128 {
        self.x.symbols()[i - 1] as i128
    }

    fn yi(&self, i: usize) -> i128 {
        self.y.symbols()[i - 1] as i128
    }

    /// δ_i = 2x_i − 1.
    fn delta(&self, i: usize) -> i128 {
        2 * self.xi(i) - 1
    }
}

fn g(c: &CongruentConstraint, i: usize) -> i128 {
    c.gamma[i - 1] as i128
}

/// x_{d_x}γ_{d_x} − y_{d_y}γ_{d_y} + Σ_{i=d_x+1}^{d_y} x_i(γ_i − γ_{i−1}).
fn telescoped(w: &CollisionWitness, c: &CongruentConstraint) -> i128 {
    let (dx, dy) = (w.d_x, w.d_y);
    w.xi(dx) * g(c, dx) - w.yi(dy) * g(c, dy)
        + (dx + 1..=dy)
            .map(|i| w.xi(i) * (g(c, i) - g(c, i - 1)))
            .sum::<i128>()
}

fn is_zero_mod(v: i128, modulus: u64) -> bool {
    v.rem_euclid(modulus as i128) == 0
}

fn check_common(w: &CollisionWitness, c: &CongruentConstraint) -> Result<()> {
    w.validate()?;
    if c.len() != w.x.len() {
        return Err(Error::LengthMismatch {
            expected: c.len(),
            found: w.x.len(),
        });
    }
    if !is_member(&w.x, c)? || !is_member(&w.y, c)? {
        return Err(Error::Precondition(
            "x and y must both satisfy the constraint".into(),
        ));
    }
    if w.is_cancelling() {
        return Err(Error::Precondition(
            "substitutions cancel at the same position of z".into(),
        ));
    }
    Ok(())
}

/// Outcome of the five statements for a witness with both substitutions
/// outside [d_x, d_y].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Lemma6Check {
    pub shifted_equal: bool,
    pub substituted_flipped: bool,
    pub rest_equal: bool,
    pub telescoped_sum: bool,
    pub congruence: bool,
}

impl Lemma6Check {
    pub fn holds(&self) -> bool {
        self.shifted_equal
            && self.substituted_flipped
            && self.rest_equal
            && self.telescoped_sum
            && self.congruence
    }

    pub fn as_array(&self) -> [bool; 5] {
        [
            self.shifted_equal,
            self.substituted_flipped,
            self.rest_equal,
            self.telescoped_sum,
            self.congruence,
        ]
    }
}

pub fn check_lemma6(w: &CollisionWitness, c: &CongruentConstraint) -> Result<Lemma6Check> {
    check_common(w, c)?;
    let (px, py) = w.placement();
    if px == Placement::Inside || py == Placement::Inside {
        return Err(Error::Precondition(
            "substitutions must lie outside [d_x, d_y]".into(),
        ));
    }
    let n = w.x.len();
    let (dx, dy) = (w.d_x, w.d_y);
    let subs: Vec<usize> = [w.own_e_x(), w.own_e_y()].into_iter().flatten().collect();

    let shifted_equal = (dx + 1..=dy).all(|i| w.xi(i) == w.yi(i - 1));
    let substituted_flipped = subs.iter().all(|&i| w.xi(i) == 1 - w.yi(i));
    let rest_equal = (1..=n)
        .filter(|i| !(dx..=dy).contains(i) && !subs.contains(i))
        .all(|i| w.xi(i) == w.yi(i));
    let lhs: i128 = (dx..=dy).map(|i| g(c, i) * (w.xi(i) - w.yi(i))).sum();
    let telescoped_sum = lhs == telescoped(w, c);
    let sub_terms: i128 = subs.iter().map(|&i| w.delta(i) * g(c, i)).sum();
    let congruence = is_zero_mod(sub_terms + telescoped(w, c), c.modulus);

    Ok(Lemma6Check {
        shifted_equal,
        substituted_flipped,
        rest_equal,
        telescoped_sum,
        congruence,
    })
}

/// Case 1: e_x inside, e_y outside (or absent). Case 2: both inside.
pub fn check_lemma7(w: &CollisionWitness, c: &CongruentConstraint, case: u8) -> Result<bool> {
    check_common(w, c)?;
    let placement = w.placement();
    let term_y = match (case, placement) {
        (1, (Placement::Inside, Placement::Outside)) => {
            let ey = w.own_e_y().expect("outside implies present");
            w.delta(ey) * g(c, ey)
        }
        (1, (Placement::Inside, Placement::Absent)) => 0,
        (2, (Placement::Inside, Placement::Inside)) => {
            let ey = w.own_e_y().expect("inside implies present");
            w.delta(ey + 1) * g(c, ey)
        }
        (1 | 2, p) => {
            return Err(Error::Precondition(format!(
                "placement {p:?} does not match case {case}"
            )))
        }
        _ => return Err(Error::Precondition(format!("unknown case {case}"))),
    };
    let ex = w.own_e_x().expect("inside implies present");
    let term_x = w.delta(ex) * g(c, ex - 1);
    Ok(is_zero_mod(term_x + term_y + telescoped(w, c), c.modulus))
}

/// Every representation (d, e) of every output of x, with e in
/// post-deletion coordinates.
fn representations(x: &Word) -> Vec<(usize, Option<usize>, Word)> {
    let n = x.len();
    let mut out = Vec::with_capacity(n * n);
    for d in 1..=n {
        out.push((d, None, apply_del_sub(x, d, None, None).expect("in range")));
        for e in 1..n {
            out.push((d, Some(e), apply_del_sub(x, d, Some(e), None).expect("in range")));
        }
    }
    out
}

/// Orient a representation pair so that d_x ≤ d_y.
fn oriented(
    x: &Word,
    (dx, ex): (usize, Option<usize>),
    y: &Word,
    (dy, ey): (usize, Option<usize>),
    z: &Word,
) -> CollisionWitness {
    if dx <= dy {
        CollisionWitness {
            x: x.clone(),
            y: y.clone(),
            d_x: dx,
            d_y: dy,
            e_x: ex,
            e_y: ey,
            z: z.clone(),
        }
    } else {
        CollisionWitness {
            x: y.clone(),
            y: x.clone(),
            d_x: dy,
            d_y: dx,
            e_x: ey,
            e_y: ex,
            z: z.clone(),
        }
    }
}

/// Post-deletion index of an own-coordinate index (which must differ from d).
fn post(d: usize, e: Option<usize>) -> Option<usize> {
    e.map(|e| if e < d { e } else { e - 1 })
}

/// For every (d_x, e_x, d_y, e_y) with x(d_x, e_x) = y(d_y, e_y), checks
/// x(d_x, e_y + ε_y) = y(d_y, e_x − ε_x), where ε marks a substitution
/// inside [d_x, d_y] (own coordinates, d_x ≤ d_y after orientation).
pub fn check_claim3_symmetries(x: &Word, y: &Word) -> Result<bool> {
    if x.q() != 2 || y.q() != 2 {
        return Err(Error::NotBinary);
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.is_empty() {
        return Ok(true);
    }
    let mut by_z: HashMap<Word, Vec<(usize, Option<usize>)>> = HashMap::new();
    for (d, e, z) in representations(y) {
        by_z.entry(z).or_default().push((d, e));
    }
    for (dx, ex, z) in representations(x) {
        let Some(reps) = by_z.get(&z) else { continue };
        for &(dy, ey) in reps {
            let w = oriented(x, (dx, ex), y, (dy, ey), &z);
            let (own_x, own_y) = (w.own_e_x(), w.own_e_y());
            let eps = |e: Option<usize>| {
                matches!(e, Some(e) if (w.d_x..=w.d_y).contains(&e)) as usize
            };
            let (eps_x, eps_y) = (eps(own_x), eps(own_y));
            let new_x = own_y.map(|e| e + eps_y);
            let new_y = own_x.map(|e| e - eps_x);
            let lhs = apply_del_sub(&w.x, w.d_x, post(w.d_x, new_x), None)?;
            let rhs = apply_del_sub(&w.y, w.d_y, post(w.d_y, new_y), None)?;
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// B_{1,1}(x) ∩ B_{1,1}(y) ≠ ∅ ⇔ B_{1,1}(x̄) ∩ B_{1,1}(ȳ) ≠ ∅.
pub fn check_claim3_complement(x: &Word, y: &Word) -> Result<bool> {
    let intersect = |a: &Word, b: &Word| -> Result<bool> {
        let ba = ball_del_sub(a, BallSpec::del_sub(1, 1))?;
        let bb = ball_del_sub(b, BallSpec::del_sub(1, 1))?;
        Ok(!ba.is_disjoint(&bb))
    };
    Ok(intersect(x, y)? == intersect(&complement(x)?, &complement(y)?)?)
}

/// Members x, y of C(γ; a, N) have complements in a common C(γ; b, N).
pub fn complement_residue(x: &Word, c: &CongruentConstraint) -> Result<u64> {
    Ok(c.residue_of(complement(x)?.symbols()))
}

/// All collisions between words sharing a residue of `c` (whole Σ_2^n is
/// scanned; `c.a` is ignored), excluding cancelling substitution pairs.
/// Deterministic order: by z, then by representation order.
pub fn harvest_collisions(
    n: usize,
    gamma: &[i64],
    modulus: u64,
    budget: &Budget,
) -> Result<Vec<(CollisionWitness, CongruentConstraint)>> {
    if gamma.len() != n || n < 2 {
        return Err(Error::Domain("gamma length must equal n >= 2".into()));
    }
    let src = Space::new(n, 2)?;
    let dst = Space::new(n - 1, 2)?;
    budget.check((src.size() as u128 * (n * n) as u128).pow(2) / dst.size() as u128)?;
    let base = CongruentConstraint::new(gamma.to_vec(), 0, modulus)?;
    let residue: Vec<u64> = (0..src.size())
        .map(|v| base.residue_of(&src.symbols(v)))
        .collect();

    // z -> [(x, d, e)]
    let mut reps: Vec<Vec<(u64, usize, Option<usize>)>> = vec![Vec::new(); dst.size() as usize];
    for v in 0..src.size() {
        for d in 0..n {
            let z = src.delete(v, d);
            reps[z as usize].push((v, d + 1, None));
            for e in 0..n - 1 {
                let old = dst.symbol(z, e);
                let ze = dst.replace(z, e, old, 1 - old);
                reps[ze as usize].push((v, d + 1, Some(e + 1)));
            }
        }
    }

    let out: Vec<Vec<(CollisionWitness, CongruentConstraint)>> = reps
        .par_iter()
        .enumerate()
        .map(|(z, list)| {
            let zw = dst.word(z as u64);
            let mut found = Vec::new();
            for (i, &(vx, dx, ex)) in list.iter().enumerate() {
                for &(vy, dy, ey) in &list[i + 1..] {
                    if vx == vy || residue[vx as usize] != residue[vy as usize] {
                        continue;
                    }
                    if matches!((ex, ey), (Some(a), Some(b)) if a == b) {
                        continue;
                    }
                    let x = src.word(vx);
                    let y = src.word(vy);
                    let w = oriented(&x, (dx, ex), &y, (dy, ey), &zw);
                    let c = base
                        .with_residue(residue[vx as usize])
                        .expect("residue below modulus");
                    found.push((w, c));
                }
            }
            found
        })
        .collect();
    Ok(out.into_iter().flatten().collect())
}
