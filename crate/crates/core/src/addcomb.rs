//! Vector families over `F₂^d` and the additive quantities used to bound
//! them: sumsets, doubling and additive energies.
//!
//! A family is a sequence of distinct vectors `v₁ … vₙ` together with, for
//! each `i`, a subset `Nᵢ` of them. The sparsifier's output yields such a
//! family (images of variables, images of their clause partners) that
//! satisfies two conditions:
//!
//! 1. `vᵢ + Nᵢ = Nᵢ`;
//! 2. `vⱼ ∉ ⟨Nᵢ + Nᵢ⟩` for all `j < i`.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::f2::{in_span, rref_of_rows, BitVec};
use crate::instance::{Instance, Var};
use crate::sparsifier::{find_cycles, find_twins, succ_relation, topological_order, AlphaMap};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorFamily {
    d: usize,
    vectors: Vec<BitVec>,
    /// `members[i]` lists 1-based positions into `vectors`, ascending.
    members: Vec<Vec<usize>>,
}

impl VectorFamily {
    pub fn new(d: usize, vectors: Vec<BitVec>, mut members: Vec<Vec<usize>>) -> Result<Self> {
        let n = vectors.len();
        if members.len() != n {
            return Err(Error::WidthMismatch {
                expected: n,
                found: members.len(),
            });
        }
        let mut seen = HashSet::with_capacity(n);
        for v in &vectors {
            if v.width() != d {
                return Err(Error::WidthMismatch {
                    expected: d,
                    found: v.width(),
                });
            }
            if !seen.insert(v) {
                return Err(Error::Precondition(format!("vector {v} listed twice")));
            }
        }
        for set in &mut members {
            set.sort_unstable();
            set.dedup();
            if let Some(&p) = set.iter().find(|&&p| p == 0 || p > n) {
                return Err(Error::OutOfRange { index: p, n });
            }
        }
        Ok(Self {
            d,
            vectors,
            members,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[BitVec] {
        &self.vectors
    }

    /// Positions making up `Nᵢ` (both `i` and the positions are 1-based).
    pub fn members(&self, i: usize) -> &[usize] {
        &self.members[i - 1]
    }

    pub fn set(&self, i: usize) -> impl Iterator<Item = &BitVec> + '_ {
        self.members[i - 1].iter().map(|&p| &self.vectors[p - 1])
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("f {} {}\n", self.n(), self.d);
        for (v, set) in self.vectors.iter().zip(&self.members) {
            out.push_str(&v.to_hex());
            out.push_str(" :");
            for p in set {
                let _ = write!(out, " {p}");
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse { line, msg };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && *l != "c" && !l.starts_with("c "));
        let (hline, header) = lines
            .next()
            .ok_or_else(|| err(0, "missing header".into()))?;
        let (n, d) = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["f", n, d] => (
                n.parse::<usize>()
                    .map_err(|_| err(hline, format!("bad count {n:?}")))?,
                d.parse::<usize>()
                    .map_err(|_| err(hline, format!("bad dimension {d:?}")))?,
            ),
            _ => return Err(err(hline, "malformed header, expected `f <n> <d>`".into())),
        };
        let mut vectors = Vec::with_capacity(n);
        let mut members = Vec::with_capacity(n);
        for (lineno, line) in lines {
            let (hex, rest) = line
                .split_once(':')
                .ok_or_else(|| err(lineno, "expected `<hex> : <indices>`".into()))?;
            vectors.push(BitVec::from_hex(d, hex.trim()).map_err(|e| err(lineno, e.to_string()))?);
            members.push(
                rest.split_whitespace()
                    .map(|t| {
                        t.parse::<usize>()
                            .map_err(|_| err(lineno, format!("bad index {t:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        if vectors.len() != n {
            return Err(err(
                hline,
                format!(
                    "header declares {n} vectors but {} were given",
                    vectors.len()
                ),
            ));
        }
        Self::new(d, vectors, members)
    }
}

/// Indices `i` (1-based) with `vᵢ + Nᵢ ≠ Nᵢ`.
pub fn check_condition_i(f: &VectorFamily) -> Vec<usize> {
    (1..=f.n())
        .into_par_iter()
        .filter(|&i| {
            let set: HashSet<&BitVec> = f.set(i).collect();
            let v = &f.vectors[i - 1];
            // Translation is injective, so inclusion is equality.
            !f.set(i).all(|w| set.contains(&(v ^ w)))
        })
        .collect()
}

/// Pairs `(j, i)` with `j < i` and `vⱼ ∈ ⟨Nᵢ + Nᵢ⟩`, sorted.
pub fn check_condition_ii(f: &VectorFamily) -> Vec<(usize, usize)> {
    let per_i: Vec<Vec<(usize, usize)>> = (1..=f.n())
        .into_par_iter()
        .map(|i| {
            let mut set = f.set(i);
            let span = match set.next() {
                Some(anchor) => rref_of_rows(f.d, set.map(|w| w ^ anchor)),
                None => rref_of_rows(f.d, std::iter::empty()),
            };
            (1..i)
                .filter(|&j| in_span(&span, &f.vectors[j - 1]).expect("widths agree"))
                .map(|j| (j, i))
                .collect()
        })
        .collect();
    per_i.into_iter().flatten().collect()
}

/// `Σᵢ |Nᵢ|`.
pub fn total_size(f: &VectorFamily) -> usize {
    f.members.iter().map(Vec::len).sum()
}

fn distinct(a: &[BitVec]) -> Vec<&BitVec> {
    let mut seen = HashSet::with_capacity(a.len());
    a.iter().filter(|v| seen.insert(*v)).collect()
}

/// Number of ordered `k`-tuples from the set `a` summing to zero. Duplicate
/// entries of `a` are ignored.
pub fn e_k(a: &[BitVec], k: usize) -> Result<u128> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("energy order {k} < 2")));
    }
    let a = distinct(a);
    if a.is_empty() {
        return Ok(0);
    }
    match k {
        3 => {
            let set: HashSet<&BitVec> = a.iter().copied().collect();
            let mut count = 0u128;
            for x in &a {
                for y in &a {
                    if set.contains(&(*x ^ *y)) {
                        count += 1;
                    }
                }
            }
            Ok(count)
        }
        4 => Ok(representation_counts(&a).values().map(|&r| r * r).sum()),
        _ => {
            // Distribution of (k-1)-fold sums, then count those landing in A.
            let mut dist: HashMap<BitVec, u128> = a.iter().map(|v| ((*v).clone(), 1)).collect();
            for _ in 1..k - 1 {
                let mut next: HashMap<BitVec, u128> = HashMap::new();
                for (s, c) in &dist {
                    for v in &a {
                        *next.entry(s ^ *v).or_default() += c;
                    }
                }
                dist = next;
            }
            Ok(a.iter().filter_map(|v| dist.get(*v)).sum())
        }
    }
}

/// `r_A(x)`: number of ordered pairs `(a, b) ∈ A²` with `a + b = x`.
fn representation_counts(a: &[&BitVec]) -> HashMap<BitVec, u128> {
    let mut r: HashMap<BitVec, u128> = HashMap::new();
    for x in a {
        for y in a {
            *r.entry(*x ^ *y).or_default() += 1;
        }
    }
    r
}

/// `A + A`, sorted.
pub fn sumset(a: &[BitVec]) -> Result<Vec<BitVec>> {
    let a = distinct(a);
    if a.is_empty() {
        return Err(Error::Empty);
    }
    let mut out: Vec<BitVec> = representation_counts(&a).into_keys().collect();
    out.sort_unstable();
    Ok(out)
}

/// `|A + A| / |A|` as an unreduced fraction `(numerator, denominator)`.
pub fn doubling(a: &[BitVec]) -> Result<(usize, usize)> {
    let s = sumset(a)?;
    Ok((s.len(), distinct(a).len()))
}

/// The family of images: `vᵢ = α(xᵢ)` with variables listed in a topological
/// order of `⪰`, and `Nᵢ` the images of the clause partners of `xᵢ`. Also
/// returns that order.
pub fn family_from_instance(inst: &Instance, alpha: &AlphaMap) -> Result<(VectorFamily, Vec<Var>)> {
    if alpha.n() != inst.n() {
        return Err(Error::WidthMismatch {
            expected: inst.n(),
            found: alpha.n(),
        });
    }
    if let Some(g) = find_twins(alpha).first() {
        return Err(Error::Precondition(format!("variables {g:?} are twins")));
    }
    let succ = succ_relation(inst, alpha);
    if let Some(c) = find_cycles(&succ).first() {
        return Err(Error::Precondition(format!("variables {c:?} form a cycle")));
    }
    let order = topological_order(&succ).expect("acyclic");
    let mut position = vec![0; inst.n()];
    for (p, &x) in order.iter().enumerate() {
        position[x - 1] = p + 1;
    }
    let partners = inst.partner_sets();
    let vectors = order.iter().map(|&x| alpha.image(x).clone()).collect();
    let members = order
        .iter()
        .map(|&x| partners[x - 1].iter().map(|&y| position[y - 1]).collect())
        .collect();
    Ok((VectorFamily::new(alpha.d(), vectors, members)?, order))
}
