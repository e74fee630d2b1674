//! Instance and family generators.
//!
//! Randomised generators take a `u64` seed and draw from `ChaCha8Rng`, so a
//! given seed yields the same output on every platform.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::addcomb::VectorFamily;
use crate::error::{Error, Result};
use crate::f2::BitVec;
use crate::instance::{Clause, Instance, Semantics};
use crate::reduction::{Lit, LiteralInstance};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The XOR instance over `{0,1}^k`: vector `u` is variable `1 + u`, and every
/// set of three distinct vectors summing to zero is a clause.
pub fn gen_xor(k: u32) -> Result<Instance> {
    if !(1..=16).contains(&k) {
        return Err(Error::InvalidParameter(format!("k = {k} outside 1..=16")));
    }
    let n = 1usize << k;
    let mut clauses = Vec::with_capacity((n - 1) * (n - 2) / 6);
    for i in 1..n {
        for j in i + 1..n {
            let l = i ^ j;
            if l > j {
                clauses.push([i + 1, j + 1, l + 1]);
            }
        }
    }
    Instance::new(n, Semantics::OneInThree, clauses)
}

/// All subsets of `{1..d}` as indicator vectors, largest first (ties by
/// ascending integer value), with `N_S` the subsets of `S`.
pub fn gen_subset_family(d: usize) -> Result<VectorFamily> {
    if !(1..=12).contains(&d) {
        return Err(Error::InvalidParameter(format!("d = {d} outside 1..=12")));
    }
    let mut order: Vec<u64> = (0..1u64 << d).collect();
    order.sort_by_key(|&s| (std::cmp::Reverse(s.count_ones()), s));
    let mut position = vec![0usize; order.len()];
    for (p, &s) in order.iter().enumerate() {
        position[s as usize] = p + 1;
    }
    let vectors = order.iter().map(|&s| BitVec::from_u64(d, s)).collect();
    let members = order
        .iter()
        .map(|&s| {
            // Walk the submasks of s.
            let mut out = Vec::with_capacity(1 << s.count_ones());
            let mut t = s;
            loop {
                out.push(position[t as usize]);
                if t == 0 {
                    break;
                }
                t = (t - 1) & s;
            }
            out
        })
        .collect();
    VectorFamily::new(d, vectors, members)
}

fn random_triple(n: usize, rng: &mut ChaCha8Rng) -> Clause {
    let mut c: Clause = rand::seq::index::sample(rng, n, 3)
        .into_iter()
        .map(|i| i + 1)
        .collect::<Vec<_>>()
        .try_into()
        .expect("three samples");
    c.sort_unstable();
    c
}

fn triple_count(n: usize) -> usize {
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// `m` distinct uniformly random triples over `1..=n`.
pub fn gen_random(n: usize, m: usize, seed: u64) -> Result<Instance> {
    if m > triple_count(n) {
        return Err(Error::InvalidParameter(format!(
            "{m} distinct clauses requested but only {} exist over {n} variables",
            triple_count(n)
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut seen = BTreeSet::new();
    let mut clauses = Vec::with_capacity(m);
    if 2 * m > triple_count(n) {
        let mut all = all_triples(n);
        all.shuffle(&mut rng);
        all.truncate(m);
        return Instance::new(n, Semantics::OneInThree, all);
    }
    while clauses.len() < m {
        let c = random_triple(n, &mut rng);
        if seen.insert(c) {
            clauses.push(c);
        }
    }
    Instance::new(n, Semantics::OneInThree, clauses)
}

fn all_triples(n: usize) -> Vec<Clause> {
    let mut out = Vec::with_capacity(triple_count(n));
    for a in 1..=n {
        for b in a + 1..=n {
            for c in b + 1..=n {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// `m` distinct clauses each containing exactly one true variable of `hidden`
/// (bit `i - 1` is variable `i`).
pub fn planted_instance(n: usize, hidden: u64, m: usize, rng: &mut ChaCha8Rng) -> Result<Instance> {
    let ones: Vec<usize> = (1..=n).filter(|&i| hidden >> (i - 1) & 1 == 1).collect();
    let zeros: Vec<usize> = (1..=n).filter(|&i| hidden >> (i - 1) & 1 == 0).collect();
    let z = zeros.len();
    let available = ones.len() * z * z.saturating_sub(1) / 2;
    if m > available {
        return Err(Error::InvalidParameter(format!(
            "{m} clauses requested but the hidden assignment satisfies only {available}"
        )));
    }
    let mut seen = BTreeSet::new();
    let mut clauses = Vec::with_capacity(m);
    while clauses.len() < m {
        let t = ones[rng.gen_range(0..ones.len())];
        let pair = rand::seq::index::sample(rng, z, 2);
        let mut c = [t, zeros[pair.index(0)], zeros[pair.index(1)]];
        c.sort_unstable();
        if seen.insert(c) {
            clauses.push(c);
        }
    }
    Instance::new(n, Semantics::OneInThree, clauses)
}

/// A random hidden assignment with at least one 1 and one 0, and `m` clauses
/// satisfied by it. Assignments with fewer than `m` satisfied triples are
/// redrawn. Returns the instance and the assignment.
pub fn gen_planted_with_solution(n: usize, m: usize, seed: u64) -> Result<(Instance, u64)> {
    if !(3..=64).contains(&n) {
        return Err(Error::InvalidParameter(format!("n = {n} outside 3..=64")));
    }
    let capacity = |t: usize| t * (n - t) * (n - t - 1) / 2;
    let best = (1..n).map(capacity).max().unwrap_or(0);
    if m > best {
        return Err(Error::InvalidParameter(format!(
            "{m} clauses requested but no assignment of {n} variables satisfies more than {best}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    // Redraw until the assignment has room for m clauses.
    let hidden = loop {
        let h = rng.gen::<u64>() & full;
        let t = h.count_ones() as usize;
        if h != 0 && h != full && capacity(t) >= m {
            break h;
        }
    };
    Ok((planted_instance(n, hidden, m, &mut rng)?, hidden))
}

pub fn gen_planted(n: usize, m: usize, seed: u64) -> Result<Instance> {
    gen_planted_with_solution(n, m, seed).map(|(inst, _)| inst)
}

/// `m` distinct random clauses over distinct variables with uniform signs.
pub fn gen_random_nonmonotone(n: usize, m: usize, seed: u64) -> Result<LiteralInstance> {
    let cap = triple_count(n).saturating_mul(8);
    if m > cap {
        return Err(Error::InvalidParameter(format!(
            "{m} distinct clauses requested but only {cap} exist over {n} variables"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut seen = BTreeSet::new();
    let mut clauses = Vec::with_capacity(m);
    while clauses.len() < m {
        let c = random_triple(n, &mut rng).map(|v| {
            let l = v as Lit;
            if rng.gen::<bool>() {
                l
            } else {
                -l
            }
        });
        if seen.insert(c) {
            clauses.push(c);
        }
    }
    LiteralInstance::new(n, clauses)
}
