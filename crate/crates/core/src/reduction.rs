//! Non-monotone 1-in-3-SAT through the monotone sparsifier.
//!
//! Each negative literal `¬xᵢ` becomes a fresh variable `yᵢ = n + i`, giving a
//! monotone instance on `2n` variables. After sparsifying it, classes that
//! contain some `xᵢ` and the matching `yᵢ` are joined by conflict edges (they
//! take opposite values in every solution of the original). If that graph is
//! not bipartite the input has no solution; otherwise two original variables
//! are merged when they sit on the same side of the same component.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::instance::{
    header_line, parse_rows, quotient, EquivRel, Header, Instance, Semantics, Var,
};
use crate::oracle::{enumerate_literal_solutions, MergeCounterexample, Verdict};
use crate::sparsifier::{sparsify_with, SparsifyOptions};

/// A signed literal: `+i` is variable `i`, `-i` its negation.
pub type Lit = i64;

fn var_of(l: Lit) -> Var {
    l.unsigned_abs() as Var
}

fn sort_lits(mut c: [Lit; 3]) -> [Lit; 3] {
    c.sort_unstable_by_key(|&l| (l.unsigned_abs(), l < 0));
    c
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiteralInstance {
    n: usize,
    clauses: Vec<[Lit; 3]>,
}

impl LiteralInstance {
    /// Builds a canonical instance: literals sorted by variable, clauses
    /// sorted and deduplicated. No clause may mention a variable twice.
    pub fn new(n: usize, clauses: impl IntoIterator<Item = [Lit; 3]>) -> Result<Self> {
        let mut out = Vec::new();
        for c in clauses {
            for &l in &c {
                if l == 0 || var_of(l) > n {
                    return Err(Error::OutOfRange {
                        index: var_of(l),
                        n,
                    });
                }
            }
            let c = sort_lits(c);
            if var_of(c[0]) == var_of(c[1]) || var_of(c[1]) == var_of(c[2]) {
                return Err(Error::Precondition(format!(
                    "clause {c:?} mentions a variable twice"
                )));
            }
            out.push(c);
        }
        out.sort_unstable();
        out.dedup();
        Ok(Self { n, clauses: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[[Lit; 3]] {
        &self.clauses
    }

    /// Exactly one literal of every clause is true.
    pub fn is_satisfied_by(&self, a: u64) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .filter(|&&l| (a >> (var_of(l) - 1) & 1 == 1) == (l > 0))
                .count()
                == 1
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let rows = parse_rows(text)?;
        if rows.header != Header::NonMonotone {
            return Err(Error::Parse {
                line: 0,
                msg: "expected a `p oitg` header".into(),
            });
        }
        let mut clauses = Vec::with_capacity(rows.rows.len());
        for (line, c) in rows.rows {
            let s = sort_lits(c);
            if var_of(s[0]) == var_of(s[1]) || var_of(s[1]) == var_of(s[2]) {
                return Err(Error::Parse {
                    line,
                    msg: format!("clause {c:?} mentions a variable twice"),
                });
            }
            clauses.push(s);
        }
        Self::new(rows.n, clauses)
    }

    pub fn to_text(&self) -> String {
        Self::clauses_to_text(self.n, &self.clauses)
    }

    /// Writes clauses in the signed format without validating them, as needed
    /// for quotients, whose clauses may mention a variable twice.
    pub fn clauses_to_text(n: usize, clauses: &[[Lit; 3]]) -> String {
        let mut out = header_line(Header::NonMonotone, n, clauses.len());
        for c in clauses {
            let _ = writeln!(out, "{} {} {}", c[0], c[1], c[2]);
        }
        out
    }

    /// Distinct clauses after mapping every variable to its class index,
    /// keeping signs.
    pub fn quotient_clauses(&self, eq: &EquivRel) -> Result<Vec<[Lit; 3]>> {
        if eq.n() != self.n {
            return Err(Error::WidthMismatch {
                expected: self.n,
                found: eq.n(),
            });
        }
        let index = eq.class_index();
        let mut out: Vec<[Lit; 3]> = self
            .clauses
            .iter()
            .map(|c| {
                sort_lits(c.map(|l| {
                    let v = index[var_of(l) - 1] as Lit;
                    if l > 0 {
                        v
                    } else {
                        -v
                    }
                }))
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

/// Correspondence between literals over `1..=n` and monotone variables over
/// `1..=2n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LiteralMapping {
    pub n: usize,
}

impl LiteralMapping {
    pub fn to_var(&self, l: Lit) -> Var {
        if l > 0 {
            var_of(l)
        } else {
            self.n + var_of(l)
        }
    }

    pub fn to_lit(&self, v: Var) -> Lit {
        if v <= self.n {
            v as Lit
        } else {
            -((v - self.n) as Lit)
        }
    }

    /// The shadow variable `yᵢ` of original variable `i`.
    pub fn shadow(&self, i: Var) -> Var {
        self.n + i
    }
}

/// Replaces each `¬xᵢ` by `yᵢ = n + i`.
pub fn to_monotone(li: &LiteralInstance) -> (Instance, LiteralMapping) {
    let map = LiteralMapping { n: li.n };
    let clauses = li.clauses.iter().map(|c| c.map(|l| map.to_var(l)));
    let inst = Instance::new(2 * li.n, Semantics::OneInThree, clauses)
        .expect("distinct variables map to distinct variables");
    (inst, map)
}

/// The conflict graph on the `2n` monotone variables: `v — w` whenever
/// `v ∼ xᵢ` and `w ∼ yᵢ` for some `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConflictGraph {
    vertices: usize,
    edges: BTreeSet<(Var, Var)>,
    /// Some vertex is equivalent to both `xᵢ` and `yᵢ`.
    has_loop: bool,
}

impl ConflictGraph {
    pub fn build(n: usize, eq_y: &EquivRel) -> Self {
        let classes = eq_y.classes();
        let index = eq_y.class_index();
        let mut edges = BTreeSet::new();
        let mut has_loop = false;
        for i in 1..=n {
            let a = &classes[index[i - 1] - 1];
            let b = &classes[index[n + i - 1] - 1];
            for &v in a {
                for &w in b {
                    if v == w {
                        has_loop = true;
                    } else {
                        edges.insert((v.min(w), v.max(w)));
                    }
                }
            }
        }
        Self {
            vertices: 2 * n,
            edges,
            has_loop,
        }
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<(Var, Var)> {
        &self.edges
    }

    /// Component and side of every vertex, or `None` if not bipartite. The
    /// side holding a component's smallest vertex is side `false`.
    pub fn bipartition(&self) -> Option<Vec<(usize, bool)>> {
        if self.has_loop {
            return None;
        }
        let mut adj = vec![Vec::new(); self.vertices];
        for &(v, w) in &self.edges {
            adj[v - 1].push(w - 1);
            adj[w - 1].push(v - 1);
        }
        two_colour(&adj)
    }
}

fn two_colour(adj: &[Vec<usize>]) -> Option<Vec<(usize, bool)>> {
    let mut label: Vec<Option<(usize, bool)>> = vec![None; adj.len()];
    let mut comp = 0;
    for start in 0..adj.len() {
        if label[start].is_some() {
            continue;
        }
        label[start] = Some((comp, false));
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let (_, side) = label[v].expect("queued vertices are labelled");
            for &w in &adj[v] {
                match label[w] {
                    None => {
                        label[w] = Some((comp, !side));
                        queue.push_back(w);
                    }
                    Some((_, s)) if s == side => return None,
                    Some(_) => {}
                }
            }
        }
        comp += 1;
    }
    Some(
        label
            .into_iter()
            .map(|l| l.expect("all labelled"))
            .collect(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionStatus {
    Ok,
    /// The conflict graph is not bipartite, so the input is unsatisfiable.
    /// The reported relation then merges all variables.
    UnsatDetected,
}

#[derive(Clone, Debug)]
pub struct NonMonotoneResult {
    /// Relation on the original `n` variables.
    pub eq: EquivRel,
    /// Relation the monotone sparsifier produced on the `2n` variables.
    pub eq_y: EquivRel,
    pub y_instance: Instance,
    pub status: ReductionStatus,
}

pub fn sparsify_nonmonotone(li: &LiteralInstance) -> NonMonotoneResult {
    sparsify_nonmonotone_with(li, SparsifyOptions::default())
}

pub fn sparsify_nonmonotone_with(li: &LiteralInstance, opts: SparsifyOptions) -> NonMonotoneResult {
    let n = li.n;
    let (y_instance, _) = to_monotone(li);
    let eq_y = sparsify_with(&y_instance, opts).eq;

    // Bipartiteness is decided on classes: members of a class share all
    // their conflict neighbours, so the vertex-level graph is bipartite iff
    // this one is (a class joined to itself is an odd loop).
    let index = eq_y.class_index();
    let mut adj = vec![Vec::new(); eq_y.num_classes()];
    let mut loop_found = false;
    for i in 1..=n {
        let a = index[i - 1] - 1;
        let b = index[n + i - 1] - 1;
        if a == b {
            loop_found = true;
        }
        adj[a].push(b);
        adj[b].push(a);
    }
    let labels = if loop_found { None } else { two_colour(&adj) };

    let Some(labels) = labels else {
        // No solutions, so every relation is sound. Merging everything keeps
        // the clause bound: one class admits at most four sign patterns.
        let mut all = EquivRel::identity(n);
        for i in 2..=n {
            all.union(1, i).expect("in range");
        }
        return NonMonotoneResult {
            eq: all,
            eq_y,
            y_instance,
            status: ReductionStatus::UnsatDetected,
        };
    };

    let mut eq = EquivRel::identity(n);
    let mut first: HashMap<(usize, bool), Var> = HashMap::new();
    for i in 1..=n {
        let key = labels[index[i - 1] - 1];
        match first.get(&key) {
            Some(&j) => {
                eq.union(j, i).expect("in range");
            }
            None => {
                first.insert(key, i);
            }
        }
    }
    NonMonotoneResult {
        eq,
        eq_y,
        y_instance,
        status: ReductionStatus::Ok,
    }
}

/// Checks that `eq`-equivalent variables agree in every solution of `li`.
pub fn verify_literal_merges(
    li: &LiteralInstance,
    eq: &EquivRel,
    limit: usize,
) -> Result<Verdict<MergeCounterexample>> {
    if eq.n() != li.n {
        return Err(Error::WidthMismatch {
            expected: li.n,
            found: eq.n(),
        });
    }
    let reps = eq.representatives();
    for a in enumerate_literal_solutions(li, limit)? {
        for (i, &r) in reps.iter().enumerate() {
            if (a >> i & 1) != (a >> (r - 1) & 1) {
                return Ok(Verdict::Counterexample(MergeCounterexample {
                    solution: a,
                    pair: (r, i + 1),
                }));
            }
        }
    }
    Ok(Verdict::Ok)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundViolation {
    /// Clauses of the input modulo `∼_G`.
    pub reduced: usize,
    /// Clauses of the monotone instance modulo `∼`.
    pub monotone: usize,
}

/// Checks `|C / ∼_G| ≤ 8 · |C' / ∼|`.
pub fn clause_bound_check(
    li: &LiteralInstance,
    eq_g: &EquivRel,
    eq_y: &EquivRel,
) -> Result<Verdict<BoundViolation>> {
    let reduced = li.quotient_clauses(eq_g)?.len();
    let (y, _) = to_monotone(li);
    let monotone = quotient(&y, eq_y)?.instance.m();
    Ok(if reduced <= 8 * monotone {
        Verdict::Ok
    } else {
        Verdict::Counterexample(BoundViolation { reduced, monotone })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_mapping() {
        let li = LiteralInstance::new(3, [[1, -2, 3]]).unwrap();
        let (y, map) = to_monotone(&li);
        assert_eq!(y.n(), 6);
        assert_eq!(y.clauses(), &[[1, 3, 5]]);
        for l in [1, 2, 3, -1, -2, -3] {
            assert_eq!(map.to_lit(map.to_var(l)), l);
        }
        assert_eq!(map.shadow(2), 5);

        let pos = LiteralInstance::new(4, [[1, 2, 3], [2, 3, 4]]).unwrap();
        let (y, _) = to_monotone(&pos);
        for v in 5..=8 {
            assert!(y.neighbours(v).unwrap().is_empty());
        }
    }

    #[test]
    fn literal_text_round_trip() {
        let li = LiteralInstance::new(4, [[-3, 1, 2], [4, -1, 2]]).unwrap();
        let text = li.to_text();
        assert_eq!(LiteralInstance::parse(&text).unwrap(), li);
        assert!(LiteralInstance::parse("p oitg 3 1\n1 -1 2\n").is_err());
        assert!(LiteralInstance::parse("p oit 3 1\n1 2 3\n").is_err());
    }

    #[test]
    fn self_conflict_is_unsat() {
        // (x1, x2, x3) and (¬x1, x2, x3) force x1 = ¬x1's partner structure:
        // y1 and x1 become twins in the monotone image.
        let li = LiteralInstance::new(3, [[1, 2, 3], [-1, 2, 3]]).unwrap();
        let out = sparsify_nonmonotone(&li);
        assert_eq!(out.status, ReductionStatus::UnsatDetected);
        assert_eq!(out.eq.num_classes(), 1);
        assert!(clause_bound_check(&li, &out.eq, &out.eq_y).unwrap().is_ok());
        assert!(!(0..8u64).any(|a| li.is_satisfied_by(a)));
        assert!(ConflictGraph::build(3, &out.eq_y).bipartition().is_none());
    }

    #[test]
    fn empty_instance_bound() {
        let li = LiteralInstance::new(3, []).unwrap();
        let out = sparsify_nonmonotone(&li);
        assert_eq!(out.status, ReductionStatus::Ok);
        assert!(clause_bound_check(&li, &out.eq, &out.eq_y).unwrap().is_ok());
    }

    #[test]
    fn monotone_input_matches_monotone_sparsifier() {
        use crate::generators::gen_planted;
        use crate::sparsifier::sparsify;
        for seed in 0..20 {
            let inst = gen_planted(9, 8, seed).unwrap();
            let li = LiteralInstance::new(9, inst.clauses().iter().map(|c| c.map(|v| v as Lit)))
                .unwrap();
            let out = sparsify_nonmonotone(&li);
            assert_eq!(out.status, ReductionStatus::Ok);
            assert_eq!(out.eq, sparsify(&inst).eq);
            let reduced = li.quotient_clauses(&out.eq).unwrap().len();
            let monotone = quotient(&out.y_instance, &out.eq_y).unwrap().instance.m();
            assert!(reduced <= monotone);
        }
    }

    #[test]
    fn class_level_and_vertex_level_graphs_agree() {
        use crate::generators::gen_random_nonmonotone;
        for seed in 0..60 {
            let n = 4 + (seed % 6) as usize;
            let li = gen_random_nonmonotone(n, 1 + (seed as usize % (2 * n)), seed).unwrap();
            let out = sparsify_nonmonotone(&li);
            let g = ConflictGraph::build(n, &out.eq_y);
            assert_eq!(g.vertices(), 2 * n);
            match g.bipartition() {
                None => assert_eq!(out.status, ReductionStatus::UnsatDetected),
                Some(labels) => {
                    assert_eq!(out.status, ReductionStatus::Ok);
                    for i in 1..=n {
                        for j in 1..=n {
                            assert_eq!(out.eq.same(i, j), labels[i - 1] == labels[j - 1]);
                        }
                    }
                }
            }
        }
    }
}
