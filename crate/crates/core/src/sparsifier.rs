//! Variable merging for monotone 1-in-3 / 2-in-3 instances.
//!
//! All reasoning happens on the 2-in-3 reading, whose clauses imply the
//! parity equations `x + y + z = 0`. Let `⟨C⟩` be the span of those
//! equations inside `F₂[X]`. The quotient `F₂[X]/⟨C⟩ ≅ F₂^d` gives every
//! variable an image `α(x)`:
//!
//! * two variables with equal images are *twins*: their sum lies in `⟨C⟩`,
//!   so they agree in every solution of the parity system, hence in every
//!   solution of the instance;
//! * `x ⪰ y` holds when `α(y)` is a sum of an even number of images of
//!   clause partners of `x`. In every solution `x̂ = 0` forces all partners to
//!   one and therefore `ŷ = 0`, so every variable on a `⪰`-cycle takes the
//!   same value.
//!
//! [`sparsify`] alternates between merging twin groups and merging strongly
//! connected components of `⪰` until neither exists.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::time::Instant;

use rayon::prelude::*;

use crate::error::Result;
use crate::f2::{in_span, rref, rref_of_rows, BitVec, Rref};
use crate::instance::{quotient, EquivRel, Instance, Semantics, Var};

/// Images of the variables in `F₂[X]/⟨C⟩`.
#[derive(Clone, Debug)]
pub struct AlphaMap {
    d: usize,
    images: Vec<BitVec>,
    basis: Rref,
}

impl AlphaMap {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, x: Var) -> &BitVec {
        &self.images[x - 1]
    }

    pub fn images(&self) -> &[BitVec] {
        &self.images
    }

    /// Reduced basis of the clause equations.
    pub fn basis(&self) -> &Rref {
        &self.basis
    }
}

/// Computes `α`: the unit vector of each variable reduced modulo the clause
/// equations, restricted to the non-pivot columns in ascending order.
pub fn compute_alpha(inst: &Instance) -> AlphaMap {
    let basis = rref(&inst.clause_matrix());
    let free = basis.free_columns();
    let d = free.len();
    let mut slot = vec![None; inst.n()];
    for (k, &c) in free.iter().enumerate() {
        slot[c] = Some(k);
    }
    let mut images = vec![BitVec::zeros(d); inst.n()];
    for (k, &c) in free.iter().enumerate() {
        images[c].set(k, true);
    }
    // e_p for a pivot column p reduces to e_p + row_p, which is row_p off the pivots.
    for (row, &p) in basis.rows().iter().zip(basis.pivots()) {
        let img = &mut images[p];
        for c in row.iter_ones() {
            if let Some(k) = slot[c] {
                img.set(k, true);
            }
        }
    }
    AlphaMap { d, images, basis }
}

/// Groups of two or more variables sharing an image, each sorted, ordered by
/// their smallest member.
pub fn find_twins(alpha: &AlphaMap) -> Vec<Vec<Var>> {
    let mut by_image: HashMap<&BitVec, Vec<Var>> = HashMap::new();
    for (i, img) in alpha.images.iter().enumerate() {
        by_image.entry(img).or_default().push(i + 1);
    }
    let mut groups: Vec<Vec<Var>> = by_image.into_values().filter(|g| g.len() > 1).collect();
    groups.sort_unstable();
    groups
}

fn span_of_pair_sums(alpha: &AlphaMap, partners: &[Var]) -> Rref {
    let Some((&anchor, rest)) = partners.split_first() else {
        return rref_of_rows(alpha.d, std::iter::empty());
    };
    let a = alpha.image(anchor);
    rref_of_rows(alpha.d, rest.iter().map(|&z| alpha.image(z) ^ a))
}

/// Span of `{α(z) + α(z') : z, z' partners of x}`, the set of sums of an even
/// number of partner images.
pub fn succ_space(inst: &Instance, alpha: &AlphaMap, x: Var) -> Result<Rref> {
    inst.neighbours(x)?;
    let partners = &inst.partner_sets()[x - 1];
    Ok(span_of_pair_sums(alpha, partners))
}

/// The relation `⪰` as a digraph on `1..=n`; an edge `x → y` means `x ⪰ y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuccGraph {
    succ: Vec<BTreeSet<Var>>,
}

impl SuccGraph {
    pub fn new(n: usize) -> Self {
        Self {
            succ: vec![BTreeSet::new(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.succ.len()
    }

    /// Adds `x → y`; self-loops are ignored.
    pub fn add_edge(&mut self, x: Var, y: Var) {
        if x != y {
            self.succ[x - 1].insert(y);
        }
    }

    pub fn has_edge(&self, x: Var, y: Var) -> bool {
        self.succ[x - 1].contains(&y)
    }

    pub fn successors(&self, x: Var) -> impl Iterator<Item = Var> + '_ {
        self.succ[x - 1].iter().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Var, Var)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.iter().map(move |&y| (i + 1, y)))
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(BTreeSet::len).sum()
    }
}

fn successors_of(alpha: &AlphaMap, partners: &[Var], x: Var) -> BTreeSet<Var> {
    let space = span_of_pair_sums(alpha, partners);
    alpha
        .images
        .iter()
        .enumerate()
        .filter(|&(i, img)| i + 1 != x && in_span(&space, img).expect("width d"))
        .map(|(i, _)| i + 1)
        .collect()
}

/// Computes `⪰` over all ordered pairs of distinct variables.
pub fn succ_relation(inst: &Instance, alpha: &AlphaMap) -> SuccGraph {
    succ_relation_with(inst, alpha, false)
}

/// As [`succ_relation`], optionally evaluating source variables in parallel.
pub fn succ_relation_with(inst: &Instance, alpha: &AlphaMap, parallel: bool) -> SuccGraph {
    let partners = inst.partner_sets();
    let succ = if parallel {
        partners
            .par_iter()
            .enumerate()
            .map(|(i, p)| successors_of(alpha, p, i + 1))
            .collect()
    } else {
        partners
            .iter()
            .enumerate()
            .map(|(i, p)| successors_of(alpha, p, i + 1))
            .collect()
    };
    SuccGraph { succ }
}

/// Strongly connected components with at least two members, each sorted,
/// ordered by smallest member.
pub fn find_cycles(g: &SuccGraph) -> Vec<Vec<Var>> {
    let mut groups: Vec<Vec<Var>> = strongly_connected_components(g)
        .into_iter()
        .filter(|c| c.len() > 1)
        .map(|mut c| {
            c.sort_unstable();
            c
        })
        .collect();
    groups.sort_unstable();
    groups
}

/// Iterative Tarjan; components come out in reverse topological order.
fn strongly_connected_components(g: &SuccGraph) -> Vec<Vec<Var>> {
    const UNVISITED: usize = usize::MAX;
    let n = g.n();
    let adj: Vec<Vec<usize>> = g
        .succ
        .iter()
        .map(|s| s.iter().map(|&y| y - 1).collect())
        .collect();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut out = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        while let Some(&(v, edge)) = call.last() {
            if edge == 0 && index[v] == UNVISITED {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if let Some(&w) = adj[v].get(edge) {
                call.last_mut().expect("nonempty").1 += 1;
                if index[w] == UNVISITED {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("component root is on the stack");
                    on_stack[w] = false;
                    comp.push(w + 1);
                    if w == v {
                        break;
                    }
                }
                out.push(comp);
            }
        }
    }
    out
}

/// An ordering in which every edge points forward, breaking ties by smallest
/// index; `None` if the graph has a cycle.
pub fn topological_order(g: &SuccGraph) -> Option<Vec<Var>> {
    let n = g.n();
    let mut indegree = vec![0usize; n];
    for (_, y) in g.edges() {
        indegree[y - 1] += 1;
    }
    let mut ready: BinaryHeap<Reverse<Var>> = (1..=n)
        .filter(|&x| indegree[x - 1] == 0)
        .map(Reverse)
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(x)) = ready.pop() {
        order.push(x);
        for y in g.successors(x) {
            indegree[y - 1] -= 1;
            if indegree[y - 1] == 0 {
                ready.push(Reverse(y));
            }
        }
    }
    (order.len() == n).then_some(order)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparsifyStats {
    pub n_in: usize,
    pub m_in: usize,
    /// Merge rounds performed (each round quotients once).
    pub rounds: usize,
    /// Number of unions performed by twin rounds.
    pub twin_merges: usize,
    /// Number of unions performed by cycle rounds.
    pub cycle_merges: usize,
    pub n_out: usize,
    pub m_out: usize,
    pub seconds: f64,
}

impl SparsifyStats {
    /// `ln(m_out) / ln(n_out)`, when both logarithms are defined and nonzero.
    pub fn exponent_estimate(&self) -> Option<f64> {
        (self.n_out > 1 && self.m_out > 0)
            .then(|| (self.m_out as f64).ln() / (self.n_out as f64).ln())
    }
}

#[derive(Clone, Debug)]
pub struct Sparsified {
    /// Relation on the input variables.
    pub eq: EquivRel,
    /// The input quotiented by `eq`, with the input's semantics.
    pub instance: Instance,
    pub stats: SparsifyStats,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SparsifyOptions {
    /// Evaluate the `⪰` relation for different sources in parallel.
    pub parallel: bool,
}

pub fn sparsify(inst: &Instance) -> Sparsified {
    sparsify_with(inst, SparsifyOptions::default())
}

/// Merges twins while any exist, then whole `⪰`-components, repeating until
/// the instance is twin-free and cycle-free.
pub fn sparsify_with(inst: &Instance, opts: SparsifyOptions) -> Sparsified {
    let start = Instant::now();
    let mut stats = SparsifyStats {
        n_in: inst.n(),
        m_in: inst.m(),
        ..Default::default()
    };
    let mut current = inst.as_semantics(Semantics::TwoInThree);
    let mut position: Vec<Var> = (1..=inst.n()).collect();

    loop {
        let alpha = compute_alpha(&current);
        let twins = find_twins(&alpha);
        let (groups, from_twins) = if twins.is_empty() {
            let g = succ_relation_with(&current, &alpha, opts.parallel);
            let cycles = find_cycles(&g);
            if cycles.is_empty() {
                break;
            }
            (cycles, false)
        } else {
            (twins, true)
        };

        let mut eq = EquivRel::identity(current.n());
        let mut merged = 0;
        for g in &groups {
            merged += eq.union_all(g).expect("group members are in range");
        }
        if from_twins {
            stats.twin_merges += merged;
        } else {
            stats.cycle_merges += merged;
        }
        stats.rounds += 1;

        let q = quotient(&current, &eq).expect("relation sized to instance");
        for p in &mut position {
            *p = q.map[*p - 1];
        }
        current = q.instance;
    }

    let eq = relation_from_positions(&position);
    let instance = quotient(inst, &eq)
        .expect("relation sized to instance")
        .instance;
    debug_assert_eq!(instance.clauses(), current.clauses());
    stats.n_out = instance.n();
    stats.m_out = instance.m();
    stats.seconds = start.elapsed().as_secs_f64();
    Sparsified {
        eq,
        instance,
        stats,
    }
}

/// The relation identifying elements that ended up at the same position.
fn relation_from_positions(position: &[Var]) -> EquivRel {
    let mut eq = EquivRel::identity(position.len());
    let mut first: HashMap<Var, Var> = HashMap::new();
    for (i, &p) in position.iter().enumerate() {
        let x = i + 1;
        match first.get(&p) {
            Some(&f) => {
                eq.union(f, x).expect("in range");
            }
            None => {
                first.insert(p, x);
            }
        }
    }
    eq
}

#[derive(Clone, Debug)]
pub struct BaselineResult {
    pub eq: EquivRel,
    pub instance: Instance,
    pub merges: usize,
}

/// Exhaustively merges the third variables of clause pairs that share the
/// other two positions: `(x, y, z)` and `(x, y, t)` force `z = t`.
pub fn baseline_pair_merge(inst: &Instance) -> BaselineResult {
    let mut current = inst.clone();
    let mut position: Vec<Var> = (1..=inst.n()).collect();
    let mut merges = 0;
    loop {
        let mut eq = EquivRel::identity(current.n());
        let mut third_of: HashMap<(Var, Var), Var> = HashMap::new();
        for c in current.clauses() {
            for drop in 0..3 {
                let pair = match drop {
                    0 => (c[1], c[2]),
                    1 => (c[0], c[2]),
                    _ => (c[0], c[1]),
                };
                let third = c[drop];
                match third_of.get(&pair) {
                    Some(&t) if t != third => {
                        if eq.union(t, third).expect("in range") {
                            merges += 1;
                        }
                    }
                    Some(_) => {}
                    None => {
                        third_of.insert(pair, third);
                    }
                }
            }
        }
        if eq.is_identity() {
            break;
        }
        let q = quotient(&current, &eq).expect("relation sized to instance");
        for p in &mut position {
            *p = q.map[*p - 1];
        }
        current = q.instance;
    }
    let eq = relation_from_positions(&position);
    let instance = quotient(inst, &eq)
        .expect("relation sized to instance")
        .instance;
    BaselineResult {
        eq,
        instance,
        merges,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Clause;

    fn two(n: usize, clauses: &[Clause]) -> Instance {
        Instance::new(n, Semantics::TwoInThree, clauses.iter().copied()).unwrap()
    }

    fn bits(s: &str) -> BitVec {
        BitVec::parse_bits(s).unwrap()
    }

    #[test]
    fn alpha_of_single_clause() {
        let alpha = compute_alpha(&two(3, &[[1, 2, 3]]));
        assert_eq!(alpha.d(), 2);
        assert_eq!(alpha.image(1), &bits("11"));
        assert_eq!(alpha.image(2), &bits("10"));
        assert_eq!(alpha.image(3), &bits("01"));
        let sum = &(alpha.image(1) ^ alpha.image(2)) ^ alpha.image(3);
        assert!(sum.is_zero());
    }

    #[test]
    fn alpha_without_clauses_is_the_identity_embedding() {
        let alpha = compute_alpha(&Instance::empty(4, Semantics::TwoInThree));
        assert_eq!(alpha.d(), 4);
        for x in 1..=4 {
            assert_eq!(alpha.image(x), &BitVec::unit(4, x - 1));
        }
        assert!(find_twins(&alpha).is_empty());
    }

    #[test]
    fn alpha_dimension_and_clause_sums() {
        let inst = two(6, &[[1, 2, 3], [1, 4, 5], [2, 4, 6], [3, 5, 6]]);
        let alpha = compute_alpha(&inst);
        assert_eq!(alpha.d(), inst.n() - alpha.basis().rank());
        for c in inst.clauses() {
            let mut s = BitVec::zeros(alpha.d());
            for &x in c {
                s.xor_with(alpha.image(x));
            }
            assert!(s.is_zero());
        }
    }

    #[test]
    fn twins_from_shared_pairs() {
        let alpha = compute_alpha(&two(4, &[[1, 2, 3], [1, 2, 4]]));
        assert_eq!(alpha.image(3), alpha.image(4));
        assert_eq!(find_twins(&alpha), vec![vec![3, 4]]);

        let alpha = compute_alpha(&two(8, &[[1, 2, 3], [1, 2, 4], [5, 6, 7], [5, 6, 8]]));
        assert_eq!(find_twins(&alpha), vec![vec![3, 4], vec![7, 8]]);

        assert!(find_twins(&compute_alpha(&two(3, &[[1, 2, 3]]))).is_empty());
    }

    #[test]
    fn succ_space_examples() {
        let single = two(4, &[[1, 2, 3]]);
        let alpha = compute_alpha(&single);
        let s = succ_space(&single, &alpha, 1).unwrap();
        assert_eq!(s.rank(), 1);
        assert!(in_span(&s, alpha.image(1)).unwrap());
        assert_eq!(succ_space(&single, &alpha, 4).unwrap().rank(), 0);

        let six = two(6, &[[1, 2, 3], [1, 4, 5], [2, 4, 6]]);
        let alpha = compute_alpha(&six);
        assert_eq!(alpha.image(6), &(alpha.image(2) ^ alpha.image(4)));
        let s = succ_space(&six, &alpha, 1).unwrap();
        assert!(in_span(&s, alpha.image(6)).unwrap());
        assert!(succ_space(&six, &alpha, 7).is_err());
    }

    #[test]
    fn succ_relation_examples() {
        let six = two(6, &[[1, 2, 3], [1, 4, 5], [2, 4, 6]]);
        let g = succ_relation(&six, &compute_alpha(&six));
        assert!(g.has_edge(1, 6));
        assert_eq!(g, succ_relation_with(&six, &compute_alpha(&six), true));

        // One clause: pair sums only reach the clause's own third image.
        let single = two(3, &[[1, 2, 3]]);
        assert_eq!(
            succ_relation(&single, &compute_alpha(&single)).edge_count(),
            0
        );

        let empty = Instance::empty(5, Semantics::TwoInThree);
        assert_eq!(
            succ_relation(&empty, &compute_alpha(&empty)).edge_count(),
            0
        );
    }

    #[test]
    fn cycles_are_nontrivial_components() {
        let mut g = SuccGraph::new(4);
        g.add_edge(1, 2);
        g.add_edge(2, 1);
        assert_eq!(find_cycles(&g), vec![vec![1, 2]]);
        assert_eq!(topological_order(&g), None);

        let mut dag = SuccGraph::new(4);
        dag.add_edge(1, 2);
        dag.add_edge(2, 3);
        dag.add_edge(4, 3);
        dag.add_edge(1, 1);
        assert!(find_cycles(&dag).is_empty());
        assert_eq!(topological_order(&dag), Some(vec![1, 2, 4, 3]));

        let mut g = SuccGraph::new(4);
        g.add_edge(1, 2);
        g.add_edge(2, 3);
        g.add_edge(3, 1);
        g.add_edge(4, 1);
        assert_eq!(find_cycles(&g), vec![vec![1, 2, 3]]);
    }

    #[test]
    fn sparsify_merges_the_shared_pair_thirds() {
        let inst = Instance::new(4, Semantics::OneInThree, [[1, 2, 3], [1, 2, 4]]).unwrap();
        let out = sparsify(&inst);
        assert!(out.eq.same(3, 4));
        assert_eq!(out.eq.num_classes(), 3);
        assert_eq!(out.instance.n(), 3);
        assert_eq!(out.instance.m(), 1);
        assert_eq!(out.instance.semantics(), Semantics::OneInThree);
        assert_eq!(out.stats.twin_merges, 1);
    }

    #[test]
    fn sparsify_leaves_empty_instances_alone() {
        let inst = Instance::empty(6, Semantics::OneInThree);
        let out = sparsify(&inst);
        assert!(out.eq.is_identity());
        assert_eq!(out.instance, inst);
        assert_eq!(out.stats.rounds, 0);
        assert_eq!(out.stats.exponent_estimate(), None);
    }

    #[test]
    fn baseline_examples() {
        let inst = Instance::new(4, Semantics::OneInThree, [[1, 2, 3], [1, 2, 4]]).unwrap();
        let out = baseline_pair_merge(&inst);
        assert!(out.eq.same(3, 4));
        assert_eq!(out.instance.m(), 1);

        let single = Instance::new(3, Semantics::OneInThree, [[1, 2, 3]]).unwrap();
        let out = baseline_pair_merge(&single);
        assert!(out.eq.is_identity());
        assert_eq!(out.merges, 0);
    }
}
