//! Exhaustive ground truth for small instances.
//!
//! Assignments are `u64` bit masks: bit `i - 1` holds variable `i`. Solutions
//! are produced in ascending numeric order by a depth-first search that
//! branches on the highest variable first and prunes a branch as soon as some
//! clause has too many or too few true positions left. The search never
//! consults the parity machinery, so it stays an independent check on it.

use std::collections::HashMap;
use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::instance::{Clause, EquivRel, Instance, Semantics, Var};
use crate::reduction::LiteralInstance;
use crate::sparsifier::SuccGraph;

/// Default bound on the number of variables the oracle will enumerate.
pub const DEFAULT_LIMIT: usize = 24;

const HARD_LIMIT: usize = 63;

pub type Assignment = u64;

/// Outcome of a check that can produce a witness of failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict<W> {
    Ok,
    Counterexample(W),
}

impl<W> Verdict<W> {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeCounterexample {
    pub solution: Assignment,
    pub pair: (Var, Var),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuccCounterexample {
    pub solution: Assignment,
    pub edge: (Var, Var),
}

/// Renders an assignment as `0`/`1` characters, variable 1 first.
pub fn format_assignment(a: Assignment, n: usize) -> String {
    (0..n)
        .map(|i| if a >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// A clause over `(variable index from 0, polarity)` positions that must
/// have exactly `target` true positions.
struct Constraint {
    target: u8,
}

struct Search {
    n: usize,
    occurrences: Vec<Vec<(usize, bool)>>,
    constraints: Vec<Constraint>,
    true_count: Vec<u8>,
    open: Vec<u8>,
}

impl Search {
    fn new(n: usize, clauses: impl IntoIterator<Item = ([(usize, bool); 3], u8)>) -> Self {
        let mut occurrences = vec![Vec::new(); n];
        let mut constraints = Vec::new();
        for (ci, (lits, target)) in clauses.into_iter().enumerate() {
            for (v, positive) in lits {
                occurrences[v].push((ci, positive));
            }
            constraints.push(Constraint { target });
        }
        let m = constraints.len();
        Self {
            n,
            occurrences,
            constraints,
            true_count: vec![0; m],
            open: vec![3; m],
        }
    }

    fn assign(&mut self, v: usize, value: bool) -> bool {
        let mut ok = true;
        for &(c, positive) in &self.occurrences[v] {
            self.open[c] -= 1;
            if value == positive {
                self.true_count[c] += 1;
            }
            let t = self.constraints[c].target;
            if self.true_count[c] > t || self.true_count[c] + self.open[c] < t {
                ok = false;
            }
        }
        ok
    }

    fn unassign(&mut self, v: usize, value: bool) {
        for &(c, positive) in &self.occurrences[v] {
            self.open[c] += 1;
            if value == positive {
                self.true_count[c] -= 1;
            }
        }
    }

    fn run(&mut self, visit: &mut impl FnMut(Assignment) -> ControlFlow<()>) {
        let _ = self.descend(self.n, 0, visit);
    }

    fn descend(
        &mut self,
        remaining: usize,
        acc: Assignment,
        visit: &mut impl FnMut(Assignment) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if remaining == 0 {
            return visit(acc);
        }
        let v = remaining - 1;
        for value in [false, true] {
            let ok = self.assign(v, value);
            let flow = if ok {
                let next = if value { acc | 1 << v } else { acc };
                self.descend(remaining - 1, next, visit)
            } else {
                ControlFlow::Continue(())
            };
            self.unassign(v, value);
            flow?;
        }
        ControlFlow::Continue(())
    }
}

fn check_limit(n: usize, limit: usize) -> Result<()> {
    if n > limit || n > HARD_LIMIT {
        Err(Error::SizeLimit {
            n,
            limit: limit.min(HARD_LIMIT),
        })
    } else {
        Ok(())
    }
}

fn monotone_search(inst: &Instance) -> Search {
    let target = inst.semantics().target() as u8;
    Search::new(
        inst.n(),
        inst.clauses()
            .iter()
            .map(|c| (c.map(|x| (x - 1, true)), target)),
    )
}

/// Calls `visit` on every solution in ascending order until it breaks.
pub fn for_each_solution(
    inst: &Instance,
    limit: usize,
    mut visit: impl FnMut(Assignment) -> ControlFlow<()>,
) -> Result<()> {
    check_limit(inst.n(), limit)?;
    monotone_search(inst).run(&mut visit);
    Ok(())
}

pub fn enumerate_solutions(inst: &Instance, limit: usize) -> Result<Vec<Assignment>> {
    let mut out = Vec::new();
    for_each_solution(inst, limit, |a| {
        out.push(a);
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

pub fn count_solutions(inst: &Instance, limit: usize) -> Result<u64> {
    let mut count = 0;
    for_each_solution(inst, limit, |_| {
        count += 1;
        ControlFlow::Continue(())
    })?;
    Ok(count)
}

pub fn first_solution(inst: &Instance, limit: usize) -> Result<Option<Assignment>> {
    let mut found = None;
    for_each_solution(inst, limit, |a| {
        found = Some(a);
        ControlFlow::Break(())
    })?;
    Ok(found)
}

/// Solutions of a non-monotone instance: exactly one true literal per clause.
pub fn enumerate_literal_solutions(li: &LiteralInstance, limit: usize) -> Result<Vec<Assignment>> {
    check_limit(li.n(), limit)?;
    let mut search = Search::new(
        li.n(),
        li.clauses()
            .iter()
            .map(|c| (c.map(|l| (l.unsigned_abs() as usize - 1, l > 0)), 1u8)),
    );
    let mut out = Vec::new();
    search.run(&mut |a| {
        out.push(a);
        ControlFlow::Continue(())
    });
    Ok(out)
}

/// Checks that every pair of `eq`-equivalent variables agrees in every
/// solution. The witness is the first failing solution and the smallest
/// `(representative, member)` pair it separates.
pub fn verify_merges(
    inst: &Instance,
    eq: &EquivRel,
    limit: usize,
) -> Result<Verdict<MergeCounterexample>> {
    if eq.n() != inst.n() {
        return Err(Error::WidthMismatch {
            expected: inst.n(),
            found: eq.n(),
        });
    }
    let reps = eq.representatives();
    let mut verdict = Verdict::Ok;
    for_each_solution(inst, limit, |a| {
        for (i, &r) in reps.iter().enumerate() {
            let x = i + 1;
            if (a >> i & 1) != (a >> (r - 1) & 1) {
                verdict = Verdict::Counterexample(MergeCounterexample {
                    solution: a,
                    pair: (r, x),
                });
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    })?;
    Ok(verdict)
}

/// Checks `x̂ ≥ ŷ` for every edge `x → y` of `g` in every solution of the
/// 2-in-3 reading of `inst`.
pub fn verify_succ_semantics(
    inst: &Instance,
    g: &SuccGraph,
    limit: usize,
) -> Result<Verdict<SuccCounterexample>> {
    if g.n() != inst.n() {
        return Err(Error::WidthMismatch {
            expected: inst.n(),
            found: g.n(),
        });
    }
    let two = inst.as_semantics(Semantics::TwoInThree);
    let edges: Vec<(Var, Var)> = g.edges().collect();
    let mut verdict = Verdict::Ok;
    for_each_solution(&two, limit, |a| {
        for &(x, y) in &edges {
            if a >> (x - 1) & 1 == 0 && a >> (y - 1) & 1 == 1 {
                verdict = Verdict::Counterexample(SuccCounterexample {
                    solution: a,
                    edge: (x, y),
                });
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    })?;
    Ok(verdict)
}

/// Checks that no two distinct clauses share two positions' worth of
/// variables (a 2-element sub-multiset).
pub fn pair_uniqueness(inst: &Instance) -> Verdict<(Clause, Clause)> {
    let mut owner: HashMap<(Var, Var), usize> = HashMap::new();
    for (ci, c) in inst.clauses().iter().enumerate() {
        for pair in [(c[0], c[1]), (c[0], c[2]), (c[1], c[2])] {
            match owner.get(&pair) {
                Some(&other) if other != ci => {
                    return Verdict::Counterexample((inst.clauses()[other], *c));
                }
                Some(_) => {}
                None => {
                    owner.insert(pair, ci);
                }
            }
        }
    }
    Verdict::Ok
}
