//! Monotone 1-in-3 / 2-in-3 instances, equivalence relations on their
//! variables, and quotients.
//!
//! Variables are numbered `1..=n`. A clause is a triple of variables stored
//! sorted ascending; the clause list itself is kept sorted and free of
//! duplicates. Clauses with a repeated variable only arise from quotienting:
//! their meaning stays positional ("exactly one/two of the three positions
//! is true").

mod equiv;
mod text;

pub use equiv::EquivRel;
pub(crate) use text::{header_line, parse_rows};
pub use text::{parse_merge_map, serialize_merge_map, Header};

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::f2::{BitVec, F2Matrix};

/// A variable index, starting at 1.
pub type Var = usize;

/// A clause: three variables in ascending order.
pub type Clause = [Var; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Semantics {
    OneInThree,
    TwoInThree,
}

impl Semantics {
    /// Number of true positions a satisfied clause must contain.
    pub fn target(self) -> u32 {
        match self {
            Semantics::OneInThree => 1,
            Semantics::TwoInThree => 2,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Semantics::OneInThree => Semantics::TwoInThree,
            Semantics::TwoInThree => Semantics::OneInThree,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    semantics: Semantics,
    clauses: Vec<Clause>,
}

/// Result of [`quotient`]: the quotient instance and, for each original
/// variable `i`, its index `map[i - 1]` in the quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quotient {
    pub instance: Instance,
    pub map: Vec<Var>,
}

pub(crate) fn sort3(mut c: Clause) -> Clause {
    c.sort_unstable();
    c
}

impl Instance {
    /// Builds a canonical instance. Clauses may not repeat a variable.
    pub fn new(
        n: usize,
        semantics: Semantics,
        clauses: impl IntoIterator<Item = Clause>,
    ) -> Result<Self> {
        let inst = Self::with_repeats(n, semantics, clauses)?;
        if let Some(c) = inst.clauses.iter().find(|c| c[0] == c[1] || c[1] == c[2]) {
            return Err(Error::Precondition(format!(
                "clause {c:?} repeats a variable"
            )));
        }
        Ok(inst)
    }

    /// Like [`Instance::new`], but clauses with repeated variables are kept.
    pub fn with_repeats(
        n: usize,
        semantics: Semantics,
        clauses: impl IntoIterator<Item = Clause>,
    ) -> Result<Self> {
        let mut out = Vec::new();
        for c in clauses {
            for &x in &c {
                if x == 0 || x > n {
                    return Err(Error::OutOfRange { index: x, n });
                }
            }
            out.push(sort3(c));
        }
        out.sort_unstable();
        out.dedup();
        Ok(Self {
            n,
            semantics,
            clauses: out,
        })
    }

    pub fn empty(n: usize, semantics: Semantics) -> Self {
        Self {
            n,
            semantics,
            clauses: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn has_repeats(&self) -> bool {
        self.clauses.iter().any(|c| c[0] == c[1] || c[1] == c[2])
    }

    /// The same clauses read with the opposite semantics. An assignment
    /// satisfies `self` iff its bitwise complement satisfies the result.
    pub fn complement(&self) -> Self {
        Self {
            n: self.n,
            semantics: self.semantics.flipped(),
            clauses: self.clauses.clone(),
        }
    }

    /// This instance with the given semantics, complementing if needed.
    pub fn as_semantics(&self, semantics: Semantics) -> Self {
        if self.semantics == semantics {
            self.clone()
        } else {
            self.complement()
        }
    }

    /// The parity system of the 2-in-3 reading: one row per clause, with a
    /// one in column `x - 1` for each variable `x` occurring an odd number of
    /// times in the clause.
    pub fn clause_matrix(&self) -> F2Matrix {
        let rows = self
            .clauses
            .iter()
            .map(|c| {
                let mut row = BitVec::zeros(self.n);
                for &x in c {
                    row.flip(x - 1);
                }
                row
            })
            .collect();
        F2Matrix::from_rows(self.n, rows).expect("rows have width n")
    }

    /// Variables other than `x` that share a clause with `x`.
    pub fn neighbours(&self, x: Var) -> Result<BTreeSet<Var>> {
        self.check_var(x)?;
        Ok(self
            .clauses
            .iter()
            .filter(|c| c.contains(&x))
            .flat_map(|c| c.iter().copied())
            .filter(|&y| y != x)
            .collect())
    }

    /// For every variable, the sorted set of variables occupying the other two
    /// positions of some clause containing it. This is the neighbourhood plus
    /// the variable itself when it occupies two positions of one clause.
    pub fn partner_sets(&self) -> Vec<Vec<Var>> {
        let mut sets: Vec<BTreeSet<Var>> = vec![BTreeSet::new(); self.n];
        for c in &self.clauses {
            for pos in 0..3 {
                let x = c[pos];
                for (other, &y) in c.iter().enumerate() {
                    if other != pos {
                        sets[x - 1].insert(y);
                    }
                }
            }
        }
        sets.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    fn check_var(&self, x: Var) -> Result<()> {
        if x == 0 || x > self.n {
            Err(Error::OutOfRange {
                index: x,
                n: self.n,
            })
        } else {
            Ok(())
        }
    }

    /// Whether `assignment` (bit `i - 1` is variable `i`) satisfies every clause.
    pub fn is_satisfied_by(&self, assignment: u64) -> bool {
        let target = self.semantics.target();
        self.clauses.iter().all(|c| {
            c.iter()
                .map(|&x| (assignment >> (x - 1) & 1) as u32)
                .sum::<u32>()
                == target
        })
    }
}

/// Maps every clause through `eq` and renumbers classes `1..=n'` in order of
/// their minimum members.
pub fn quotient(inst: &Instance, eq: &EquivRel) -> Result<Quotient> {
    if eq.n() != inst.n() {
        return Err(Error::WidthMismatch {
            expected: inst.n(),
            found: eq.n(),
        });
    }
    let map = eq.class_index();
    let clauses = inst
        .clauses()
        .iter()
        .map(|c| [map[c[0] - 1], map[c[1] - 1], map[c[2] - 1]]);
    let instance = Instance::with_repeats(eq.num_classes(), inst.semantics(), clauses)?;
    Ok(Quotient { instance, map })
}
