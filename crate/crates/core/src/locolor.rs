//! Linearly ordered colourings of 3-uniform hypergraphs.
//!
//! A colouring is LO if the largest colour on every edge occurs exactly once.
//! With two colours this is monotone 1-in-3-SAT: colour 2 marks the single
//! true variable of each clause.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::instance::{Clause, EquivRel, Instance, Semantics};
use crate::oracle::{first_solution, Verdict};

/// Colours of vertices `1..=n`, all positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Colouring {
    colours: Vec<u32>,
}

impl Colouring {
    pub fn new(colours: Vec<u32>) -> Result<Self> {
        if let Some(i) = colours.iter().position(|&c| c == 0) {
            return Err(Error::InvalidParameter(format!(
                "vertex {} has colour 0; colours start at 1",
                i + 1
            )));
        }
        Ok(Self { colours })
    }

    pub fn n(&self) -> usize {
        self.colours.len()
    }

    pub fn colour(&self, v: usize) -> u32 {
        self.colours[v - 1]
    }

    pub fn colours(&self) -> &[u32] {
        &self.colours
    }

    /// Colour 2 for true variables, 1 for false ones.
    pub fn from_assignment(a: u64, n: usize) -> Self {
        Self {
            colours: (0..n).map(|i| 1 + (a >> i & 1) as u32).collect(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.colours.iter().enumerate() {
            let _ = writeln!(out, "{} {c}", i + 1);
        }
        out
    }

    /// Parses `<v> <colour>` lines; every vertex `1..=n` must appear once.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let mut colours = vec![0u32; n];
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t == "c" || t.starts_with("c ") {
                continue;
            }
            let err = |msg: String| Error::Parse { line: i + 1, msg };
            let vals: Vec<&str> = t.split_whitespace().collect();
            let [v, c] = vals.as_slice() else {
                return Err(err("expected `<vertex> <colour>`".into()));
            };
            let v: usize = v.parse().map_err(|_| err(format!("bad vertex {v:?}")))?;
            let c: u32 = c.parse().map_err(|_| err(format!("bad colour {c:?}")))?;
            if v == 0 || v > n {
                return Err(err(format!("vertex {v} out of range 1..={n}")));
            }
            if c == 0 {
                return Err(err("colours start at 1".into()));
            }
            if colours[v - 1] != 0 {
                return Err(err(format!("vertex {v} coloured twice")));
            }
            colours[v - 1] = c;
        }
        if let Some(i) = colours.iter().position(|&c| c == 0) {
            return Err(Error::Parse {
                line: 0,
                msg: format!("vertex {} has no colour", i + 1),
            });
        }
        Ok(Self { colours })
    }
}

/// Checks every edge of `h` (clauses read as edges; a repeated vertex counts
/// once per position) for a unique maximum colour.
pub fn check_lo(h: &Instance, c: &Colouring) -> Result<Verdict<Clause>> {
    if c.n() != h.n() {
        return Err(Error::WidthMismatch {
            expected: h.n(),
            found: c.n(),
        });
    }
    for e in h.clauses() {
        let cols = e.map(|v| c.colour(v));
        let max = *cols.iter().max().expect("three entries");
        if cols.iter().filter(|&&x| x == max).count() != 1 {
            return Ok(Verdict::Counterexample(*e));
        }
    }
    Ok(Verdict::Ok)
}

/// Gives each vertex the colour of its class; `c_quotient` colours classes in
/// the numbering used by [`crate::instance::quotient`].
pub fn lift_colouring(eq: &EquivRel, c_quotient: &Colouring) -> Result<Colouring> {
    if c_quotient.n() != eq.num_classes() {
        return Err(Error::WidthMismatch {
            expected: eq.num_classes(),
            found: c_quotient.n(),
        });
    }
    Ok(Colouring {
        colours: eq
            .class_index()
            .into_iter()
            .map(|k| c_quotient.colour(k))
            .collect(),
    })
}

/// An LO colouring with colours `{1, 2}`, found by enumerating 1-in-3
/// solutions, or `None` if there is none.
pub fn brute_lo2(h: &Instance, limit: usize) -> Result<Option<Colouring>> {
    let h = h.as_semantics(Semantics::OneInThree);
    Ok(first_solution(&h, limit)?.map(|a| Colouring::from_assignment(a, h.n())))
}
