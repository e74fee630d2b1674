//! Line-oriented text formats.
//!
//! ```text
//! c comment
//! p oit <n> <m>      monotone 1-in-3
//! p o2t3 <n> <m>     monotone 2-in-3
//! p oitg <n> <m>     non-monotone 1-in-3 (negative literal = negated)
//! <a> <b> <c>        one clause per line, m lines
//! ```
//!
//! Merge maps are `m <n>` followed by `n` lines `<i> <rep(i)>`.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::instance::{sort3, EquivRel, Instance, Semantics};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Header {
    OneInThree,
    TwoInThree,
    NonMonotone,
}

impl Header {
    fn keyword(self) -> &'static str {
        match self {
            Header::OneInThree => "oit",
            Header::TwoInThree => "o2t3",
            Header::NonMonotone => "oitg",
        }
    }

    fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "oit" => Some(Header::OneInThree),
            "o2t3" => Some(Header::TwoInThree),
            "oitg" => Some(Header::NonMonotone),
            _ => None,
        }
    }
}

pub(crate) struct TextRows {
    pub header: Header,
    pub n: usize,
    pub rows: Vec<(usize, [i64; 3])>,
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn is_skippable(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t == "c" || t.starts_with("c ")
}

pub(crate) fn parse_rows(text: &str) -> Result<TextRows> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !is_skippable(l));

    let (hline, header_text) = lines.next().ok_or_else(|| err(0, "missing header"))?;
    let toks: Vec<&str> = header_text.split_whitespace().collect();
    let (header, n, m) = match toks.as_slice() {
        ["p", kind, n, m] => {
            let header = Header::from_keyword(kind)
                .ok_or_else(|| err(hline, format!("unknown format {kind:?}")))?;
            let n = n
                .parse::<usize>()
                .map_err(|_| err(hline, format!("bad variable count {n:?}")))?;
            let m = m
                .parse::<usize>()
                .map_err(|_| err(hline, format!("bad clause count {m:?}")))?;
            (header, n, m)
        }
        _ => return Err(err(hline, "malformed header, expected `p <kind> <n> <m>`")),
    };

    let mut rows = Vec::with_capacity(m);
    for (lineno, line) in lines {
        let vals = line
            .split_whitespace()
            .map(|t| {
                t.parse::<i64>()
                    .map_err(|_| err(lineno, format!("bad literal {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let triple: [i64; 3] = vals
            .try_into()
            .map_err(|_| err(lineno, "a clause needs exactly three entries"))?;
        for &lit in &triple {
            if lit == 0 {
                return Err(err(lineno, "literal 0 is not allowed"));
            }
            if lit < 0 && header != Header::NonMonotone {
                return Err(err(lineno, "negative literal in a monotone instance"));
            }
            if lit.unsigned_abs() as usize > n {
                return Err(err(
                    lineno,
                    format!("index {} exceeds variable count {n}", lit.unsigned_abs()),
                ));
            }
        }
        rows.push((lineno, triple));
    }
    if rows.len() != m {
        return Err(err(
            hline,
            format!("header declares {m} clauses but {} were given", rows.len()),
        ));
    }
    Ok(TextRows { header, n, rows })
}

impl Instance {
    /// Parses a monotone instance, rejecting clauses that repeat a variable.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with_warnings(text).map(|(inst, _)| inst)
    }

    /// Like [`Instance::parse`], also returning one warning per dropped
    /// duplicate clause.
    pub fn parse_with_warnings(text: &str) -> Result<(Self, Vec<String>)> {
        Self::parse_impl(text, false)
    }

    /// Accepts clauses with repeated variables, as written for quotients.
    pub fn parse_lenient(text: &str) -> Result<Self> {
        Self::parse_impl(text, true).map(|(inst, _)| inst)
    }

    fn parse_impl(text: &str, allow_repeats: bool) -> Result<(Self, Vec<String>)> {
        let parsed = parse_rows(text)?;
        let semantics = match parsed.header {
            Header::OneInThree => Semantics::OneInThree,
            Header::TwoInThree => Semantics::TwoInThree,
            Header::NonMonotone => {
                return Err(err(
                    0,
                    "non-monotone instance where a monotone one was expected",
                ))
            }
        };
        let mut seen = HashSet::new();
        let mut warnings = Vec::new();
        let mut clauses = Vec::with_capacity(parsed.rows.len());
        for (lineno, row) in parsed.rows {
            let c = sort3(row.map(|x| x as usize));
            if !allow_repeats && (c[0] == c[1] || c[1] == c[2]) {
                return Err(err(lineno, format!("clause {c:?} repeats a variable")));
            }
            if !seen.insert(c) {
                warnings.push(format!("line {lineno}: duplicate clause {c:?} dropped"));
                continue;
            }
            clauses.push(c);
        }
        let inst = Instance::with_repeats(parsed.n, semantics, clauses)?;
        Ok((inst, warnings))
    }

    pub fn to_text(&self) -> String {
        let header = match self.semantics() {
            Semantics::OneInThree => Header::OneInThree,
            Semantics::TwoInThree => Header::TwoInThree,
        };
        let mut out = format!("p {} {} {}\n", header.keyword(), self.n(), self.m());
        for c in self.clauses() {
            let _ = writeln!(out, "{} {} {}", c[0], c[1], c[2]);
        }
        out
    }
}

pub(crate) fn header_line(header: Header, n: usize, m: usize) -> String {
    format!("p {} {n} {m}\n", header.keyword())
}

pub fn serialize_merge_map(eq: &EquivRel) -> String {
    let mut out = format!("m {}\n", eq.n());
    for (i, r) in eq.representatives().into_iter().enumerate() {
        let _ = writeln!(out, "{} {}", i + 1, r);
    }
    out
}

pub fn parse_merge_map(text: &str) -> Result<EquivRel> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !is_skippable(l));
    let (hline, header) = lines.next().ok_or_else(|| err(0, "missing header"))?;
    let n = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["m", n] => n
            .parse::<usize>()
            .map_err(|_| err(hline, format!("bad element count {n:?}")))?,
        _ => return Err(err(hline, "malformed header, expected `m <n>`")),
    };
    let mut reps = vec![0usize; n];
    let mut count = 0;
    for (lineno, line) in lines {
        let vals = line
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| err(lineno, format!("bad index {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let [i, r]: [usize; 2] = vals
            .try_into()
            .map_err(|_| err(lineno, "expected `<i> <rep>`"))?;
        for x in [i, r] {
            if x == 0 || x > n {
                return Err(err(lineno, format!("index {x} out of range 1..={n}")));
            }
        }
        if reps[i - 1] != 0 {
            return Err(err(lineno, format!("element {i} listed twice")));
        }
        reps[i - 1] = r;
        count += 1;
    }
    if count != n {
        return Err(err(hline, format!("expected {n} entries, found {count}")));
    }
    EquivRel::from_representatives(&reps)
}
