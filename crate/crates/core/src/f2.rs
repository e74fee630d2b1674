//! Bit-packed linear algebra over F₂.
//!
//! Vectors are packed into `u64` words, bit `i` living in word `i / 64` at
//! position `i % 64`. Bits beyond the logical width are always zero, so
//! derived equality, hashing and ordering are all representation-based.
//!
//! Every span computation goes through [`rref`], which produces the unique
//! fully reduced row echelon form of a row space. Column 0 is the leftmost
//! column and pivots are chosen as the lowest set column of each row.

use std::fmt;
use std::ops::{BitXor, BitXorAssign};

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

fn words_for(width: usize) -> usize {
    width.div_ceil(WORD_BITS)
}

/// A vector in F₂^width.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    width: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(width: usize) -> Self {
        Self {
            width,
            words: vec![0; words_for(width)],
        }
    }

    /// The standard basis vector with a single one at `index`.
    pub fn unit(width: usize, index: usize) -> Self {
        let mut v = Self::zeros(width);
        v.set(index, true);
        v
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector from the low `width` bits of `value` (bit `i` of the
    /// integer becomes coordinate `i`).
    pub fn from_u64(width: usize, value: u64) -> Self {
        let mut v = Self::zeros(width);
        for i in 0..width.min(WORD_BITS) {
            if value >> i & 1 == 1 {
                v.set(i, true);
            }
        }
        v
    }

    /// Parses a string of `0`/`1` characters, coordinate 0 first.
    pub fn parse_bits(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!("invalid bit character {c:?} at position {i}"),
                    })
                }
            }
        }
        Ok(Self::from_bits(&bits))
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.width, "bit {i} out of width {}", self.width);
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.width, "bit {i} out of width {}", self.width);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.width, "bit {i} out of width {}", self.width);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD_BITS + w.trailing_zeros() as usize)
    }

    /// Indices of the set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD_BITS + tz)
            })
        })
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &BitVec) -> Result<bool> {
        self.check_width(other.width)?;
        let parity = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>();
        Ok(parity & 1 == 1)
    }

    /// In-place addition; panics on width mismatch.
    #[inline]
    pub fn xor_with(&mut self, other: &BitVec) {
        assert_eq!(self.width, other.width, "xor of vectors of unequal width");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    fn check_width(&self, width: usize) -> Result<()> {
        if self.width == width {
            Ok(())
        } else {
            Err(Error::WidthMismatch {
                expected: width,
                found: self.width,
            })
        }
    }

    /// Lowercase hexadecimal rendering of the vector read as an integer
    /// (coordinate `i` is bit `i`), padded to `ceil(width / 4)` digits.
    pub fn to_hex(&self) -> String {
        let digits = self.width.div_ceil(4).max(1);
        let mut out = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let mut nibble = 0u32;
            for b in 0..4 {
                let i = d * 4 + b;
                if i < self.width && self.get(i) {
                    nibble |= 1 << b;
                }
            }
            out.push(char::from_digit(nibble, 16).expect("nibble < 16"));
        }
        out
    }

    /// Inverse of [`BitVec::to_hex`].
    pub fn from_hex(width: usize, s: &str) -> Result<Self> {
        let mut v = Self::zeros(width);
        for (d, c) in s.chars().rev().enumerate() {
            let nibble = c.to_digit(16).ok_or_else(|| Error::Parse {
                line: 0,
                msg: format!("invalid hex digit {c:?}"),
            })?;
            for b in 0..4 {
                if nibble >> b & 1 == 1 {
                    let i = d * 4 + b;
                    if i >= width {
                        return Err(Error::Parse {
                            line: 0,
                            msg: format!("hex vector {s:?} exceeds width {width}"),
                        });
                    }
                    v.set(i, true);
                }
            }
        }
        Ok(v)
    }
}

impl BitXorAssign<&BitVec> for BitVec {
    fn bitxor_assign(&mut self, rhs: &BitVec) {
        self.xor_with(rhs);
    }
}

impl BitXor for &BitVec {
    type Output = BitVec;

    fn bitxor(self, rhs: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_with(rhs);
        out
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

/// A dense matrix over F₂ stored as rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct F2Matrix {
    ncols: usize,
    rows: Vec<BitVec>,
}

impl F2Matrix {
    pub fn new(ncols: usize) -> Self {
        Self {
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn from_rows(ncols: usize, rows: Vec<BitVec>) -> Result<Self> {
        for r in &rows {
            r.check_width(ncols)?;
        }
        Ok(Self { ncols, rows })
    }

    /// Convenience constructor from `0`/`1` strings of equal length.
    pub fn parse_rows(ncols: usize, rows: &[&str]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|s| BitVec::parse_bits(s))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(ncols, rows)
    }

    pub fn push_row(&mut self, row: BitVec) -> Result<()> {
        row.check_width(self.ncols)?;
        self.rows.push(row);
        Ok(())
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    /// The product `self · x`, one bit per row.
    pub fn mul_vec(&self, x: &BitVec) -> Result<BitVec> {
        x.check_width(self.ncols)?;
        let mut out = BitVec::zeros(self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            if r.dot(x)? {
                out.set(i, true);
            }
        }
        Ok(out)
    }
}

/// A matrix in reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    matrix: F2Matrix,
    pivots: Vec<usize>,
}

impl Rref {
    pub fn matrix(&self) -> &F2Matrix {
        &self.matrix
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.matrix.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols
    }

    /// Columns that carry no pivot, ascending.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ncols()];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ncols()).filter(|&c| !is_pivot[c]).collect()
    }

    fn reduce_in_place(&self, v: &mut BitVec) {
        // Rows are zero on every pivot but their own, so one pass suffices.
        for (row, &p) in self.matrix.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_with(row);
            }
        }
    }
}

/// Incrementally maintained fully reduced basis of a row space.
struct EchelonBuilder {
    ncols: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
    pivot_row: Vec<Option<usize>>,
}

impl EchelonBuilder {
    fn new(ncols: usize) -> Self {
        Self {
            ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
            pivot_row: vec![None; ncols],
        }
    }

    fn insert(&mut self, mut v: BitVec) {
        if self.rows.len() == self.ncols {
            return;
        }
        let hits: Vec<usize> = v.iter_ones().filter_map(|c| self.pivot_row[c]).collect();
        for r in hits {
            v.xor_with(&self.rows[r]);
        }
        let Some(p) = v.first_one() else {
            return;
        };
        for row in &mut self.rows {
            if row.get(p) {
                row.xor_with(&v);
            }
        }
        self.pivot_row[p] = Some(self.rows.len());
        self.rows.push(v);
        self.pivots.push(p);
    }

    fn finish(self) -> Rref {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&i| self.pivots[i]);
        let mut slots: Vec<Option<BitVec>> = self.rows.into_iter().map(Some).collect();
        let rows = order
            .iter()
            .map(|&i| slots[i].take().expect("each row taken once"))
            .collect();
        let pivots = order.iter().map(|&i| self.pivots[i]).collect();
        Rref {
            matrix: F2Matrix {
                ncols: self.ncols,
                rows,
            },
            pivots,
        }
    }
}

/// Reduced row echelon form of `m`'s row space.
pub fn rref(m: &F2Matrix) -> Rref {
    rref_of_rows(m.ncols, m.rows.iter().cloned())
}

/// Reduced row echelon form of the span of `rows`, each of width `ncols`.
pub fn rref_of_rows(ncols: usize, rows: impl IntoIterator<Item = BitVec>) -> Rref {
    let mut builder = EchelonBuilder::new(ncols);
    for r in rows {
        assert_eq!(r.width(), ncols, "row width differs from column count");
        builder.insert(r);
    }
    builder.finish()
}

/// The unique element of `v + rowspace(r)` that vanishes on every pivot column.
pub fn reduce_mod(r: &Rref, v: &BitVec) -> Result<BitVec> {
    v.check_width(r.ncols())?;
    let mut out = v.clone();
    r.reduce_in_place(&mut out);
    Ok(out)
}

pub fn in_span(r: &Rref, v: &BitVec) -> Result<bool> {
    Ok(reduce_mod(r, v)?.is_zero())
}

/// Finds some `x` with `m · x = b`, or `None` if the system is inconsistent.
/// Free variables are set to zero.
pub fn solve(m: &F2Matrix, b: &BitVec) -> Result<Option<BitVec>> {
    b.check_width(m.nrows())?;
    let n = m.ncols;
    let augmented = m.rows.iter().enumerate().map(|(i, row)| {
        let mut a = BitVec::zeros(n + 1);
        for c in row.iter_ones() {
            a.set(c, true);
        }
        if b.get(i) {
            a.set(n, true);
        }
        a
    });
    let r = rref_of_rows(n + 1, augmented);
    if r.pivots.last() == Some(&n) {
        return Ok(None);
    }
    let mut x = BitVec::zeros(n);
    for (row, &p) in r.rows().iter().zip(&r.pivots) {
        if row.get(n) {
            x.set(p, true);
        }
    }
    Ok(Some(x))
}
