use crate::error::{Error, Result};
use crate::instance::Var;

/// An equivalence relation on variables `1..=n`, kept as a union-find forest
/// whose roots are always the minimum member of their class.
#[derive(Clone, Debug)]
pub struct EquivRel {
    parent: Vec<usize>,
}

impl EquivRel {
    /// The identity relation on `n` elements.
    pub fn identity(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    fn check(&self, x: Var) -> Result<()> {
        if x == 0 || x > self.n() {
            Err(Error::OutOfRange {
                index: x,
                n: self.n(),
            })
        } else {
            Ok(())
        }
    }

    fn root(&self, mut i: usize) -> usize {
        while self.parent[i] != i {
            i = self.parent[i];
        }
        i
    }

    fn root_compress(&mut self, i: usize) -> usize {
        let r = self.root(i);
        let mut j = i;
        while self.parent[j] != r {
            let next = self.parent[j];
            self.parent[j] = r;
            j = next;
        }
        r
    }

    /// Class representative (the minimum member) of `x`.
    ///
    /// Panics if `x` is out of range.
    pub fn find(&self, x: Var) -> Var {
        self.check(x).expect("variable in range");
        self.root(x - 1) + 1
    }

    /// Merges the classes of `a` and `b`. Returns whether anything changed.
    pub fn union(&mut self, a: Var, b: Var) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        let ra = self.root_compress(a - 1);
        let rb = self.root_compress(b - 1);
        if ra == rb {
            return Ok(false);
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        Ok(true)
    }

    /// Merges every member of `group` into one class.
    pub fn union_all(&mut self, group: &[Var]) -> Result<usize> {
        let mut merged = 0;
        if let Some((&first, rest)) = group.split_first() {
            for &x in rest {
                if self.union(first, x)? {
                    merged += 1;
                }
            }
        }
        Ok(merged)
    }

    pub fn same(&self, a: Var, b: Var) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn is_identity(&self) -> bool {
        self.parent.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Representative of every element, in element order.
    pub fn representatives(&self) -> Vec<Var> {
        (0..self.n()).map(|i| self.root(i) + 1).collect()
    }

    pub fn num_classes(&self) -> usize {
        self.parent
            .iter()
            .enumerate()
            .filter(|&(i, &p)| i == p)
            .count()
    }

    /// Class index of every element, numbering classes `1..` in order of
    /// their representatives.
    pub fn class_index(&self) -> Vec<Var> {
        let mut index = vec![0; self.n()];
        let mut next = 0;
        for i in 0..self.n() {
            let r = self.root(i);
            if r == i {
                next += 1;
                index[i] = next;
            } else {
                index[i] = index[r];
            }
        }
        index
    }

    /// All classes, each sorted, ordered by representative.
    pub fn classes(&self) -> Vec<Vec<Var>> {
        let index = self.class_index();
        let mut out = vec![Vec::new(); self.num_classes()];
        for (i, &c) in index.iter().enumerate() {
            out[c - 1].push(i + 1);
        }
        out
    }

    /// Builds a relation from a representative table (`reps[i-1]` is the
    /// representative claimed for element `i`).
    pub fn from_representatives(reps: &[Var]) -> Result<Self> {
        let mut eq = Self::identity(reps.len());
        for (i, &r) in reps.iter().enumerate() {
            eq.union(i + 1, r)?;
        }
        Ok(eq)
    }
}

impl PartialEq for EquivRel {
    fn eq(&self, other: &Self) -> bool {
        self.representatives() == other.representatives()
    }
}

impl Eq for EquivRel {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn representative_is_minimum() {
        let mut eq = EquivRel::identity(6);
        eq.union(5, 3).unwrap();
        eq.union(6, 5).unwrap();
        eq.union(4, 2).unwrap();
        assert_eq!(eq.find(6), 3);
        assert_eq!(eq.find(4), 2);
        assert_eq!(eq.representatives(), vec![1, 2, 3, 2, 3, 3]);
        assert_eq!(eq.class_index(), vec![1, 2, 3, 2, 3, 3]);
        assert_eq!(eq.classes(), vec![vec![1], vec![2, 4], vec![3, 5, 6]]);
        assert_eq!(eq.num_classes(), 3);
        assert!(!eq.union(3, 6).unwrap());
    }

    #[test]
    fn long_chain_stays_consistent() {
        let mut eq = EquivRel::identity(100);
        for i in (1..100).rev() {
            eq.union(i + 1, i).unwrap();
        }
        assert!(eq.representatives().iter().all(|&r| r == 1));
        assert_eq!(eq.num_classes(), 1);
    }

    #[test]
    fn out_of_range_is_an_error() {
        let mut eq = EquivRel::identity(3);
        assert!(eq.union(0, 1).is_err());
        assert!(eq.union(1, 4).is_err());
    }

    #[test]
    fn rebuild_from_representatives() {
        let mut eq = EquivRel::identity(5);
        eq.union(2, 5).unwrap();
        let back = EquivRel::from_representatives(&eq.representatives()).unwrap();
        assert_eq!(back.representatives(), eq.representatives());
        assert!(EquivRel::identity(4).is_identity());
    }
}
