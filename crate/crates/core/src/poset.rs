//! Finite posets stored as dense up-set bitsets.

use rayon::prelude::*;

/// Fixed-size bitset over `0..len`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(64)] }
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + b)
            })
        })
    }
}

/// A finite relation on `0..len`, intended to be a partial order.
#[derive(Clone, Debug)]
pub struct Poset {
    up: Vec<BitSet>,
    down: Vec<BitSet>,
}

/// Which poset axiom failed, with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomViolation {
    Reflexivity(usize),
    Antisymmetry(usize, usize),
    Transitivity(usize, usize, usize),
}

impl Poset {
    /// Tabulate `leq(i, j)` for all pairs, in parallel over rows.
    pub fn from_relation<F>(len: usize, leq: F) -> Self
    where
        F: Fn(usize, usize) -> bool + Sync,
    {
        let up: Vec<BitSet> = (0..len)
            .into_par_iter()
            .map(|i| {
                let mut row = BitSet::new(len);
                for j in 0..len {
                    if leq(i, j) {
                        row.insert(j);
                    }
                }
                row
            })
            .collect();
        let mut down = vec![BitSet::new(len); len];
        for (i, row) in up.iter().enumerate() {
            for j in row.iter() {
                down[j].insert(i);
            }
        }
        Self { up, down }
    }

    pub fn len(&self) -> usize {
        self.up.len()
    }

    pub fn is_empty(&self) -> bool {
        self.up.is_empty()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.up[i].contains(j)
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.leq(i, j)
    }

    /// Elements `≥ i`, including `i`.
    pub fn up_set(&self, i: usize) -> &BitSet {
        &self.up[i]
    }

    /// Elements `≤ i`, including `i`.
    pub fn down_set(&self, i: usize) -> &BitSet {
        &self.down[i]
    }

    /// Number of pairs `i < j`.
    pub fn strict_relation_count(&self) -> usize {
        self.up.iter().map(BitSet::len).sum::<usize>() - self.len()
    }

    /// First violated axiom, if any.
    pub fn check_axioms(&self) -> Option<AxiomViolation> {
        let n = self.len();
        if let Some(i) = (0..n).find(|&i| !self.leq(i, i)) {
            return Some(AxiomViolation::Reflexivity(i));
        }
        for i in 0..n {
            for j in self.up[i].iter() {
                if j != i && self.leq(j, i) {
                    return Some(AxiomViolation::Antisymmetry(i, j));
                }
                if !self.up[j].is_subset(&self.up[i]) {
                    let k = self.up[j].iter().find(|&k| !self.leq(i, k)).unwrap();
                    return Some(AxiomViolation::Transitivity(i, j, k));
                }
            }
        }
        None
    }

    /// Cover relation: pairs `i < j` with nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n)
            .into_par_iter()
            .flat_map_iter(|i| {
                self.up[i]
                    .iter()
                    .filter(move |&j| j != i && self.is_cover(i, j))
                    .map(move |j| (i, j))
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    fn is_cover(&self, i: usize, j: usize) -> bool {
        // the interval [i, j] is exactly {i, j}
        let mut between = self.up[i].clone();
        for (w, d) in between.words.iter_mut().zip(&self.down[j].words) {
            *w &= d;
        }
        between.len() == 2
    }

    /// Connected components of the comparability graph, as a component index
    /// per element.
    pub fn components(&self) -> Vec<usize> {
        let n = self.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for i in 0..n {
            for j in self.up[i].iter() {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut ids = vec![usize::MAX; n];
        let mut next = 0;
        (0..n)
            .map(|i| {
                let r = find(&mut parent, i);
                if ids[r] == usize::MAX {
                    ids[r] = next;
                    next += 1;
                }
                ids[r]
            })
            .collect()
    }

    pub fn component_count(&self) -> usize {
        self.components().into_iter().max().map_or(0, |m| m + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_and_antichain() {
        let chain = Poset::from_relation(3, |i, j| i <= j);
        assert_eq!(chain.check_axioms(), None);
        assert_eq!(chain.covers(), vec![(0, 1), (1, 2)]);
        assert_eq!(chain.component_count(), 1);

        let discrete = Poset::from_relation(4, |i, j| i == j);
        assert!(discrete.covers().is_empty());
        assert_eq!(discrete.component_count(), 4);
    }

    #[test]
    fn divisibility() {
        let p = Poset::from_relation(12, |i, j| (j + 1) % (i + 1) == 0);
        assert_eq!(p.check_axioms(), None);
        let covers = p.covers();
        assert!(covers.contains(&(0, 1)));
        assert!(covers.contains(&(1, 3)));
        assert!(!covers.contains(&(0, 3)));
    }

    #[test]
    fn detects_violations() {
        assert_eq!(Poset::from_relation(2, |_, _| true).check_axioms(), Some(AxiomViolation::Antisymmetry(0, 1)));
        assert_eq!(Poset::from_relation(2, |i, j| i < j).check_axioms(), Some(AxiomViolation::Reflexivity(0)));
        let bad = Poset::from_relation(3, |i, j| i == j || (i, j) == (0, 1) || (i, j) == (1, 2));
        assert_eq!(bad.check_axioms(), Some(AxiomViolation::Transitivity(0, 1, 2)));
    }

    #[test]
    fn bitset_iter() {
        let mut b = BitSet::new(130);
        for i in [0, 63, 64, 129] {
            b.insert(i);
        }
        assert_eq!(b.iter().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        assert_eq!(b.len(), 4);
    }
}
