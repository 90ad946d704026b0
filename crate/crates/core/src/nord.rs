//! The poset nOrd(A) of n-orderings of a finite set.
//!
//! An n-ordering is a healthy planar level tree of height `n` whose level-`n`
//! leaves are labelled bijectively by `A`. It is encoded by the labels in
//! planar order together with the branching levels of consecutive leaves,
//! written as text by interleaving the two: `a 1 b 0 c`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poset::Poset;
use crate::tree::PlanarLevelTree;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NordError {
    #[error("invalid n-ordering: {0}")]
    Invalid(String),
    #[error("label sets or heights differ")]
    LabelMismatch,
    #[error("{0} is not a permutation of the label set")]
    NotAPermutation(String),
    #[error("nOrd would have {count} elements, above the cap of {cap}")]
    TooMany { count: u128, cap: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "NOrderingJson")]
pub struct NOrdering {
    labels: Vec<String>,
    word: Vec<usize>,
    n: usize,
}

#[derive(Deserialize)]
struct NOrderingJson {
    labels: Vec<String>,
    word: Vec<usize>,
    n: usize,
}

impl TryFrom<NOrderingJson> for NOrdering {
    type Error = NordError;

    fn try_from(raw: NOrderingJson) -> Result<Self, NordError> {
        NOrdering::new(raw.labels, raw.word, raw.n)
    }
}

impl NOrdering {
    /// Labels in planar order and the branching levels `b_i` of each
    /// consecutive pair, `0 ≤ b_i < n`.
    pub fn new(labels: Vec<String>, word: Vec<usize>, n: usize) -> Result<Self, NordError> {
        if n == 0 {
            return Err(NordError::Invalid("n must be at least 1".into()));
        }
        if labels.iter().collect::<BTreeSet<_>>().len() != labels.len() {
            return Err(NordError::Invalid(format!("repeated label in {labels:?}")));
        }
        if word.len() != labels.len().saturating_sub(1) {
            return Err(NordError::Invalid(format!(
                "{} labels need {} branching levels",
                labels.len(),
                labels.len().saturating_sub(1)
            )));
        }
        if let Some(b) = word.iter().find(|&&b| b >= n) {
            return Err(NordError::Invalid(format!("branching level {b} is not below n = {n}")));
        }
        Ok(Self { labels, word, n })
    }

    /// The unique n-ordering of the empty set: the root-only tree.
    pub fn empty(n: usize) -> Self {
        Self { labels: Vec::new(), word: Vec::new(), n }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Branching level of the leaves in planar positions `i ≠ j`.
    pub fn branching_at(&self, i: usize, j: usize) -> usize {
        let (lo, hi) = (i.min(j), i.max(j));
        self.word[lo..hi].iter().copied().min().expect("distinct positions")
    }

    /// `b_S(a, b)` for distinct labels.
    pub fn branching_level(&self, a: &str, b: &str) -> Option<usize> {
        let (i, j) = (self.position(a)?, self.position(b)?);
        (i != j).then(|| self.branching_at(i, j))
    }

    /// The labelled healthy tree; its level-`n` leaves read `labels()` in
    /// planar order.
    pub fn to_tree(&self) -> PlanarLevelTree {
        // Build with mutable nested vectors then freeze.
        #[derive(Default)]
        struct Node(Vec<Node>);
        fn grow(node: &mut Node, depth: usize) {
            let mut cur = node;
            for _ in 0..depth {
                cur.0.push(Node::default());
                cur = cur.0.last_mut().unwrap();
            }
        }
        fn freeze(node: Node) -> PlanarLevelTree {
            PlanarLevelTree::new(node.0.into_iter().map(freeze).collect())
        }
        let mut root = Node::default();
        if !self.labels.is_empty() {
            grow(&mut root, self.n);
            for &b in &self.word {
                // descend along the rightmost path to level b, then branch
                let mut cur = &mut root;
                for _ in 0..b {
                    cur = cur.0.last_mut().unwrap();
                }
                grow(cur, self.n - b);
            }
        }
        freeze(root)
    }

    /// Inverse of [`to_tree`](Self::to_tree): reads the branching word off a
    /// healthy tree whose level-`n` leaves carry `labels` in planar order.
    pub fn from_tree(tree: &PlanarLevelTree, labels: Vec<String>, n: usize) -> Result<Self, NordError> {
        if tree.height() > n || !tree.is_healthy(n) {
            return Err(NordError::Invalid(format!("{tree} is not a healthy tree of height {n}")));
        }
        let leaves = tree.level_n_leaves(n);
        if leaves.len() != labels.len() {
            return Err(NordError::Invalid(format!("{} labels for {} leaves", labels.len(), leaves.len())));
        }
        let word = leaves.windows(2).map(|w| w[0].common_prefix(&w[1])).collect();
        Self::new(labels, word, n)
    }

    /// Number of edges of the tree: the first leaf contributes a path of
    /// length `n`, each later leaf `n - b_i` new edges.
    pub fn degree(&self) -> usize {
        if self.labels.is_empty() {
            return 0;
        }
        self.n + self.word.iter().map(|&b| self.n - b).sum::<usize>()
    }

    /// Relabel leaves by a permutation of the label set.
    pub fn sigma_act(&self, g: &BTreeMap<String, String>) -> Result<NOrdering, NordError> {
        check_permutation(g, &self.labels)?;
        Ok(NOrdering { labels: self.labels.iter().map(|l| g[l].clone()).collect(), word: self.word.clone(), n: self.n })
    }

    /// Parse the interleaved text form, e.g. `a 0 b` at height `n`.
    pub fn parse_text(text: &str, n: usize) -> Result<Self, NordError> {
        let mut labels = Vec::new();
        let mut word = Vec::new();
        for (k, tok) in text.split_whitespace().enumerate() {
            if k % 2 == 0 {
                labels.push(tok.to_string());
            } else {
                word.push(
                    tok.parse().map_err(|_| NordError::Invalid(format!("expected a branching level, got {tok:?}")))?,
                );
            }
        }
        if !labels.is_empty() && labels.len() != word.len() + 1 {
            return Err(NordError::Invalid("text must end with a label".into()));
        }
        Self::new(labels, word, n)
    }

    fn same_set(&self, other: &NOrdering) -> bool {
        self.n == other.n && self.labels.iter().sorted().eq(other.labels.iter().sorted())
    }
}

impl fmt::Display for NOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, l) in self.labels.iter().enumerate() {
            if k > 0 {
                write!(f, " {} ", self.word[k - 1])?;
            }
            f.write_str(l)?;
        }
        Ok(())
    }
}

fn check_permutation(g: &BTreeMap<String, String>, labels: &[String]) -> Result<(), NordError> {
    let domain: BTreeSet<&String> = labels.iter().collect();
    let keys: BTreeSet<&String> = g.keys().collect();
    let values: BTreeSet<&String> = g.values().collect();
    if keys != domain || values != domain {
        return Err(NordError::NotAPermutation(format!("{g:?}")));
    }
    Ok(())
}

/// `S ≤ T` iff for all distinct `a, b`: `b_T(a,b) ≤ b_S(a,b)`, with
/// equality only if `<_S` and `<_T` order `a, b` the same way.
pub fn leq(s: &NOrdering, t: &NOrdering) -> Result<bool, NordError> {
    if !s.same_set(t) {
        return Err(NordError::LabelMismatch);
    }
    let pos_t: HashMap<&str, usize> = t.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    for i in 0..s.len() {
        for j in (i + 1)..s.len() {
            // a = labels[i] <_S b = labels[j]
            let (ti, tj) = (pos_t[s.labels[i].as_str()], pos_t[s.labels[j].as_str()]);
            let (bs, bt) = (s.branching_at(i, j), t.branching_at(ti, tj));
            if bt > bs || (bt == bs && ti > tj) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `r! · n^(r-1)` for `r ≥ 1`, and 1 for `r = 0`.
pub fn nord_count(r: usize, n: usize) -> u128 {
    if r == 0 {
        return 1;
    }
    let fact: u128 = (1..=r as u128).product();
    fact.saturating_mul((n as u128).saturating_pow(r as u32 - 1))
}

/// Every n-ordering of `labels`, sorted by label permutation
/// (lexicographically) and then by word.
pub fn enumerate_nord<S: AsRef<str>>(labels: &[S], n: usize, cap: usize) -> Result<Vec<NOrdering>, NordError> {
    if n == 0 {
        return Err(NordError::Invalid("n must be at least 1".into()));
    }
    let mut sorted: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(NordError::Invalid(format!("repeated label in {sorted:?}")));
    }
    let r = sorted.len();
    let count = nord_count(r, n);
    if count > cap as u128 {
        return Err(NordError::TooMany { count, cap });
    }
    if r == 0 {
        return Ok(vec![NOrdering::empty(n)]);
    }
    let words: Vec<Vec<usize>> =
        if r == 1 { vec![Vec::new()] } else { (0..r - 1).map(|_| 0..n).multi_cartesian_product().collect() };
    let mut out = Vec::with_capacity(count as usize);
    for perm in sorted.iter().cloned().permutations(r) {
        for w in &words {
            out.push(NOrdering { labels: perm.clone(), word: w.clone(), n });
        }
    }
    Ok(out)
}

/// Order and branching data of an n-ordering against a fixed alphabet, for
/// constant-time pair lookups.
struct Profile {
    pos: Vec<usize>,
    level: Vec<usize>,
    r: usize,
}

impl Profile {
    fn new(s: &NOrdering, index: &HashMap<&str, usize>) -> Self {
        let r = s.len();
        let mut pos = vec![0; r];
        for (p, l) in s.labels.iter().enumerate() {
            pos[index[l.as_str()]] = p;
        }
        let mut level = vec![0; r * r];
        for a in 0..r {
            for b in 0..r {
                if a != b {
                    level[a * r + b] = s.branching_at(pos[a], pos[b]);
                }
            }
        }
        Self { pos, level, r }
    }

    fn leq(&self, t: &Profile) -> bool {
        let r = self.r;
        for a in 0..r {
            for b in (a + 1)..r {
                let (bs, bt) = (self.level[a * r + b], t.level[a * r + b]);
                if bt > bs || (bt == bs && (self.pos[a] < self.pos[b]) != (t.pos[a] < t.pos[b])) {
                    return false;
                }
            }
        }
        true
    }
}

/// nOrd(A) with its order relation tabulated.
pub struct PosetView {
    elements: Vec<NOrdering>,
    poset: Poset,
    index: HashMap<NOrdering, usize>,
}

impl PosetView {
    pub fn new(elements: Vec<NOrdering>) -> Result<Self, NordError> {
        if let Some(first) = elements.first() {
            if elements.iter().any(|e| !e.same_set(first)) {
                return Err(NordError::LabelMismatch);
            }
        }
        let alphabet: HashMap<&str, usize> = elements
            .first()
            .map(|e| e.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect())
            .unwrap_or_default();
        let profiles: Vec<Profile> = elements.iter().map(|e| Profile::new(e, &alphabet)).collect();
        let poset = Poset::from_relation(elements.len(), |i, j| profiles[i].leq(&profiles[j]));
        let index = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        Ok(Self { elements, poset, index })
    }

    /// nOrd(A) in its deterministic enumeration order.
    pub fn of<S: AsRef<str>>(labels: &[S], n: usize, cap: usize) -> Result<Self, NordError> {
        Self::new(enumerate_nord(labels, n, cap)?)
    }

    pub fn elements(&self) -> &[NOrdering] {
        &self.elements
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn index_of(&self, s: &NOrdering) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.poset.leq(i, j)
    }

    /// Hasse diagram edges `(lower, upper)` as element indices.
    pub fn hasse(&self) -> Vec<(usize, usize)> {
        self.poset.covers()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ord(text: &str, n: usize) -> NOrdering {
        NOrdering::parse_text(text, n).unwrap()
    }

    fn swap_ab() -> BTreeMap<String, String> {
        [("a", "b"), ("b", "a")].into_iter().map(|(x, y)| (x.to_string(), y.to_string())).collect()
    }

    // S, T, U, V of the four 2-orderings of {a, b}
    fn stuv() -> [NOrdering; 4] {
        [ord("a 0 b", 2), ord("b 0 a", 2), ord("a 1 b", 2), ord("b 1 a", 2)]
    }

    #[test]
    fn trees_of_the_two_leaf_orderings() {
        let [s, _, u, _] = stuv();
        assert_eq!(s.to_tree().render_symbol(), "[2]([1],[1])");
        assert_eq!(u.to_tree().render_symbol(), "[1]([2])");
        assert_eq!(NOrdering::empty(3).to_tree(), PlanarLevelTree::root());
        assert_eq!(ord("x", 3).to_tree().render_symbol(), "[1]([1]([1]))");
    }

    #[test]
    fn from_tree_inverts_to_tree() {
        for n in 1..=3 {
            for s in enumerate_nord(&["a", "b", "c", "d"], n, 10_000).unwrap() {
                assert_eq!(NOrdering::from_tree(&s.to_tree(), s.labels.clone(), n).unwrap(), s);
            }
        }
        let bad = PlanarLevelTree::parse_symbol("[2]([0],[1])", 2).unwrap();
        assert!(NOrdering::from_tree(&bad, vec!["a".into()], 2).is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_nord(&["a", "b"], 2, 100).unwrap().len(), 4);
        assert_eq!(enumerate_nord(&["a", "b", "c"], 1, 100).unwrap().len(), 6);
        assert_eq!(enumerate_nord(&["a", "b", "c"], 2, 100).unwrap().len(), 24);
        assert_eq!(enumerate_nord::<&str>(&[], 2, 100).unwrap(), vec![NOrdering::empty(2)]);
        assert!(matches!(enumerate_nord(&["a", "b", "c"], 2, 10), Err(NordError::TooMany { count: 24, cap: 10 })));
        assert!(enumerate_nord(&["a", "a"], 2, 10).is_err());
    }

    #[test]
    fn enumeration_order_is_deterministic() {
        let all = enumerate_nord(&["b", "a"], 2, 100).unwrap();
        let text: Vec<_> = all.iter().map(|s| s.to_string()).collect();
        assert_eq!(text, ["a 0 b", "a 1 b", "b 0 a", "b 1 a"]);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, all);
    }

    #[test]
    fn order_on_two_points() {
        let [s, t, u, v] = stuv();
        assert!(leq(&u, &t).unwrap());
        assert!(!leq(&u, &v).unwrap());
        assert!(leq(&s, &s).unwrap());
        assert!(!leq(&s, &u).unwrap());
        assert!(!leq(&s, &t).unwrap());
        assert_eq!(leq(&s, &ord("a 0 c", 2)), Err(NordError::LabelMismatch));
    }

    #[test]
    fn hasse_of_small_posets() {
        let view = PosetView::of(&["a", "b"], 2, 100).unwrap();
        let mut edges: Vec<_> = view
            .hasse()
            .into_iter()
            .map(|(i, j)| (view.elements()[i].to_string(), view.elements()[j].to_string()))
            .collect();
        edges.sort();
        let expected = [("a 1 b", "a 0 b"), ("a 1 b", "b 0 a"), ("b 1 a", "a 0 b"), ("b 1 a", "b 0 a")];
        assert_eq!(edges, expected.map(|(x, y)| (x.to_string(), y.to_string())));

        assert!(PosetView::of(&["a", "b"], 1, 100).unwrap().hasse().is_empty());
        let single = PosetView::of(&["a"], 3, 100).unwrap();
        assert_eq!(single.len(), 1);
        assert!(single.hasse().is_empty());
    }

    #[test]
    fn degrees() {
        let [s, _, u, _] = stuv();
        assert_eq!(s.degree(), 4);
        assert_eq!(u.degree(), 3);
        assert_eq!(NOrdering::empty(2).degree(), 0);
        for n in 1..=3 {
            for s in enumerate_nord(&["a", "b", "c", "d"], n, 10_000).unwrap() {
                assert_eq!(s.degree(), s.to_tree().edge_count());
            }
        }
    }

    #[test]
    fn relabelling() {
        let [s, t, u, v] = stuv();
        let id: BTreeMap<String, String> = ["a", "b"].iter().map(|x| (x.to_string(), x.to_string())).collect();
        assert_eq!(s.sigma_act(&id).unwrap(), s);
        assert_eq!(s.sigma_act(&swap_ab()).unwrap(), t);
        assert_eq!(u.sigma_act(&swap_ab()).unwrap(), v);
        let not_perm: BTreeMap<String, String> =
            [("a", "a"), ("b", "a")].into_iter().map(|(x, y)| (x.into(), y.into())).collect();
        assert!(s.sigma_act(&not_perm).is_err());
    }

    #[test]
    fn branching_levels_follow_min_rule_on_trees() {
        for n in 1..=3 {
            for s in enumerate_nord(&["a", "b", "c", "d"], n, 10_000).unwrap() {
                let tree = s.to_tree();
                let leaves = tree.level_n_leaves(n);
                for i in 0..s.len() {
                    for j in 0..s.len() {
                        if i != j {
                            assert_eq!(tree.branching_level(n, &leaves[i], &leaves[j]).unwrap(), s.branching_at(i, j));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn text_and_json_forms() {
        let s = ord("a 1 b 0 c", 2);
        assert_eq!(s.to_string(), "a 1 b 0 c");
        assert_eq!(s.word(), &[1, 0]);
        assert!(NOrdering::parse_text("a 2 b", 2).is_err());
        assert!(NOrdering::parse_text("a 0", 2).is_err());
        assert!(NOrdering::parse_text("a 0 a", 2).is_err());
        assert_eq!(NOrdering::parse_text("", 2).unwrap(), NOrdering::empty(2));
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"labels":["a","b","c"],"word":[1,0],"n":2}"#);
        assert_eq!(serde_json::from_str::<NOrdering>(&json).unwrap(), s);
        assert!(serde_json::from_str::<NOrdering>(r#"{"labels":["a"],"word":[0],"n":2}"#).is_err());
    }

    #[test]
    fn fast_relation_matches_leq() {
        for n in 1..=3 {
            let view = PosetView::of(&["a", "b", "c"], n, 10_000).unwrap();
            for (i, s) in view.elements().iter().enumerate() {
                for (j, t) in view.elements().iter().enumerate() {
                    assert_eq!(view.leq(i, j), leq(s, t).unwrap());
                }
            }
        }
    }
}
