//! Planar level trees of bounded height.
//!
//! A tree is stored as its ordered list of child subtrees. The height bound
//! `n` is never stored: every query that depends on it takes `n` explicitly,
//! because a tree of height `n` is also a tree of height `n + k`.
//!
//! Trees are written in bracket notation: `[s]` is a vertex with `s` leaf
//! children and `[s](T_1,...,T_s)` a vertex whose children are the listed
//! subtrees, so `[4]([2],[3],[0],[1])` has four level-1 vertices carrying
//! 2, 3, 0 and 1 level-2 leaves.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// A rooted tree with a linear order on the children of every vertex.
///
/// The JSON form is the nested array of children, so the root-only tree is
/// `[]` and `[2]([1],[1])` is `[[[]],[[]]]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlanarLevelTree {
    children: Vec<PlanarLevelTree>,
}

/// Address of a vertex: the child indices (0-based) followed from the root.
///
/// Paths compare lexicographically, which for leaves of a common level is
/// exactly the left-to-right planar order. Displayed 1-based and dotted,
/// e.g. `2.1` is the first child of the second level-1 vertex.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LeafId(Vec<usize>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("vertex at byte {pos} declares {declared} children but lists {found}")]
    ArityMismatch { pos: usize, declared: usize, found: usize },
    #[error("tree has height {height}, exceeding n = {n}")]
    TooTall { height: usize, n: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("{0} is not a level-{1} leaf of the tree")]
    NotALeaf(LeafId, usize),
    #[error("branching level of a leaf with itself ({0}) is undefined")]
    IdenticalLeaves(LeafId),
}

impl PlanarLevelTree {
    /// The tree consisting of the root alone.
    pub fn root() -> Self {
        Self::default()
    }

    pub fn new(children: Vec<PlanarLevelTree>) -> Self {
        Self { children }
    }

    /// `[s]`: a root with `s` leaf children.
    pub fn corolla(s: usize) -> Self {
        Self::new(vec![Self::root(); s])
    }

    pub fn children(&self) -> &[PlanarLevelTree] {
        &self.children
    }

    pub fn arity(&self) -> usize {
        self.children.len()
    }

    pub fn is_root_only(&self) -> bool {
        self.children.is_empty()
    }

    /// Maximum vertex level.
    pub fn height(&self) -> usize {
        self.children.iter().map(|c| c.height() + 1).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.children.iter().map(|c| c.edge_count() + 1).sum()
    }

    /// The subtree rooted at the vertex addressed by `path`.
    pub fn subtree(&self, path: &[usize]) -> Option<&PlanarLevelTree> {
        let mut node = self;
        for &i in path {
            node = node.children.get(i)?;
        }
        Some(node)
    }

    /// Leaves at level exactly `n`, in planar order.
    pub fn level_n_leaves(&self, n: usize) -> Vec<LeafId> {
        let mut out = Vec::new();
        let mut path = Vec::with_capacity(n);
        self.collect_leaves(n, &mut path, &mut out);
        out
    }

    fn collect_leaves(&self, n: usize, path: &mut Vec<usize>, out: &mut Vec<LeafId>) {
        if path.len() == n {
            if self.children.is_empty() {
                out.push(LeafId(path.clone()));
            }
            return;
        }
        for (i, c) in self.children.iter().enumerate() {
            path.push(i);
            c.collect_leaves(n, path, out);
            path.pop();
        }
    }

    /// Number of leaves at level exactly `n`.
    pub fn count_level_leaves(&self, n: usize) -> usize {
        if n == 0 {
            return usize::from(self.children.is_empty());
        }
        self.children.iter().map(|c| c.count_level_leaves(n - 1)).sum()
    }

    /// True iff no vertex at levels `1..n-1` is childless.
    pub fn is_healthy(&self, n: usize) -> bool {
        fn check(t: &PlanarLevelTree, level: usize, n: usize) -> bool {
            if level >= 1 && level < n && t.children.is_empty() {
                return false;
            }
            t.children.iter().all(|c| check(c, level + 1, n))
        }
        check(self, 0, n)
    }

    /// The subtree spanned by the root and the vertices with a level-`n`
    /// descendant.
    pub fn healthify(&self, n: usize) -> PlanarLevelTree {
        fn prune(t: &PlanarLevelTree, remaining: usize) -> Option<PlanarLevelTree> {
            if remaining == 0 {
                return Some(PlanarLevelTree::root());
            }
            let kept: Vec<_> = t.children.iter().filter_map(|c| prune(c, remaining - 1)).collect();
            if kept.is_empty() {
                None
            } else {
                Some(PlanarLevelTree::new(kept))
            }
        }
        if n == 0 {
            return PlanarLevelTree::root();
        }
        prune(self, n).unwrap_or_default()
    }

    pub fn is_level_n_leaf(&self, n: usize, leaf: &LeafId) -> bool {
        leaf.level() == n && self.subtree(leaf.path()).is_some_and(|t| t.is_root_only())
    }

    /// Level of the deepest common ancestor of two distinct level-`n` leaves.
    pub fn branching_level(&self, n: usize, a: &LeafId, b: &LeafId) -> Result<usize, TreeError> {
        for leaf in [a, b] {
            if !self.is_level_n_leaf(n, leaf) {
                return Err(TreeError::NotALeaf(leaf.clone(), n));
            }
        }
        if a == b {
            return Err(TreeError::IdenticalLeaves(a.clone()));
        }
        Ok(a.common_prefix(b))
    }

    /// Parse bracket notation, rejecting trees taller than `n`.
    pub fn parse_symbol(text: &str, n: usize) -> Result<Self, ParseError> {
        let tree: PlanarLevelTree = text.parse()?;
        let height = tree.height();
        if height > n {
            return Err(ParseError::TooTall { height, n });
        }
        Ok(tree)
    }

    /// Canonical bracket notation. A vertex whose children are all leaves is
    /// written `[s]` without an argument list.
    pub fn render_symbol(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out);
        out
    }

    fn render_into(&self, out: &mut String) {
        use std::fmt::Write;
        let _ = write!(out, "[{}]", self.children.len());
        if self.children.iter().all(|c| c.is_root_only()) {
            return;
        }
        out.push('(');
        for (i, c) in self.children.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            c.render_into(out);
        }
        out.push(')');
    }

    /// Parse the nested-array JSON form.
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

impl fmt::Display for PlanarLevelTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_symbol())
    }
}

impl FromStr for PlanarLevelTree {
    type Err = ParseError;

    /// Parse bracket notation without a height bound.
    fn from_str(text: &str) -> Result<Self, ParseError> {
        let mut p = SymbolParser { src: text.as_bytes(), pos: 0 };
        let tree = p.tree()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.syntax("trailing input"));
        }
        Ok(tree)
    }
}

struct SymbolParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl SymbolParser<'_> {
    fn syntax(&self, msg: &str) -> ParseError {
        ParseError::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, byte: u8) -> Result<(), ParseError> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax(&format!("expected '{}'", byte as char)))
        }
    }

    fn nat(&mut self) -> Result<usize, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("expected a natural number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(ParseError::Syntax { pos: start, msg: "number out of range".into() })
    }

    fn tree(&mut self) -> Result<PlanarLevelTree, ParseError> {
        self.skip_ws();
        let start = self.pos;
        self.expect(b'[')?;
        let declared = self.nat()?;
        self.expect(b']')?;
        if self.peek() != Some(b'(') {
            return Ok(PlanarLevelTree::corolla(declared));
        }
        self.pos += 1;
        let mut children = vec![self.tree()?];
        loop {
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                    children.push(self.tree()?);
                }
                Some(b')') => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.syntax("expected ',' or ')'")),
            }
        }
        if children.len() != declared {
            return Err(ParseError::ArityMismatch { pos: start, declared, found: children.len() });
        }
        Ok(PlanarLevelTree::new(children))
    }
}

impl LeafId {
    pub fn new(path: Vec<usize>) -> Self {
        Self(path)
    }

    pub fn path(&self) -> &[usize] {
        &self.0
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }

    /// Index of the level-1 subtree containing this vertex.
    pub fn head(&self) -> Option<usize> {
        self.0.first().copied()
    }

    /// The same vertex addressed inside its level-1 subtree.
    pub fn tail(&self) -> LeafId {
        LeafId(self.0.get(1..).unwrap_or_default().to_vec())
    }

    /// Address inside the parent tree when this id lives in child `i`.
    pub fn under(&self, i: usize) -> LeafId {
        let mut path = Vec::with_capacity(self.0.len() + 1);
        path.push(i);
        path.extend_from_slice(&self.0);
        LeafId(path)
    }

    /// Length of the longest common prefix, i.e. the level of the deepest
    /// common ancestor.
    pub fn common_prefix(&self, other: &LeafId) -> usize {
        self.0.iter().zip(&other.0).take_while(|(x, y)| x == y).count()
    }
}

impl fmt::Display for LeafId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{}", i + 1)?;
        }
        Ok(())
    }
}

impl FromStr for LeafId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "root" {
            return Ok(LeafId(Vec::new()));
        }
        s.split('.')
            .map(|part| match part.trim().parse::<usize>() {
                Ok(i) if i >= 1 => Ok(i - 1),
                _ => Err(format!("invalid leaf id component {part:?} in {s:?}")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(LeafId)
    }
}

impl Serialize for LeafId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LeafId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All planar trees with exactly `edges` edges and height at most `max_height`.
pub fn trees_with_edges(edges: usize, max_height: usize) -> Vec<PlanarLevelTree> {
    TreeEnumerator::default().trees(edges, max_height)
}

/// All planar trees with at most `max_edges` edges and height at most
/// `max_height`, ordered by edge count.
pub fn trees_up_to(max_edges: usize, max_height: usize) -> Vec<PlanarLevelTree> {
    let mut e = TreeEnumerator::default();
    (0..=max_edges).flat_map(|k| e.trees(k, max_height)).collect()
}

#[derive(Default)]
struct TreeEnumerator {
    trees: HashMap<(usize, usize), Vec<PlanarLevelTree>>,
    forests: HashMap<(usize, usize), Vec<Vec<PlanarLevelTree>>>,
}

impl TreeEnumerator {
    fn trees(&mut self, edges: usize, height: usize) -> Vec<PlanarLevelTree> {
        if let Some(v) = self.trees.get(&(edges, height)) {
            return v.clone();
        }
        let out = if edges == 0 {
            vec![PlanarLevelTree::root()]
        } else if height == 0 {
            Vec::new()
        } else {
            self.forests(edges, height - 1).into_iter().map(PlanarLevelTree::new).collect()
        };
        self.trees.insert((edges, height), out.clone());
        out
    }

    // Sequences of trees of height <= `height` whose edge counts plus one sum to `edges`.
    fn forests(&mut self, edges: usize, height: usize) -> Vec<Vec<PlanarLevelTree>> {
        if let Some(v) = self.forests.get(&(edges, height)) {
            return v.clone();
        }
        let mut out = Vec::new();
        if edges == 0 {
            out.push(Vec::new());
        } else {
            for first_size in 1..=edges {
                let firsts = self.trees(first_size - 1, height);
                if firsts.is_empty() {
                    continue;
                }
                let rests = self.forests(edges - first_size, height);
                for first in &firsts {
                    for rest in &rests {
                        let mut f = Vec::with_capacity(rest.len() + 1);
                        f.push(first.clone());
                        f.extend(rest.iter().cloned());
                        out.push(f);
                    }
                }
            }
        }
        self.forests.insert((edges, height), out.clone());
        out
    }
}
