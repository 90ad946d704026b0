//! The categories Θ_n = Δ ≀ Θ_{n-1} with Θ_1 = Δ.
//!
//! Objects are planar level trees. A morphism `S → T` of level `n` is a
//! monotone map `f: [s] → [t]` on the level-1 vertices together with a
//! level-`(n-1)` morphism `S_i → T_j` for each pair with
//! `f(i-1) < j ≤ f(i)` (1-based). Morphisms do not carry their endpoints;
//! they are interpreted against an explicit `(S, T, n)` triple.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::gamma::{enumerate_delta, DeltaMorphism, GammaError, GammaMorphism};
use crate::tree::{LeafId, PlanarLevelTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThetaError {
    #[error("structural mismatch: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error("target tree {0} is not healthy at height {1}")]
    UnhealthyTarget(String, usize),
    #[error("Γ-morphism is not active")]
    Inactive,
    #[error("Γ-morphism violates the branching condition")]
    BranchingCondition,
    #[error("more than {cap} morphisms")]
    TooMany { cap: usize },
}

fn mismatch(msg: impl Into<String>) -> ThetaError {
    ThetaError::Mismatch(msg.into())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ThetaMorphism {
    level: usize,
    delta: Vec<usize>,
    parts: BTreeMap<(usize, usize), ThetaMorphism>,
}

/// Pairs `(i, j)`, 1-based, with `f(i-1) < j ≤ f(i)`.
fn block_pairs(delta: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    delta.windows(2).enumerate().flat_map(|(k, w)| ((w[0] + 1)..=w[1]).map(move |j| (k + 1, j)))
}

impl ThetaMorphism {
    /// A level-1 morphism, i.e. a map of Δ given by its values.
    pub fn from_delta(delta: Vec<usize>) -> Self {
        Self { level: 1, delta, parts: BTreeMap::new() }
    }

    pub fn new(level: usize, delta: Vec<usize>, parts: BTreeMap<(usize, usize), ThetaMorphism>) -> Self {
        Self { level, delta, parts }
    }

    pub fn identity(tree: &PlanarLevelTree, n: usize) -> Self {
        let delta = (0..=tree.arity()).collect();
        let parts = if n > 1 {
            tree.children().iter().enumerate().map(|(k, c)| ((k + 1, k + 1), Self::identity(c, n - 1))).collect()
        } else {
            BTreeMap::new()
        };
        Self { level: n, delta, parts }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Values `f(0), …, f(s)` of the Δ-part.
    pub fn delta(&self) -> &[usize] {
        &self.delta
    }

    pub fn delta_morphism(&self, target_rank: usize) -> Result<DeltaMorphism, GammaError> {
        DeltaMorphism::new(self.delta.clone(), target_rank)
    }

    /// The part `S_i → T_j`, 1-based.
    pub fn part(&self, i: usize, j: usize) -> Option<&ThetaMorphism> {
        self.parts.get(&(i, j))
    }

    pub fn parts(&self) -> &BTreeMap<(usize, usize), ThetaMorphism> {
        &self.parts
    }

    /// Check that this is a morphism `s → t` in Θ_n.
    pub fn validate(&self, s: &PlanarLevelTree, t: &PlanarLevelTree, n: usize) -> Result<(), ThetaError> {
        if n == 0 || self.level != n {
            return Err(mismatch(format!("morphism of level {} used at level {n}", self.level)));
        }
        if s.height() > n || t.height() > n {
            return Err(mismatch(format!("trees {s} or {t} are taller than {n}")));
        }
        if self.delta.len() != s.arity() + 1 {
            return Err(mismatch(format!("Δ-part has {} values for source {s}", self.delta.len())));
        }
        DeltaMorphism::new(self.delta.clone(), t.arity())?;
        if n == 1 {
            if !self.parts.is_empty() {
                return Err(mismatch("level-1 morphism with parts"));
            }
            return Ok(());
        }
        let expected: Vec<_> = block_pairs(&self.delta).collect();
        if expected.len() != self.parts.len() || expected.iter().any(|k| !self.parts.contains_key(k)) {
            return Err(mismatch(format!("parts indexed by {:?}, expected {expected:?}", self.parts.keys())));
        }
        for (&(i, j), part) in &self.parts {
            part.validate(&s.children()[i - 1], &t.children()[j - 1], n - 1)?;
        }
        Ok(())
    }
}

/// γ_n on objects: the level-`n` leaves in planar order.
pub fn assemble_object(s: &PlanarLevelTree, n: usize) -> Vec<LeafId> {
    s.level_n_leaves(n)
}

// Images of the level-n leaves of `s`, in planar order, as leaf ids of `t`.
// Assumes `f` has been validated against (s, t, n).
fn leaf_images(f: &ThetaMorphism, s: &PlanarLevelTree, t: &PlanarLevelTree, n: usize) -> Vec<Vec<LeafId>> {
    if n == 1 {
        return f.delta.windows(2).map(|w| (w[0]..w[1]).map(|j| LeafId::new(vec![j])).collect()).collect();
    }
    let mut out = Vec::new();
    for (k, child) in s.children().iter().enumerate() {
        let i = k + 1;
        let mut images = vec![Vec::new(); child.count_level_leaves(n - 1)];
        for j in (f.delta[k] + 1)..=f.delta[k + 1] {
            let sub = leaf_images(&f.parts[&(i, j)], child, &t.children()[j - 1], n - 1);
            for (img, sub_img) in images.iter_mut().zip(sub) {
                img.extend(sub_img.into_iter().map(|l| l.under(j - 1)));
            }
        }
        out.extend(images);
    }
    out
}

/// γ_n on morphisms: the induced Γ-morphism between level-`n` leaf sets.
pub fn assemble_morphism(
    f: &ThetaMorphism,
    s: &PlanarLevelTree,
    t: &PlanarLevelTree,
    n: usize,
) -> Result<GammaMorphism<LeafId>, ThetaError> {
    f.validate(s, t, n)?;
    let target = t.level_n_leaves(n);
    let images = leaf_images(f, s, t, n)
        .into_iter()
        .map(|img| img.iter().map(|l| target.binary_search(l).expect("image is a leaf of the target")).collect())
        .collect();
    Ok(GammaMorphism::from_indices(s.level_n_leaves(n), target, images)?)
}

/// `g ∘ f`.
pub fn theta_compose(g: &ThetaMorphism, f: &ThetaMorphism) -> Result<ThetaMorphism, ThetaError> {
    if g.level != f.level {
        return Err(mismatch(format!("levels {} and {} differ", g.level, f.level)));
    }
    if f.delta.iter().any(|&v| v >= g.delta.len()) {
        return Err(mismatch("Δ-part of f leaves the source of g"));
    }
    let delta: Vec<usize> = f.delta.iter().map(|&v| g.delta[v]).collect();
    let mut parts = BTreeMap::new();
    if f.level > 1 {
        for (i, k) in block_pairs(&delta) {
            // the unique j with f(i-1) < j <= f(i) and g(j-1) < k <= g(j)
            let j = ((f.delta[i - 1] + 1)..=f.delta[i])
                .find(|&j| g.delta[j - 1] < k && k <= g.delta[j])
                .ok_or_else(|| mismatch("composite block not covered"))?;
            let fij = f.parts.get(&(i, j)).ok_or_else(|| mismatch(format!("f lacks part ({i},{j})")))?;
            let gjk = g.parts.get(&(j, k)).ok_or_else(|| mismatch(format!("g lacks part ({j},{k})")))?;
            parts.insert((i, k), theta_compose(gjk, fij)?);
        }
    }
    Ok(ThetaMorphism { level: f.level, delta, parts })
}

/// True iff γ_n(f) is active.
pub fn theta_is_active(
    f: &ThetaMorphism,
    s: &PlanarLevelTree,
    t: &PlanarLevelTree,
    n: usize,
) -> Result<bool, ThetaError> {
    Ok(assemble_morphism(f, s, t, n)?.is_active())
}

fn check_endpoints(
    s: &PlanarLevelTree,
    t: &PlanarLevelTree,
    n: usize,
    gbar: &GammaMorphism<LeafId>,
) -> Result<(), ThetaError> {
    if !t.is_healthy(n) || t.height() > n {
        return Err(ThetaError::UnhealthyTarget(t.render_symbol(), n));
    }
    if gbar.source() != s.level_n_leaves(n).as_slice() || gbar.target() != t.level_n_leaves(n).as_slice() {
        return Err(mismatch("Γ-morphism is not a map between the level-n leaves of the given trees"));
    }
    Ok(())
}

/// The branching condition for `gbar: γ_n(S) → γ_n(T)`: for distinct
/// `a, b` and `c ∈ gbar(a)`, `d ∈ gbar(b)`, `b_T(c,d) ≤ b_S(a,b)`, with
/// equality only if `c, d` are ordered in `T` as `a, b` are in `S`.
///
/// Activity of `gbar` is not checked here.
pub fn branching_condition_holds(
    s: &PlanarLevelTree,
    t: &PlanarLevelTree,
    n: usize,
    gbar: &GammaMorphism<LeafId>,
) -> Result<bool, ThetaError> {
    check_endpoints(s, t, n, gbar)?;
    Ok(branching_condition_unchecked(gbar))
}

fn branching_condition_unchecked(gbar: &GammaMorphism<LeafId>) -> bool {
    let source = gbar.source();
    for ia in 0..source.len() {
        for ib in (ia + 1)..source.len() {
            // source is in planar order, so a <_S b
            let level_s = source[ia].common_prefix(&source[ib]);
            for c in gbar.image(ia) {
                for d in gbar.image(ib) {
                    let level_t = c.common_prefix(d);
                    if level_t > level_s || (level_t == level_s && c > d) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// The unique morphism `f: S → T` with `γ_n(f) = gbar`, for `T` healthy and
/// `gbar` active and satisfying the branching condition.
pub fn lift_active(
    s: &PlanarLevelTree,
    t: &PlanarLevelTree,
    n: usize,
    gbar: &GammaMorphism<LeafId>,
) -> Result<ThetaMorphism, ThetaError> {
    check_endpoints(s, t, n, gbar)?;
    if s.height() > n {
        return Err(mismatch(format!("source {s} is taller than {n}")));
    }
    if !gbar.is_active() {
        return Err(ThetaError::Inactive);
    }
    if !branching_condition_unchecked(gbar) {
        return Err(ThetaError::BranchingCondition);
    }
    let images: Vec<Vec<LeafId>> = (0..gbar.source().len()).map(|i| gbar.image(i).cloned().collect()).collect();
    let f = lift_rec(s, t, n, &images)?;
    debug_assert_eq!(assemble_morphism(&f, s, t, n).as_ref(), Ok(gbar));
    Ok(f)
}

fn lift_rec(
    s: &PlanarLevelTree,
    t: &PlanarLevelTree,
    n: usize,
    images: &[Vec<LeafId>],
) -> Result<ThetaMorphism, ThetaError> {
    // Each level-1 vertex S_i of the source must land on a contiguous run
    // T_{r_{i-1}+1}, …, T_{r_i} of level-1 vertices of the target.
    let mut cuts = vec![0usize];
    let mut leaf = 0;
    let mut per_child = Vec::with_capacity(s.arity());
    for child in s.children() {
        let count = if n == 1 { 1 } else { child.count_level_leaves(n - 1) };
        let block = &images[leaf..leaf + count];
        leaf += count;
        let mut heads: Vec<usize> = block.iter().flatten().map(|l| l.head().unwrap() + 1).collect();
        heads.sort_unstable();
        heads.dedup();
        let prev = *cuts.last().unwrap();
        let next = match (heads.first(), heads.last()) {
            (None, _) | (_, None) => prev,
            (Some(&lo), Some(&hi)) => {
                if lo != prev + 1 || hi - lo + 1 != heads.len() {
                    return Err(ThetaError::BranchingCondition);
                }
                hi
            }
        };
        cuts.push(next);
        per_child.push(block);
    }
    if *cuts.last().unwrap() != t.arity() {
        return Err(ThetaError::Inactive);
    }
    let mut parts = BTreeMap::new();
    if n > 1 {
        for (k, block) in per_child.iter().enumerate() {
            for j in (cuts[k] + 1)..=cuts[k + 1] {
                let sub: Vec<Vec<LeafId>> = block
                    .iter()
                    .map(|img| img.iter().filter(|l| l.head() == Some(j - 1)).map(LeafId::tail).collect())
                    .collect();
                let part = lift_rec(&s.children()[k], &t.children()[j - 1], n - 1, &sub)?;
                parts.insert((k + 1, j), part);
            }
        }
    }
    Ok(ThetaMorphism { level: n, delta: cuts, parts })
}

/// Every morphism `S → T` in Θ_n, by recursion over the Δ-part and then the
/// parts. Optionally filtered to active morphisms. Fails once more than
/// `cap` morphisms would be produced at any stage.
pub fn enumerate_hom_bruteforce(
    s: &PlanarLevelTree,
    t: &PlanarLevelTree,
    n: usize,
    active_only: bool,
    cap: usize,
) -> Result<Vec<ThetaMorphism>, ThetaError> {
    if n == 0 || s.height() > n || t.height() > n {
        return Err(mismatch(format!("trees {s}, {t} are not objects of Θ_{n}")));
    }
    let all = all_homs(s, t, n, cap)?;
    if !active_only {
        return Ok(all);
    }
    let mut out = Vec::new();
    for f in all {
        if theta_is_active(&f, s, t, n)? {
            out.push(f);
        }
    }
    Ok(out)
}

fn all_homs(s: &PlanarLevelTree, t: &PlanarLevelTree, n: usize, cap: usize) -> Result<Vec<ThetaMorphism>, ThetaError> {
    let deltas = enumerate_delta(s.arity(), t.arity(), cap).map_err(|_| ThetaError::TooMany { cap })?;
    if n == 1 {
        return Ok(deltas.into_iter().map(|d| ThetaMorphism::from_delta(d.into_values())).collect());
    }
    let mut lower: BTreeMap<(usize, usize), Vec<ThetaMorphism>> = BTreeMap::new();
    let mut out = Vec::new();
    for d in deltas {
        let values = d.into_values();
        let pairs: Vec<_> = block_pairs(&values).collect();
        for &(i, j) in &pairs {
            if let std::collections::btree_map::Entry::Vacant(e) = lower.entry((i, j)) {
                e.insert(all_homs(&s.children()[i - 1], &t.children()[j - 1], n - 1, cap)?);
            }
        }
        let choices: Vec<&Vec<ThetaMorphism>> = pairs.iter().map(|k| &lower[k]).collect();
        let count = choices.iter().try_fold(1usize, |acc, c| acc.checked_mul(c.len()));
        match count {
            Some(c) if out.len() + c <= cap => {}
            _ => return Err(ThetaError::TooMany { cap }),
        }
        if choices.iter().any(|c| c.is_empty()) {
            continue;
        }
        let mut idx = vec![0usize; pairs.len()];
        loop {
            let parts = pairs.iter().zip(&idx).zip(&choices).map(|((&k, &x), c)| (k, c[x].clone())).collect();
            out.push(ThetaMorphism { level: n, delta: values.clone(), parts });
            let Some(p) = (0..idx.len()).rev().find(|&p| idx[p] + 1 < choices[p].len()) else {
                break;
            };
            idx[p] += 1;
            for x in &mut idx[p + 1..] {
                *x = 0;
            }
        }
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct ThetaJson {
    n: usize,
    delta: Vec<usize>,
    #[serde(default)]
    parts: BTreeMap<String, ThetaMorphism>,
}

impl Serialize for ThetaMorphism {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ThetaJson {
            n: self.level,
            delta: self.delta.clone(),
            parts: self.parts.iter().map(|(&(i, j), p)| (format!("{i},{j}"), p.clone())).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ThetaMorphism {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = ThetaJson::deserialize(deserializer)?;
        let mut parts = BTreeMap::new();
        for (key, part) in raw.parts {
            let parsed = key
                .split_once(',')
                .and_then(|(i, j)| Some((i.trim().parse().ok()?, j.trim().parse().ok()?)))
                .ok_or_else(|| serde::de::Error::custom(format!("bad part key {key:?}")))?;
            parts.insert(parsed, part);
        }
        Ok(ThetaMorphism { level: raw.n, delta: raw.delta, parts })
    }
}
