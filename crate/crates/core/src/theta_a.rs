//! Θ_n(A): objects of Θ_n whose level-`n` leaves are labelled by `A`, and
//! morphisms compatible with the labellings.
//!
//! The category has infinitely many objects, so it is never materialised.
//! Morphism existence is decided for healthy targets, where a morphism is
//! unique when it exists.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gamma::GammaMorphism;
use crate::nord::{enumerate_nord, leq, NOrdering, NordError};
use crate::theta::{
    assemble_morphism, branching_condition_holds, enumerate_hom_bruteforce, lift_active, theta_compose, ThetaError,
    ThetaMorphism,
};
use crate::tree::{LeafId, PlanarLevelTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThetaAError {
    #[error("invalid labelled object: {0}")]
    Invalid(String),
    #[error("objects are labelled by different sets or live at different heights")]
    LabelMismatch,
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Nord(#[from] NordError),
}

/// A tree of height at most `n` with its level-`n` leaves labelled, in
/// planar order, by distinct labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "LabelledJson", into = "LabelledJson")]
pub struct LabelledThetaObject {
    tree: PlanarLevelTree,
    n: usize,
    labels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct LabelledJson {
    tree: String,
    n: usize,
    labels: Vec<String>,
}

impl TryFrom<LabelledJson> for LabelledThetaObject {
    type Error = String;

    fn try_from(raw: LabelledJson) -> Result<Self, String> {
        let tree = PlanarLevelTree::parse_symbol(&raw.tree, raw.n).map_err(|e| e.to_string())?;
        LabelledThetaObject::new(tree, raw.n, raw.labels).map_err(|e| e.to_string())
    }
}

impl From<LabelledThetaObject> for LabelledJson {
    fn from(o: LabelledThetaObject) -> Self {
        LabelledJson { tree: o.tree.render_symbol(), n: o.n, labels: o.labels }
    }
}

impl LabelledThetaObject {
    pub fn new(tree: PlanarLevelTree, n: usize, labels: Vec<String>) -> Result<Self, ThetaAError> {
        if n == 0 || tree.height() > n {
            return Err(ThetaAError::Invalid(format!("{tree} is not an object of Θ_{n}")));
        }
        let leaves = tree.count_level_leaves(n);
        if leaves != labels.len() {
            return Err(ThetaAError::Invalid(format!("{} labels for {leaves} level-{n} leaves", labels.len())));
        }
        let mut sorted = labels.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(ThetaAError::Invalid(format!("repeated label in {labels:?}")));
        }
        Ok(Self { tree, n, labels })
    }

    /// Labels `x1, x2, …` in planar order.
    pub fn canonically_labelled(tree: PlanarLevelTree, n: usize) -> Result<Self, ThetaAError> {
        let labels = (1..=tree.count_level_leaves(n)).map(|i| format!("x{i}")).collect();
        Self::new(tree, n, labels)
    }

    pub fn tree(&self) -> &PlanarLevelTree {
        &self.tree
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn is_healthy(&self) -> bool {
        self.tree.is_healthy(self.n)
    }

    fn same_set(&self, other: &Self) -> bool {
        let mut a = self.labels.clone();
        let mut b = other.labels.clone();
        a.sort();
        b.sort();
        self.n == other.n && a == b
    }
}

/// The Γ-bijection `γ_n(S) → γ_n(T)` forced by the labellings.
pub fn label_matching(s: &LabelledThetaObject, t: &LabelledThetaObject) -> Result<GammaMorphism<LeafId>, ThetaAError> {
    if !s.same_set(t) {
        return Err(ThetaAError::LabelMismatch);
    }
    let target = t.tree.level_n_leaves(t.n);
    let position: HashMap<&str, usize> = t.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let images = s.labels.iter().map(|l| vec![position[l.as_str()]]).collect();
    GammaMorphism::from_indices(s.tree.level_n_leaves(s.n), target, images).map_err(|e| ThetaAError::Theta(e.into()))
}

/// Whether a morphism `S → T` exists, for healthy `T`.
pub fn hom_exists(s: &LabelledThetaObject, t: &LabelledThetaObject) -> Result<bool, ThetaAError> {
    let gbar = label_matching(s, t)?;
    Ok(branching_condition_holds(&s.tree, &t.tree, s.n, &gbar)?)
}

/// The unique morphism `S → T` for healthy `T`, if there is one.
pub fn hom(s: &LabelledThetaObject, t: &LabelledThetaObject) -> Result<Option<ThetaMorphism>, ThetaAError> {
    let gbar = label_matching(s, t)?;
    match lift_active(&s.tree, &t.tree, s.n, &gbar) {
        Ok(f) => Ok(Some(f)),
        Err(ThetaError::BranchingCondition) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// All morphisms `S → T` compatible with the labellings, by brute force.
/// Works for unhealthy targets too, at enumeration cost.
pub fn homs_bruteforce(
    s: &LabelledThetaObject,
    t: &LabelledThetaObject,
    cap: usize,
) -> Result<Vec<ThetaMorphism>, ThetaAError> {
    let gbar = label_matching(s, t)?;
    let mut out = Vec::new();
    for f in enumerate_hom_bruteforce(&s.tree, &t.tree, s.n, false, cap)? {
        if assemble_morphism(&f, &s.tree, &t.tree, s.n)? == gbar {
            out.push(f);
        }
    }
    Ok(out)
}

/// The inclusion of nOrd(A) into Θ_n(A).
pub fn embed(s: &NOrdering) -> LabelledThetaObject {
    LabelledThetaObject { tree: s.to_tree(), n: s.n(), labels: s.labels().to_vec() }
}

/// Healthification `S ↦ S^h`, keeping the labels of the surviving leaves.
pub fn retract(s: &LabelledThetaObject) -> NOrdering {
    // healthify keeps every level-n leaf and their planar order
    NOrdering::from_tree(&s.tree.healthify(s.n), s.labels.clone(), s.n).expect("healthification yields an n-ordering")
}

/// The morphism `S → S^h`.
pub fn unit_morphism(s: &LabelledThetaObject) -> Result<Option<ThetaMorphism>, ThetaAError> {
    hom(s, &embed(&retract(s)))
}

pub fn unit_exists(s: &LabelledThetaObject) -> Result<bool, ThetaAError> {
    hom_exists(s, &embed(&retract(s)))
}

/// For every n-ordering `T` of the labels: a morphism `S → i(T)` exists iff
/// `r(S) ≤ T`.
pub fn initiality_check(s: &LabelledThetaObject, cap: usize) -> Result<bool, ThetaAError> {
    let rs = retract(s);
    for t in enumerate_nord(&s.labels, s.n, cap)? {
        if hom_exists(s, &embed(&t))? != leq(&rs, &t)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Naturality of the unit at a morphism `f: S → T`: `η_T ∘ f = i(r(f)) ∘ η_S`.
pub fn unit_naturality_holds(
    s: &LabelledThetaObject,
    t: &LabelledThetaObject,
    f: &ThetaMorphism,
) -> Result<bool, ThetaAError> {
    let (Some(eta_s), Some(eta_t)) = (unit_morphism(s)?, unit_morphism(t)?) else {
        return Ok(false);
    };
    let Some(rf) = hom(&embed(&retract(s)), &embed(&retract(t)))? else {
        return Ok(false);
    };
    Ok(theta_compose(&eta_t, f)? == theta_compose(&rf, &eta_s)?)
}
