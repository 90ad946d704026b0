//! Verification suites with machine-readable reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::fox_neuwirth::{
    cell_of, convexity_probe, equivariance_check, functoriality_check, in_cell, partition_check, test_configurations,
    universal_property_check, witness, CellError,
};
use crate::gamma::{enumerate_gamma, GammaError};
use crate::homology::{homology, HomologyError, OrderComplex};
use crate::nord::{nord_count, NordError, PosetView};
use crate::poset::AxiomViolation;
use crate::theta::{assemble_morphism, branching_condition_holds, enumerate_hom_bruteforce, lift_active, ThetaError};
use crate::theta_a::{
    embed, hom_exists, homs_bruteforce, initiality_check, retract, unit_exists, unit_morphism, unit_naturality_holds,
    LabelledThetaObject, ThetaAError,
};
use crate::tree::{trees_up_to, PlanarLevelTree};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown suite {0:?}; expected one of theorem-a, theorem-b, morphisms, poset, cells")]
    UnknownSuite(String),
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    ThetaA(#[from] ThetaAError),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error(transparent)]
    Nord(#[from] NordError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Cell(#[from] CellError),
}

/// Resource bounds shared by all suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Caps {
    pub max_edges: usize,
    pub max_morphisms: usize,
    pub max_chains: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Self { max_edges: 6, max_morphisms: 1_000_000, max_chains: 1_000_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    TheoremA,
    TheoremB,
    Morphisms,
    Poset,
    Cells,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::TheoremA, Suite::TheoremB, Suite::Morphisms, Suite::Poset, Suite::Cells];
}

impl FromStr for Suite {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, VerifyError> {
        Ok(match s {
            "theorem-a" => Suite::TheoremA,
            "theorem-b" => Suite::TheoremB,
            "morphisms" => Suite::Morphisms,
            "poset" => Suite::Poset,
            "cells" => Suite::Cells,
            _ => return Err(VerifyError::UnknownSuite(s.to_string())),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::TheoremA => "theorem-a",
            Suite::TheoremB => "theorem-b",
            Suite::Morphisms => "morphisms",
            Suite::Poset => "poset",
            Suite::Cells => "cells",
        })
    }
}

const KEPT_FAILURES: usize = 20;
const BRUTE_FORCE_FULLNESS_PAIRS: usize = 10_000;

/// One property checked over `checked` instances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub checked: usize,
    pub failed: usize,
    /// The first few failing instances.
    pub failures: Vec<String>,
}

impl Check {
    fn new(name: &str) -> Self {
        Self { name: name.to_string(), checked: 0, failed: 0, failures: Vec::new() }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < KEPT_FAILURES {
                self.failures.push(what());
            }
        }
    }

    fn merge(&mut self, other: Check) {
        self.checked += other.checked;
        self.failed += other.failed;
        let room = KEPT_FAILURES.saturating_sub(self.failures.len());
        self.failures.extend(other.failures.into_iter().take(room));
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub details: BTreeMap<String, Value>,
}

impl Report {
    fn new(suite: Suite, checks: Vec<Check>, details: BTreeMap<String, Value>) -> Self {
        Self { suite: suite.to_string(), passed: checks.iter().all(Check::passed), checks, details }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {}: {}", self.suite, if self.passed { "PASS" } else { "FAIL" })?;
        for c in &self.checks {
            writeln!(f, "  {:<20} {:>9} checked  {:>5} failed", c.name, c.checked, c.failed)?;
            for w in &c.failures {
                writeln!(f, "    {w}")?;
            }
        }
        for (k, v) in &self.details {
            writeln!(f, "  {k}: {v}")?;
        }
        Ok(())
    }
}

/// Parameters for a suite run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub n: usize,
    pub labels: Vec<String>,
    pub caps: Caps,
    pub seed: u64,
    pub samples: usize,
}

impl SuiteConfig {
    pub fn new<S: AsRef<str>>(n: usize, labels: &[S]) -> Self {
        Self {
            n,
            labels: labels.iter().map(|l| l.as_ref().to_string()).collect(),
            caps: Caps::default(),
            seed: 0,
            samples: 1000,
        }
    }
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Report, VerifyError> {
    match suite {
        Suite::TheoremA => theorem_a(cfg.n, &cfg.labels, cfg.caps),
        Suite::TheoremB => theorem_b(cfg.n, &cfg.labels, cfg.caps),
        Suite::Morphisms => morphisms(cfg.n, cfg.caps),
        Suite::Poset => poset_laws(cfg.n, &cfg.labels, cfg.caps),
        Suite::Cells => cells(cfg.n, &cfg.labels, cfg.samples, cfg.seed),
    }
}

/// Betti numbers of `Conf_r(ℝ^n)`, read off the Poincaré polynomial
/// `∏_{k=1}^{r-1} (1 + k t^{n-1})`, trailing zeros removed.
pub fn conf_betti(r: usize, n: usize) -> Vec<u128> {
    let step = n.saturating_sub(1);
    let mut poly = vec![1u128];
    for k in 1..r {
        let mut next = vec![0u128; poly.len() + step];
        for (d, &c) in poly.iter().enumerate() {
            next[d] += c;
            next[d + step] += c * k as u128;
        }
        poly = next;
    }
    while poly.len() > 1 && poly.last() == Some(&0) {
        poly.pop();
    }
    poly
}

/// Homology of the order complex of nOrd(A) against that of `Conf_A(ℝ^n)`,
/// with `∂∂ = 0` and Euler characteristic consistency.
pub fn theorem_a<S: AsRef<str> + Sync>(n: usize, labels: &[S], caps: Caps) -> Result<Report, VerifyError> {
    let view = PosetView::of(labels, n, caps.max_chains)?;
    let cx = OrderComplex::new(view.poset(), caps.max_chains)?;
    let cc = cx.boundary_matrices();
    let mut dd = Check::new("boundary-squared");
    let defect = cc.boundary_squared_defect();
    dd.record(defect.is_none(), || format!("∂∂ ≠ 0 in degree {}", defect.unwrap()));
    let h = homology(&cc)?;
    let got = h.trimmed_betti();
    let expected = conf_betti(labels.len(), n);
    let mut betti = Check::new("betti");
    let got_wide: Vec<u128> = got.iter().map(|&b| b as u128).collect();
    betti.record(got_wide == expected, || format!("betti {got:?}, configuration space has {expected:?}"));
    let mut torsion = Check::new("torsion-free");
    torsion.record(!h.has_torsion(), || format!("torsion {:?}", h.torsion));
    let mut euler = Check::new("euler");
    euler.record(cx.euler_characteristic() == h.betti_euler(), || {
        format!("chain count euler {} vs betti euler {}", cx.euler_characteristic(), h.betti_euler())
    });
    let details = BTreeMap::from([
        ("n".to_string(), json!(n)),
        ("r".to_string(), json!(labels.len())),
        ("homology".to_string(), json!(h)),
        ("expected_betti".to_string(), json!(expected)),
    ]);
    Ok(Report::new(Suite::TheoremA, vec![dd, betti, torsion, euler], details))
}

fn labelled_objects(n: usize, max_edges: usize) -> Vec<LabelledThetaObject> {
    trees_up_to(max_edges, n)
        .into_iter()
        .flat_map(|tree| {
            let canonical = LabelledThetaObject::canonically_labelled(tree.clone(), n).expect("tree of height ≤ n");
            let mut reversed = canonical.labels().to_vec();
            reversed.reverse();
            let flipped = LabelledThetaObject::new(tree, n, reversed).expect("same label count");
            if flipped == canonical {
                vec![canonical]
            } else {
                vec![canonical, flipped]
            }
        })
        .collect()
}

/// Objects of Θ_n labelled by every permutation of `labels`, up to
/// `max_edges` edges.
fn objects_labelled_by<S: AsRef<str>>(n: usize, labels: &[S], max_edges: usize) -> Vec<LabelledThetaObject> {
    let names: Vec<String> = labels.iter().map(|l| l.as_ref().to_string()).collect();
    let mut out = Vec::new();
    for tree in trees_up_to(max_edges, n) {
        if tree.count_level_leaves(n) != names.len() {
            continue;
        }
        for perm in names.iter().cloned().permutations(names.len()) {
            out.push(LabelledThetaObject::new(tree.clone(), n, perm).expect("labels match leaves"));
        }
    }
    out
}

/// The reflection of Θ_n(A) onto nOrd(A): retraction, fullness of the
/// embedding, the unit, its initiality and its naturality.
pub fn theorem_b<S: AsRef<str> + Sync>(n: usize, labels: &[S], caps: Caps) -> Result<Report, VerifyError> {
    let view = PosetView::of(labels, n, caps.max_chains)?;
    let elements = view.elements();

    let mut retraction = Check::new("retraction");
    for s in elements {
        let back = retract(&embed(s));
        retraction.record(&back == s, || format!("r(i({s})) = {back}"));
    }

    // every hom-set between embedded orderings is counted by brute force on
    // small posets; larger ones use the branching-condition decision alone
    let brute_force = elements.len() * elements.len() <= BRUTE_FORCE_FULLNESS_PAIRS;
    let fullness = (0..elements.len())
        .into_par_iter()
        .map(|i| {
            let mut c = Check::new("fullness");
            let si = embed(&elements[i]);
            for (j, t) in elements.iter().enumerate() {
                let tj = embed(t);
                let expected = view.leq(i, j);
                let homs = if brute_force {
                    homs_bruteforce(&si, &tj, caps.max_morphisms)?.len()
                } else {
                    usize::from(expected)
                };
                let decided = hom_exists(&si, &tj)?;
                c.record(homs == usize::from(expected) && decided == expected, || {
                    format!("{} → {t}: {homs} morphisms, decided {decided}, order says {expected}", elements[i])
                });
            }
            Ok(c)
        })
        .collect::<Result<Vec<_>, VerifyError>>()?;
    let fullness = fold_checks("fullness", fullness);

    let objects = labelled_objects(n, caps.max_edges);
    let unit = objects
        .par_iter()
        .filter(|s| !s.is_healthy())
        .map(|s| {
            let mut c = Check::new("unit");
            let ok = unit_exists(s)? && unit_morphism(s)?.is_some();
            c.record(ok, || format!("no unit at {} labelled {:?}", s.tree(), s.labels()));
            Ok(c)
        })
        .collect::<Result<Vec<_>, VerifyError>>()?;
    let unit = fold_checks("unit", unit);

    let initial = objects_labelled_by(n, labels, caps.max_edges)
        .par_iter()
        .map(|s| {
            let mut c = Check::new("initiality");
            c.record(initiality_check(s, caps.max_chains)?, || format!("{} labelled {:?}", s.tree(), s.labels()));
            Ok(c)
        })
        .collect::<Result<Vec<_>, VerifyError>>()?;
    let initial = fold_checks("initiality", initial);

    // naturality against every morphism between labelled objects
    let small: Vec<LabelledThetaObject> = objects_labelled_by(n, labels, caps.max_edges.min(5));
    let naturality = small
        .par_iter()
        .map(|s| {
            let mut c = Check::new("naturality");
            for t in &small {
                for f in homs_bruteforce(s, t, caps.max_morphisms)? {
                    c.record(unit_naturality_holds(s, t, &f)?, || {
                        format!("{} → {} via {}", s.tree(), t.tree(), json!(f))
                    });
                }
            }
            Ok(c)
        })
        .collect::<Result<Vec<_>, VerifyError>>()?;
    let naturality = fold_checks("naturality", naturality);

    let details = BTreeMap::from([
        ("n".to_string(), json!(n)),
        ("r".to_string(), json!(labels.len())),
        ("orderings".to_string(), json!(elements.len())),
        ("labelled_objects".to_string(), json!(objects.len())),
        ("fullness_method".to_string(), json!(if brute_force { "brute-force" } else { "decision" })),
    ]);
    Ok(Report::new(Suite::TheoremB, vec![retraction, fullness, unit, initial, naturality], details))
}

fn fold_checks(name: &str, parts: Vec<Check>) -> Check {
    let mut total = Check::new(name);
    for c in parts {
        total.merge(c);
    }
    total
}

/// For all `S` of height ≤ n and healthy `T` with at most `caps.max_edges`
/// edges: γ_n is injective on active morphisms `S → T`, its image is exactly
/// the active Γ-morphisms satisfying the branching condition, and lifting
/// inverts assembly.
pub fn morphisms(n: usize, caps: Caps) -> Result<Report, VerifyError> {
    let sources = trees_up_to(caps.max_edges, n);
    let targets: Vec<PlanarLevelTree> = sources.iter().filter(|t| t.is_healthy(n)).cloned().collect();
    let pairs: Vec<(&PlanarLevelTree, &PlanarLevelTree)> = sources.iter().cartesian_product(&targets).collect();
    let results = pairs
        .par_iter()
        .map(|&(s, t)| check_active_pair(s, t, n, caps.max_morphisms))
        .collect::<Result<Vec<_>, VerifyError>>()?;
    let mut checks =
        vec![Check::new("injective"), Check::new("image"), Check::new("lift-assemble"), Check::new("assemble-lift")];
    let mut morphism_count = 0;
    for (count, parts) in results {
        morphism_count += count;
        for (total, part) in checks.iter_mut().zip(parts) {
            total.merge(part);
        }
    }
    let details = BTreeMap::from([
        ("n".to_string(), json!(n)),
        ("max_edges".to_string(), json!(caps.max_edges)),
        ("pairs".to_string(), json!(pairs.len())),
        ("active_morphisms".to_string(), json!(morphism_count)),
    ]);
    Ok(Report::new(Suite::Morphisms, checks, details))
}

/// Checks for one `(S, T)` pair; returns the number of active morphisms.
pub fn check_active_pair(
    s: &PlanarLevelTree,
    t: &PlanarLevelTree,
    n: usize,
    cap: usize,
) -> Result<(usize, [Check; 4]), VerifyError> {
    let [mut injective, mut image, mut lift_assemble, mut assemble_lift] =
        ["injective", "image", "lift-assemble", "assemble-lift"].map(Check::new);
    let key = |g: &crate::gamma::GammaMorphism<crate::tree::LeafId>| {
        (0..g.source().len()).map(|i| g.image_indices(i).to_vec()).collect::<Vec<_>>()
    };
    let active = enumerate_hom_bruteforce(s, t, n, true, cap)?;
    let mut assembled = BTreeSet::new();
    for f in &active {
        let g = assemble_morphism(f, s, t, n)?;
        let fresh = assembled.insert(key(&g));
        injective.record(fresh, || format!("{s} → {t}: two morphisms assemble to {}", json!(g)));
        let back = lift_active(s, t, n, &g);
        assemble_lift.record(back.as_ref() == Ok(f), || format!("{s} → {t}: lift of γ({}) is {back:?}", json!(f)));
    }
    let mut branching = BTreeSet::new();
    for g in enumerate_gamma(&s.level_n_leaves(n), &t.level_n_leaves(n), true, cap)? {
        if !branching_condition_holds(s, t, n, &g)? {
            continue;
        }
        branching.insert(key(&g));
        let back = lift_active(s, t, n, &g).and_then(|f| assemble_morphism(&f, s, t, n));
        lift_assemble.record(back.as_ref() == Ok(&g), || format!("{s} → {t}: γ(lift({})) is {back:?}", json!(g)));
    }
    image.record(assembled == branching, || {
        format!("{s} → {t}: {} assembled vs {} branching Γ-morphisms", assembled.len(), branching.len())
    });
    Ok((active.len(), [injective, image, lift_assemble, assemble_lift]))
}

/// Partial order axioms on nOrd(A), degree raising along strict relations,
/// and freeness and order-equivariance of the Σ_A action.
pub fn poset_laws<S: AsRef<str> + Sync>(n: usize, labels: &[S], caps: Caps) -> Result<Report, VerifyError> {
    let view = PosetView::of(labels, n, caps.max_chains)?;
    let elements = view.elements();
    let poset = view.poset();

    let mut count = Check::new("count");
    count.record(elements.len() as u128 == nord_count(labels.len(), n), || {
        format!("{} elements, formula gives {}", elements.len(), nord_count(labels.len(), n))
    });

    let mut axioms = Check::new("axioms");
    let violation = poset.check_axioms();
    axioms.record(violation.is_none(), || match violation.clone().unwrap() {
        AxiomViolation::Reflexivity(i) => format!("{} is not ≤ itself", elements[i]),
        AxiomViolation::Antisymmetry(i, j) => format!("{} and {} are mutually ≤", elements[i], elements[j]),
        AxiomViolation::Transitivity(i, j, k) => {
            format!("{} ≤ {} ≤ {} but not transitively", elements[i], elements[j], elements[k])
        }
    });

    let mut degree = Check::new("degree-raising");
    for i in 0..elements.len() {
        for j in poset.up_set(i).iter().filter(|&j| j != i) {
            degree.record(elements[i].degree() < elements[j].degree(), || {
                format!(
                    "{} < {} with degrees {} and {}",
                    elements[i],
                    elements[j],
                    elements[i].degree(),
                    elements[j].degree()
                )
            });
        }
    }

    let names: Vec<String> = labels.iter().map(|l| l.as_ref().to_string()).collect();
    let perms: Vec<BTreeMap<String, String>> = names
        .iter()
        .cloned()
        .permutations(names.len())
        .map(|image| names.iter().cloned().zip(image).collect())
        .collect();
    let action = perms
        .par_iter()
        .map(|g| {
            let identity = g.iter().all(|(a, b)| a == b);
            let moved: Vec<usize> = elements
                .iter()
                .map(|s| Ok(view.index_of(&s.sigma_act(g)?).expect("nOrd(A) is closed under relabelling")))
                .collect::<Result<_, NordError>>()?;
            let mut free = Check::new("free-action");
            let mut equivariant = Check::new("equivariance");
            for (i, &gi) in moved.iter().enumerate() {
                if !identity {
                    free.record(gi != i, || format!("{g:?} fixes {}", elements[i]));
                }
                for (j, &gj) in moved.iter().enumerate() {
                    equivariant.record(view.leq(i, j) == view.leq(gi, gj), || {
                        format!("{g:?} does not preserve {} vs {}", elements[i], elements[j])
                    });
                }
            }
            Ok((free, equivariant))
        })
        .collect::<Result<Vec<_>, VerifyError>>()?;
    let (free, equivariant): (Vec<Check>, Vec<Check>) = action.into_iter().unzip();

    let details = BTreeMap::from([
        ("n".to_string(), json!(n)),
        ("r".to_string(), json!(labels.len())),
        ("orderings".to_string(), json!(elements.len())),
        ("strict_relations".to_string(), json!(poset.strict_relation_count())),
        ("cover_edges".to_string(), json!(view.hasse().len())),
        ("permutations".to_string(), json!(perms.len())),
    ]);
    Ok(Report::new(
        Suite::Poset,
        vec![count, axioms, degree, fold_checks("free-action", free), fold_checks("equivariance", equivariant)],
        details,
    ))
}

/// Fox-Neuwirth cells against nOrd(A): witness round trips, the universal
/// property of the classifier over witnesses and samples, inclusion of
/// cells along relations, midpoint closure, and equivariance.
pub fn cells<S: AsRef<str> + Sync>(n: usize, labels: &[S], samples: usize, seed: u64) -> Result<Report, VerifyError> {
    let view = PosetView::of(labels, n, usize::MAX)?;
    let elements = view.elements();

    let mut round_trip = Check::new("witness-round-trip");
    for s in elements {
        let w = witness(s);
        let c = cell_of(&w);
        round_trip.record(&c == s && in_cell(&w, s)?, || format!("witness of {s} classifies to {c}"));
    }

    let configs = test_configurations(&view, labels, n, samples, seed)?;
    let report = universal_property_check(&view, &configs)?;
    let mut universal = Check::new("universal-property");
    universal.checked = report.checks;
    universal.failed = report.counterexamples.len();
    universal.failures = report.counterexamples.into_iter().take(KEPT_FAILURES).collect();

    let mut partition = Check::new("partition");
    partition.record(partition_check(labels, n, samples, seed)?, || "some sample is not in a least cell".to_string());

    let per_pair = (samples / 100).max(5);
    let related: Vec<(usize, usize)> = (0..elements.len())
        .flat_map(|i| view.poset().up_set(i).iter().map(move |j| (i, j)).collect::<Vec<_>>())
        .collect();
    let functor = related
        .par_iter()
        .map(|&(i, j)| {
            let mut c = Check::new("functoriality");
            let ok = functoriality_check(&elements[i], &elements[j], per_pair, seed ^ (i * elements.len() + j) as u64)?;
            c.record(ok, || format!("C({}) ⊄ C({})", elements[i], elements[j]));
            Ok(c)
        })
        .collect::<Result<Vec<_>, VerifyError>>()?;

    let per_cell = (samples / 10).max(10);
    let mut convexity = Check::new("convexity");
    for (i, s) in elements.iter().enumerate() {
        convexity.record(convexity_probe(s, per_cell, seed.wrapping_add(i as u64)), || format!("midpoint left C({s})"));
    }

    let mut equivariance = Check::new("equivariance");
    equivariance.record(equivariance_check(labels, n, samples, seed)?, || {
        "relabelling does not commute with cell_of".to_string()
    });

    let details = BTreeMap::from([
        ("n".to_string(), json!(n)),
        ("r".to_string(), json!(labels.len())),
        ("cells".to_string(), json!(elements.len())),
        ("configurations".to_string(), json!(configs.len())),
        ("related_pairs".to_string(), json!(related.len())),
        ("seed".to_string(), json!(seed)),
    ]);
    Ok(Report::new(
        Suite::Cells,
        vec![round_trip, universal, partition, fold_checks("functoriality", functor), convexity, equivariance],
        details,
    ))
}
