//! Fox-Neuwirth cells of configuration spaces of labelled points in `ℚ^n`.
//!
//! A configuration `φ` lies in the cell `C(S)` of an n-ordering `S` when for
//! every `a <_S b` with `k = b_S(a, b)`, the first `k` coordinates of `φ(a)`
//! and `φ(b)` agree and `φ(a)_{k+1} ≤ φ(b)_{k+1}`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::nord::{leq, NOrdering, NordError, PosetView};

pub type Point = Vec<BigRational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CellError {
    #[error("point {label} has {got} coordinates, expected {n}")]
    Dimension { label: String, got: usize, n: usize },
    #[error("configurations live in ℚ^n with n ≥ 1")]
    ZeroDimension,
    #[error("points {0} and {1} coincide")]
    NotInjective(String, String),
    #[error("configuration and ordering have different labels or heights")]
    LabelMismatch,
    #[error("{0} is not below {1}")]
    NotRelated(String, String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("no injective sample after {0} attempts")]
    Rejected(usize),
    #[error(transparent)]
    Nord(#[from] NordError),
}

const MAX_REJECTIONS: usize = 10_000;

/// An injective map from a finite label set to `ℚ^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    n: usize,
    points: BTreeMap<String, Point>,
}

impl Configuration {
    pub fn new(n: usize, points: BTreeMap<String, Point>) -> Result<Self, CellError> {
        if n == 0 {
            return Err(CellError::ZeroDimension);
        }
        if let Some((label, p)) = points.iter().find(|(_, p)| p.len() != n) {
            return Err(CellError::Dimension { label: label.clone(), got: p.len(), n });
        }
        let mut seen: BTreeMap<&Point, &String> = BTreeMap::new();
        for (label, p) in &points {
            if let Some(other) = seen.insert(p, label) {
                return Err(CellError::NotInjective(other.clone(), label.clone()));
            }
        }
        Ok(Self { n, points })
    }

    pub fn from_integers<S: AsRef<str>>(n: usize, points: &[(S, Vec<i64>)]) -> Result<Self, CellError> {
        let map = points
            .iter()
            .map(|(l, p)| (l.as_ref().to_string(), p.iter().map(|&x| BigRational::from_integer(x.into())).collect()))
            .collect();
        Self::new(n, map)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &BTreeMap<String, Point> {
        &self.points
    }

    pub fn point(&self, label: &str) -> Option<&Point> {
        self.points.get(label)
    }

    /// `g · φ`, sending the point of `a` to label `g(a)`.
    pub fn relabel(&self, g: &BTreeMap<String, String>) -> Result<Configuration, CellError> {
        let points: BTreeMap<String, Point> =
            self.points.iter().map(|(l, p)| (g.get(l).cloned().unwrap_or_else(|| l.clone()), p.clone())).collect();
        if points.len() != self.points.len() || points.keys().ne(self.points.keys()) {
            return Err(CellError::LabelMismatch);
        }
        Ok(Configuration { n: self.n, points })
    }

    /// Coordinatewise average.
    pub fn midpoint(&self, other: &Configuration) -> Result<Configuration, CellError> {
        Configuration::new(self.n, midpoint_points(&self.points, &other.points)?)
    }

    /// Parse one point per line, `label x_1 … x_n`. Entries are integers,
    /// fractions `p/q`, or decimals taken at their exact binary value.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse_points(text: &str, n: usize) -> Result<Self, CellError> {
        let mut points = BTreeMap::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| CellError::Parse { line: k + 1, msg };
            let mut toks = line.split_whitespace();
            let label = toks.next().unwrap().to_string();
            let coords = toks
                .map(|t| parse_rational(t).ok_or_else(|| err(format!("bad coordinate {t:?}"))))
                .collect::<Result<Point, _>>()?;
            if coords.len() != n {
                return Err(err(format!("expected {n} coordinates, got {}", coords.len())));
            }
            if points.insert(label.clone(), coords).is_some() {
                return Err(err(format!("label {label} repeated")));
            }
        }
        Self::new(n, points)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (l, p) in &self.points {
            write!(f, "{l}")?;
            for x in p {
                write!(f, " {x}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn parse_rational(tok: &str) -> Option<BigRational> {
    if let Some((p, q)) = tok.split_once('/') {
        let (p, q): (BigInt, BigInt) = (p.parse().ok()?, q.parse().ok()?);
        return (!q.is_zero()).then(|| BigRational::new(p, q));
    }
    if let Ok(i) = tok.parse::<BigInt>() {
        return Some(BigRational::from_integer(i));
    }
    let x: f64 = tok.parse().ok()?;
    BigRational::from_float(x)
}

fn midpoint_points(
    a: &BTreeMap<String, Point>,
    b: &BTreeMap<String, Point>,
) -> Result<BTreeMap<String, Point>, CellError> {
    if a.keys().ne(b.keys()) {
        return Err(CellError::LabelMismatch);
    }
    let two = BigRational::from_integer(2.into());
    Ok(a.iter().map(|(l, p)| (l.clone(), p.iter().zip(&b[l]).map(|(x, y)| (x + y) / &two).collect())).collect())
}

fn check_labels(points: &BTreeMap<String, Point>, n: usize, s: &NOrdering) -> Result<(), CellError> {
    if s.n() != n || s.len() != points.len() || s.labels().iter().any(|l| !points.contains_key(l)) {
        return Err(CellError::LabelMismatch);
    }
    Ok(())
}

/// The defining equalities and inequalities of `C(S)`, without asking for
/// injectivity.
pub fn satisfies_cell_conditions(points: &BTreeMap<String, Point>, n: usize, s: &NOrdering) -> Result<bool, CellError> {
    check_labels(points, n, s)?;
    let pts: Vec<&Point> = s.labels().iter().map(|l| &points[l]).collect();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let k = s.branching_at(i, j);
            if pts[i][..k] != pts[j][..k] || pts[i][k] > pts[j][k] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `φ ∈ C(S)`.
pub fn in_cell(phi: &Configuration, s: &NOrdering) -> Result<bool, CellError> {
    satisfies_cell_conditions(&phi.points, phi.n, s)
}

/// `S_φ`: labels in lexicographic order of their points, with the branching
/// level of two labels the number of leading coordinates on which they agree.
pub fn cell_of(phi: &Configuration) -> NOrdering {
    if phi.is_empty() {
        return NOrdering::empty(phi.n);
    }
    let mut entries: Vec<(&Point, &String)> = phi.points.iter().map(|(l, p)| (p, l)).collect();
    entries.sort();
    let word = entries.windows(2).map(|w| w[0].0.iter().zip(w[1].0).take_while(|(x, y)| x == y).count()).collect();
    NOrdering::new(entries.into_iter().map(|(_, l)| l.clone()).collect(), word, phi.n)
        .expect("injective points give a valid ordering")
}

/// A configuration with `cell_of(witness(S)) = S`: coordinate `i` of a leaf
/// is the planar index of its level-`i` ancestor among all level-`i` vertices.
pub fn witness(s: &NOrdering) -> Configuration {
    let n = s.n();
    let mut counters = vec![0i64; n];
    let mut points = BTreeMap::new();
    for (k, label) in s.labels().iter().enumerate() {
        if k > 0 {
            for c in &mut counters[s.word()[k - 1]..] {
                *c += 1;
            }
        }
        points.insert(label.clone(), counters.iter().map(|&c| BigRational::from_integer(c.into())).collect());
    }
    Configuration { n, points }
}

fn random_point<R: Rng>(rng: &mut R, n: usize, lo: i64, hi: i64) -> Point {
    (0..n).map(|_| BigRational::from_integer(rng.gen_range(lo..=hi).into())).collect()
}

fn sample_in_range<S: AsRef<str>, R: Rng>(
    labels: &[S],
    n: usize,
    lo: i64,
    hi: i64,
    rng: &mut R,
) -> Result<Configuration, CellError> {
    for _ in 0..MAX_REJECTIONS {
        let points = labels.iter().map(|l| (l.as_ref().to_string(), random_point(rng, n, lo, hi))).collect();
        if let Ok(c) = Configuration::new(n, points) {
            return Ok(c);
        }
    }
    Err(CellError::Rejected(MAX_REJECTIONS))
}

/// Integer coordinates drawn uniformly from a wide range, resampled until
/// injective. Deterministic in `seed`.
pub fn sample<S: AsRef<str>>(labels: &[S], n: usize, seed: u64) -> Result<Configuration, CellError> {
    sample_with(labels, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn sample_with<S: AsRef<str>, R: Rng>(labels: &[S], n: usize, rng: &mut R) -> Result<Configuration, CellError> {
    sample_in_range(labels, n, -1_000_000_000, 1_000_000_000, rng)
}

/// Coordinates from `{0, 1, 2}`, so that coordinate ties and hence the lower
/// cells are hit often.
pub fn sample_narrow<S: AsRef<str>, R: Rng>(labels: &[S], n: usize, rng: &mut R) -> Result<Configuration, CellError> {
    sample_in_range(labels, n, 0, 2, rng)
}

/// Walk the leaves of `S` assigning each new vertex a value above its left
/// sibling's (strictly if `strict`), and a free value otherwise.
fn cell_points<R: Rng>(s: &NOrdering, strict: bool, rng: &mut R) -> BTreeMap<String, Point> {
    let n = s.n();
    let mut cur: Vec<i64> = (0..n).map(|_| rng.gen_range(-50..=50)).collect();
    let mut points = BTreeMap::new();
    for (k, label) in s.labels().iter().enumerate() {
        if k > 0 {
            let b = s.word()[k - 1];
            cur[b] += rng.gen_range(if strict { 1 } else { 0 }..=3);
            for c in &mut cur[b + 1..] {
                *c = rng.gen_range(-50..=50);
            }
        }
        points.insert(label.clone(), cur.iter().map(|&c| BigRational::from_integer(c.into())).collect());
    }
    points
}

/// A point of `C(S)` where every inequality is strict.
pub fn sample_open_cell<R: Rng>(s: &NOrdering, rng: &mut R) -> Configuration {
    Configuration::new(s.n(), cell_points(s, true, rng)).expect("strict siblings separate points")
}

/// A point of `C(S)`, possibly on the boundary, resampled until injective.
pub fn sample_closed_cell<R: Rng>(s: &NOrdering, rng: &mut R) -> Result<Configuration, CellError> {
    for _ in 0..MAX_REJECTIONS {
        if let Ok(c) = Configuration::new(s.n(), cell_points(s, false, rng)) {
            return Ok(c);
        }
    }
    Err(CellError::Rejected(MAX_REJECTIONS))
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Sampled `C(S) ⊆ C(T)` for `S ≤ T`, over the witness of `S` and `samples`
/// boundary-inclusive points of `C(S)`.
pub fn functoriality_check(s: &NOrdering, t: &NOrdering, samples: usize, seed: u64) -> Result<bool, CellError> {
    if !leq(s, t)? {
        return Err(CellError::NotRelated(s.to_string(), t.to_string()));
    }
    if !in_cell(&witness(s), t)? {
        return Ok(false);
    }
    let results = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let phi = sample_closed_cell(s, &mut rng_for(seed, k))?;
            in_cell(&phi, t)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(results.into_iter().all(|ok| ok))
}

/// Sampled midpoint closure of `C(S)`. Pairs from the open cell must have
/// their midpoint in `C(S)`; pairs from the closed cell must have a midpoint
/// satisfying the cell conditions (it can fail to be injective).
pub fn convexity_probe(s: &NOrdering, samples: usize, seed: u64) -> bool {
    let w = witness(s);
    if w.midpoint(&w).ok().as_ref() != Some(&w) {
        return false;
    }
    (0..samples as u64).into_par_iter().all(|k| {
        let mut rng = rng_for(seed, k);
        let (phi, psi) = (sample_open_cell(s, &mut rng), sample_open_cell(s, &mut rng));
        let open_ok = phi.midpoint(&psi).is_ok_and(|m| in_cell(&m, s).unwrap_or(false));
        let closed_ok = match (sample_closed_cell(s, &mut rng), sample_closed_cell(s, &mut rng)) {
            (Ok(phi), Ok(psi)) => midpoint_points(&phi.points, &psi.points)
                .and_then(|m| satisfies_cell_conditions(&m, s.n(), s))
                .unwrap_or(false),
            _ => false,
        };
        open_ok && closed_ok
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CellReport {
    pub configurations: usize,
    pub checks: usize,
    pub counterexamples: Vec<String>,
}

impl CellReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Witnesses of every cell, then `samples` configurations alternating between
/// wide and narrow coordinate ranges.
pub fn test_configurations<S: AsRef<str>>(
    view: &PosetView,
    labels: &[S],
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<Configuration>, CellError> {
    let mut out: Vec<Configuration> = view.elements().iter().map(witness).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..samples {
        out.push(if k % 2 == 0 { sample_with(labels, n, &mut rng)? } else { sample_narrow(labels, n, &mut rng)? });
    }
    Ok(out)
}

/// For each configuration and each `S`: `φ ∈ C(S)` iff `cell_of(φ) ≤ S`.
pub fn universal_property_check(view: &PosetView, configs: &[Configuration]) -> Result<CellReport, CellError> {
    let failures = configs
        .par_iter()
        .map(|phi| {
            let c = cell_of(phi);
            let ci = view.index_of(&c).ok_or(CellError::LabelMismatch)?;
            let mut bad = Vec::new();
            for (j, s) in view.elements().iter().enumerate() {
                if in_cell(phi, s)? != view.leq(ci, j) {
                    bad.push(format!("φ = {{{}}} against {s}", phi.to_string().trim_end().replace('\n', "; ")));
                }
            }
            Ok(bad)
        })
        .collect::<Result<Vec<_>, CellError>>()?;
    Ok(CellReport {
        configurations: configs.len(),
        checks: configs.len() * view.len(),
        counterexamples: failures.into_iter().flatten().collect(),
    })
}

/// Every sampled `φ` lies in `C(cell_of(φ))`, and `cell_of(φ)` is the least
/// `S` with `φ ∈ C(S)`.
pub fn partition_check<S: AsRef<str>>(labels: &[S], n: usize, samples: usize, seed: u64) -> Result<bool, CellError> {
    let view = PosetView::of(labels, n, usize::MAX)?;
    let configs = test_configurations(&view, labels, n, samples, seed)?;
    let ok = configs.par_iter().map(|phi| {
        let c = cell_of(phi);
        let ci = view.index_of(&c).ok_or(CellError::LabelMismatch)?;
        if !in_cell(phi, &c)? {
            return Ok(false);
        }
        for (j, s) in view.elements().iter().enumerate() {
            if in_cell(phi, s)? && !view.leq(ci, j) {
                return Ok(false);
            }
        }
        Ok(true)
    });
    Ok(ok.collect::<Result<Vec<bool>, CellError>>()?.into_iter().all(|b| b))
}

/// `cell_of(g · φ) = g · cell_of(φ)` for seeded random permutations `g`.
pub fn equivariance_check<S: AsRef<str>>(labels: &[S], n: usize, samples: usize, seed: u64) -> Result<bool, CellError> {
    let names: Vec<String> = labels.iter().map(|l| l.as_ref().to_string()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let phi =
            if rng.gen_bool(0.5) { sample_with(&names, n, &mut rng)? } else { sample_narrow(&names, n, &mut rng)? };
        let mut image = names.clone();
        image.shuffle(&mut rng);
        let g: BTreeMap<String, String> = names.iter().cloned().zip(image).collect();
        if cell_of(&phi.relabel(&g)?) != cell_of(&phi).sigma_act(&g)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Labels `x1, …, xr`.
pub fn default_labels(r: usize) -> Vec<String> {
    (1..=r).map(|i| format!("x{i}")).collect()
}
