//! Segal's category Γ, the simplex category Δ and the functor γ: Δ → Γ.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GammaError {
    #[error("composition mismatch: {0}")]
    SetMismatch(String),
    #[error("images of distinct elements overlap at target element {0}")]
    NotDisjoint(String),
    #[error("unknown element {0}")]
    UnknownElement(String),
    #[error("duplicate element {0}")]
    DuplicateElement(String),
    #[error("image list has {found} entries for a source of size {expected}")]
    WrongLength { expected: usize, found: usize },
    #[error("values {0:?} are not a monotone map into [{1}]")]
    NotMonotone(Vec<usize>, usize),
    #[error("enumeration would produce {count} morphisms, above the cap of {cap}")]
    TooMany { count: u128, cap: usize },
}

/// A weakly monotone map `[s] → [t]`, stored as its values `f(0), …, f(s)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeltaMorphism {
    target: usize,
    values: Vec<usize>,
}

impl DeltaMorphism {
    pub fn new(values: Vec<usize>, target: usize) -> Result<Self, GammaError> {
        let ok = !values.is_empty()
            && values.windows(2).all(|w| w[0] <= w[1])
            && values.last().is_some_and(|&v| v <= target);
        if !ok {
            return Err(GammaError::NotMonotone(values, target));
        }
        Ok(Self { target, values })
    }

    pub fn identity(s: usize) -> Self {
        Self { target: s, values: (0..=s).collect() }
    }

    pub fn source_rank(&self) -> usize {
        self.values.len() - 1
    }

    pub fn target_rank(&self) -> usize {
        self.target
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn into_values(self) -> Vec<usize> {
        self.values
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &DeltaMorphism) -> Result<DeltaMorphism, GammaError> {
        if g.source_rank() != self.target {
            return Err(GammaError::SetMismatch(format!(
                "[{}] → [{}] followed by a map out of [{}]",
                self.source_rank(),
                self.target,
                g.source_rank()
            )));
        }
        Ok(DeltaMorphism { target: g.target, values: self.values.iter().map(|&v| g.values[v]).collect() })
    }

    /// True iff `f(0) = 0` and `f(s) = t`, which is exactly when the Segal
    /// image covers `{1, …, t}`.
    pub fn is_active(&self) -> bool {
        self.values[0] == 0 && *self.values.last().unwrap() == self.target
    }

    /// The blocks `{ j : f(i-1) < j ≤ f(i) }` for `i = 1..=s`, 1-based.
    pub fn segal_blocks(&self) -> impl Iterator<Item = std::ops::RangeInclusive<usize>> + '_ {
        self.values.windows(2).map(|w| (w[0] + 1)..=w[1])
    }
}

/// The Segal functor on morphisms: `i ↦ { j : f(i-1) < j ≤ f(i) }` on
/// `{1..s} → {1..t}`.
pub fn segal(f: &DeltaMorphism) -> GammaMorphism<usize> {
    GammaMorphism {
        source: (1..=f.source_rank()).collect(),
        target: (1..=f.target).collect(),
        images: f.segal_blocks().map(|r| r.map(|j| j - 1).collect()).collect(),
    }
}

/// All weakly monotone maps `[s] → [t]` in lexicographic order.
pub fn enumerate_delta(s: usize, t: usize, cap: usize) -> Result<Vec<DeltaMorphism>, GammaError> {
    // multisets of size s+1 from t+1 values
    let count = binomial((s + t + 1) as u128, (s + 1) as u128);
    if count > cap as u128 {
        return Err(GammaError::TooMany { count, cap });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut values = vec![0usize; s + 1];
    loop {
        out.push(DeltaMorphism { target: t, values: values.clone() });
        // next multiset in lexicographic order
        let Some(k) = (0..=s).rev().find(|&k| values[k] < t) else {
            break;
        };
        let v = values[k] + 1;
        for x in &mut values[k..] {
            *x = v;
        }
    }
    Ok(out)
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// A morphism `X → Y` of Γ: a map `X → 𝒫(Y)` with pairwise-disjoint images.
///
/// Both finite sets carry explicit labels; images are kept as sorted
/// indices into the target.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GammaMorphism<L = usize> {
    source: Vec<L>,
    target: Vec<L>,
    images: Vec<Vec<usize>>,
}

impl<L: Clone + Eq + fmt::Display> GammaMorphism<L> {
    /// Build from label-valued images, one list per source element.
    pub fn new(source: Vec<L>, target: Vec<L>, images: Vec<Vec<L>>) -> Result<Self, GammaError> {
        let index = |y: &L| target.iter().position(|t| t == y).ok_or_else(|| GammaError::UnknownElement(y.to_string()));
        let images = images
            .iter()
            .map(|img| img.iter().map(index).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_indices(source, target, images)
    }

    /// Build from index-valued images.
    pub fn from_indices(source: Vec<L>, target: Vec<L>, mut images: Vec<Vec<usize>>) -> Result<Self, GammaError> {
        check_distinct(&source)?;
        check_distinct(&target)?;
        if images.len() != source.len() {
            return Err(GammaError::WrongLength { expected: source.len(), found: images.len() });
        }
        let mut hit = vec![false; target.len()];
        for img in &mut images {
            img.sort_unstable();
            for &y in img.iter() {
                match hit.get_mut(y) {
                    None => return Err(GammaError::UnknownElement(format!("#{y}"))),
                    Some(seen) if *seen => return Err(GammaError::NotDisjoint(target[y].to_string())),
                    Some(seen) => *seen = true,
                }
            }
        }
        Ok(Self { source, target, images })
    }

    pub fn identity(set: Vec<L>) -> Self {
        let images = (0..set.len()).map(|i| vec![i]).collect();
        Self { source: set.clone(), target: set, images }
    }

    pub fn source(&self) -> &[L] {
        &self.source
    }

    pub fn target(&self) -> &[L] {
        &self.target
    }

    /// Image of the `i`-th source element as target indices.
    pub fn image_indices(&self, i: usize) -> &[usize] {
        &self.images[i]
    }

    pub fn image(&self, i: usize) -> impl Iterator<Item = &L> + '_ {
        self.images[i].iter().map(|&j| &self.target[j])
    }

    pub fn image_of(&self, x: &L) -> Option<Vec<&L>> {
        let i = self.source.iter().position(|s| s == x)?;
        Some(self.image(i).collect())
    }

    /// True iff the images cover the target.
    pub fn is_active(&self) -> bool {
        self.images.iter().map(Vec::len).sum::<usize>() == self.target.len()
    }

    /// True iff every image is a singleton and the target is covered.
    pub fn is_bijection(&self) -> bool {
        self.images.iter().all(|i| i.len() == 1) && self.source.len() == self.target.len()
    }

    /// `self ∘ theta`: `s ↦ ⋃_{t ∈ theta(s)} self(t)`.
    pub fn compose(&self, theta: &GammaMorphism<L>) -> Result<GammaMorphism<L>, GammaError> {
        if theta.target != self.source {
            return Err(GammaError::SetMismatch("target of the first map differs from source of the second".into()));
        }
        let images = theta
            .images
            .iter()
            .map(|img| {
                let mut out: Vec<usize> = img.iter().flat_map(|&t| self.images[t].iter().copied()).collect();
                out.sort_unstable();
                out
            })
            .collect();
        Ok(GammaMorphism { source: theta.source.clone(), target: self.target.clone(), images })
    }

    /// Relabel source and target elements.
    pub fn map_labels<M: Clone + Eq + fmt::Display>(
        &self,
        mut on_source: impl FnMut(&L) -> M,
        mut on_target: impl FnMut(&L) -> M,
    ) -> GammaMorphism<M> {
        GammaMorphism {
            source: self.source.iter().map(&mut on_source).collect(),
            target: self.target.iter().map(&mut on_target).collect(),
            images: self.images.clone(),
        }
    }
}

fn check_distinct<L: Eq + fmt::Display>(labels: &[L]) -> Result<(), GammaError> {
    for (i, x) in labels.iter().enumerate() {
        if labels[..i].contains(x) {
            return Err(GammaError::DuplicateElement(x.to_string()));
        }
    }
    Ok(())
}

/// All Γ-morphisms `X → Y`, optionally only the active ones.
///
/// Each target element is sent to at most one source element (exactly one
/// when `active_only`); the enumeration runs over these assignments in
/// lexicographic order with "unassigned" first.
pub fn enumerate_gamma<L: Clone + Eq + fmt::Display>(
    source: &[L],
    target: &[L],
    active_only: bool,
    cap: usize,
) -> Result<Vec<GammaMorphism<L>>, GammaError> {
    check_distinct(source)?;
    check_distinct(target)?;
    let choices = source.len() + usize::from(!active_only);
    let count = (choices as u128).checked_pow(target.len() as u32).unwrap_or(u128::MAX);
    if count > cap as u128 {
        return Err(GammaError::TooMany { count, cap });
    }
    let offset = usize::from(!active_only);
    let mut out = Vec::with_capacity(count as usize);
    if choices == 0 {
        // only possible when the target is empty, else count was zero
        if target.is_empty() {
            out.push(GammaMorphism { source: source.to_vec(), target: Vec::new(), images: vec![] });
        }
        return Ok(out);
    }
    let mut digits = vec![0usize; target.len()];
    loop {
        let mut images = vec![Vec::new(); source.len()];
        for (y, &d) in digits.iter().enumerate() {
            if d >= offset {
                images[d - offset].push(y);
            }
        }
        out.push(GammaMorphism { source: source.to_vec(), target: target.to_vec(), images });
        let Some(k) = (0..digits.len()).rev().find(|&k| digits[k] + 1 < choices) else {
            break;
        };
        digits[k] += 1;
        for d in &mut digits[k + 1..] {
            *d = 0;
        }
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct GammaJson<L> {
    source: Vec<L>,
    target: Vec<L>,
    map: BTreeMap<String, Vec<L>>,
}

impl<L: Clone + Eq + fmt::Display + Serialize> Serialize for GammaMorphism<L> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        GammaJson {
            source: self.source.clone(),
            target: self.target.clone(),
            map: self
                .source
                .iter()
                .enumerate()
                .map(|(i, x)| (x.to_string(), self.image(i).cloned().collect()))
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, L: Clone + Eq + fmt::Display + DeserializeOwned> Deserialize<'de> for GammaMorphism<L> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = GammaJson::<L>::deserialize(deserializer)?;
        let mut map = raw.map;
        let images = raw.source.iter().map(|x| map.remove(&x.to_string()).unwrap_or_default()).collect();
        if let Some(k) = map.keys().next() {
            return Err(serde::de::Error::custom(format!("map key {k:?} is not a source element")));
        }
        GammaMorphism::new(raw.source, raw.target, images).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct DeltaJson {
    s: usize,
    t: usize,
    values: Vec<usize>,
}

impl Serialize for DeltaMorphism {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        DeltaJson { s: self.source_rank(), t: self.target, values: self.values.clone() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DeltaMorphism {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = DeltaJson::deserialize(deserializer)?;
        if raw.values.len() != raw.s + 1 {
            return Err(serde::de::Error::custom(format!("expected {} values, got {}", raw.s + 1, raw.values.len())));
        }
        DeltaMorphism::new(raw.values, raw.t).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delta(values: &[usize], t: usize) -> DeltaMorphism {
        DeltaMorphism::new(values.to_vec(), t).unwrap()
    }

    fn images<L: Clone + Eq + fmt::Display>(g: &GammaMorphism<L>) -> Vec<Vec<L>> {
        (0..g.source().len()).map(|i| g.image(i).cloned().collect()).collect()
    }

    #[test]
    fn segal_examples() {
        assert_eq!(segal(&DeltaMorphism::identity(2)), GammaMorphism::identity(vec![1, 2]));
        assert_eq!(images(&segal(&delta(&[0, 2], 2))), vec![vec![1, 2]]);
        assert_eq!(images(&segal(&delta(&[0, 1, 1], 1))), vec![vec![1], vec![]]);
    }

    #[test]
    fn compose_examples() {
        let phi = GammaMorphism::new(
            vec!["1".to_string(), "2".into()],
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec!["a".into()], vec!["b".into(), "c".into()]],
        )
        .unwrap();
        let id = GammaMorphism::identity(vec!["1".to_string(), "2".into()]);
        assert_eq!(phi.compose(&id).unwrap(), phi);

        let theta =
            GammaMorphism::new(vec!["1".to_string()], vec!["1".into(), "2".into()], vec![vec!["1".into(), "2".into()]])
                .unwrap();
        assert_eq!(images(&phi.compose(&theta).unwrap()), vec![vec!["a", "b", "c"]]);

        let empty = GammaMorphism::new(vec!["1".to_string()], vec!["1".into(), "2".into()], vec![vec![]]).unwrap();
        assert_eq!(images(&phi.compose(&empty).unwrap()), vec![Vec::<String>::new()]);

        assert!(matches!(theta.compose(&theta), Err(GammaError::SetMismatch(_))));
    }

    #[test]
    fn activity() {
        assert!(GammaMorphism::identity(vec![1, 2, 3]).is_active());
        assert!(!GammaMorphism::new(vec![1], vec![1, 2], vec![vec![1]]).unwrap().is_active());
        assert!(GammaMorphism::new(vec![1, 2], vec![1, 2, 3], vec![vec![1, 3], vec![2]]).unwrap().is_active());
    }

    #[test]
    fn disjointness_is_enforced() {
        let err = GammaMorphism::new(vec![1, 2], vec![1, 2], vec![vec![1], vec![1, 2]]).unwrap_err();
        assert_eq!(err, GammaError::NotDisjoint("1".into()));
        assert!(matches!(GammaMorphism::new(vec![1], vec![1], vec![vec![7]]), Err(GammaError::UnknownElement(_))));
    }

    #[test]
    fn delta_enumeration_counts() {
        assert_eq!(enumerate_delta(0, 0, 100).unwrap().len(), 1);
        let maps: Vec<_> = enumerate_delta(1, 1, 100).unwrap().into_iter().map(|f| f.values).collect();
        assert_eq!(maps, vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        // 000, 001, 011, 111
        assert_eq!(enumerate_delta(2, 1, 100).unwrap().len(), 4);
        assert_eq!(enumerate_delta(1, 2, 100).unwrap().len(), 6);
        assert!(matches!(enumerate_delta(10, 10, 5), Err(GammaError::TooMany { .. })));
    }

    // Brute force: every map [s] -> [t] filtered to monotone ones.
    fn brute_delta(s: usize, t: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let total = (t + 1).pow(s as u32 + 1);
        for code in 0..total {
            let mut c = code;
            let mut v = vec![0; s + 1];
            for k in (0..=s).rev() {
                v[k] = c % (t + 1);
                c /= t + 1;
            }
            if v.windows(2).all(|w| w[0] <= w[1]) {
                out.push(v);
            }
        }
        out
    }

    #[test]
    fn delta_enumeration_matches_brute_force() {
        for s in 0..=4 {
            for t in 0..=4 {
                let got: Vec<_> = enumerate_delta(s, t, 10_000).unwrap().into_iter().map(|f| f.values).collect();
                assert_eq!(got, brute_delta(s, t), "s={s} t={t}");
            }
        }
    }

    #[test]
    fn gamma_enumeration_counts() {
        let empty: Vec<usize> = vec![];
        let all = enumerate_gamma(&empty, &empty, false, 10).unwrap();
        assert_eq!(all.len(), 1);
        assert!(all[0].is_active());

        let all = enumerate_gamma(&[1], &[1], false, 10).unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(all.iter().filter(|g| g.is_active()).count(), 1);

        assert_eq!(enumerate_gamma(&[1, 2], &[1], true, 10).unwrap().len(), 2);
        assert!(enumerate_gamma(&empty, &[1], true, 10).unwrap().is_empty());
        assert_eq!(enumerate_gamma(&empty, &[1], false, 10).unwrap().len(), 1);
    }

    #[test]
    fn segal_is_functorial_exhaustively() {
        for s in 0..=4 {
            for t in 0..=4 {
                for u in 0..=4 {
                    for f in enumerate_delta(s, t, 10_000).unwrap() {
                        for g in enumerate_delta(t, u, 10_000).unwrap() {
                            let gf = f.then(&g).unwrap();
                            let composed = segal(&g).compose(&segal(&f)).unwrap();
                            assert_eq!(segal(&gf), composed);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn delta_activity_matches_segal_activity() {
        for s in 0..=4 {
            for t in 0..=4 {
                for f in enumerate_delta(s, t, 10_000).unwrap() {
                    assert_eq!(f.is_active(), segal(&f).is_active(), "{:?}", f.values);
                }
            }
        }
    }

    #[test]
    fn active_maps_compose_to_active_maps() {
        let x = [1, 2];
        let y = [1, 2, 3];
        let z = [1, 2];
        for theta in enumerate_gamma(&x, &y, true, 1000).unwrap() {
            for phi in enumerate_gamma(&y, &z, true, 1000).unwrap() {
                assert!(phi.compose(&theta).unwrap().is_active());
            }
        }
    }

    #[test]
    fn json_shapes() {
        let f = delta(&[0, 2], 2);
        assert_eq!(serde_json::to_string(&f).unwrap(), r#"{"s":1,"t":2,"values":[0,2]}"#);
        assert_eq!(serde_json::from_str::<DeltaMorphism>(r#"{"s":1,"t":2,"values":[0,2]}"#).unwrap(), f);
        assert!(serde_json::from_str::<DeltaMorphism>(r#"{"s":1,"t":2,"values":[2,0]}"#).is_err());

        let g = segal(&f);
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"source":[1],"target":[1,2],"map":{"1":[1,2]}}"#);
        assert_eq!(serde_json::from_str::<GammaMorphism>(&json).unwrap(), g);
    }
}
