//! Finite sets with text labels and total maps between them.
//!
//! Everything downstream (spans, relations, matrices, module composites)
//! reduces to the operations in this module, so the invariants are strict:
//! element labels are pairwise distinct and kept in lexicographic order,
//! maps are total with image inside the codomain, and every constructed
//! label (pairs, tags, quotient classes) is deterministic.

mod ops;
mod span_rel;

pub use ops::{
    coproduct, image_factorization, pair_fns, product, pullback, reflexive_coequalizer,
    Coequalizer, Coproduct, ImageFactorization, Product, Pullback, UnionFind,
};
pub use span_rel::{FinRel, FinSpan};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;

/// Canonical label for an ordered pair, used by products and pullbacks.
pub fn pair_label(x: &str, y: &str) -> String {
    format!("({x},{y})")
}

/// A finite set of distinct text labels, stored sorted.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "FinSetWire", into = "FinSetWire")]
pub struct FinSet {
    elements: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FinSetWire {
    elements: Vec<String>,
}

impl TryFrom<FinSetWire> for FinSet {
    type Error = CoreError;
    fn try_from(w: FinSetWire) -> Result<Self, CoreError> {
        FinSet::new(w.elements)
    }
}

impl From<FinSet> for FinSetWire {
    fn from(s: FinSet) -> Self {
        FinSetWire { elements: s.elements }
    }
}

impl FinSet {
    /// Builds a set from labels, sorting them; duplicate labels are an error.
    pub fn new<I, S>(labels: I) -> Result<Self, CoreError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut elements: Vec<String> = labels.into_iter().map(Into::into).collect();
        elements.sort();
        for w in elements.windows(2) {
            if w[0] == w[1] {
                return Err(CoreError::DuplicateLabel { label: w[0].clone() });
            }
        }
        Ok(FinSet { elements })
    }

    /// The empty set.
    pub fn empty() -> Self {
        FinSet { elements: Vec::new() }
    }

    /// The canonical carrier of a given size, with labels `x1 < x2 < ...`.
    ///
    /// Only sizes up to nine keep that order lexicographic; enumeration
    /// budgets stay far below that.
    pub fn canonical(size: usize) -> Self {
        assert!(size <= 9, "canonical carriers are only defined up to size 9");
        FinSet {
            elements: (1..=size).map(|i| format!("x{i}")).collect(),
        }
    }

    /// The singleton `{*}` used as the terminal object.
    pub fn point() -> Self {
        FinSet { elements: vec!["*".to_string()] }
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.elements.binary_search_by(|e| e.as_str().cmp(label)).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.elements.iter().map(String::as_str)
    }
}

impl fmt::Debug for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// A total map between finite sets.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "FinFnWire", into = "FinFnWire")]
pub struct FinFn {
    dom: FinSet,
    cod: FinSet,
    map: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FinFnWire {
    dom: FinSet,
    cod: FinSet,
    map: BTreeMap<String, String>,
}

impl TryFrom<FinFnWire> for FinFn {
    type Error = CoreError;
    fn try_from(w: FinFnWire) -> Result<Self, CoreError> {
        FinFn::new(w.dom, w.cod, w.map)
    }
}

impl From<FinFn> for FinFnWire {
    fn from(f: FinFn) -> Self {
        FinFnWire { dom: f.dom, cod: f.cod, map: f.map }
    }
}

impl FinFn {
    /// Builds a map, checking totality, that no key falls outside the domain,
    /// and that every value lands in the codomain.
    pub fn new(
        dom: FinSet,
        cod: FinSet,
        map: BTreeMap<String, String>,
    ) -> Result<Self, CoreError> {
        for key in map.keys() {
            if !dom.contains(key) {
                return Err(CoreError::KeyOutsideDomain { label: key.clone() });
            }
        }
        for x in dom.iter() {
            match map.get(x) {
                None => return Err(CoreError::NotTotal { label: x.to_string() }),
                Some(v) if !cod.contains(v) => {
                    return Err(CoreError::ValueOutsideCodomain {
                        label: x.to_string(),
                        value: v.clone(),
                    })
                }
                Some(_) => {}
            }
        }
        Ok(FinFn { dom, cod, map })
    }

    /// Builds a map by evaluating a closure on every domain element.
    pub fn from_fn(
        dom: &FinSet,
        cod: &FinSet,
        f: impl Fn(&str) -> String,
    ) -> Result<Self, CoreError> {
        let map = dom.iter().map(|x| (x.to_string(), f(x))).collect();
        FinFn::new(dom.clone(), cod.clone(), map)
    }

    pub fn identity(a: &FinSet) -> Self {
        let map = a.iter().map(|x| (x.to_string(), x.to_string())).collect();
        FinFn { dom: a.clone(), cod: a.clone(), map }
    }

    /// The constant map onto one codomain element.
    pub fn constant(dom: &FinSet, cod: &FinSet, value: &str) -> Result<Self, CoreError> {
        FinFn::from_fn(dom, cod, |_| value.to_string())
    }

    /// The unique map into the singleton `{*}`.
    pub fn to_point(dom: &FinSet) -> Self {
        let point = FinSet::point();
        let map = dom.iter().map(|x| (x.to_string(), "*".to_string())).collect();
        FinFn { dom: dom.clone(), cod: point, map }
    }

    pub fn dom(&self) -> &FinSet {
        &self.dom
    }

    pub fn cod(&self) -> &FinSet {
        &self.cod
    }

    /// Applies the map. Panics if `x` is not a domain element; the
    /// constructor guarantees totality, so this is the indexing operation.
    pub fn apply(&self, x: &str) -> &str {
        self.map
            .get(x)
            .unwrap_or_else(|| panic!("{x:?} is not in the domain {:?}", self.dom))
    }

    pub fn get(&self, x: &str) -> Option<&str> {
        self.map.get(x).map(String::as_str)
    }

    /// `self ∘ inner`: first `inner`, then `self`.
    pub fn compose(&self, inner: &FinFn) -> Result<FinFn, CoreError> {
        if inner.cod != self.dom {
            return Err(CoreError::CompositionMismatch {
                expected: format!("{:?}", self.dom),
                found: format!("{:?}", inner.cod),
            });
        }
        let map = inner
            .dom
            .iter()
            .map(|x| (x.to_string(), self.apply(inner.apply(x)).to_string()))
            .collect();
        Ok(FinFn { dom: inner.dom.clone(), cod: self.cod.clone(), map })
    }

    pub fn is_identity(&self) -> bool {
        self.dom == self.cod && self.dom.iter().all(|x| self.apply(x) == x)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.dom.iter().all(|x| seen.insert(self.apply(x)))
    }

    pub fn is_surjective(&self) -> bool {
        let image: BTreeSet<&str> = self.dom.iter().map(|x| self.apply(x)).collect();
        image.len() == self.cod.len()
    }

    pub fn is_bijective(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// The inverse map, when this map is a bijection.
    pub fn inverse(&self) -> Option<FinFn> {
        if !self.is_bijective() {
            return None;
        }
        let map = self
            .dom
            .iter()
            .map(|x| (self.apply(x).to_string(), x.to_string()))
            .collect();
        Some(FinFn { dom: self.cod.clone(), cod: self.dom.clone(), map })
    }

    /// All maps `dom -> cod` in a fixed deterministic order.
    ///
    /// The order runs an odometer over the sorted domain, so the identity and
    /// constant maps appear at predictable positions. The count is
    /// `|cod|^|dom|`; callers cap it through their budgets.
    pub fn enumerate(dom: &FinSet, cod: &FinSet) -> Vec<FinFn> {
        FinFn::enumerate_iter(dom, cod).collect()
    }

    /// Lazy version of [`FinFn::enumerate`], for searches that stop early or
    /// apply a cap: the candidate count is `|cod|^|dom|` and is never
    /// materialized up front.
    pub fn enumerate_iter(dom: &FinSet, cod: &FinSet) -> FnEnumerator {
        let state = if cod.is_empty() && !dom.is_empty() {
            None
        } else {
            Some(vec![0usize; dom.len()])
        };
        FnEnumerator { dom: dom.clone(), cod: cod.clone(), state }
    }
}

/// Odometer over all maps between two fixed finite sets.
pub struct FnEnumerator {
    dom: FinSet,
    cod: FinSet,
    state: Option<Vec<usize>>,
}

impl Iterator for FnEnumerator {
    type Item = FinFn;

    fn next(&mut self) -> Option<FinFn> {
        let digits = self.state.as_mut()?;
        let map: BTreeMap<String, String> = self
            .dom
            .iter()
            .enumerate()
            .map(|(i, x)| (x.to_string(), self.cod.elements()[digits[i]].clone()))
            .collect();
        let item = FinFn { dom: self.dom.clone(), cod: self.cod.clone(), map };
        let mut i = 0;
        loop {
            if i == digits.len() {
                self.state = None;
                break;
            }
            digits[i] += 1;
            if digits[i] < self.cod.len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        Some(item)
    }
}

impl fmt::Debug for FinFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.dom.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}↦{}", self.apply(x))?;
        }
        write!(f, "]: {:?} → {:?}", self.dom, self.cod)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(labels: &[&str]) -> FinSet {
        FinSet::new(labels.iter().copied()).unwrap()
    }

    #[test]
    fn elements_are_sorted_and_distinct() {
        let s = set(&["b", "a", "c"]);
        assert_eq!(s.elements(), &["a", "b", "c"]);
        assert!(matches!(
            FinSet::new(["a", "a"]),
            Err(CoreError::DuplicateLabel { .. })
        ));
    }

    #[test]
    fn function_validation() {
        let a = set(&["x", "y"]);
        let b = set(&["0", "1"]);
        let ok = FinFn::new(
            a.clone(),
            b.clone(),
            [("x", "0"), ("y", "1")]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        );
        assert!(ok.is_ok());

        let missing = FinFn::new(
            a.clone(),
            b.clone(),
            [("x".to_string(), "0".to_string())].into_iter().collect(),
        );
        assert!(matches!(missing, Err(CoreError::NotTotal { .. })));

        let stray = FinFn::new(
            a.clone(),
            b.clone(),
            [("x", "0"), ("y", "1"), ("z", "0")]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        );
        assert!(matches!(stray, Err(CoreError::KeyOutsideDomain { .. })));

        let out = FinFn::new(
            a,
            b,
            [("x", "0"), ("y", "7")]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        );
        assert!(matches!(out, Err(CoreError::ValueOutsideCodomain { .. })));
    }

    #[test]
    fn composition_and_identity() {
        let a = set(&["x", "y"]);
        let b = set(&["0", "1"]);
        let f = FinFn::from_fn(&a, &b, |x| if x == "x" { "0" } else { "1" }.into()).unwrap();
        let id_b = FinFn::identity(&b);
        assert_eq!(id_b.compose(&f).unwrap(), f);
        let id_a = FinFn::identity(&a);
        assert_eq!(f.compose(&id_a).unwrap(), f);
        assert!(f.compose(&id_b).is_err());
    }

    #[test]
    fn enumerate_counts_functions() {
        let a = set(&["x", "y"]);
        let b = set(&["0", "1", "2"]);
        assert_eq!(FinFn::enumerate(&a, &b).len(), 9);
        assert_eq!(FinFn::enumerate(&FinSet::empty(), &b).len(), 1);
        assert_eq!(FinFn::enumerate(&a, &FinSet::empty()).len(), 0);
    }

    #[test]
    fn serde_round_trip_and_unknown_field_rejection() {
        let a = set(&["x", "y"]);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"{"elements":["x","y"]}"#);
        let back: FinSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);

        let unsorted: FinSet = serde_json::from_str(r#"{"elements":["y","x"]}"#).unwrap();
        assert_eq!(unsorted, a);

        let dup: Result<FinSet, _> = serde_json::from_str(r#"{"elements":["x","x"]}"#);
        assert!(dup.is_err());

        let unknown: Result<FinSet, _> =
            serde_json::from_str(r#"{"elements":["x"],"extra":1}"#);
        assert!(unknown.is_err());
    }

    #[test]
    fn finfn_serde_rejects_non_total_maps() {
        let json = r#"{"dom":{"elements":["x"]},"cod":{"elements":["0"]},"map":{}}"#;
        let r: Result<FinFn, _> = serde_json::from_str(json);
        assert!(r.is_err());
        let ok = r#"{"dom":{"elements":["x"]},"cod":{"elements":["0"]},"map":{"x":"0"}}"#;
        let f: FinFn = serde_json::from_str(ok).unwrap();
        assert_eq!(f.apply("x"), "0");
    }
}
