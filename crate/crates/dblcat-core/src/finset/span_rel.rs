//! Spans and binary relations between finite sets.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::finset::{FinFn, FinSet};

/// A span `A ← R → B`: two maps out of a shared apex.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "FinSpanWire", into = "FinSpanWire")]
pub struct FinSpan {
    left: FinFn,
    right: FinFn,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FinSpanWire {
    left: FinFn,
    right: FinFn,
}

impl TryFrom<FinSpanWire> for FinSpan {
    type Error = CoreError;
    fn try_from(w: FinSpanWire) -> Result<Self, CoreError> {
        FinSpan::new(w.left, w.right)
    }
}

impl From<FinSpan> for FinSpanWire {
    fn from(s: FinSpan) -> Self {
        FinSpanWire { left: s.left, right: s.right }
    }
}

impl FinSpan {
    pub fn new(left: FinFn, right: FinFn) -> Result<Self, CoreError> {
        if left.dom() != right.dom() {
            return Err(CoreError::ApexMismatch {
                left: format!("{:?}", left.dom()),
                right: format!("{:?}", right.dom()),
            });
        }
        Ok(FinSpan { left, right })
    }

    /// The identity span `A ← A → A`.
    pub fn identity(a: &FinSet) -> Self {
        FinSpan {
            left: FinFn::identity(a),
            right: FinFn::identity(a),
        }
    }

    pub fn apex(&self) -> &FinSet {
        self.left.dom()
    }

    /// The source object (codomain of the left leg).
    pub fn src(&self) -> &FinSet {
        self.left.cod()
    }

    /// The target object (codomain of the right leg).
    pub fn tgt(&self) -> &FinSet {
        self.right.cod()
    }

    pub fn left(&self) -> &FinFn {
        &self.left
    }

    pub fn right(&self) -> &FinFn {
        &self.right
    }
}

impl fmt::Debug for FinSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "span {:?} ← {:?} → {:?} (left {:?}, right {:?})",
            self.src(),
            self.apex(),
            self.tgt(),
            self.left,
            self.right
        )
    }
}

/// A binary relation: a set of pairs inside `src × tgt`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "FinRelWire", into = "FinRelWire")]
pub struct FinRel {
    src: FinSet,
    tgt: FinSet,
    pairs: BTreeSet<(String, String)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FinRelWire {
    src: FinSet,
    tgt: FinSet,
    pairs: Vec<(String, String)>,
}

impl TryFrom<FinRelWire> for FinRel {
    type Error = CoreError;
    fn try_from(w: FinRelWire) -> Result<Self, CoreError> {
        FinRel::new(w.src, w.tgt, w.pairs)
    }
}

impl From<FinRel> for FinRelWire {
    fn from(r: FinRel) -> Self {
        FinRelWire {
            src: r.src,
            tgt: r.tgt,
            pairs: r.pairs.into_iter().collect(),
        }
    }
}

impl FinRel {
    pub fn new(
        src: FinSet,
        tgt: FinSet,
        pairs: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self, CoreError> {
        let pairs: BTreeSet<(String, String)> = pairs.into_iter().collect();
        for (a, b) in &pairs {
            if !src.contains(a) || !tgt.contains(b) {
                return Err(CoreError::PairOutsideCarrier {
                    src: a.clone(),
                    tgt: b.clone(),
                });
            }
        }
        Ok(FinRel { src, tgt, pairs })
    }

    /// The diagonal relation on `a`.
    pub fn identity(a: &FinSet) -> Self {
        FinRel {
            src: a.clone(),
            tgt: a.clone(),
            pairs: a.iter().map(|x| (x.to_string(), x.to_string())).collect(),
        }
    }

    /// The empty relation between two carriers.
    pub fn empty(src: &FinSet, tgt: &FinSet) -> Self {
        FinRel {
            src: src.clone(),
            tgt: tgt.clone(),
            pairs: BTreeSet::new(),
        }
    }

    /// The full relation `src × tgt`.
    pub fn full(src: &FinSet, tgt: &FinSet) -> Self {
        FinRel {
            src: src.clone(),
            tgt: tgt.clone(),
            pairs: src
                .iter()
                .flat_map(|a| tgt.iter().map(move |b| (a.to_string(), b.to_string())))
                .collect(),
        }
    }

    /// The graph of a map: `{(x, f(x))}` as a relation `dom → cod`.
    pub fn graph(f: &FinFn) -> Self {
        FinRel {
            src: f.dom().clone(),
            tgt: f.cod().clone(),
            pairs: f
                .dom()
                .iter()
                .map(|x| (x.to_string(), f.apply(x).to_string()))
                .collect(),
        }
    }

    pub fn src(&self) -> &FinSet {
        &self.src
    }

    pub fn tgt(&self) -> &FinSet {
        &self.tgt
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.pairs.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn contains(&self, a: &str, b: &str) -> bool {
        self.pairs.contains(&(a.to_string(), b.to_string()))
    }

    pub fn size(&self) -> usize {
        self.pairs.len()
    }

    /// `self ∘ inner`: relate `a` to `c` when some `b` has
    /// `(a,b) ∈ inner` and `(b,c) ∈ self`.
    pub fn compose(&self, inner: &FinRel) -> Result<FinRel, CoreError> {
        if inner.tgt != self.src {
            return Err(CoreError::CompositionMismatch {
                expected: format!("{:?}", self.src),
                found: format!("{:?}", inner.tgt),
            });
        }
        let mut pairs = BTreeSet::new();
        for (a, b) in inner.pairs() {
            for (b2, c) in self.pairs() {
                if b == b2 {
                    pairs.insert((a.to_string(), c.to_string()));
                }
            }
        }
        Ok(FinRel {
            src: inner.src.clone(),
            tgt: self.tgt.clone(),
            pairs,
        })
    }

    /// The converse relation, swapping the two sides.
    pub fn converse(&self) -> FinRel {
        FinRel {
            src: self.tgt.clone(),
            tgt: self.src.clone(),
            pairs: self
                .pairs
                .iter()
                .map(|(a, b)| (b.clone(), a.clone()))
                .collect(),
        }
    }

    /// Intersection of two parallel relations.
    pub fn meet(&self, other: &FinRel) -> Result<FinRel, CoreError> {
        if self.src != other.src || self.tgt != other.tgt {
            return Err(CoreError::NotParallel);
        }
        Ok(FinRel {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            pairs: self.pairs.intersection(&other.pairs).cloned().collect(),
        })
    }

    /// Containment of parallel relations (the local order).
    pub fn is_contained_in(&self, other: &FinRel) -> bool {
        self.src == other.src
            && self.tgt == other.tgt
            && self.pairs.is_subset(&other.pairs)
    }

    /// All relations between two carriers, by subset rank; `2^(|src|·|tgt|)`
    /// entries, so callers cap it through their budgets.
    pub fn enumerate(src: &FinSet, tgt: &FinSet) -> Vec<FinRel> {
        let all: Vec<(String, String)> = src
            .iter()
            .flat_map(|a| tgt.iter().map(move |b| (a.to_string(), b.to_string())))
            .collect();
        assert!(all.len() <= 20, "relation enumeration over {} pairs", all.len());
        (0u32..(1 << all.len()))
            .map(|mask| FinRel {
                src: src.clone(),
                tgt: tgt.clone(),
                pairs: all
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, p)| p.clone())
                    .collect(),
            })
            .collect()
    }
}

impl fmt::Debug for FinRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rel {:?} ⇸ {:?} {{", self.src, self.tgt)?;
        for (i, (a, b)) in self.pairs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({a},{b})")?;
        }
        write!(f, "}}")
    }
}
