//! Matrices of finite sets between finite index sets.
//!
//! An arrow `M` from `S` to `T` assigns a finite set `M(t, s)` to every
//! target/source pair.  The composite of `M : S -/-> T` with `N : T -/-> U`
//! has entries `(N after M)(u, s) = sum over t of N(u, t) x M(t, s)`, where
//! the summand contributed by the middle index `t` carries labels
//! `"t:(n,m)"` for `n` in `N(u, t)` and `m` in `M(t, s)`.  Units are
//! diagonal singletons.  A cell from `M` to `N` over verticals `(f, g)` is a
//! family of functions `M(t, s) -> N(g t, f s)`, with no further condition:
//! every correctly typed family counts.
//!
//! The wire form keys entries by `"t|s"`, so index labels must not contain
//! the `|` separator.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::double::{Budget, Cell, CellOf, DoubleCategory, Enumerated, FrameOf};
use crate::error::{CoreError, DblError};
use crate::finset::{FinFn, FinSet};

const KEY_SEP: char = '|';

/// A finite-set-valued matrix, the horizontal arrow of the matrix instance.
///
/// Entries are keyed `(target element, source element)` and the entry map is
/// total on the product of the two index sets.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "VMatrixWire", into = "VMatrixWire")]
pub struct VMatrix {
    src: FinSet,
    tgt: FinSet,
    entries: BTreeMap<(String, String), FinSet>,
}

impl VMatrix {
    /// Validates totality of the entry table over `tgt x src` and rejects
    /// index labels containing the wire-format separator.
    pub fn new(
        src: FinSet,
        tgt: FinSet,
        entries: BTreeMap<(String, String), FinSet>,
    ) -> Result<Self, CoreError> {
        for label in src.iter().chain(tgt.iter()) {
            if label.contains(KEY_SEP) {
                return Err(CoreError::ReservedSeparator {
                    label: label.to_string(),
                    sep: KEY_SEP,
                });
            }
        }
        for (t, s) in entries.keys() {
            if !tgt.contains(t) {
                return Err(CoreError::KeyOutsideDomain { label: t.clone() });
            }
            if !src.contains(s) {
                return Err(CoreError::KeyOutsideDomain { label: s.clone() });
            }
        }
        for t in tgt.iter() {
            for s in src.iter() {
                if !entries.contains_key(&(t.to_string(), s.to_string())) {
                    return Err(CoreError::NotTotal {
                        label: format!("{t}{KEY_SEP}{s}"),
                    });
                }
            }
        }
        Ok(VMatrix { src, tgt, entries })
    }

    /// Builds the entry table by evaluating `entry(t, s)` over the indices.
    pub fn from_fn(
        src: FinSet,
        tgt: FinSet,
        mut entry: impl FnMut(&str, &str) -> FinSet,
    ) -> Result<Self, CoreError> {
        let mut entries = BTreeMap::new();
        for t in tgt.iter() {
            for s in src.iter() {
                entries.insert((t.to_string(), s.to_string()), entry(t, s));
            }
        }
        VMatrix::new(src, tgt, entries)
    }

    /// The identity matrix: singletons on the diagonal, empty elsewhere.
    pub fn identity(a: &FinSet) -> Self {
        VMatrix::from_fn(a.clone(), a.clone(), |t, s| {
            if t == s {
                FinSet::point()
            } else {
                FinSet::empty()
            }
        })
        .expect("diagonal matrix is total")
    }

    pub fn src(&self) -> &FinSet {
        &self.src
    }

    pub fn tgt(&self) -> &FinSet {
        &self.tgt
    }

    /// The entry at a `(target, source)` index pair.
    ///
    /// # Panics
    /// Panics if either index is outside its carrier; totality then
    /// guarantees presence.
    pub fn entry(&self, t: &str, s: &str) -> &FinSet {
        self.entries
            .get(&(t.to_string(), s.to_string()))
            .unwrap_or_else(|| panic!("matrix has no entry at ({t},{s})"))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, &FinSet)> {
        self.entries
            .iter()
            .map(|((t, s), set)| (t.as_str(), s.as_str(), set))
    }

    /// Total number of elements across all entries.
    pub fn weight(&self) -> usize {
        self.entries.values().map(FinSet::len).sum()
    }

    /// The composite label contributed by middle index `t` and the pair
    /// `(n, m)` of outer and inner elements.
    fn sum_label(t: &str, n: &str, m: &str) -> String {
        format!("{t}:({n},{m})")
    }

    /// Matrix composition; `self` is the outer factor.
    pub fn compose(&self, inner: &VMatrix) -> Result<VMatrix, CoreError> {
        if inner.tgt != self.src {
            return Err(CoreError::CompositionMismatch {
                expected: format!("{:?}", self.src),
                found: format!("{:?}", inner.tgt),
            });
        }
        let mids = &self.src;
        let mut entries = BTreeMap::new();
        for u in self.tgt.iter() {
            for s in inner.src.iter() {
                let mut labels = Vec::new();
                for t in mids.iter() {
                    for n in self.entry(u, t).iter() {
                        for m in inner.entry(t, s).iter() {
                            labels.push(VMatrix::sum_label(t, n, m));
                        }
                    }
                }
                entries.insert((u.to_string(), s.to_string()), FinSet::new(labels)?);
            }
        }
        VMatrix::new(inner.src.clone(), self.tgt.clone(), entries)
    }
}

impl fmt::Debug for VMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vmat{{")?;
        let mut first = true;
        for ((t, s), set) in &self.entries {
            if !set.is_empty() {
                if !first {
                    write!(f, ", ")?;
                }
                write!(f, "{t}{KEY_SEP}{s}:{set:?}")?;
                first = false;
            }
        }
        if first {
            write!(f, "zero {:?}->{:?}", self.src, self.tgt)?;
        }
        write!(f, "}}")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VMatrixWire {
    src: FinSet,
    tgt: FinSet,
    entries: BTreeMap<String, FinSet>,
}

impl TryFrom<VMatrixWire> for VMatrix {
    type Error = CoreError;

    fn try_from(wire: VMatrixWire) -> Result<Self, CoreError> {
        let mut entries = BTreeMap::new();
        for (key, set) in wire.entries {
            let Some((t, s)) = key.split_once(KEY_SEP) else {
                return Err(CoreError::KeyOutsideDomain { label: key });
            };
            entries.insert((t.to_string(), s.to_string()), set);
        }
        VMatrix::new(wire.src, wire.tgt, entries)
    }
}

impl From<VMatrix> for VMatrixWire {
    fn from(m: VMatrix) -> Self {
        VMatrixWire {
            src: m.src,
            tgt: m.tgt,
            entries: m
                .entries
                .into_iter()
                .map(|((t, s), set)| (format!("{t}{KEY_SEP}{s}"), set))
                .collect(),
        }
    }
}

/// Cell payload of the matrix instance: one function per entry of the top
/// matrix, landing in the matching entry of the bottom matrix.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VMatCellFamily(pub BTreeMap<(String, String), FinFn>);

impl fmt::Debug for VMatCellFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "family{{")?;
        let mut first = true;
        for ((t, s), component) in &self.0 {
            if !component.dom().is_empty() {
                if !first {
                    write!(f, ", ")?;
                }
                write!(f, "{t}{KEY_SEP}{s}:{component:?}")?;
                first = false;
            }
        }
        write!(f, "}}")
    }
}

impl VMatCellFamily {
    fn component(&self, t: &str, s: &str) -> Option<&FinFn> {
        self.0.get(&(t.to_string(), s.to_string()))
    }
}

/// The double category of finite sets, functions, and set-valued matrices.
#[derive(Clone, Copy, Debug, Default)]
pub struct VMatDouble;

impl VMatDouble {
    pub fn new() -> Self {
        VMatDouble
    }

    /// Largest entry cardinality used when enumerating or sampling
    /// matrices.  Entry sizes blow up the arrow count much faster than
    /// carrier sizes do, so they are capped at two even when carriers are
    /// allowed to be bigger.
    fn entry_cap(budget: &Budget) -> usize {
        budget.max_size.min(2)
    }

}

impl DoubleCategory for VMatDouble {
    type Obj = FinSet;
    type VArr = FinFn;
    type HArr = VMatrix;
    type Payload = VMatCellFamily;

    fn name(&self) -> &'static str {
        "vmat"
    }

    fn v_dom(&self, f: &FinFn) -> FinSet {
        f.dom().clone()
    }

    fn v_cod(&self, f: &FinFn) -> FinSet {
        f.cod().clone()
    }

    fn v_id(&self, a: &FinSet) -> FinFn {
        FinFn::identity(a)
    }

    fn v_comp(&self, g: &FinFn, f: &FinFn) -> Result<FinFn, DblError> {
        Ok(g.compose(f)?)
    }

    fn h_src(&self, m: &VMatrix) -> FinSet {
        m.src().clone()
    }

    fn h_tgt(&self, m: &VMatrix) -> FinSet {
        m.tgt().clone()
    }

    fn unit(&self, a: &FinSet) -> VMatrix {
        VMatrix::identity(a)
    }

    fn hcomp(&self, outer: &VMatrix, inner: &VMatrix) -> Result<VMatrix, DblError> {
        Ok(outer.compose(inner)?)
    }

    fn cell_ok(&self, c: &CellOf<Self>) -> Result<(), DblError> {
        if c.left.dom() != c.top.src()
            || c.left.cod() != c.bottom.src()
            || c.right.dom() != c.top.tgt()
            || c.right.cod() != c.bottom.tgt()
        {
            return Err(DblError::BoundaryMismatch {
                detail: format!(
                    "verticals {:?}, {:?} do not frame {:?} over {:?}",
                    c.left, c.right, c.top, c.bottom
                ),
            });
        }
        for (t, s, set) in c.top.entries() {
            let Some(component) = c.payload.component(t, s) else {
                return Err(DblError::InvalidCell {
                    detail: format!("family is missing the component at ({t},{s})"),
                });
            };
            let want_cod = c.bottom.entry(c.right.apply(t), c.left.apply(s));
            if component.dom() != set || component.cod() != want_cod {
                return Err(DblError::InvalidCell {
                    detail: format!(
                        "component at ({t},{s}) has type {:?}->{:?}, expected {:?}->{:?}",
                        component.dom(),
                        component.cod(),
                        set,
                        want_cod
                    ),
                });
            }
        }
        if c.payload.0.len() != c.top.src().len() * c.top.tgt().len() {
            return Err(DblError::InvalidCell {
                detail: "family has components outside the index range".to_string(),
            });
        }
        Ok(())
    }

    fn id_cell(&self, m: &VMatrix) -> CellOf<Self> {
        let family = m
            .entries()
            .map(|(t, s, set)| ((t.to_string(), s.to_string()), FinFn::identity(set)))
            .collect();
        Cell {
            top: m.clone(),
            bottom: m.clone(),
            left: FinFn::identity(m.src()),
            right: FinFn::identity(m.tgt()),
            payload: VMatCellFamily(family),
        }
    }

    fn unit_cell(&self, f: &FinFn) -> CellOf<Self> {
        let top = VMatrix::identity(f.dom());
        let bottom = VMatrix::identity(f.cod());
        let family = top
            .entries()
            .map(|(t, s, set)| {
                let cod = bottom.entry(f.apply(t), f.apply(s)).clone();
                // Diagonal entries send the singleton to the singleton; off
                // the diagonal the domain is empty.
                let assignments = set
                    .iter()
                    .map(|x| (x.to_string(), x.to_string()))
                    .collect();
                (
                    (t.to_string(), s.to_string()),
                    FinFn::new(set.clone(), cod, assignments).expect("unit component is total"),
                )
            })
            .collect();
        Cell {
            top,
            bottom,
            left: f.clone(),
            right: f.clone(),
            payload: VMatCellFamily(family),
        }
    }

    fn vcomp_payload(
        &self,
        top: &CellOf<Self>,
        bottom: &CellOf<Self>,
    ) -> Result<VMatCellFamily, DblError> {
        let mut family = BTreeMap::new();
        for (t, s, _) in top.top.entries() {
            let upper = top.payload.component(t, s).ok_or_else(|| DblError::InvalidCell {
                detail: format!("upper family is missing the component at ({t},{s})"),
            })?;
            let (mid_t, mid_s) = (top.right.apply(t), top.left.apply(s));
            let lower =
                bottom
                    .payload
                    .component(mid_t, mid_s)
                    .ok_or_else(|| DblError::InvalidCell {
                        detail: format!(
                            "lower family is missing the component at ({mid_t},{mid_s})"
                        ),
                    })?;
            family.insert((t.to_string(), s.to_string()), lower.compose(upper)?);
        }
        Ok(VMatCellFamily(family))
    }

    fn hcomp_payload(
        &self,
        outer: &CellOf<Self>,
        inner: &CellOf<Self>,
    ) -> Result<VMatCellFamily, DblError> {
        let top = outer.top.compose(&inner.top)?;
        let bottom = outer.bottom.compose(&inner.bottom)?;
        let g = &inner.right; // middle vertical, shared with outer.left
        let mut family = BTreeMap::new();
        for u in outer.top.tgt().iter() {
            for s in inner.top.src().iter() {
                let dom = top.entry(u, s).clone();
                let cod = bottom
                    .entry(outer.right.apply(u), inner.left.apply(s))
                    .clone();
                let mut assignments = BTreeMap::new();
                for t in inner.top.tgt().iter() {
                    let phi_n = outer.payload.component(u, t).ok_or_else(|| {
                        DblError::InvalidCell {
                            detail: format!("outer family is missing the component at ({u},{t})"),
                        }
                    })?;
                    let phi_m = inner.payload.component(t, s).ok_or_else(|| {
                        DblError::InvalidCell {
                            detail: format!("inner family is missing the component at ({t},{s})"),
                        }
                    })?;
                    for n in outer.top.entry(u, t).iter() {
                        for m in inner.top.entry(t, s).iter() {
                            assignments.insert(
                                VMatrix::sum_label(t, n, m),
                                VMatrix::sum_label(g.apply(t), phi_n.apply(n), phi_m.apply(m)),
                            );
                        }
                    }
                }
                let f = FinFn::new(dom, cod, assignments)?;
                family.insert((u.to_string(), s.to_string()), f);
            }
        }
        Ok(VMatCellFamily(family))
    }

    fn associator(
        &self,
        m: &VMatrix,
        n: &VMatrix,
        p: &VMatrix,
    ) -> Result<CellOf<Self>, DblError> {
        // Arrows p : A -/-> B, n : B -/-> C, m : C -/-> D.  The left-nested
        // composite has labels "b:(c:(x_m,x_n),x_p)"; the right-nested one
        // has "c:(x_m,b:(x_n,x_p))".  Rebracket by walking the generators.
        let lhs = self.hcomp(&self.hcomp(m, n)?, p)?;
        let rhs = self.hcomp(m, &self.hcomp(n, p)?)?;
        let mut family = BTreeMap::new();
        for d in m.tgt().iter() {
            for a in p.src().iter() {
                let mut assignments = BTreeMap::new();
                for b in p.tgt().iter() {
                    for c in n.tgt().iter() {
                        for xm in m.entry(d, c).iter() {
                            for xn in n.entry(c, b).iter() {
                                for xp in p.entry(b, a).iter() {
                                    let from = VMatrix::sum_label(
                                        b,
                                        &VMatrix::sum_label(c, xm, xn),
                                        xp,
                                    );
                                    let to = VMatrix::sum_label(
                                        c,
                                        xm,
                                        &VMatrix::sum_label(b, xn, xp),
                                    );
                                    assignments.insert(from, to);
                                }
                            }
                        }
                    }
                }
                let f = FinFn::new(lhs.entry(d, a).clone(), rhs.entry(d, a).clone(), assignments)
                    .map_err(DblError::from)?;
                family.insert((d.to_string(), a.to_string()), f);
            }
        }
        let c = Cell {
            top: lhs.clone(),
            bottom: rhs,
            left: FinFn::identity(lhs.src()),
            right: FinFn::identity(lhs.tgt()),
            payload: VMatCellFamily(family),
        };
        self.cell_ok(&c)?;
        Ok(c)
    }

    fn lunitor(&self, m: &VMatrix) -> Result<CellOf<Self>, DblError> {
        // Only the diagonal of the identity contributes, so every label of
        // the composite entry at (t, s) reads "t:(*,x)" for x in m(t, s).
        let top = self.hcomp(&self.unit(m.tgt()), m)?;
        let mut family = BTreeMap::new();
        for (t, s, set) in m.entries() {
            let dom = top.entry(t, s).clone();
            let assignments = set
                .iter()
                .map(|x| (VMatrix::sum_label(t, "*", x), x.to_string()))
                .collect();
            let f = FinFn::new(dom, set.clone(), assignments)?;
            family.insert((t.to_string(), s.to_string()), f);
        }
        let c = Cell {
            top,
            bottom: m.clone(),
            left: FinFn::identity(m.src()),
            right: FinFn::identity(m.tgt()),
            payload: VMatCellFamily(family),
        };
        self.cell_ok(&c)?;
        Ok(c)
    }

    fn runitor(&self, m: &VMatrix) -> Result<CellOf<Self>, DblError> {
        let top = self.hcomp(m, &self.unit(m.src()))?;
        let mut family = BTreeMap::new();
        for (t, s, set) in m.entries() {
            let dom = top.entry(t, s).clone();
            let assignments = set
                .iter()
                .map(|x| (VMatrix::sum_label(s, x, "*"), x.to_string()))
                .collect();
            let f = FinFn::new(dom, set.clone(), assignments)?;
            family.insert((t.to_string(), s.to_string()), f);
        }
        let c = Cell {
            top,
            bottom: m.clone(),
            left: FinFn::identity(m.src()),
            right: FinFn::identity(m.tgt()),
            payload: VMatCellFamily(family),
        };
        self.cell_ok(&c)?;
        Ok(c)
    }

    fn try_invert(&self, c: &CellOf<Self>) -> Option<CellOf<Self>> {
        if !crate::double::is_globular(self, c) {
            return None;
        }
        let mut family = BTreeMap::new();
        for ((t, s), component) in &c.payload.0 {
            family.insert((t.clone(), s.clone()), component.inverse()?);
        }
        let inv = Cell {
            top: c.bottom.clone(),
            bottom: c.top.clone(),
            left: c.left.clone(),
            right: c.right.clone(),
            payload: VMatCellFamily(family),
        };
        self.cell_ok(&inv).ok()?;
        Some(inv)
    }

    fn objects(&self, budget: &Budget) -> Vec<FinSet> {
        (0..=budget.max_size).map(FinSet::canonical).collect()
    }

    fn verticals(&self, a: &FinSet, b: &FinSet) -> Vec<FinFn> {
        FinFn::enumerate(a, b)
    }

    fn horizontals(&self, a: &FinSet, b: &FinSet, budget: &Budget) -> Enumerated<VMatrix> {
        // Odometer over entry cardinalities, so every matrix whose entries
        // stay under the cap appears exactly once.
        let cap = VMatDouble::entry_cap(budget);
        let slots = a.len() * b.len();
        let mut digits = vec![0usize; slots];
        let mut items = Vec::new();
        let mut truncated = false;
        'outer: loop {
            if items.len() >= budget.max_hom {
                truncated = true;
                break;
            }
            let mut next = digits.iter().copied();
            let m = VMatrix::from_fn(a.clone(), b.clone(), |_, _| {
                FinSet::canonical(next.next().unwrap_or(0))
            })
            .expect("generated matrix is total");
            items.push(m);
            if slots == 0 {
                break;
            }
            for i in 0..slots {
                digits[i] += 1;
                if digits[i] <= cap {
                    continue 'outer;
                }
                digits[i] = 0;
            }
            break;
        }
        Enumerated { items, truncated }
    }

    fn cells(&self, frame: &FrameOf<Self>, budget: &Budget) -> Enumerated<CellOf<Self>> {
        if frame.left.dom() != frame.top.src()
            || frame.left.cod() != frame.bottom.src()
            || frame.right.dom() != frame.top.tgt()
            || frame.right.cod() != frame.bottom.tgt()
        {
            return Enumerated::complete(Vec::new());
        }
        let keys: Vec<(String, String)> = frame
            .top
            .entries()
            .map(|(t, s, _)| (t.to_string(), s.to_string()))
            .collect();
        let mut columns: Vec<Vec<FinFn>> = Vec::with_capacity(keys.len());
        for (t, s) in &keys {
            let dom = frame.top.entry(t, s);
            let cod = frame.bottom.entry(frame.right.apply(t), frame.left.apply(s));
            // One column can already dwarf the cell cap, so never collect
            // past it; the product loop below re-detects the truncation.
            let fns: Vec<FinFn> = FinFn::enumerate_iter(dom, cod)
                .take(budget.max_cells.saturating_add(1))
                .collect();
            if fns.is_empty() {
                return Enumerated::complete(Vec::new());
            }
            columns.push(fns);
        }
        // Odometer over the per-entry choices.
        let mut digits = vec![0usize; columns.len()];
        let mut items = Vec::new();
        let mut truncated = false;
        'outer: loop {
            if items.len() >= budget.max_cells {
                truncated = true;
                break;
            }
            let family = keys
                .iter()
                .zip(columns.iter().zip(digits.iter()))
                .map(|(key, (fns, &i))| (key.clone(), fns[i].clone()))
                .collect();
            items.push(Cell {
                top: frame.top.clone(),
                bottom: frame.bottom.clone(),
                left: frame.left.clone(),
                right: frame.right.clone(),
                payload: VMatCellFamily(family),
            });
            if columns.is_empty() {
                break;
            }
            for i in 0..columns.len() {
                digits[i] += 1;
                if digits[i] < columns[i].len() {
                    continue 'outer;
                }
                digits[i] = 0;
            }
            break;
        }
        Enumerated { items, truncated }
    }

    fn sample_hom(
        &self,
        a: &FinSet,
        b: &FinSet,
        rng: &mut ChaCha8Rng,
        budget: &Budget,
    ) -> Option<VMatrix> {
        let cap = VMatDouble::entry_cap(budget);
        VMatrix::from_fn(a.clone(), b.clone(), |_, _| {
            FinSet::canonical(rng.gen_range(0..=cap))
        })
        .ok()
    }

    fn sample_cell_under(
        &self,
        top: &VMatrix,
        left: &FinFn,
        right: &FinFn,
        rng: &mut ChaCha8Rng,
        budget: &Budget,
    ) -> Option<CellOf<Self>> {
        let cap = VMatDouble::entry_cap(budget).max(1);
        // Draw a random bottom matrix, then force entries that receive a
        // nonempty component to be nonempty so the family can be total.
        let mut bottom = self.sample_hom(left.cod(), right.cod(), rng, budget)?;
        let mut fixes: BTreeMap<(String, String), FinSet> = BTreeMap::new();
        for (t, s, set) in top.entries() {
            if !set.is_empty() {
                let key = (right.apply(t).to_string(), left.apply(s).to_string());
                if bottom.entry(&key.0, &key.1).is_empty() {
                    fixes.insert(key, FinSet::canonical(rng.gen_range(1..=cap)));
                }
            }
        }
        if !fixes.is_empty() {
            bottom = VMatrix::from_fn(left.cod().clone(), right.cod().clone(), |t, s| {
                fixes
                    .get(&(t.to_string(), s.to_string()))
                    .cloned()
                    .unwrap_or_else(|| bottom.entry(t, s).clone())
            })
            .ok()?;
        }
        let mut family = BTreeMap::new();
        for (t, s, set) in top.entries() {
            let cod = bottom.entry(right.apply(t), left.apply(s)).clone();
            let targets: Vec<&str> = cod.iter().collect();
            let assignments = set
                .iter()
                .map(|x| {
                    targets
                        .choose(rng)
                        .map(|chosen| (x.to_string(), (*chosen).to_string()))
                })
                .collect::<Option<BTreeMap<String, String>>>()?;
            let f = FinFn::new(set.clone(), cod, assignments).ok()?;
            family.insert((t.to_string(), s.to_string()), f);
        }
        Some(Cell {
            top: top.clone(),
            bottom,
            left: left.clone(),
            right: right.clone(),
            payload: VMatCellFamily(family),
        })
    }
}
