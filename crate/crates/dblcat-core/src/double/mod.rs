//! The generic double-category interface: frames, cells, enumeration
//! budgets, and the trait every concrete instance implements.
//!
//! Conventions used throughout the crate:
//!
//! * Vertical composition reads downward: `vcomp_cell(a, b)` stacks `a` on
//!   top of `b`, and its vertical boundaries are `b.left ∘ a.left` and
//!   `b.right ∘ a.right`.
//! * Horizontal composition reads right-to-left like function composition:
//!   `hcomp(outer, inner)` is `outer ⊙ inner`, with source the source of
//!   `inner` and target the target of `outer`.
//! * Coherence cells run from the left-nested to the right-nested
//!   bracketing: `associator(m, n, p) : (m ⊙ n) ⊙ p → m ⊙ (n ⊙ p)`, and the
//!   unitors collapse units: `lunitor(m) : U ⊙ m → m`,
//!   `runitor(m) : m ⊙ U → m`.

pub mod check;

pub use check::check_laws;

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::DblError;

/// A square cell: horizontal arrows on top and bottom, vertical arrows on
/// the sides, plus instance-specific witness data (an apex map, an
/// inclusion witness, an entry-wise function family, ...).
///
/// Cell equality is strict equality of the frame and the payload; no
/// normalization happens behind the scenes, so coherence isomorphisms stay
/// observable data.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Cell<H, V, P> {
    pub top: H,
    pub bottom: H,
    pub left: V,
    pub right: V,
    pub payload: P,
}

impl<H: Clone, V: Clone, P> Cell<H, V, P> {
    pub fn frame(&self) -> Frame<H, V> {
        Frame {
            top: self.top.clone(),
            bottom: self.bottom.clone(),
            left: self.left.clone(),
            right: self.right.clone(),
        }
    }
}

/// The boundary of a cell, without the witness data.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Frame<H, V> {
    pub top: H,
    pub bottom: H,
    pub left: V,
    pub right: V,
}

pub type CellOf<D> = Cell<
    <D as DoubleCategory>::HArr,
    <D as DoubleCategory>::VArr,
    <D as DoubleCategory>::Payload,
>;
pub type FrameOf<D> = Frame<<D as DoubleCategory>::HArr, <D as DoubleCategory>::VArr>;

/// Size and sampling limits for the enumerative checkers.  All randomness
/// is derived from `seed`, so a fixed budget replays exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budget {
    /// Carriers (objects, span apexes, matrix entries) up to this size.
    pub max_size: usize,
    /// Cap on horizontal-arrow enumeration per hom.
    pub max_hom: usize,
    /// Cap on cell enumeration per frame.
    pub max_cells: usize,
    /// Cap on enumerated objects (relevant where objects are structured,
    /// e.g. internal categories).
    pub max_objects: usize,
    /// Probe carriers in universal-property searches stay at most this big.
    pub probe_size: usize,
    /// Number of sampled frames per seeded sweep.
    pub samples: usize,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_size: 3,
            max_hom: 1000,
            max_cells: 100_000,
            max_objects: 64,
            probe_size: 2,
            samples: 200,
            seed: 0,
        }
    }
}

impl Budget {
    pub fn with_size(max_size: usize) -> Self {
        Budget { max_size, ..Budget::default() }
    }

    /// Same budget with the size bound lowered to `max_size` (never raised).
    pub fn shrink_to(&self, max_size: usize) -> Budget {
        Budget { max_size: self.max_size.min(max_size), ..self.clone() }
    }

    /// A cheap variant for drawing random examples rather than exhausting a
    /// frame; keeps sampling loops off the large enumerations.
    pub fn sampling(&self) -> Budget {
        Budget { max_cells: self.max_cells.min(64), ..self.clone() }
    }

    /// Deterministic RNG for one named sweep.  Distinct tags give
    /// independent streams; the same `(seed, tag)` pair replays.
    pub fn rng(&self, tag: &str) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ fnv1a(tag))
    }
}

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

/// An enumeration that may have been cut off by a budget cap.
#[derive(Clone, Debug)]
pub struct Enumerated<T> {
    pub items: Vec<T>,
    pub truncated: bool,
}

impl<T> Enumerated<T> {
    pub fn complete(items: Vec<T>) -> Self {
        Enumerated { items, truncated: false }
    }

    /// Collect at most `cap` items, noting whether anything was left over.
    pub fn capped(iter: impl IntoIterator<Item = T>, cap: usize) -> Self {
        let mut items = Vec::new();
        let mut truncated = false;
        for x in iter {
            if items.len() == cap {
                truncated = true;
                break;
            }
            items.push(x);
        }
        Enumerated { items, truncated }
    }

    pub fn map<U>(self, f: impl FnMut(T) -> U) -> Enumerated<U> {
        Enumerated { items: self.items.into_iter().map(f).collect(), truncated: self.truncated }
    }
}

/// Outcome of a single check: `Partial` means a budget cap kept the check
/// from finishing the sweep it asked for, so nothing definite was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Partial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRow {
    pub check: String,
    pub verdict: Verdict,
    pub detail: Option<String>,
}

/// Ordered list of check outcomes; the aggregate is the worst row.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VerdictReport {
    pub rows: Vec<VerdictRow>,
}

impl VerdictReport {
    pub fn new() -> Self {
        VerdictReport { rows: Vec::new() }
    }

    pub fn push(&mut self, check: impl Into<String>, verdict: Verdict, detail: Option<String>) {
        self.rows.push(VerdictRow { check: check.into(), verdict, detail });
    }

    pub fn pass(&mut self, check: impl Into<String>) {
        self.push(check, Verdict::Pass, None);
    }

    pub fn fail(&mut self, check: impl Into<String>, detail: impl Into<String>) {
        self.push(check, Verdict::Fail, Some(detail.into()));
    }

    pub fn partial(&mut self, check: impl Into<String>, detail: impl Into<String>) {
        self.push(check, Verdict::Partial, Some(detail.into()));
    }

    pub fn merge(&mut self, other: VerdictReport) {
        self.rows.extend(other.rows);
    }

    pub fn verdict(&self) -> Verdict {
        let mut out = Verdict::Pass;
        for row in &self.rows {
            match row.verdict {
                Verdict::Fail => return Verdict::Fail,
                Verdict::Partial => out = Verdict::Partial,
                Verdict::Pass => {}
            }
        }
        out
    }

    pub fn all_pass(&self) -> bool {
        self.verdict() == Verdict::Pass
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LawStatus {
    Pass,
    Fail,
}

/// One coherence law's outcome; serialized exactly as
/// `{"law": ..., "status": "pass"|"fail", "counterexample": ...|null}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawRow {
    pub law: String,
    pub status: LawStatus,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LawReport {
    pub rows: Vec<LawRow>,
}

impl LawReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.status == LawStatus::Pass)
    }

    pub fn row(&self, law: &str) -> Option<&LawRow> {
        self.rows.iter().find(|r| r.law == law)
    }
}

/// A double category presented through enumerators and composition
/// operations, all total on valid data and erroring on frame mismatches.
///
/// Implementations supply the payload algebra; the frame bookkeeping for
/// composite cells lives in the provided methods so that the boundary
/// equations hold by construction and the law suite re-checks them as data.
pub trait DoubleCategory: Sized {
    type Obj: Clone + Eq + Ord + fmt::Debug;
    type VArr: Clone + Eq + Ord + fmt::Debug;
    type HArr: Clone + Eq + Ord + fmt::Debug;
    type Payload: Clone + Eq + Ord + fmt::Debug;

    fn name(&self) -> &'static str;

    // The vertical (object) category.
    fn v_dom(&self, f: &Self::VArr) -> Self::Obj;
    fn v_cod(&self, f: &Self::VArr) -> Self::Obj;
    fn v_id(&self, a: &Self::Obj) -> Self::VArr;
    /// `g ∘ f` (apply `f` first).
    fn v_comp(&self, g: &Self::VArr, f: &Self::VArr) -> Result<Self::VArr, DblError>;

    // Horizontal arrows.
    fn h_src(&self, m: &Self::HArr) -> Self::Obj;
    fn h_tgt(&self, m: &Self::HArr) -> Self::Obj;
    fn unit(&self, a: &Self::Obj) -> Self::HArr;
    /// `outer ⊙ inner`; requires `h_tgt(inner) = h_src(outer)`.
    fn hcomp(&self, outer: &Self::HArr, inner: &Self::HArr) -> Result<Self::HArr, DblError>;

    // Cells.
    /// Validate the frame and the payload-commutation conditions of a cell.
    fn cell_ok(&self, c: &CellOf<Self>) -> Result<(), DblError>;
    /// Identity cell `1_M` (identity verticals, identity payload).
    fn id_cell(&self, m: &Self::HArr) -> CellOf<Self>;
    /// Unit cell `U_f : U_A → U_B` over `(f, f)`.
    fn unit_cell(&self, f: &Self::VArr) -> CellOf<Self>;

    /// Payload of the vertical composite; boundaries are already checked.
    fn vcomp_payload(
        &self,
        top: &CellOf<Self>,
        bottom: &CellOf<Self>,
    ) -> Result<Self::Payload, DblError>;
    /// Payload of the horizontal composite; boundaries are already checked.
    fn hcomp_payload(
        &self,
        outer: &CellOf<Self>,
        inner: &CellOf<Self>,
    ) -> Result<Self::Payload, DblError>;

    /// Stack `top` above `bottom`.
    fn vcomp_cell(
        &self,
        top: &CellOf<Self>,
        bottom: &CellOf<Self>,
    ) -> Result<CellOf<Self>, DblError> {
        if top.bottom != bottom.top {
            return Err(DblError::VerticalFrameMismatch {
                upper: format!("{:?}", top.bottom),
                lower: format!("{:?}", bottom.top),
            });
        }
        let left = self.v_comp(&bottom.left, &top.left)?;
        let right = self.v_comp(&bottom.right, &top.right)?;
        let payload = self.vcomp_payload(top, bottom)?;
        Ok(Cell {
            top: top.top.clone(),
            bottom: bottom.bottom.clone(),
            left,
            right,
            payload,
        })
    }

    /// Compose side by side: the result sits over `outer.top ⊙ inner.top`.
    fn hcomp_cell(
        &self,
        outer: &CellOf<Self>,
        inner: &CellOf<Self>,
    ) -> Result<CellOf<Self>, DblError> {
        if inner.right != outer.left {
            return Err(DblError::HorizontalFrameMismatch {
                detail: format!(
                    "shared vertical differs: inner.right {:?} vs outer.left {:?}",
                    inner.right, outer.left
                ),
            });
        }
        let top = self.hcomp(&outer.top, &inner.top)?;
        let bottom = self.hcomp(&outer.bottom, &inner.bottom)?;
        let payload = self.hcomp_payload(outer, inner)?;
        Ok(Cell {
            top,
            bottom,
            left: inner.left.clone(),
            right: outer.right.clone(),
            payload,
        })
    }

    // Coherence witnesses (globular cells).
    /// `(m ⊙ n) ⊙ p → m ⊙ (n ⊙ p)`.
    fn associator(
        &self,
        m: &Self::HArr,
        n: &Self::HArr,
        p: &Self::HArr,
    ) -> Result<CellOf<Self>, DblError>;
    /// `U_{tgt(m)} ⊙ m → m`.
    fn lunitor(&self, m: &Self::HArr) -> Result<CellOf<Self>, DblError>;
    /// `m ⊙ U_{src(m)} → m`.
    fn runitor(&self, m: &Self::HArr) -> Result<CellOf<Self>, DblError>;

    /// Two-sided inverse of a globular cell, when one exists.
    fn try_invert(&self, c: &CellOf<Self>) -> Option<CellOf<Self>>;

    // Enumeration under budget.
    fn objects(&self, budget: &Budget) -> Vec<Self::Obj>;
    fn verticals(&self, a: &Self::Obj, b: &Self::Obj) -> Vec<Self::VArr>;
    fn horizontals(&self, a: &Self::Obj, b: &Self::Obj, budget: &Budget)
        -> Enumerated<Self::HArr>;
    fn cells(&self, frame: &FrameOf<Self>, budget: &Budget) -> Enumerated<CellOf<Self>>;

    /// Draw one horizontal arrow `a ↛ b`; defaults to a uniform pick from
    /// the (possibly capped) enumeration.
    fn sample_hom(
        &self,
        a: &Self::Obj,
        b: &Self::Obj,
        rng: &mut ChaCha8Rng,
        budget: &Budget,
    ) -> Option<Self::HArr> {
        self.horizontals(a, b, budget).items.choose(rng).cloned()
    }

    /// Draw one cell with the given top and side boundaries, choosing a
    /// bottom arrow to fit.  The default scans enumerated bottoms; instances
    /// override this with a direct construction where enumeration is
    /// wasteful.
    fn sample_cell_under(
        &self,
        top: &Self::HArr,
        left: &Self::VArr,
        right: &Self::VArr,
        rng: &mut ChaCha8Rng,
        budget: &Budget,
    ) -> Option<CellOf<Self>> {
        let sampling = budget.sampling();
        let bottoms = self
            .horizontals(&self.v_cod(left), &self.v_cod(right), &sampling)
            .items;
        let mut order: Vec<usize> = (0..bottoms.len()).collect();
        order.shuffle(rng);
        for i in order.into_iter().take(16) {
            let frame = Frame {
                top: top.clone(),
                bottom: bottoms[i].clone(),
                left: left.clone(),
                right: right.clone(),
            };
            if let Some(c) = self.cells(&frame, &sampling).items.choose(rng) {
                return Some(c.clone());
            }
        }
        None
    }
}

/// A cell is globular when both vertical boundaries are identities.
pub fn is_globular<D: DoubleCategory>(d: &D, c: &CellOf<D>) -> bool {
    c.left == d.v_id(&d.v_dom(&c.left)) && c.right == d.v_id(&d.v_dom(&c.right))
}

/// The frame of a globular cell `top → bottom`.
pub fn globular_frame<D: DoubleCategory>(
    d: &D,
    top: &D::HArr,
    bottom: &D::HArr,
) -> FrameOf<D> {
    Frame {
        top: top.clone(),
        bottom: bottom.clone(),
        left: d.v_id(&d.h_src(top)),
        right: d.v_id(&d.h_tgt(top)),
    }
}

/// Result of searching for an invertible globular cell `m → n`.
pub struct IsoSearch<D: DoubleCategory> {
    pub iso: Option<(CellOf<D>, CellOf<D>)>,
    pub truncated: bool,
}

/// Look for an isomorphism `m ≅ n` in the horizontal bicategory:
/// enumerate globular cells `m → n` and return the first with a verified
/// two-sided inverse.
pub fn find_iso<D: DoubleCategory>(
    d: &D,
    m: &D::HArr,
    n: &D::HArr,
    budget: &Budget,
) -> Result<IsoSearch<D>, DblError> {
    if d.h_src(m) != d.h_src(n) || d.h_tgt(m) != d.h_tgt(n) {
        return Ok(IsoSearch { iso: None, truncated: false });
    }
    let frame = globular_frame(d, m, n);
    let candidates = d.cells(&frame, budget);
    for c in &candidates.items {
        if let Some(inv) = d.try_invert(c) {
            let fwd_back = d.vcomp_cell(c, &inv)?;
            let back_fwd = d.vcomp_cell(&inv, c)?;
            if fwd_back == d.id_cell(m) && back_fwd == d.id_cell(n) {
                return Ok(IsoSearch { iso: Some((c.clone(), inv)), truncated: candidates.truncated });
            }
        }
    }
    Ok(IsoSearch { iso: None, truncated: candidates.truncated })
}
