//! The double category of finite sets, functions, and relations.  A cell is
//! a mere witness: on a frame `(R, S, f, g)` there is exactly one cell when
//! every related pair `(a, b)` of `R` has `(f a, g b)` related by `S`, and
//! none otherwise.  Relation composition is strictly associative and
//! strictly unital, so every coherence witness is an identity-shaped cell.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::double::{Budget, Cell, CellOf, DoubleCategory, Enumerated, FrameOf};
use crate::error::DblError;
use crate::finset::{FinFn, FinRel, FinSet};

#[derive(Clone, Copy, Debug, Default)]
pub struct RelDouble;

impl RelDouble {
    pub fn new() -> Self {
        RelDouble
    }

    /// The implication that controls cell existence.
    pub fn relates(&self, top: &FinRel, bottom: &FinRel, left: &FinFn, right: &FinFn) -> bool {
        top.pairs()
            .all(|(a, b)| bottom.contains(left.apply(a), right.apply(b)))
    }

    /// The unique cell on a frame, when the frame admits one.
    pub fn witness(
        &self,
        top: FinRel,
        bottom: FinRel,
        left: FinFn,
        right: FinFn,
    ) -> Result<CellOf<Self>, DblError> {
        let c = Cell { top, bottom, left, right, payload: () };
        self.cell_ok(&c)?;
        Ok(c)
    }
}

impl DoubleCategory for RelDouble {
    type Obj = FinSet;
    type VArr = FinFn;
    type HArr = FinRel;
    type Payload = ();

    fn name(&self) -> &'static str {
        "rel"
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

    fn h_src(&self, m: &FinRel) -> FinSet {
        m.src().clone()
    }

    fn h_tgt(&self, m: &FinRel) -> FinSet {
        m.tgt().clone()
    }

    fn unit(&self, a: &FinSet) -> FinRel {
        FinRel::identity(a)
    }

    fn hcomp(&self, outer: &FinRel, inner: &FinRel) -> Result<FinRel, DblError> {
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
        for (a, b) in c.top.pairs() {
            if !c.bottom.contains(c.left.apply(a), c.right.apply(b)) {
                return Err(DblError::InvalidCell {
                    detail: format!(
                        "pair ({a},{b}) of the top relation has image outside the bottom relation"
                    ),
                });
            }
        }
        Ok(())
    }

    fn id_cell(&self, m: &FinRel) -> CellOf<Self> {
        Cell {
            top: m.clone(),
            bottom: m.clone(),
            left: FinFn::identity(m.src()),
            right: FinFn::identity(m.tgt()),
            payload: (),
        }
    }

    fn unit_cell(&self, f: &FinFn) -> CellOf<Self> {
        Cell {
            top: FinRel::identity(f.dom()),
            bottom: FinRel::identity(f.cod()),
            left: f.clone(),
            right: f.clone(),
            payload: (),
        }
    }

    fn vcomp_payload(&self, _top: &CellOf<Self>, _bottom: &CellOf<Self>) -> Result<(), DblError> {
        Ok(())
    }

    fn hcomp_payload(&self, _outer: &CellOf<Self>, _inner: &CellOf<Self>) -> Result<(), DblError> {
        Ok(())
    }

    fn associator(
        &self,
        m: &FinRel,
        n: &FinRel,
        p: &FinRel,
    ) -> Result<CellOf<Self>, DblError> {
        let lhs = self.hcomp(&self.hcomp(m, n)?, p)?;
        let rhs = self.hcomp(m, &self.hcomp(n, p)?)?;
        self.witness(
            lhs.clone(),
            rhs,
            FinFn::identity(lhs.src()),
            FinFn::identity(lhs.tgt()),
        )
    }

    fn lunitor(&self, m: &FinRel) -> Result<CellOf<Self>, DblError> {
        let top = self.hcomp(&self.unit(m.tgt()), m)?;
        self.witness(
            top,
            m.clone(),
            FinFn::identity(m.src()),
            FinFn::identity(m.tgt()),
        )
    }

    fn runitor(&self, m: &FinRel) -> Result<CellOf<Self>, DblError> {
        let top = self.hcomp(m, &self.unit(m.src()))?;
        self.witness(
            top,
            m.clone(),
            FinFn::identity(m.src()),
            FinFn::identity(m.tgt()),
        )
    }

    fn try_invert(&self, c: &CellOf<Self>) -> Option<CellOf<Self>> {
        if !crate::double::is_globular(self, c) {
            return None;
        }
        // The reverse witness exists exactly when the bottom is contained in
        // the top; both composites are then automatically identities.
        if !c.bottom.is_contained_in(&c.top) {
            return None;
        }
        Some(Cell {
            top: c.bottom.clone(),
            bottom: c.top.clone(),
            left: c.left.clone(),
            right: c.right.clone(),
            payload: (),
        })
    }

    fn objects(&self, budget: &Budget) -> Vec<FinSet> {
        (0..=budget.max_size).map(FinSet::canonical).collect()
    }

    fn verticals(&self, a: &FinSet, b: &FinSet) -> Vec<FinFn> {
        FinFn::enumerate(a, b)
    }

    fn horizontals(&self, a: &FinSet, b: &FinSet, budget: &Budget) -> Enumerated<FinRel> {
        if a.len() * b.len() > 16 {
            // The subset lattice is out of reach; fall back to a small
            // structured family and mark the enumeration incomplete.
            let items = vec![FinRel::empty(a, b), FinRel::full(a, b)];
            return Enumerated { items, truncated: true };
        }
        Enumerated::capped(FinRel::enumerate(a, b), budget.max_hom)
    }

    fn cells(&self, frame: &FrameOf<Self>, _budget: &Budget) -> Enumerated<CellOf<Self>> {
        let c = Cell {
            top: frame.top.clone(),
            bottom: frame.bottom.clone(),
            left: frame.left.clone(),
            right: frame.right.clone(),
            payload: (),
        };
        match self.cell_ok(&c) {
            Ok(()) => Enumerated::complete(vec![c]),
            Err(_) => Enumerated::complete(Vec::new()),
        }
    }

    fn sample_cell_under(
        &self,
        top: &FinRel,
        left: &FinFn,
        right: &FinFn,
        rng: &mut ChaCha8Rng,
        _budget: &Budget,
    ) -> Option<CellOf<Self>> {
        // Push the top relation forward and sprinkle extra pairs: the
        // implication holds by construction, so a cell always exists.
        let mut pairs: BTreeSet<(String, String)> = top
            .pairs()
            .map(|(a, b)| (left.apply(a).to_string(), right.apply(b).to_string()))
            .collect();
        for x in left.cod().iter() {
            for y in right.cod().iter() {
                if rng.gen_ratio(1, 4) {
                    pairs.insert((x.to_string(), y.to_string()));
                }
            }
        }
        let bottom = FinRel::new(left.cod().clone(), right.cod().clone(), pairs).ok()?;
        Some(Cell {
            top: top.clone(),
            bottom,
            left: left.clone(),
            right: right.clone(),
            payload: (),
        })
    }
}
