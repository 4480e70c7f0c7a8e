//! Deliberately broken variants of the span instance, used to demonstrate
//! that the law suite and the hypothesis checkers actually detect
//! violations rather than rubber-stamping whatever they are given.
//!
//! Cells carry no reference to the instance they belong to, so a mutant
//! can hand the wrapped instance's cells straight through and corrupt only
//! the one operation under attack.

use rand_chacha::ChaCha8Rng;

use crate::cartesian::CartesianDouble;
use crate::double::{Budget, Cell, CellOf, DoubleCategory, Enumerated, FrameOf};
use crate::error::DblError;
use crate::fibrancy::{CompanionPair, Fibrant};
use crate::finset::{pair_label, FinFn, FinSet, FinSpan};
use crate::instances::span::SpanDouble;

/// Forwards every operation of [`DoubleCategory`] except the ones the
/// surrounding impl writes out by hand.
macro_rules! delegate_span {
    () => {
        type Obj = FinSet;
        type VArr = FinFn;
        type HArr = FinSpan;
        type Payload = FinFn;

        fn v_dom(&self, f: &FinFn) -> FinSet {
            self.0.v_dom(f)
        }
        fn v_cod(&self, f: &FinFn) -> FinSet {
            self.0.v_cod(f)
        }
        fn v_id(&self, a: &FinSet) -> FinFn {
            self.0.v_id(a)
        }
        fn v_comp(&self, g: &FinFn, f: &FinFn) -> Result<FinFn, DblError> {
            self.0.v_comp(g, f)
        }
        fn h_src(&self, m: &FinSpan) -> FinSet {
            self.0.h_src(m)
        }
        fn h_tgt(&self, m: &FinSpan) -> FinSet {
            self.0.h_tgt(m)
        }
        fn unit(&self, a: &FinSet) -> FinSpan {
            self.0.unit(a)
        }
        fn hcomp(&self, outer: &FinSpan, inner: &FinSpan) -> Result<FinSpan, DblError> {
            self.0.hcomp(outer, inner)
        }
        fn cell_ok(&self, c: &CellOf<Self>) -> Result<(), DblError> {
            self.0.cell_ok(c)
        }
        fn id_cell(&self, m: &FinSpan) -> CellOf<Self> {
            self.0.id_cell(m)
        }
        fn unit_cell(&self, f: &FinFn) -> CellOf<Self> {
            self.0.unit_cell(f)
        }
        fn vcomp_payload(
            &self,
            top: &CellOf<Self>,
            bottom: &CellOf<Self>,
        ) -> Result<FinFn, DblError> {
            self.0.vcomp_payload(top, bottom)
        }
        fn hcomp_payload(
            &self,
            outer: &CellOf<Self>,
            inner: &CellOf<Self>,
        ) -> Result<FinFn, DblError> {
            self.0.hcomp_payload(outer, inner)
        }
        fn lunitor(&self, m: &FinSpan) -> Result<CellOf<Self>, DblError> {
            self.0.lunitor(m)
        }
        fn runitor(&self, m: &FinSpan) -> Result<CellOf<Self>, DblError> {
            self.0.runitor(m)
        }
        fn try_invert(&self, c: &CellOf<Self>) -> Option<CellOf<Self>> {
            self.0.try_invert(c)
        }
        fn objects(&self, budget: &Budget) -> Vec<FinSet> {
            self.0.objects(budget)
        }
        fn verticals(&self, a: &FinSet, b: &FinSet) -> Vec<FinFn> {
            self.0.verticals(a, b)
        }
        fn horizontals(&self, a: &FinSet, b: &FinSet, budget: &Budget) -> Enumerated<FinSpan> {
            self.0.horizontals(a, b, budget)
        }
        fn sample_hom(
            &self,
            a: &FinSet,
            b: &FinSet,
            rng: &mut ChaCha8Rng,
            budget: &Budget,
        ) -> Option<FinSpan> {
            self.0.sample_hom(a, b, rng, budget)
        }
        fn sample_cell_under(
            &self,
            top: &FinSpan,
            left: &FinFn,
            right: &FinFn,
            rng: &mut ChaCha8Rng,
            budget: &Budget,
        ) -> Option<CellOf<Self>> {
            self.0.sample_cell_under(top, left, right, rng, budget)
        }
    };
}

/// Span with a corrupted associator: whenever the rebracketing map has at
/// least two elements in its domain, the images of the first two are
/// swapped.  The pentagon identity then fails on any chain whose nested
/// composite is big enough.
#[derive(Clone, Copy, Debug, Default)]
pub struct AssociatorTwist(pub SpanDouble);

impl AssociatorTwist {
    pub fn new() -> Self {
        AssociatorTwist(SpanDouble::new())
    }
}

impl DoubleCategory for AssociatorTwist {
    delegate_span!();

    fn name(&self) -> &'static str {
        "span-twisted-associator"
    }

    fn cells(&self, frame: &FrameOf<Self>, budget: &Budget) -> Enumerated<CellOf<Self>> {
        self.0.cells(frame, budget)
    }

    fn associator(
        &self,
        m: &FinSpan,
        n: &FinSpan,
        p: &FinSpan,
    ) -> Result<CellOf<Self>, DblError> {
        let honest = self.0.associator(m, n, p)?;
        let dom_elems: Vec<String> = honest.payload.dom().iter().map(str::to_string).collect();
        if dom_elems.len() < 2 {
            return Ok(honest);
        }
        let (a, b) = (dom_elems[0].clone(), dom_elems[1].clone());
        let (va, vb) = (
            honest.payload.apply(&a).to_string(),
            honest.payload.apply(&b).to_string(),
        );
        let twisted = FinFn::from_fn(honest.payload.dom(), honest.payload.cod(), |x| {
            if x == a {
                vb.clone()
            } else if x == b {
                va.clone()
            } else {
                honest.payload.apply(x).to_string()
            }
        })
        .map_err(DblError::from)?;
        Ok(Cell { payload: twisted, ..honest })
    }
}

/// Span with extra junk cells on unit frames: besides the honest cells,
/// every unit-to-unit frame with a nonempty top also reports a constant
/// map that is not the unit cell of any vertical arrow.
#[derive(Clone, Copy, Debug, Default)]
pub struct UnitPureBreaker(pub SpanDouble);

impl UnitPureBreaker {
    pub fn new() -> Self {
        UnitPureBreaker(SpanDouble::new())
    }

    fn is_unit(&self, m: &FinSpan) -> bool {
        *m == self.0.unit(&self.0.h_src(m))
    }
}

impl DoubleCategory for UnitPureBreaker {
    delegate_span!();

    fn name(&self) -> &'static str {
        "span-impure-units"
    }

    fn associator(
        &self,
        m: &FinSpan,
        n: &FinSpan,
        p: &FinSpan,
    ) -> Result<CellOf<Self>, DblError> {
        self.0.associator(m, n, p)
    }

    fn cells(&self, frame: &FrameOf<Self>, budget: &Budget) -> Enumerated<CellOf<Self>> {
        let mut out = self.0.cells(frame, budget);
        if self.is_unit(&frame.top)
            && self.is_unit(&frame.bottom)
            && !frame.top.apex().is_empty()
            && !frame.bottom.apex().is_empty()
        {
            let junk_target = frame
                .bottom
                .apex()
                .iter()
                .next()
                .expect("apex checked nonempty");
            let junk = FinFn::constant(frame.top.apex(), frame.bottom.apex(), junk_target)
                .expect("constant map over nonempty codomain");
            // Keep the mutant subtle: skip the injection when the junk map
            // happens to coincide with an honest unit cell.
            if junk != frame.left || junk != frame.right {
                out.items.push(Cell {
                    top: frame.top.clone(),
                    bottom: frame.bottom.clone(),
                    left: frame.left.clone(),
                    right: frame.right.clone(),
                    payload: junk,
                });
            }
        }
        out
    }
}

/// Span with a corrupted diagonal cell: whenever the apex of the arrow
/// carries two elements with identical legs, the diagonal pairs each such
/// element with its partner instead of with itself.  The resulting cell is
/// still valid — the legs cannot tell the partners apart — but the second
/// projection triangle and the diagonal naturality square fail.
#[derive(Clone, Copy, Debug, Default)]
pub struct DiagonalTwist(pub SpanDouble);

impl DiagonalTwist {
    pub fn new() -> Self {
        DiagonalTwist(SpanDouble::new())
    }
}

impl DoubleCategory for DiagonalTwist {
    delegate_span!();

    fn name(&self) -> &'static str {
        "span-twisted-diagonal"
    }

    fn associator(
        &self,
        m: &FinSpan,
        n: &FinSpan,
        p: &FinSpan,
    ) -> Result<CellOf<Self>, DblError> {
        self.0.associator(m, n, p)
    }

    fn cells(&self, frame: &FrameOf<Self>, budget: &Budget) -> Enumerated<CellOf<Self>> {
        self.0.cells(frame, budget)
    }
}

impl Fibrant for DiagonalTwist {
    fn companion_pair(
        &self,
        f: &FinFn,
    ) -> Result<CompanionPair<Self>, DblError> {
        let cp = self.0.companion_pair(f)?;
        Ok(CompanionPair {
            vertical: cp.vertical,
            companion: cp.companion,
            conjoint: cp.conjoint,
            companion_counit: cp.companion_counit,
            companion_unit: cp.companion_unit,
            conjoint_counit: cp.conjoint_counit,
            conjoint_unit: cp.conjoint_unit,
        })
    }
}

impl CartesianDouble for DiagonalTwist {
    fn terminal_obj(&self) -> FinSet {
        self.0.terminal_obj()
    }

    fn to_terminal(&self, a: &FinSet) -> FinFn {
        self.0.to_terminal(a)
    }

    fn product_obj(&self, a: &FinSet, b: &FinSet) -> Result<FinSet, DblError> {
        self.0.product_obj(a, b)
    }

    fn proj1(&self, a: &FinSet, b: &FinSet) -> Result<FinFn, DblError> {
        self.0.proj1(a, b)
    }

    fn proj2(&self, a: &FinSet, b: &FinSet) -> Result<FinFn, DblError> {
        self.0.proj2(a, b)
    }

    fn diagonal(&self, a: &FinSet) -> Result<FinFn, DblError> {
        self.0.diagonal(a)
    }

    fn product_varr(&self, f: &FinFn, g: &FinFn) -> Result<FinFn, DblError> {
        self.0.product_varr(f, g)
    }

    fn product_harr(&self, m: &FinSpan, n: &FinSpan) -> Result<FinSpan, DblError> {
        self.0.product_harr(m, n)
    }

    fn product_cell(
        &self,
        alpha: &CellOf<Self>,
        beta: &CellOf<Self>,
    ) -> Result<CellOf<Self>, DblError> {
        self.0.product_cell(alpha, beta)
    }

    fn diagonal_cell(&self, m: &FinSpan) -> Result<CellOf<Self>, DblError> {
        let honest = self.0.diagonal_cell(m)?;
        let apex: Vec<&str> = m.apex().iter().collect();
        for i in 0..apex.len() {
            for j in (i + 1)..apex.len() {
                if m.left().apply(apex[i]) == m.left().apply(apex[j])
                    && m.right().apply(apex[i]) == m.right().apply(apex[j])
                {
                    let (u, v) = (apex[i].to_string(), apex[j].to_string());
                    let twisted =
                        FinFn::from_fn(honest.payload.dom(), honest.payload.cod(), |x| {
                            let partner = if x == u {
                                v.as_str()
                            } else if x == v {
                                u.as_str()
                            } else {
                                x
                            };
                            pair_label(x, partner)
                        })
                        .map_err(DblError::from)?;
                    return Ok(Cell { payload: twisted, ..honest });
                }
            }
        }
        Ok(honest)
    }

    fn proj1_cell(&self, m: &FinSpan, n: &FinSpan) -> Result<CellOf<Self>, DblError> {
        self.0.proj1_cell(m, n)
    }

    fn proj2_cell(&self, m: &FinSpan, n: &FinSpan) -> Result<CellOf<Self>, DblError> {
        self.0.proj2_cell(m, n)
    }

    fn terminal_cell(&self, m: &FinSpan) -> Result<CellOf<Self>, DblError> {
        self.0.terminal_cell(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canonical_span(apex: usize) -> FinSpan {
        let a = FinSet::canonical(apex);
        FinSpan::new(FinFn::identity(&a), FinFn::identity(&a)).unwrap()
    }

    #[test]
    fn twist_changes_the_rebracketing_on_big_apexes() {
        let honest = SpanDouble::new();
        let twisted = AssociatorTwist::new();
        let m = canonical_span(2);
        let good = honest.associator(&m, &m, &m).unwrap();
        let bad = twisted.associator(&m, &m, &m).unwrap();
        assert_eq!(good.top, bad.top);
        assert_ne!(good.payload, bad.payload);
    }

    #[test]
    fn twist_pairs_twin_apex_elements_with_each_other() {
        let honest = SpanDouble::new();
        let twisted = DiagonalTwist::new();
        let a = FinSet::canonical(1);
        let apex = FinSet::canonical(2);
        // Both apex elements share their legs, so the twist has a twin pair
        // to swap while the twisted cell stays valid.
        let m = FinSpan::new(
            FinFn::constant(&apex, &a, "x1").unwrap(),
            FinFn::constant(&apex, &a, "x1").unwrap(),
        )
        .unwrap();
        let good = honest.diagonal_cell(&m).unwrap();
        let bad = twisted.diagonal_cell(&m).unwrap();
        assert_ne!(good.payload, bad.payload);
        twisted.cell_ok(&bad).expect("the twisted diagonal is still a valid cell");
    }

    #[test]
    fn breaker_reports_extra_unit_cells() {
        let honest = SpanDouble::new();
        let broken = UnitPureBreaker::new();
        let a = FinSet::canonical(2);
        let frame = crate::double::Frame {
            top: honest.unit(&a),
            bottom: honest.unit(&a),
            left: FinFn::identity(&a),
            right: FinFn::identity(&a),
        };
        let budget = Budget::default();
        let honest_count = honest.cells(&frame, &budget).items.len();
        let broken_count = broken.cells(&frame, &budget).items.len();
        assert_eq!(broken_count, honest_count + 1);
    }
}
