//! The double category of spans of finite sets: objects are finite sets,
//! vertical arrows are functions, a horizontal arrow `A ↛ B` is a span
//! `A ← R → B`, and a cell is a function between apexes commuting with the
//! four legs.  Horizontal composition is by pullback, so composites carry
//! nested pair labels and the associator is the explicit re-bracketing
//! bijection — never a silent normalization.

use std::collections::BTreeMap;

use crate::double::{Budget, Cell, CellOf, DoubleCategory, Enumerated, FrameOf};
use crate::error::DblError;
use crate::finset::{pair_label, pullback, FinFn, FinSet, FinSpan};

#[derive(Clone, Copy, Debug, Default)]
pub struct SpanDouble;

impl SpanDouble {
    pub fn new() -> Self {
        SpanDouble
    }

    /// Build and validate a cell in one step.
    pub fn cell(
        &self,
        top: FinSpan,
        bottom: FinSpan,
        left: FinFn,
        right: FinFn,
        payload: FinFn,
    ) -> Result<CellOf<Self>, DblError> {
        let c = Cell { top, bottom, left, right, payload };
        self.cell_ok(&c)?;
        Ok(c)
    }
}

impl DoubleCategory for SpanDouble {
    type Obj = FinSet;
    type VArr = FinFn;
    type HArr = FinSpan;
    type Payload = FinFn;

    fn name(&self) -> &'static str {
        "span"
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

    fn h_src(&self, m: &FinSpan) -> FinSet {
        m.src().clone()
    }

    fn h_tgt(&self, m: &FinSpan) -> FinSet {
        m.tgt().clone()
    }

    fn unit(&self, a: &FinSet) -> FinSpan {
        FinSpan::identity(a)
    }

    fn hcomp(&self, outer: &FinSpan, inner: &FinSpan) -> Result<FinSpan, DblError> {
        if inner.tgt() != outer.src() {
            return Err(DblError::HorizontalFrameMismatch {
                detail: format!(
                    "span composition needs tgt(inner) = src(outer); got {:?} vs {:?}",
                    inner.tgt(),
                    outer.src()
                ),
            });
        }
        let pb = pullback(inner.right(), outer.left())?;
        let left = inner.left().compose(&pb.q1)?;
        let right = outer.right().compose(&pb.q2)?;
        Ok(FinSpan::new(left, right)?)
    }

    fn cell_ok(&self, c: &CellOf<Self>) -> Result<(), DblError> {
        if c.left.dom() != c.top.src() || c.left.cod() != c.bottom.src() {
            return Err(DblError::BoundaryMismatch {
                detail: format!(
                    "left vertical {:?} does not run src(top) → src(bottom)",
                    c.left
                ),
            });
        }
        if c.right.dom() != c.top.tgt() || c.right.cod() != c.bottom.tgt() {
            return Err(DblError::BoundaryMismatch {
                detail: format!(
                    "right vertical {:?} does not run tgt(top) → tgt(bottom)",
                    c.right
                ),
            });
        }
        if c.payload.dom() != c.top.apex() || c.payload.cod() != c.bottom.apex() {
            return Err(DblError::InvalidCell {
                detail: format!(
                    "apex map {:?} does not run apex(top) → apex(bottom)",
                    c.payload
                ),
            });
        }
        let left_path = c.bottom.left().compose(&c.payload)?;
        let left_want = c.left.compose(c.top.left())?;
        if left_path != left_want {
            return Err(DblError::InvalidCell {
                detail: format!("left leg square does not commute for apex map {:?}", c.payload),
            });
        }
        let right_path = c.bottom.right().compose(&c.payload)?;
        let right_want = c.right.compose(c.top.right())?;
        if right_path != right_want {
            return Err(DblError::InvalidCell {
                detail: format!("right leg square does not commute for apex map {:?}", c.payload),
            });
        }
        Ok(())
    }

    fn id_cell(&self, m: &FinSpan) -> CellOf<Self> {
        Cell {
            top: m.clone(),
            bottom: m.clone(),
            left: FinFn::identity(m.src()),
            right: FinFn::identity(m.tgt()),
            payload: FinFn::identity(m.apex()),
        }
    }

    fn unit_cell(&self, f: &FinFn) -> CellOf<Self> {
        Cell {
            top: FinSpan::identity(f.dom()),
            bottom: FinSpan::identity(f.cod()),
            left: f.clone(),
            right: f.clone(),
            payload: f.clone(),
        }
    }

    fn vcomp_payload(
        &self,
        top: &CellOf<Self>,
        bottom: &CellOf<Self>,
    ) -> Result<FinFn, DblError> {
        Ok(bottom.payload.compose(&top.payload)?)
    }

    fn hcomp_payload(
        &self,
        outer: &CellOf<Self>,
        inner: &CellOf<Self>,
    ) -> Result<FinFn, DblError> {
        let pb_top = pullback(inner.top.right(), outer.top.left())?;
        let pb_bottom = pullback(inner.bottom.right(), outer.bottom.left())?;
        Ok(FinFn::from_fn(&pb_top.apex, &pb_bottom.apex, |e| {
            let x = inner.payload.apply(pb_top.q1.apply(e));
            let y = outer.payload.apply(pb_top.q2.apply(e));
            pair_label(x, y)
        })?)
    }

    fn associator(
        &self,
        m: &FinSpan,
        n: &FinSpan,
        p: &FinSpan,
    ) -> Result<CellOf<Self>, DblError> {
        let mn = self.hcomp(m, n)?;
        let np = self.hcomp(n, p)?;
        let lhs = self.hcomp(&mn, p)?;
        let rhs = self.hcomp(m, &np)?;
        let pb_mn = pullback(n.right(), m.left())?;
        let pb_lhs = pullback(p.right(), mn.left())?;
        let payload = FinFn::from_fn(lhs.apex(), rhs.apex(), |e| {
            let xp = pb_lhs.q1.apply(e);
            let pair_nm = pb_lhs.q2.apply(e);
            let xn = pb_mn.q1.apply(pair_nm);
            let xm = pb_mn.q2.apply(pair_nm);
            pair_label(&pair_label(xp, xn), xm)
        })?;
        Ok(Cell {
            left: FinFn::identity(lhs.src()),
            right: FinFn::identity(lhs.tgt()),
            top: lhs,
            bottom: rhs,
            payload,
        })
    }

    fn lunitor(&self, m: &FinSpan) -> Result<CellOf<Self>, DblError> {
        let top = self.hcomp(&self.unit(m.tgt()), m)?;
        let pb = pullback(m.right(), &FinFn::identity(m.tgt()))?;
        Ok(Cell {
            left: FinFn::identity(m.src()),
            right: FinFn::identity(m.tgt()),
            top,
            bottom: m.clone(),
            payload: pb.q1,
        })
    }

    fn runitor(&self, m: &FinSpan) -> Result<CellOf<Self>, DblError> {
        let top = self.hcomp(m, &self.unit(m.src()))?;
        let pb = pullback(&FinFn::identity(m.src()), m.left())?;
        Ok(Cell {
            left: FinFn::identity(m.src()),
            right: FinFn::identity(m.tgt()),
            top,
            bottom: m.clone(),
            payload: pb.q2,
        })
    }

    fn try_invert(&self, c: &CellOf<Self>) -> Option<CellOf<Self>> {
        if !crate::double::is_globular(self, c) {
            return None;
        }
        let inverse = c.payload.inverse()?;
        let inv = Cell {
            top: c.bottom.clone(),
            bottom: c.top.clone(),
            left: c.left.clone(),
            right: c.right.clone(),
            payload: inverse,
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

    fn horizontals(&self, a: &FinSet, b: &FinSet, budget: &Budget) -> Enumerated<FinSpan> {
        let mut items = Vec::new();
        let mut truncated = false;
        'sizes: for size in 0..=budget.max_size {
            let apex = FinSet::canonical(size);
            for l in FinFn::enumerate(&apex, a) {
                for r in FinFn::enumerate(&apex, b) {
                    if items.len() == budget.max_hom {
                        truncated = true;
                        break 'sizes;
                    }
                    items.push(FinSpan::new(l.clone(), r).expect("shared apex by construction"));
                }
            }
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
        let left_want = frame
            .left
            .compose(frame.top.left())
            .expect("frame boundaries checked");
        let right_want = frame
            .right
            .compose(frame.top.right())
            .expect("frame boundaries checked");
        // A commuting apex map is a choice, for each point of the top apex,
        // of a bottom apex point in the matching leg fibre; enumerating the
        // product of those fibres visits exactly the cells instead of
        // filtering the full function space.
        let dom: Vec<String> = frame.top.apex().iter().map(str::to_string).collect();
        let columns: Vec<Vec<String>> = dom
            .iter()
            .map(|p| {
                frame
                    .bottom
                    .apex()
                    .iter()
                    .filter(|q| {
                        frame.bottom.left().apply(q) == left_want.apply(p)
                            && frame.bottom.right().apply(q) == right_want.apply(p)
                    })
                    .map(str::to_string)
                    .collect()
            })
            .collect();
        if columns.iter().any(Vec::is_empty) {
            return Enumerated::complete(Vec::new());
        }
        let mut items = Vec::new();
        let mut truncated = false;
        let mut indices = vec![0usize; columns.len()];
        'outer: loop {
            if items.len() == budget.max_cells {
                truncated = true;
                break;
            }
            let map: BTreeMap<String, String> = dom
                .iter()
                .enumerate()
                .map(|(j, p)| (p.clone(), columns[j][indices[j]].clone()))
                .collect();
            let payload = FinFn::new(frame.top.apex().clone(), frame.bottom.apex().clone(), map)
                .expect("fibre members lie in the bottom apex");
            items.push(Cell {
                top: frame.top.clone(),
                bottom: frame.bottom.clone(),
                left: frame.left.clone(),
                right: frame.right.clone(),
                payload,
            });
            let mut k = columns.len();
            while k > 0 {
                k -= 1;
                indices[k] += 1;
                if indices[k] < columns[k].len() {
                    continue 'outer;
                }
                indices[k] = 0;
            }
            break;
        }
        Enumerated { items, truncated }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(labels: &[&str]) -> FinSet {
        FinSet::new(labels.iter().copied()).unwrap()
    }

    fn fun(dom: &FinSet, cod: &FinSet, pairs: &[(&str, &str)]) -> FinFn {
        let map = pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        FinFn::new(dom.clone(), cod.clone(), map).unwrap()
    }

    /// Matched-pair oracle for span composition, computed without the
    /// pullback machinery: the composite apex must consist of exactly the
    /// pairs whose middle images agree.
    #[test]
    fn composite_apex_is_matched_pairs() {
        let d = SpanDouble::new();
        let a = set(&["a"]);
        let b = set(&["b1", "b2"]);
        let c = set(&["c"]);
        let r_apex = set(&["r1", "r2"]);
        let s_apex = set(&["s1", "s2"]);
        let r = FinSpan::new(
            fun(&r_apex, &a, &[("r1", "a"), ("r2", "a")]),
            fun(&r_apex, &b, &[("r1", "b1"), ("r2", "b2")]),
        )
        .unwrap();
        let s = FinSpan::new(
            fun(&s_apex, &b, &[("s1", "b1"), ("s2", "b1")]),
            fun(&s_apex, &c, &[("s1", "c"), ("s2", "c")]),
        )
        .unwrap();
        let sr = d.hcomp(&s, &r).unwrap();
        let mut expected = Vec::new();
        for x in r_apex.iter() {
            for y in s_apex.iter() {
                if r.right().apply(x) == s.left().apply(y) {
                    expected.push(pair_label(x, y));
                }
            }
        }
        expected.sort();
        let got: Vec<String> = sr.apex().iter().map(str::to_string).collect();
        assert_eq!(got, expected);
        assert_eq!(got, vec!["(r1,s1)".to_string(), "(r1,s2)".to_string()]);
        assert_eq!(sr.src(), &a);
        assert_eq!(sr.tgt(), &c);
    }

    #[test]
    fn unitors_are_bijective_collapses() {
        let d = SpanDouble::new();
        let a = set(&["a1", "a2"]);
        let b = set(&["b"]);
        let apex = set(&["r1", "r2", "r3"]);
        let m = FinSpan::new(
            fun(&apex, &a, &[("r1", "a1"), ("r2", "a2"), ("r3", "a1")]),
            fun(&apex, &b, &[("r1", "b"), ("r2", "b"), ("r3", "b")]),
        )
        .unwrap();
        for cell in [d.lunitor(&m).unwrap(), d.runitor(&m).unwrap()] {
            d.cell_ok(&cell).unwrap();
            assert!(cell.payload.is_bijective());
            assert_eq!(cell.bottom, m);
            assert!(d.try_invert(&cell).is_some());
        }
    }

    #[test]
    fn associator_rebrackets_apex_labels() {
        let d = SpanDouble::new();
        let a = set(&["a"]);
        let m = FinSpan::identity(&a);
        let two = set(&["u", "v"]);
        let n = FinSpan::new(
            fun(&two, &a, &[("u", "a"), ("v", "a")]),
            fun(&two, &a, &[("u", "a"), ("v", "a")]),
        )
        .unwrap();
        let assoc = d.associator(&n, &m, &n).unwrap();
        d.cell_ok(&assoc).unwrap();
        assert!(assoc.payload.is_bijective());
        // Left-nested apexes look like ((p,m),n); right-nested like (p,(m,n)).
        let sample = assoc.top.apex().iter().next().unwrap();
        assert!(assoc.payload.apply(sample).starts_with("(("));
    }

    #[test]
    fn cells_enumeration_matches_manual_filter() {
        let d = SpanDouble::new();
        let a = set(&["a1", "a2"]);
        let b = set(&["b"]);
        let apex = set(&["r1", "r2"]);
        let m = FinSpan::new(
            fun(&apex, &a, &[("r1", "a1"), ("r2", "a2")]),
            fun(&apex, &b, &[("r1", "b"), ("r2", "b")]),
        )
        .unwrap();
        let frame = crate::double::globular_frame(&d, &m, &m);
        let cells = d.cells(&frame, &Budget::default());
        assert!(!cells.truncated);
        // Only the identity on the apex commutes with the injective left leg.
        assert_eq!(cells.items.len(), 1);
        assert!(cells.items[0].payload.is_identity());
    }

    #[test]
    fn unit_cell_of_composite_stacks() {
        let d = SpanDouble::new();
        let a = set(&["a1", "a2"]);
        let b = set(&["b"]);
        let f = fun(&a, &b, &[("a1", "b"), ("a2", "b")]);
        let g = fun(&b, &a, &[("b", "a2")]);
        let gf = d.v_comp(&g, &f).unwrap();
        let stacked = d
            .vcomp_cell(&d.unit_cell(&f), &d.unit_cell(&g))
            .unwrap();
        assert_eq!(stacked, d.unit_cell(&gf));
    }
}
