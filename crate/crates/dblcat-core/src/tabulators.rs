//! Tabulators built from Eilenberg-Moore objects of co-pointed arrows.
//!
//! A horizontal endomorphism `P : A -/-> A` is *co-pointed* when it carries
//! a globular counit `P -> U_A`.  Every horizontal arrow `F : A -/-> X`
//! induces such an endomorphism `G(F)` on `A x X` by filling the Cartesian
//! niche of the diagonal-and-projection verticals; `G` extends to a functor
//! on cells and is right adjoint to the functor sending `(A, P)` to the
//! underlying arrow of `P`.  Where an instance supplies Eilenberg-Moore
//! objects for its co-pointed endomorphisms, the Eilenberg-Moore object of
//! `G(F)` is the tabulator of `F`, and a strong Eilenberg-Moore object
//! yields a strong tabulator: the canonical comparison from the
//! companion-conjoint composite of the two legs back to `F` is invertible.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use crate::cartesian::CartesianDouble;
use crate::double::{
    globular_frame, is_globular, Budget, Cell, CellOf, DoubleCategory, Frame, VerdictReport,
};
use crate::error::{CoreError, DblError};
use crate::fibrancy::{
    cartesian_filling, factor_through_cartesian, factor_through_opcartesian, opcartesian_filling,
    require_invertible, Fibrant, Niche,
};
use crate::finset::{pair_label, FinFn, FinRel, FinSet, FinSpan};
use crate::instances::{RelDouble, SpanDouble, VMatCellFamily, VMatDouble, VMatrix};

// ---------------------------------------------------------------------------
// Co-pointed endomorphisms
// ---------------------------------------------------------------------------

/// A horizontal endomorphism together with a globular counit into the unit
/// arrow on its object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CopointedEndo<D: DoubleCategory> {
    pub arrow: D::HArr,
    pub counit: CellOf<D>,
}

impl<D: DoubleCategory> CopointedEndo<D> {
    /// Validates that `arrow` is an endomorphism and that `counit` is a
    /// globular cell `arrow -> U_A` on its object.
    pub fn new(d: &D, arrow: D::HArr, counit: CellOf<D>) -> Result<Self, DblError> {
        let a = d.h_src(&arrow);
        if d.h_tgt(&arrow) != a {
            return Err(DblError::BoundaryMismatch {
                detail: format!(
                    "a co-pointed arrow must be an endomorphism; got {:?} -> {:?}",
                    a,
                    d.h_tgt(&arrow)
                ),
            });
        }
        d.cell_ok(&counit)?;
        if counit.top != arrow || counit.bottom != d.unit(&a) || !is_globular(d, &counit) {
            return Err(DblError::InvalidCell {
                detail: "the counit must be a globular cell from the arrow to the unit on its object"
                    .to_string(),
            });
        }
        Ok(CopointedEndo { arrow, counit })
    }

    /// The object the endomorphism lives on.
    pub fn carrier(&self, d: &D) -> D::Obj {
        d.h_src(&self.arrow)
    }
}

/// The unit arrow on an object, co-pointed by its identity cell.
pub fn unit_copointed<D: DoubleCategory>(d: &D, a: &D::Obj) -> CopointedEndo<D> {
    let arrow = d.unit(a);
    let counit = d.id_cell(&arrow);
    CopointedEndo { arrow, counit }
}

// ---------------------------------------------------------------------------
// The endomorphism G(F) on A x X
// ---------------------------------------------------------------------------

/// The co-pointed endomorphism induced by a horizontal arrow `F : A -/-> X`,
/// kept together with the Cartesian cell it was filled from.
///
/// `gamma` is the Cartesian binding `G(F) -> (U_A x F) x U_X` over the
/// verticals `d_A x 1` and `<1, p2>`; the counit composes it with the
/// projection onto the two unit flanks, which lands back on `U_{A x X}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GWitness<D: DoubleCategory> {
    pub source: D::HArr,
    pub arrow: D::HArr,
    pub gamma: CellOf<D>,
    pub counit: CellOf<D>,
}

impl<D: DoubleCategory> GWitness<D> {
    /// The endomorphism with its counit, forgetting the binding cell.
    pub fn copointed(&self) -> CopointedEndo<D> {
        CopointedEndo { arrow: self.arrow.clone(), counit: self.counit.clone() }
    }
}

/// The cell `(U_A x F) x U_X -> U_{A x X}` projecting onto the outer unit
/// components.  Its left vertical picks the first `A` and the `X`; the
/// right one picks the `A` and the last `X`.
fn outer_projection<D: CartesianDouble>(d: &D, f: &D::HArr) -> Result<CellOf<D>, DblError> {
    let a = d.h_src(f);
    let x = d.h_tgt(f);
    let ua = d.unit(&a);
    let ux = d.unit(&x);
    let drop_middle = d.product_cell(&d.proj1_cell(&ua, f)?, &d.id_cell(&ux))?;
    let merge_units = require_invertible(d, &d.unit_comparison(&a, &x)?)?;
    d.vcomp_cell(&drop_middle, &merge_units)
}

/// The cell `(U_A x F) x U_X -> F` projecting onto the middle component.
/// Its left vertical picks the second `A`, the right one the inner `X`.
fn middle_projection<D: CartesianDouble>(d: &D, f: &D::HArr) -> Result<CellOf<D>, DblError> {
    let a = d.h_src(f);
    let x = d.h_tgt(f);
    let ua = d.unit(&a);
    let ux = d.unit(&x);
    let inner = d.product_harr(&ua, f)?;
    let drop_last = d.proj1_cell(&inner, &ux)?;
    let drop_first = d.proj2_cell(&ua, f)?;
    d.vcomp_cell(&drop_last, &drop_first)
}

/// The cell `G(F) -> F` over the two product projections, obtained by
/// pasting the binding cell with the middle projection.
fn source_projection<D: CartesianDouble>(d: &D, gw: &GWitness<D>) -> Result<CellOf<D>, DblError> {
    let mid = middle_projection(d, &gw.source)?;
    d.vcomp_cell(&gw.gamma, &mid)
}

/// Builds the co-pointed endomorphism `G(F)` on `A x X` by filling the
/// niche whose horizontal arrow is `(U_A x F) x U_X` and whose verticals
/// are `d_A x 1 : A x X -> (A x A) x X` and `<1, p2> : A x X -> (A x X) x X`.
pub fn g_of<D: CartesianDouble>(d: &D, f: &D::HArr) -> Result<GWitness<D>, DblError> {
    let a = d.h_src(f);
    let x = d.h_tgt(f);
    let ax = d.product_obj(&a, &x)?;
    let middle = d.product_harr(&d.product_harr(&d.unit(&a), f)?, &d.unit(&x))?;
    let left = d.product_varr(&d.diagonal(&a)?, &d.v_id(&x))?;
    let right = d.pair_varr(&d.v_id(&ax), &d.proj2(&a, &x)?)?;
    let niche = Niche::bottom(d, left, right, middle)?;
    let filling = cartesian_filling(d, &niche)?;
    let counit = d.vcomp_cell(&filling.binding, &outer_projection(d, f)?)?;
    Ok(GWitness { source: f.clone(), arrow: filling.arrow, gamma: filling.binding, counit })
}

/// The action of `G` on a cell `alpha : F -> F'` over `(f, g)`: the unique
/// cell `G(F) -> G(F')` over `(f x g, f x g)` whose pasting with the
/// binding of `G(F')` matches the binding of `G(F)` pasted with
/// `(U_f x alpha) x U_g`.
pub fn g_on_cell<D: CartesianDouble>(
    d: &D,
    alpha: &CellOf<D>,
    source: &GWitness<D>,
    target: &GWitness<D>,
    budget: &Budget,
) -> Result<CellOf<D>, DblError> {
    if alpha.top != source.source || alpha.bottom != target.source {
        return Err(DblError::BoundaryMismatch {
            detail: "the cell's boundary arrows must match the two witnesses".to_string(),
        });
    }
    let widened = d.product_cell(
        &d.product_cell(&d.unit_cell(&alpha.left), alpha)?,
        &d.unit_cell(&alpha.right),
    )?;
    let beta = d.vcomp_cell(&source.gamma, &widened)?;
    let fg = d.product_varr(&alpha.left, &alpha.right)?;
    factor_through_cartesian(d, &target.gamma, &beta, &fg, &fg, budget)
}

/// Transposes a cell `beta : P -> F'` over `(h1, h2)` out of a co-pointed
/// endomorphism into the unique cell `P -> G(F')` over the paired vertical
/// `<h1, h2>` on both sides.  The transpose is found by pasting the counit
/// against both legs, pairing the three cells into the product frame, and
/// factoring through the Cartesian binding of `G(F')`.
pub fn copointed_transpose<D: CartesianDouble>(
    d: &D,
    endo: &CopointedEndo<D>,
    beta: &CellOf<D>,
    target: &GWitness<D>,
    budget: &Budget,
) -> Result<CellOf<D>, DblError> {
    if beta.top != endo.arrow || beta.bottom != target.source {
        return Err(DblError::BoundaryMismatch {
            detail: "the cell to transpose must run from the co-pointed arrow to the witness source"
                .to_string(),
        });
    }
    let h1 = &beta.left;
    let h2 = &beta.right;
    let paired = d.pair_varr(h1, h2)?;
    let left_flank = d.vcomp_cell(&endo.counit, &d.unit_cell(h1))?;
    let right_flank = d.vcomp_cell(&endo.counit, &d.unit_cell(h2))?;
    let triple = d.pair_cell(&d.pair_cell(&left_flank, beta)?, &right_flank)?;
    factor_through_cartesian(d, &target.gamma, &triple, &paired, &paired, budget)
}

// ---------------------------------------------------------------------------
// Eilenberg-Moore objects
// ---------------------------------------------------------------------------

/// The Eilenberg-Moore object of a co-pointed endomorphism: an object `E`
/// with a map `u : E -> A` and a structure cell `U_E -> P` over `(u, u)`,
/// universal among counit-compatible cells of that shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmObject<D: DoubleCategory> {
    pub object: D::Obj,
    pub map: D::VArr,
    pub structure: CellOf<D>,
}

/// Instances that can split off the Eilenberg-Moore object of any valid
/// co-pointed endomorphism.  Constructors assume the endomorphism was
/// validated (for example through [`CopointedEndo::new`] or [`g_of`]).
pub trait HasEm: DoubleCategory {
    fn em_object(&self, endo: &CopointedEndo<Self>) -> Result<EmObject<Self>, DblError>;
}

impl HasEm for SpanDouble {
    fn em_object(&self, endo: &CopointedEndo<Self>) -> Result<EmObject<Self>, DblError> {
        // The counit forces the two legs of a co-pointed span to coincide,
        // so the apex itself is the Eilenberg-Moore object and the common
        // leg is the structure map.
        let p = &endo.arrow;
        if p.left() != p.right() {
            return Err(DblError::InvalidCell {
                detail: "a co-pointed span must have equal legs".to_string(),
            });
        }
        let object = p.apex().clone();
        let map = p.left().clone();
        let structure = self.cell(
            FinSpan::identity(&object),
            p.clone(),
            map.clone(),
            map.clone(),
            FinFn::identity(&object),
        )?;
        Ok(EmObject { object, map, structure })
    }
}

impl HasEm for RelDouble {
    fn em_object(&self, endo: &CopointedEndo<Self>) -> Result<EmObject<Self>, DblError> {
        // A co-pointed relation is contained in the diagonal; the points it
        // relates to themselves form the Eilenberg-Moore object, included
        // back into the carrier.
        let p = &endo.arrow;
        let carrier = p.src().clone();
        let object = FinSet::new(carrier.iter().filter(|x| p.contains(x, x)))?;
        let map = FinFn::from_fn(&object, &carrier, |x| x.to_string())?;
        let structure =
            self.witness(FinRel::identity(&object), p.clone(), map.clone(), map.clone())?;
        Ok(EmObject { object, map, structure })
    }
}

impl HasEm for VMatDouble {
    fn em_object(&self, endo: &CopointedEndo<Self>) -> Result<EmObject<Self>, DblError> {
        // Off the diagonal a co-pointed matrix is empty, so its diagonal
        // entries stack into one set of labelled pairs `(index, element)`.
        // The structure cell sends the unit point at such a pair to the
        // element it names.
        let m = &endo.arrow;
        let carrier = m.src().clone();
        let mut labels = Vec::new();
        let mut decode: BTreeMap<String, (String, String)> = BTreeMap::new();
        for i in carrier.iter() {
            for x in m.entry(i, i).iter() {
                let label = pair_label(i, x);
                if label.contains('|') {
                    return Err(DblError::Core(CoreError::ReservedSeparator { label, sep: '|' }));
                }
                if decode.insert(label.clone(), (i.to_string(), x.to_string())).is_some() {
                    return Err(DblError::InvalidCell {
                        detail: format!("diagonal elements produce the ambiguous label {label}"),
                    });
                }
                labels.push(label);
            }
        }
        let object = FinSet::new(labels)?;
        let map = FinFn::from_fn(&object, &carrier, |label| decode[label].0.clone())?;
        let top = VMatrix::identity(&object);
        let mut family = BTreeMap::new();
        for (t, s, set) in top.entries() {
            let cod = m.entry(map.apply(t), map.apply(s)).clone();
            let component = if t == s {
                FinFn::from_fn(set, &cod, |_| decode[t].1.clone())?
            } else {
                // Off-diagonal unit entries are empty, so any total map works.
                FinFn::from_fn(set, &cod, |_| String::new())?
            };
            family.insert((t.to_string(), s.to_string()), component);
        }
        let structure = Cell {
            top,
            bottom: m.clone(),
            left: map.clone(),
            right: map.clone(),
            payload: VMatCellFamily(family),
        };
        self.cell_ok(&structure)?;
        Ok(EmObject { object, map, structure })
    }
}

/// Whether a candidate structure cell commutes with the counit, i.e.
/// pasting it onto the counit yields the unit cell of its side vertical.
fn counit_compatible<D: DoubleCategory>(
    d: &D,
    sigma: &CellOf<D>,
    endo: &CopointedEndo<D>,
) -> bool {
    d.vcomp_cell(sigma, &endo.counit).ok() == Some(d.unit_cell(&sigma.left))
}

/// Checks an Eilenberg-Moore object: the structure cell is valid and
/// counit-compatible, and every counit-compatible cell `U_H -> P` over a
/// repeated vertical factors through the structure cell by exactly one map
/// `H -> E`.  The sweep includes `E` itself, so the structure cell is
/// always among the factored cells.
pub fn verify_em<D: HasEm>(
    d: &D,
    endo: &CopointedEndo<D>,
    em: &EmObject<D>,
    budget: &Budget,
) -> VerdictReport {
    let mut report = VerdictReport::new();
    let carrier = d.h_src(&endo.arrow);

    let structure_ok = d.cell_ok(&em.structure).is_ok()
        && em.structure.top == d.unit(&em.object)
        && em.structure.bottom == endo.arrow
        && em.structure.left == em.map
        && em.structure.right == em.map
        && counit_compatible(d, &em.structure, endo);
    if structure_ok {
        report.pass("structure_cell_valid");
    } else {
        report.fail(
            "structure_cell_valid",
            "the structure cell does not frame U_E -> P over the map, or fails the counit",
        );
        return report;
    }

    let mut pool = vec![em.object.clone()];
    pool.extend(d.objects(budget).into_iter().filter(|o| *o != em.object));
    let mut factored = 0usize;
    let mut truncated = false;
    let mut failure: Option<String> = None;

    'sweep: for h_obj in &pool {
        let unit_h = d.unit(h_obj);
        for h in d.verticals(h_obj, &carrier) {
            let frame = Frame {
                top: unit_h.clone(),
                bottom: endo.arrow.clone(),
                left: h.clone(),
                right: h.clone(),
            };
            let sigmas = d.cells(&frame, budget);
            truncated |= sigmas.truncated;
            for sigma in sigmas.items.iter().filter(|s| counit_compatible(d, s, endo)) {
                let mediators: Vec<D::VArr> = d
                    .verticals(h_obj, &em.object)
                    .into_iter()
                    .filter(|w| d.v_comp(&em.map, w).ok().as_ref() == Some(&h))
                    .filter(|w| {
                        d.vcomp_cell(&d.unit_cell(w), &em.structure).ok().as_ref() == Some(sigma)
                    })
                    .collect();
                match mediators.len() {
                    1 => factored += 1,
                    0 => {
                        failure = Some(format!(
                            "a counit-compatible cell over {h:?} has no mediating map"
                        ));
                        break 'sweep;
                    }
                    n => {
                        failure = Some(format!(
                            "a counit-compatible cell over {h:?} has {n} mediating maps"
                        ));
                        break 'sweep;
                    }
                }
            }
        }
    }

    match failure {
        Some(detail) => report.fail("factorizations_unique", detail),
        None if factored == 0 && truncated => {
            report.partial("factorizations_unique", "enumeration truncated before any cell was seen")
        }
        None if truncated => report.partial(
            "factorizations_unique",
            format!("{factored} cells factored uniquely, but some enumerations were truncated"),
        ),
        None => report.push(
            "factorizations_unique",
            crate::double::Verdict::Pass,
            Some(format!("{factored} counit-compatible cells factored uniquely")),
        ),
    }
    report
}

/// Looks for a two-sided inverse of a globular cell, checking both pasting
/// orders against the identity cells.
fn two_sided_inverse<D: DoubleCategory>(d: &D, c: &CellOf<D>) -> Option<CellOf<D>> {
    let inv = d.try_invert(c)?;
    let forward = d.vcomp_cell(c, &inv).ok()?;
    let backward = d.vcomp_cell(&inv, c).ok()?;
    if forward == d.id_cell(&c.top) && backward == d.id_cell(&c.bottom) {
        Some(inv)
    } else {
        None
    }
}

/// Checks that an Eilenberg-Moore object is *strong*: the canonical
/// comparison from `P` to the companion-conjoint composite of the
/// structure map, singled out by factoring the composite's unit pasting
/// through the structure cell, exists uniquely and is invertible.
pub fn verify_strong_em<D: HasEm + Fibrant>(
    d: &D,
    endo: &CopointedEndo<D>,
    em: &EmObject<D>,
    budget: &Budget,
) -> VerdictReport {
    let mut report = VerdictReport::new();
    let built = (|| -> Result<(CellOf<D>, D::HArr), DblError> {
        let cp = d.companion_pair(&em.map)?;
        let composite = d.hcomp(&cp.companion, &cp.conjoint)?;
        // U_E -> companion . conjoint over (u, u), through the two units.
        let units = d.hcomp_cell(&cp.companion_unit, &cp.conjoint_unit)?;
        let split = require_invertible(d, &d.lunitor(&d.unit(&em.object))?)?;
        let insertion = d.vcomp_cell(&split, &units)?;
        Ok((insertion, composite))
    })();
    let (insertion, composite) = match built {
        Ok(pair) => pair,
        Err(e) => {
            report.fail("canonical_comparison_unique", e.to_string());
            return report;
        }
    };

    let frame = globular_frame(d, &endo.arrow, &composite);
    let candidates = d.cells(&frame, budget);
    let matching: Vec<&CellOf<D>> = candidates
        .items
        .iter()
        .filter(|psi| d.vcomp_cell(&em.structure, psi).ok().as_ref() == Some(&insertion))
        .collect();
    match matching.len() {
        1 => {
            report.pass("canonical_comparison_unique");
            if two_sided_inverse(d, matching[0]).is_some() {
                report.pass("comparison_invertible");
            } else {
                report.fail(
                    "comparison_invertible",
                    "the canonical comparison to the companion-conjoint composite has no two-sided inverse",
                );
            }
        }
        0 if candidates.truncated => {
            report.partial("canonical_comparison_unique", "enumeration truncated before a comparison was found");
        }
        0 => report.fail(
            "canonical_comparison_unique",
            "no globular cell to the companion-conjoint composite is compatible with the structure cell",
        ),
        n => report.fail(
            "canonical_comparison_unique",
            format!("{n} globular cells are compatible with the structure cell"),
        ),
    }
    report
}

// ---------------------------------------------------------------------------
// Tabulators
// ---------------------------------------------------------------------------

/// The tabulator of a horizontal arrow `F : A -/-> X`: an object `T` with
/// legs `q1 : T -> A`, `q2 : T -> X` and a witness cell `U_T -> F` over
/// them, universal among cells of that shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tabulator<D: DoubleCategory> {
    pub object: D::Obj,
    pub q1: D::VArr,
    pub q2: D::VArr,
    pub witness: CellOf<D>,
}

/// Builds the tabulator of `F` as the Eilenberg-Moore object of `G(F)`:
/// the legs compose the structure map with the product projections, and
/// the witness pastes the structure cell onto the binding of `G(F)`
/// followed by the middle projection.
pub fn tabulator<D: CartesianDouble + HasEm>(d: &D, f: &D::HArr) -> Result<Tabulator<D>, DblError> {
    let gw = g_of(d, f)?;
    let em = d.em_object(&gw.copointed())?;
    let a = d.h_src(f);
    let x = d.h_tgt(f);
    let q1 = d.v_comp(&d.proj1(&a, &x)?, &em.map)?;
    let q2 = d.v_comp(&d.proj2(&a, &x)?, &em.map)?;
    let witness = d.vcomp_cell(&em.structure, &source_projection(d, &gw)?)?;
    Ok(Tabulator { object: em.object, q1, q2, witness })
}

/// Checks the universal property of a tabulator: the witness cell is valid
/// over the two legs, and every cell `U_H -> F` factors through it by
/// exactly one map `H -> T`.  The pool of test objects always includes `T`
/// itself so the witness cell is among the factored cells.
pub fn verify_tabulator<D: DoubleCategory>(
    d: &D,
    f: &D::HArr,
    tab: &Tabulator<D>,
    budget: &Budget,
) -> VerdictReport {
    let mut report = VerdictReport::new();
    let a = d.h_src(f);
    let x = d.h_tgt(f);

    let witness_ok = d.cell_ok(&tab.witness).is_ok()
        && tab.witness.top == d.unit(&tab.object)
        && tab.witness.bottom == *f
        && tab.witness.left == tab.q1
        && tab.witness.right == tab.q2;
    if witness_ok {
        report.pass("witness_cell_valid");
    } else {
        report.fail("witness_cell_valid", "the witness cell does not frame U_T -> F over the legs");
        return report;
    }

    let probe = budget.shrink_to(budget.probe_size.min(budget.max_size));
    let mut pool = vec![tab.object.clone()];
    pool.extend(d.objects(&probe).into_iter().filter(|o| *o != tab.object));
    let mut factored = 0usize;
    let mut truncated = false;
    let mut failure: Option<String> = None;

    'sweep: for h_obj in &pool {
        let unit_h = d.unit(h_obj);
        for b1 in d.verticals(h_obj, &a) {
            for b2 in d.verticals(h_obj, &x) {
                let frame = Frame {
                    top: unit_h.clone(),
                    bottom: f.clone(),
                    left: b1.clone(),
                    right: b2.clone(),
                };
                let cells = d.cells(&frame, budget);
                truncated |= cells.truncated;
                for beta in &cells.items {
                    let mediators: Vec<D::VArr> = d
                        .verticals(h_obj, &tab.object)
                        .into_iter()
                        .filter(|w| {
                            d.vcomp_cell(&d.unit_cell(w), &tab.witness).ok().as_ref() == Some(beta)
                        })
                        .collect();
                    match mediators.len() {
                        1 => factored += 1,
                        0 => {
                            failure =
                                Some(format!("a cell over ({b1:?}, {b2:?}) has no mediating map"));
                            break 'sweep;
                        }
                        n => {
                            failure = Some(format!(
                                "a cell over ({b1:?}, {b2:?}) has {n} mediating maps"
                            ));
                            break 'sweep;
                        }
                    }
                }
            }
        }
    }

    match failure {
        Some(detail) => report.fail("factorizations_unique", detail),
        None if factored == 0 && truncated => {
            report.partial("factorizations_unique", "enumeration truncated before any cell was seen")
        }
        None if truncated => report.partial(
            "factorizations_unique",
            format!("{factored} cells factored uniquely, but some enumerations were truncated"),
        ),
        None => report.push(
            "factorizations_unique",
            crate::double::Verdict::Pass,
            Some(format!("{factored} cells into the arrow factored uniquely")),
        ),
    }
    report
}

/// Checks that a tabulator is *strong*: the witness cell factors through
/// the op-Cartesian filling of the top niche `(q1, U_T, q2)` by a globular
/// cell from the companion-conjoint composite of the legs down to `F`, and
/// that cell is invertible.  Construction failures are reported as check
/// failures rather than errors so corrupted inputs yield a verdict.
pub fn verify_strong_tabulator<D: Fibrant>(
    d: &D,
    tab: &Tabulator<D>,
    budget: &Budget,
) -> VerdictReport {
    let mut report = VerdictReport::new();
    let built = (|| -> Result<CellOf<D>, DblError> {
        let niche = Niche::top(d, tab.q1.clone(), tab.q2.clone(), d.unit(&tab.object))?;
        let op = opcartesian_filling(d, &niche)?;
        factor_through_opcartesian(
            d,
            &op.binding,
            &tab.witness,
            &d.v_id(&d.v_cod(&tab.q1)),
            &d.v_id(&d.v_cod(&tab.q2)),
            budget,
        )
    })();
    match built {
        Err(e) => {
            report.fail("strength_cell_exists", e.to_string());
        }
        Ok(upsilon) => {
            report.pass("strength_cell_exists");
            if two_sided_inverse(d, &upsilon).is_some() {
                report.pass("strength_cell_invertible");
            } else {
                report.fail(
                    "strength_cell_invertible",
                    "the comparison from the leg composite to the arrow has no two-sided inverse",
                );
            }
        }
    }
    report
}

// ---------------------------------------------------------------------------
// Functoriality and the adjunction
// ---------------------------------------------------------------------------

/// Spot-checks that `G` is a functor compatible with the counits and with
/// finite products: identity cells map to identity cells, vertical pastings
/// are preserved, the counit squares commute, and the canonical comparison
/// between `G(F x F')` and `G(F) x G(F')` is invertible over the shuffle of
/// the two products.
pub fn check_g_functor<D: CartesianDouble>(d: &D, budget: &Budget) -> VerdictReport {
    let mut report = VerdictReport::new();
    let probe = budget.shrink_to(budget.probe_size.min(budget.max_size));
    let sampling = probe.sampling();
    let pool = d.objects(&probe);
    if pool.is_empty() {
        report.partial("identities_preserved", "no objects under the probe budget");
        return report;
    }

    // Identity cells.
    {
        let mut rng = budget.rng(&format!("g-identities-{}", d.name()));
        let mut checked = 0usize;
        let mut failure: Option<String> = None;
        for _ in 0..budget.samples {
            let (Some(a), Some(x)) = (pool.choose(&mut rng), pool.choose(&mut rng)) else {
                break;
            };
            let Some(f) = d.sample_hom(a, x, &mut rng, &sampling) else { continue };
            let outcome = (|| -> Result<bool, DblError> {
                let gw = g_of(d, &f)?;
                let image = g_on_cell(d, &d.id_cell(&f), &gw, &gw, budget)?;
                Ok(image == d.id_cell(&gw.arrow))
            })();
            match outcome {
                Ok(true) => checked += 1,
                Ok(false) => {
                    failure = Some(format!("the identity cell on {f:?} is not sent to an identity"));
                    break;
                }
                Err(e) => {
                    failure = Some(e.to_string());
                    break;
                }
            }
        }
        match failure {
            Some(detail) => report.fail("identities_preserved", detail),
            None if checked == 0 => {
                report.partial("identities_preserved", "no samples under the probe budget")
            }
            None => report.push(
                "identities_preserved",
                crate::double::Verdict::Pass,
                Some(format!("{checked} identity cells preserved")),
            ),
        }
    }

    // Vertical pastings and counit squares.
    {
        let mut rng = budget.rng(&format!("g-composition-{}", d.name()));
        let mut checked = 0usize;
        let mut comp_failure: Option<String> = None;
        let mut counit_failure: Option<String> = None;
        for _ in 0..budget.samples {
            let (Some(a), Some(x)) = (pool.choose(&mut rng), pool.choose(&mut rng)) else {
                break;
            };
            let Some(f) = d.sample_hom(a, x, &mut rng, &sampling) else { continue };
            let (Some(b), Some(y)) = (pool.choose(&mut rng), pool.choose(&mut rng)) else {
                break;
            };
            let Some(lv) = d.verticals(a, b).choose(&mut rng).cloned() else { continue };
            let Some(rv) = d.verticals(x, y).choose(&mut rng).cloned() else { continue };
            let Some(alpha) = d.sample_cell_under(&f, &lv, &rv, &mut rng, &sampling) else {
                continue;
            };
            let middle = alpha.bottom.clone();
            let (Some(c), Some(z)) = (pool.choose(&mut rng), pool.choose(&mut rng)) else {
                break;
            };
            let Some(lv2) = d.verticals(b, c).choose(&mut rng).cloned() else { continue };
            let Some(rv2) = d.verticals(y, z).choose(&mut rng).cloned() else { continue };
            let Some(alpha2) = d.sample_cell_under(&middle, &lv2, &rv2, &mut rng, &sampling) else {
                continue;
            };
            let outcome = (|| -> Result<(bool, bool), DblError> {
                let gw_f = g_of(d, &f)?;
                let gw_m = g_of(d, &middle)?;
                let gw_b = g_of(d, &alpha2.bottom)?;
                let g_alpha = g_on_cell(d, &alpha, &gw_f, &gw_m, budget)?;
                let g_alpha2 = g_on_cell(d, &alpha2, &gw_m, &gw_b, budget)?;
                let pasted = g_on_cell(d, &d.vcomp_cell(&alpha, &alpha2)?, &gw_f, &gw_b, budget)?;
                let composed = d.vcomp_cell(&g_alpha, &g_alpha2)?;
                let widened = d.product_varr(&alpha.left, &alpha.right)?;
                let left_side = d.vcomp_cell(&g_alpha, &gw_m.counit)?;
                let right_side = d.vcomp_cell(&gw_f.counit, &d.unit_cell(&widened))?;
                Ok((pasted == composed, left_side == right_side))
            })();
            match outcome {
                Ok((true, true)) => checked += 1,
                Ok((false, _)) => {
                    comp_failure =
                        Some("a vertical pasting is not preserved on the nose".to_string());
                    break;
                }
                Ok((_, false)) => {
                    counit_failure = Some("a counit square fails to commute".to_string());
                    break;
                }
                Err(e) => {
                    comp_failure = Some(e.to_string());
                    break;
                }
            }
        }
        match comp_failure {
            Some(detail) => report.fail("composition_preserved", detail),
            None if checked == 0 => {
                report.partial("composition_preserved", "no composable samples under the budget")
            }
            None => report.push(
                "composition_preserved",
                crate::double::Verdict::Pass,
                Some(format!("{checked} pastings preserved")),
            ),
        }
        match counit_failure {
            Some(detail) => report.fail("counits_preserved", detail),
            None if checked == 0 => {
                report.partial("counits_preserved", "no composable samples under the budget")
            }
            None => report.push(
                "counits_preserved",
                crate::double::Verdict::Pass,
                Some(format!("{checked} counit squares commute")),
            ),
        }
    }

    // Products of co-pointed arrows.
    {
        let mut rng = budget.rng(&format!("g-products-{}", d.name()));
        let mut checked = 0usize;
        let mut failure: Option<String> = None;
        for _ in 0..budget.samples {
            let (Some(a), Some(x)) = (pool.choose(&mut rng), pool.choose(&mut rng)) else {
                break;
            };
            let (Some(b), Some(y)) = (pool.choose(&mut rng), pool.choose(&mut rng)) else {
                break;
            };
            let Some(f) = d.sample_hom(a, x, &mut rng, &sampling) else { continue };
            let Some(f2) = d.sample_hom(b, y, &mut rng, &sampling) else { continue };
            let outcome = (|| -> Result<bool, DblError> {
                let gw_f = g_of(d, &f)?;
                let gw_f2 = g_of(d, &f2)?;
                let gw_pair = g_of(d, &d.product_harr(&f, &f2)?)?;

                // The product of the two co-pointed arrows, with its counit
                // through the unit comparison.
                let ax = d.product_obj(&d.h_src(&f), &d.h_tgt(&f))?;
                let by = d.product_obj(&d.h_src(&f2), &d.h_tgt(&f2))?;
                let product_arrow = d.product_harr(&gw_f.arrow, &gw_f2.arrow)?;
                let product_counit = d.vcomp_cell(
                    &d.product_cell(&gw_f.counit, &gw_f2.counit)?,
                    &require_invertible(d, &d.unit_comparison(&ax, &by)?)?,
                )?;
                let product_endo =
                    CopointedEndo { arrow: product_arrow.clone(), counit: product_counit };

                // Forward comparison: transpose the two projections of the
                // pasted source projection, then pair them.
                let delta_pair = source_projection(d, &gw_pair)?;
                let beta1 = d.vcomp_cell(&delta_pair, &d.proj1_cell(&f, &f2)?)?;
                let beta2 = d.vcomp_cell(&delta_pair, &d.proj2_cell(&f, &f2)?)?;
                let fwd1 = copointed_transpose(d, &gw_pair.copointed(), &beta1, &gw_f, budget)?;
                let fwd2 = copointed_transpose(d, &gw_pair.copointed(), &beta2, &gw_f2, budget)?;
                let forward = d.pair_cell(&fwd1, &fwd2)?;

                // Backward comparison: transpose the product of the two
                // source projections.
                let beta_back = d.product_cell(
                    &source_projection(d, &gw_f)?,
                    &source_projection(d, &gw_f2)?,
                )?;
                let backward =
                    copointed_transpose(d, &product_endo, &beta_back, &gw_pair, budget)?;

                let round = d.vcomp_cell(&forward, &backward)?;
                let round_back = d.vcomp_cell(&backward, &forward)?;
                Ok(round == d.id_cell(&gw_pair.arrow) && round_back == d.id_cell(&product_arrow))
            })();
            match outcome {
                Ok(true) => checked += 1,
                Ok(false) => {
                    failure = Some(
                        "the canonical comparison between the two product constructions is not invertible"
                            .to_string(),
                    );
                    break;
                }
                Err(e) => {
                    failure = Some(e.to_string());
                    break;
                }
            }
        }
        match failure {
            Some(detail) => report.fail("products_preserved", detail),
            None if checked == 0 => {
                report.partial("products_preserved", "no samples under the probe budget")
            }
            None => report.push(
                "products_preserved",
                crate::double::Verdict::Pass,
                Some(format!("{checked} product comparisons invertible")),
            ),
        }
    }

    report
}

/// Spot-checks the adjunction characterizing `G`: every cell from a
/// co-pointed endomorphism to an arrow `F'` transposes to exactly one
/// counit-compatible cell into `G(F')` whose pasting with the source
/// projection recovers it.
pub fn check_g_adjunction<D: CartesianDouble>(d: &D, budget: &Budget) -> VerdictReport {
    let mut report = VerdictReport::new();
    let probe = budget.shrink_to(budget.probe_size.min(budget.max_size));
    let sampling = probe.sampling();
    let pool = d.objects(&probe);
    if pool.is_empty() {
        report.partial("unique_copointed_factorization", "no objects under the probe budget");
        return report;
    }

    let mut rng = budget.rng(&format!("g-adjunction-{}", d.name()));
    let mut checked = 0usize;
    let mut truncated = false;
    let mut failure: Option<String> = None;

    for attempt in 0..budget.samples {
        let Some(h_obj) = pool.choose(&mut rng).cloned() else { break };
        // Alternate between the unit co-pointing and a sampled one.
        let endo = if attempt % 2 == 0 {
            unit_copointed(d, &h_obj)
        } else {
            let Some(m) = d.sample_hom(&h_obj, &h_obj, &mut rng, &sampling) else { continue };
            let counits = d.cells(&globular_frame(d, &m, &d.unit(&h_obj)), &sampling);
            truncated |= counits.truncated;
            let Some(counit) = counits.items.choose(&mut rng).cloned() else { continue };
            CopointedEndo { arrow: m, counit }
        };
        let (Some(a), Some(x)) = (pool.choose(&mut rng), pool.choose(&mut rng)) else { break };
        let Some(f2) = d.sample_hom(a, x, &mut rng, &sampling) else { continue };
        let Some(h1) = d.verticals(&h_obj, a).choose(&mut rng).cloned() else { continue };
        let Some(h2) = d.verticals(&h_obj, x).choose(&mut rng).cloned() else { continue };
        let frame = Frame {
            top: endo.arrow.clone(),
            bottom: f2.clone(),
            left: h1.clone(),
            right: h2.clone(),
        };
        let betas = d.cells(&frame, &sampling);
        truncated |= betas.truncated;
        let Some(beta) = betas.items.choose(&mut rng).cloned() else { continue };

        let outcome = (|| -> Result<Option<String>, DblError> {
            let gw = g_of(d, &f2)?;
            let alpha = copointed_transpose(d, &endo, &beta, &gw, budget)?;
            let paired = d.pair_varr(&h1, &h2)?;
            let compat = d.vcomp_cell(&alpha, &gw.counit)?
                == d.vcomp_cell(&endo.counit, &d.unit_cell(&paired))?;
            if !compat {
                return Ok(Some("the transpose does not commute with the counits".to_string()));
            }
            let recovered = d.vcomp_cell(&alpha, &source_projection(d, &gw)?)?;
            if recovered != beta {
                return Ok(Some("pasting the transpose with the projections loses the cell".to_string()));
            }
            let candidates = d.cells(
                &Frame {
                    top: endo.arrow.clone(),
                    bottom: gw.arrow.clone(),
                    left: paired.clone(),
                    right: paired.clone(),
                },
                budget,
            );
            let matching = candidates
                .items
                .iter()
                .filter(|c| {
                    d.vcomp_cell(c, &gw.counit).ok()
                        == d.vcomp_cell(&endo.counit, &d.unit_cell(&paired)).ok()
                })
                .filter(|c| {
                    source_projection(d, &gw)
                        .and_then(|p| d.vcomp_cell(c, &p))
                        .ok()
                        .as_ref()
                        == Some(&beta)
                })
                .count();
            if matching != 1 {
                if candidates.truncated {
                    return Err(DblError::NoFactorization {
                        detail: "transpose uniqueness undecidable (enumeration truncated)"
                            .to_string(),
                    });
                }
                return Ok(Some(format!("{matching} cells transpose the same cell")));
            }
            Ok(None)
        })();
        match outcome {
            Ok(None) => checked += 1,
            Ok(Some(detail)) => {
                failure = Some(detail);
                break;
            }
            Err(DblError::NoFactorization { detail }) if detail.contains("truncated") => {
                truncated = true;
            }
            Err(e) => {
                failure = Some(e.to_string());
                break;
            }
        }
    }

    match failure {
        Some(detail) => report.fail("unique_copointed_factorization", detail),
        None if checked == 0 && truncated => report.partial(
            "unique_copointed_factorization",
            "enumeration truncated before any transpose could be checked",
        ),
        None if checked == 0 => {
            report.partial("unique_copointed_factorization", "no samples under the budget")
        }
        None => report.push(
            "unique_copointed_factorization",
            crate::double::Verdict::Pass,
            Some(format!("{checked} cells transposed uniquely")),
        ),
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::double::Verdict;

    fn set(labels: &[&str]) -> FinSet {
        FinSet::new(labels.iter().copied()).expect("valid labels")
    }

    fn quick() -> Budget {
        Budget { max_size: 2, samples: 4, ..Budget::default() }
    }

    #[test]
    fn unit_arrows_have_trivial_moore_objects() {
        let d = SpanDouble::new();
        let a = set(&["x", "y"]);
        let endo = unit_copointed(&d, &a);
        let em = d.em_object(&endo).expect("unit spans are co-pointed");
        assert_eq!(em.object, a);
        assert_eq!(em.map, FinFn::identity(&a));
        assert_eq!(em.structure, d.id_cell(&d.unit(&a)));
    }

    #[test]
    fn moore_object_of_a_span_with_equal_legs_is_its_apex() {
        let d = SpanDouble::new();
        let a = set(&["a0", "a1"]);
        let apex = set(&["p", "q", "r"]);
        let leg = FinFn::new(
            apex.clone(),
            a.clone(),
            [("p", "a0"), ("q", "a0"), ("r", "a1")]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        )
        .expect("total leg");
        let p = FinSpan::new(leg.clone(), leg.clone()).expect("legs share the apex");
        let counit =
            d.cell(p.clone(), FinSpan::identity(&a), FinFn::identity(&a), FinFn::identity(&a), leg.clone())
                .expect("the common leg is a counit payload");
        let endo = CopointedEndo::new(&d, p, counit).expect("valid co-pointing");
        let em = d.em_object(&endo).expect("spans have Moore objects");
        assert_eq!(em.object, apex);
        assert_eq!(em.map, leg);
        assert!(verify_em(&d, &endo, &em, &quick()).all_pass());
        assert!(verify_strong_em(&d, &endo, &em, &quick()).all_pass());
    }

    #[test]
    fn moore_factorizations_are_unique_for_relations() {
        let d = RelDouble::new();
        let a = set(&["x", "y", "z"]);
        let p = FinRel::new(
            a.clone(),
            a.clone(),
            [("x", "x"), ("y", "y")]
                .into_iter()
                .map(|(s, t)| (s.to_string(), t.to_string())),
        )
        .expect("pairs inside the carrier");
        let counit = d
            .witness(p.clone(), FinRel::identity(&a), FinFn::identity(&a), FinFn::identity(&a))
            .expect("a sub-diagonal relation maps into the unit");
        let endo = CopointedEndo::new(&d, p, counit).expect("valid co-pointing");
        let em = d.em_object(&endo).expect("relations have Moore objects");
        assert_eq!(em.object, set(&["x", "y"]));
        assert!(verify_em(&d, &endo, &em, &quick()).all_pass());
        assert!(verify_strong_em(&d, &endo, &em, &quick()).all_pass());
    }

    #[test]
    fn matrix_moore_objects_collect_the_diagonal_elements() {
        let d = VMatDouble::new();
        let a = set(&["s", "t"]);
        let m = VMatrix::from_fn(a.clone(), a.clone(), |t, s| {
            if t == s && t == "s" {
                set(&["m", "n"])
            } else {
                FinSet::empty()
            }
        })
        .expect("valid matrix");
        let unit = VMatrix::identity(&a);
        let mut family = BTreeMap::new();
        for (t, s, entry) in m.entries() {
            let cod = unit.entry(t, s).clone();
            let value = cod.iter().next().map(str::to_string).unwrap_or_default();
            family.insert(
                (t.to_string(), s.to_string()),
                FinFn::from_fn(entry, &cod, |_| value.clone()).expect("total component"),
            );
        }
        let counit = Cell {
            top: m.clone(),
            bottom: unit,
            left: FinFn::identity(&a),
            right: FinFn::identity(&a),
            payload: VMatCellFamily(family),
        };
        let endo = CopointedEndo::new(&d, m, counit).expect("valid co-pointing");
        let em = d.em_object(&endo).expect("matrices have Moore objects");
        assert_eq!(em.object, set(&["(s,m)", "(s,n)"]));
        assert_eq!(em.map.apply("(s,m)"), "s");
        assert!(verify_em(&d, &endo, &em, &quick()).all_pass());
        assert!(verify_strong_em(&d, &endo, &em, &quick()).all_pass());
    }

    #[test]
    fn the_induced_endomorphism_keeps_the_apex_of_a_span() {
        let d = SpanDouble::new();
        let a = set(&["a0", "a1"]);
        let x = set(&["x0"]);
        let apex = set(&["r0", "r1"]);
        let f = FinSpan::new(
            FinFn::from_fn(&apex, &a, |r| if r == "r0" { "a0".into() } else { "a1".into() })
                .expect("left leg"),
            FinFn::constant(&apex, &x, "x0").expect("right leg"),
        )
        .expect("legs share the apex");
        let gw = g_of(&d, &f).expect("the filling exists");
        assert_eq!(gw.arrow.apex().len(), apex.len());
        assert!(is_globular(&d, &gw.counit));
        assert_eq!(gw.counit.bottom, d.unit(&d.product_obj(&a, &x).unwrap()));
        let em = d.em_object(&gw.copointed()).expect("the filling is co-pointed");
        assert_eq!(em.object.len(), apex.len());
    }

    #[test]
    fn tabulators_of_spans_are_their_apexes() {
        let d = SpanDouble::new();
        let a = set(&["a0", "a1"]);
        let x = set(&["x0", "x1"]);
        let apex = set(&["r0", "r1", "r2"]);
        let left = FinFn::new(
            apex.clone(),
            a.clone(),
            [("r0", "a0"), ("r1", "a0"), ("r2", "a1")]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        )
        .expect("left leg");
        let right = FinFn::new(
            apex.clone(),
            x.clone(),
            [("r0", "x0"), ("r1", "x1"), ("r2", "x1")]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        )
        .expect("right leg");
        let f = FinSpan::new(left.clone(), right.clone()).expect("legs share the apex");
        let tab = tabulator(&d, &f).expect("spans have tabulators");
        assert_eq!(tab.object.len(), apex.len());
        let relabel = FinFn::enumerate(&tab.object, &apex).into_iter().find(|phi| {
            phi.is_bijective()
                && tab.object.iter().all(|t| {
                    left.apply(phi.apply(t)) == tab.q1.apply(t)
                        && right.apply(phi.apply(t)) == tab.q2.apply(t)
                })
        });
        assert!(relabel.is_some(), "the tabulator is the apex up to a leg-preserving bijection");
        assert!(verify_tabulator(&d, &f, &tab, &quick()).all_pass());
        assert!(verify_strong_tabulator(&d, &tab, &quick()).all_pass());
    }

    #[test]
    fn the_tabulator_of_a_unit_arrow_is_the_object_itself() {
        let d = SpanDouble::new();
        let a = set(&["u", "v"]);
        let tab = tabulator(&d, &d.unit(&a)).expect("units have tabulators");
        assert_eq!(tab.q1, tab.q2);
        assert!(tab.q1.is_bijective());
        assert_eq!(tab.object.len(), a.len());
    }

    #[test]
    fn relation_tabulators_collect_the_related_pairs() {
        let d = RelDouble::new();
        let a = set(&["a0", "a1"]);
        let x = set(&["x0", "x1"]);
        let r = FinRel::new(
            a.clone(),
            x.clone(),
            [("a0", "x0"), ("a0", "x1"), ("a1", "x1")]
                .into_iter()
                .map(|(s, t)| (s.to_string(), t.to_string())),
        )
        .expect("pairs inside the carrier");
        let tab = tabulator(&d, &r).expect("relations have tabulators");
        assert_eq!(tab.object.len(), 3);
        for t in tab.object.iter() {
            assert!(r.contains(tab.q1.apply(t), tab.q2.apply(t)));
        }
        assert!(verify_tabulator(&d, &r, &tab, &quick()).all_pass());
        assert!(verify_strong_tabulator(&d, &tab, &quick()).all_pass());
    }

    #[test]
    fn corrupting_a_leg_is_detected_by_the_strength_check() {
        let d = SpanDouble::new();
        let a = set(&["a0", "a1"]);
        let x = set(&["x0", "x1"]);
        let f = FinSpan::new(
            FinFn::identity(&a),
            FinFn::from_fn(&a, &x, |r| if r == "a0" { "x0".into() } else { "x1".into() })
                .expect("right leg"),
        )
        .expect("legs share the apex");
        let mut tab = tabulator(&d, &f).expect("spans have tabulators");
        let collapse = FinFn::constant(&x, &x, "x0").expect("x0 is in the codomain");
        tab.q2 = collapse.compose(&tab.q2).expect("composable");
        let report = verify_strong_tabulator(&d, &tab, &quick());
        assert_eq!(report.verdict(), Verdict::Fail);
    }

    #[test]
    fn the_induced_functor_behaves_on_spans() {
        let d = SpanDouble::new();
        let report = check_g_functor(&d, &Budget { max_size: 2, samples: 20, ..Budget::default() });
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn transposes_are_unique_for_relations() {
        let d = RelDouble::new();
        let report = check_g_adjunction(&d, &quick());
        assert!(report.all_pass(), "{report:?}");
    }
}
