//! Finite products at the double-category level.
//!
//! A Cartesian double category carries a terminal object and binary
//! products in *both* directions at once: on objects and vertical arrows
//! (where they restrict to ordinary finite products) and on horizontal
//! arrows and cells (where `M x N` comes with diagonal, projection, and
//! terminal cells satisfying the usual triangle identities and naturality
//! squares strictly).  The comparison cells relating `x` with horizontal
//! composition and units are invertible but *not* required to be
//! identities; they are carried as explicit data and checked, never
//! normalized away.
//!
//! The module provides:
//!
//! * [`CartesianDouble`], the interface every product-carrying instance
//!   implements, with derived pairings and the two comparison cells;
//! * [`local_product`], the hom-wise meet `M ∧ N` obtained by restricting
//!   `M x N` along the diagonals, with its universal property checker;
//! * [`check_precartesian`], [`check_pseudo`], [`check_unit_pure`], and
//!   [`check_horizontal_naturality`], the budgeted verdict sweeps.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use crate::double::{
    is_globular, Budget, Cell, CellOf, DoubleCategory, Frame, Verdict, VerdictReport,
};
use crate::error::DblError;
use crate::fibrancy::{cartesian_filling, factor_through_cartesian, Fibrant, Niche};
use crate::finset::{pair_label, product, FinFn, FinRel, FinSet, FinSpan};
use crate::instances::{RelDouble, SpanDouble, VMatCellFamily, VMatDouble, VMatrix};

// ---------------------------------------------------------------------------
// Shared finite-set product plumbing
// ---------------------------------------------------------------------------

fn vprod(a: &FinSet, b: &FinSet) -> Result<FinSet, DblError> {
    Ok(product(a, b)?.set)
}

fn vproj1(a: &FinSet, b: &FinSet) -> Result<FinFn, DblError> {
    Ok(product(a, b)?.p1)
}

fn vproj2(a: &FinSet, b: &FinSet) -> Result<FinFn, DblError> {
    Ok(product(a, b)?.p2)
}

fn vdiag(a: &FinSet) -> Result<FinFn, DblError> {
    let aa = vprod(a, a)?;
    Ok(FinFn::from_fn(a, &aa, |x| pair_label(x, x))?)
}

/// `f x g` on total maps, acting coordinatewise on pair labels.
fn vmap_prod(f: &FinFn, g: &FinFn) -> Result<FinFn, DblError> {
    let dom = vprod(f.dom(), g.dom())?;
    let cod = vprod(f.cod(), g.cod())?;
    let mut map = BTreeMap::new();
    for x in f.dom().iter() {
        for y in g.dom().iter() {
            map.insert(pair_label(x, y), pair_label(f.apply(x), g.apply(y)));
        }
    }
    Ok(FinFn::new(dom, cod, map)?)
}

// ---------------------------------------------------------------------------
// The interface
// ---------------------------------------------------------------------------

/// A double category with chosen finite products.
///
/// The primitive operations supply the chosen structure; the provided
/// methods derive pairings and the two comparison cells from it.  All
/// equations the checkers demand are *strict* cell equalities — the chosen
/// products form a genuine (not merely pseudo) functor in the vertical
/// direction — while compatibility with horizontal composition holds only
/// up to the invertible comparison cells.
pub trait CartesianDouble: Fibrant {
    /// The terminal object `I` of the vertical category.
    fn terminal_obj(&self) -> Self::Obj;

    /// The unique vertical arrow `A -> I`.
    fn to_terminal(&self, a: &Self::Obj) -> Self::VArr;

    /// The chosen binary product `A x B`.
    fn product_obj(&self, a: &Self::Obj, b: &Self::Obj) -> Result<Self::Obj, DblError>;

    /// First projection `A x B -> A`.
    fn proj1(&self, a: &Self::Obj, b: &Self::Obj) -> Result<Self::VArr, DblError>;

    /// Second projection `A x B -> B`.
    fn proj2(&self, a: &Self::Obj, b: &Self::Obj) -> Result<Self::VArr, DblError>;

    /// The diagonal `A -> A x A`.
    fn diagonal(&self, a: &Self::Obj) -> Result<Self::VArr, DblError>;

    /// `f x g : A x X -> B x Y` on vertical arrows.
    fn product_varr(&self, f: &Self::VArr, g: &Self::VArr) -> Result<Self::VArr, DblError>;

    /// `M x N : A x X -/-> B x Y` on horizontal arrows.
    fn product_harr(&self, m: &Self::HArr, n: &Self::HArr) -> Result<Self::HArr, DblError>;

    /// `alpha x beta : M x N -> M' x N'` over the products of the boundary
    /// verticals.
    fn product_cell(
        &self,
        alpha: &CellOf<Self>,
        beta: &CellOf<Self>,
    ) -> Result<CellOf<Self>, DblError>;

    /// The diagonal cell `M -> M x M` over the diagonals of the endpoints.
    fn diagonal_cell(&self, m: &Self::HArr) -> Result<CellOf<Self>, DblError>;

    /// The projection cell `M x N -> M` over the endpoint projections.
    fn proj1_cell(&self, m: &Self::HArr, n: &Self::HArr) -> Result<CellOf<Self>, DblError>;

    /// The projection cell `M x N -> N` over the endpoint projections.
    fn proj2_cell(&self, m: &Self::HArr, n: &Self::HArr) -> Result<CellOf<Self>, DblError>;

    /// The terminal cell `M -> U_I` over the endpoint terminal arrows.
    fn terminal_cell(&self, m: &Self::HArr) -> Result<CellOf<Self>, DblError>;

    /// `<f, g> : A -> B x C`, the pairing through the diagonal.
    fn pair_varr(&self, f: &Self::VArr, g: &Self::VArr) -> Result<Self::VArr, DblError> {
        let a = self.v_dom(f);
        if self.v_dom(g) != a {
            return Err(DblError::BoundaryMismatch {
                detail: "pairing needs vertical arrows with a shared domain".to_string(),
            });
        }
        self.v_comp(&self.product_varr(f, g)?, &self.diagonal(&a)?)
    }

    /// `<alpha, beta> : L -> M x N`, the pairing of two cells with the same
    /// top boundary, built as `(alpha x beta) . delta_L`.
    fn pair_cell(
        &self,
        alpha: &CellOf<Self>,
        beta: &CellOf<Self>,
    ) -> Result<CellOf<Self>, DblError> {
        if alpha.top != beta.top {
            return Err(DblError::BoundaryMismatch {
                detail: "pairing needs cells with a shared top boundary".to_string(),
            });
        }
        let delta = self.diagonal_cell(&alpha.top)?;
        let prod = self.product_cell(alpha, beta)?;
        self.vcomp_cell(&delta, &prod)
    }

    /// The comparison cell
    /// `(M' x N') . (M x N) -> (M' . M) x (N' . N)`
    /// pairing the horizontal composites of the projection cells.  It is
    /// globular because the pairing of the two projections is the
    /// identity on the chosen products.
    fn hcomp_comparison(
        &self,
        m_outer: &Self::HArr,
        m_inner: &Self::HArr,
        n_outer: &Self::HArr,
        n_inner: &Self::HArr,
    ) -> Result<CellOf<Self>, DblError> {
        let first = self.hcomp_cell(
            &self.proj1_cell(m_outer, n_outer)?,
            &self.proj1_cell(m_inner, n_inner)?,
        )?;
        let second = self.hcomp_cell(
            &self.proj2_cell(m_outer, n_outer)?,
            &self.proj2_cell(m_inner, n_inner)?,
        )?;
        self.pair_cell(&first, &second)
    }

    /// The comparison cell `U_{A x B} -> U_A x U_B` pairing the unit cells
    /// of the two projections.
    fn unit_comparison(
        &self,
        a: &Self::Obj,
        b: &Self::Obj,
    ) -> Result<CellOf<Self>, DblError> {
        let first = self.unit_cell(&self.proj1(a, b)?);
        let second = self.unit_cell(&self.proj2(a, b)?);
        self.pair_cell(&first, &second)
    }
}

// ---------------------------------------------------------------------------
// Instances
// ---------------------------------------------------------------------------

impl CartesianDouble for SpanDouble {
    fn terminal_obj(&self) -> FinSet {
        FinSet::point()
    }

    fn to_terminal(&self, a: &FinSet) -> FinFn {
        FinFn::to_point(a)
    }

    fn product_obj(&self, a: &FinSet, b: &FinSet) -> Result<FinSet, DblError> {
        vprod(a, b)
    }

    fn proj1(&self, a: &FinSet, b: &FinSet) -> Result<FinFn, DblError> {
        vproj1(a, b)
    }

    fn proj2(&self, a: &FinSet, b: &FinSet) -> Result<FinFn, DblError> {
        vproj2(a, b)
    }

    fn diagonal(&self, a: &FinSet) -> Result<FinFn, DblError> {
        vdiag(a)
    }

    fn product_varr(&self, f: &FinFn, g: &FinFn) -> Result<FinFn, DblError> {
        vmap_prod(f, g)
    }

    fn product_harr(&self, m: &FinSpan, n: &FinSpan) -> Result<FinSpan, DblError> {
        Ok(FinSpan::new(
            vmap_prod(m.left(), n.left())?,
            vmap_prod(m.right(), n.right())?,
        )?)
    }

    fn product_cell(
        &self,
        alpha: &CellOf<Self>,
        beta: &CellOf<Self>,
    ) -> Result<CellOf<Self>, DblError> {
        self.cell(
            self.product_harr(&alpha.top, &beta.top)?,
            self.product_harr(&alpha.bottom, &beta.bottom)?,
            vmap_prod(&alpha.left, &beta.left)?,
            vmap_prod(&alpha.right, &beta.right)?,
            vmap_prod(&alpha.payload, &beta.payload)?,
        )
    }

    fn diagonal_cell(&self, m: &FinSpan) -> Result<CellOf<Self>, DblError> {
        self.cell(
            m.clone(),
            self.product_harr(m, m)?,
            vdiag(m.src())?,
            vdiag(m.tgt())?,
            vdiag(m.apex())?,
        )
    }

    fn proj1_cell(&self, m: &FinSpan, n: &FinSpan) -> Result<CellOf<Self>, DblError> {
        self.cell(
            self.product_harr(m, n)?,
            m.clone(),
            vproj1(m.src(), n.src())?,
            vproj1(m.tgt(), n.tgt())?,
            vproj1(m.apex(), n.apex())?,
        )
    }

    fn proj2_cell(&self, m: &FinSpan, n: &FinSpan) -> Result<CellOf<Self>, DblError> {
        self.cell(
            self.product_harr(m, n)?,
            n.clone(),
            vproj2(m.src(), n.src())?,
            vproj2(m.tgt(), n.tgt())?,
            vproj2(m.apex(), n.apex())?,
        )
    }

    fn terminal_cell(&self, m: &FinSpan) -> Result<CellOf<Self>, DblError> {
        self.cell(
            m.clone(),
            self.unit(&FinSet::point()),
            FinFn::to_point(m.src()),
            FinFn::to_point(m.tgt()),
            FinFn::to_point(m.apex()),
        )
    }
}

impl CartesianDouble for RelDouble {
    fn terminal_obj(&self) -> FinSet {
        FinSet::point()
    }

    fn to_terminal(&self, a: &FinSet) -> FinFn {
        FinFn::to_point(a)
    }

    fn product_obj(&self, a: &FinSet, b: &FinSet) -> Result<FinSet, DblError> {
        vprod(a, b)
    }

    fn proj1(&self, a: &FinSet, b: &FinSet) -> Result<FinFn, DblError> {
        vproj1(a, b)
    }

    fn proj2(&self, a: &FinSet, b: &FinSet) -> Result<FinFn, DblError> {
        vproj2(a, b)
    }

    fn diagonal(&self, a: &FinSet) -> Result<FinFn, DblError> {
        vdiag(a)
    }

    fn product_varr(&self, f: &FinFn, g: &FinFn) -> Result<FinFn, DblError> {
        vmap_prod(f, g)
    }

    fn product_harr(&self, m: &FinRel, n: &FinRel) -> Result<FinRel, DblError> {
        let src = vprod(m.src(), n.src())?;
        let tgt = vprod(m.tgt(), n.tgt())?;
        let mut pairs = Vec::new();
        for (a, b) in m.pairs() {
            for (x, y) in n.pairs() {
                pairs.push((pair_label(a, x), pair_label(b, y)));
            }
        }
        Ok(FinRel::new(src, tgt, pairs)?)
    }

    fn product_cell(
        &self,
        alpha: &CellOf<Self>,
        beta: &CellOf<Self>,
    ) -> Result<CellOf<Self>, DblError> {
        self.witness(
            self.product_harr(&alpha.top, &beta.top)?,
            self.product_harr(&alpha.bottom, &beta.bottom)?,
            vmap_prod(&alpha.left, &beta.left)?,
            vmap_prod(&alpha.right, &beta.right)?,
        )
    }

    fn diagonal_cell(&self, m: &FinRel) -> Result<CellOf<Self>, DblError> {
        self.witness(
            m.clone(),
            self.product_harr(m, m)?,
            vdiag(m.src())?,
            vdiag(m.tgt())?,
        )
    }

    fn proj1_cell(&self, m: &FinRel, n: &FinRel) -> Result<CellOf<Self>, DblError> {
        self.witness(
            self.product_harr(m, n)?,
            m.clone(),
            vproj1(m.src(), n.src())?,
            vproj1(m.tgt(), n.tgt())?,
        )
    }

    fn proj2_cell(&self, m: &FinRel, n: &FinRel) -> Result<CellOf<Self>, DblError> {
        self.witness(
            self.product_harr(m, n)?,
            n.clone(),
            vproj2(m.src(), n.src())?,
            vproj2(m.tgt(), n.tgt())?,
        )
    }

    fn terminal_cell(&self, m: &FinRel) -> Result<CellOf<Self>, DblError> {
        self.witness(
            m.clone(),
            self.unit(&FinSet::point()),
            FinFn::to_point(m.src()),
            FinFn::to_point(m.tgt()),
        )
    }
}

fn vmat_component<'a>(c: &'a CellOf<VMatDouble>, t: &str, s: &str) -> Result<&'a FinFn, DblError> {
    c.payload
        .0
        .get(&(t.to_string(), s.to_string()))
        .ok_or_else(|| DblError::InvalidCell {
            detail: format!("cell family is missing the component at ({t},{s})"),
        })
}

impl VMatDouble {
    fn checked_cell(&self, c: CellOf<Self>) -> Result<CellOf<Self>, DblError> {
        self.cell_ok(&c)?;
        Ok(c)
    }
}

impl CartesianDouble for VMatDouble {
    fn terminal_obj(&self) -> FinSet {
        FinSet::point()
    }

    fn to_terminal(&self, a: &FinSet) -> FinFn {
        FinFn::to_point(a)
    }

    fn product_obj(&self, a: &FinSet, b: &FinSet) -> Result<FinSet, DblError> {
        vprod(a, b)
    }

    fn proj1(&self, a: &FinSet, b: &FinSet) -> Result<FinFn, DblError> {
        vproj1(a, b)
    }

    fn proj2(&self, a: &FinSet, b: &FinSet) -> Result<FinFn, DblError> {
        vproj2(a, b)
    }

    fn diagonal(&self, a: &FinSet) -> Result<FinFn, DblError> {
        vdiag(a)
    }

    fn product_varr(&self, f: &FinFn, g: &FinFn) -> Result<FinFn, DblError> {
        vmap_prod(f, g)
    }

    fn product_harr(&self, m: &VMatrix, n: &VMatrix) -> Result<VMatrix, DblError> {
        let src = vprod(m.src(), n.src())?;
        let tgt = vprod(m.tgt(), n.tgt())?;
        let mut entries = BTreeMap::new();
        for t in m.tgt().iter() {
            for y in n.tgt().iter() {
                for s in m.src().iter() {
                    for x in n.src().iter() {
                        entries.insert(
                            (pair_label(t, y), pair_label(s, x)),
                            vprod(m.entry(t, s), n.entry(y, x))?,
                        );
                    }
                }
            }
        }
        Ok(VMatrix::new(src, tgt, entries).map_err(DblError::from)?)
    }

    fn product_cell(
        &self,
        alpha: &CellOf<Self>,
        beta: &CellOf<Self>,
    ) -> Result<CellOf<Self>, DblError> {
        let mut family = BTreeMap::new();
        for t in alpha.top.tgt().iter() {
            for y in beta.top.tgt().iter() {
                for s in alpha.top.src().iter() {
                    for x in beta.top.src().iter() {
                        family.insert(
                            (pair_label(t, y), pair_label(s, x)),
                            vmap_prod(vmat_component(alpha, t, s)?, vmat_component(beta, y, x)?)?,
                        );
                    }
                }
            }
        }
        self.checked_cell(Cell {
            top: self.product_harr(&alpha.top, &beta.top)?,
            bottom: self.product_harr(&alpha.bottom, &beta.bottom)?,
            left: vmap_prod(&alpha.left, &beta.left)?,
            right: vmap_prod(&alpha.right, &beta.right)?,
            payload: VMatCellFamily(family),
        })
    }

    fn diagonal_cell(&self, m: &VMatrix) -> Result<CellOf<Self>, DblError> {
        let mut family = BTreeMap::new();
        for (t, s, set) in m.entries() {
            family.insert((t.to_string(), s.to_string()), vdiag(set)?);
        }
        self.checked_cell(Cell {
            top: m.clone(),
            bottom: self.product_harr(m, m)?,
            left: vdiag(m.src())?,
            right: vdiag(m.tgt())?,
            payload: VMatCellFamily(family),
        })
    }

    fn proj1_cell(&self, m: &VMatrix, n: &VMatrix) -> Result<CellOf<Self>, DblError> {
        let mut family = BTreeMap::new();
        for t in m.tgt().iter() {
            for y in n.tgt().iter() {
                for s in m.src().iter() {
                    for x in n.src().iter() {
                        family.insert(
                            (pair_label(t, y), pair_label(s, x)),
                            vproj1(m.entry(t, s), n.entry(y, x))?,
                        );
                    }
                }
            }
        }
        self.checked_cell(Cell {
            top: self.product_harr(m, n)?,
            bottom: m.clone(),
            left: vproj1(m.src(), n.src())?,
            right: vproj1(m.tgt(), n.tgt())?,
            payload: VMatCellFamily(family),
        })
    }

    fn proj2_cell(&self, m: &VMatrix, n: &VMatrix) -> Result<CellOf<Self>, DblError> {
        let mut family = BTreeMap::new();
        for t in m.tgt().iter() {
            for y in n.tgt().iter() {
                for s in m.src().iter() {
                    for x in n.src().iter() {
                        family.insert(
                            (pair_label(t, y), pair_label(s, x)),
                            vproj2(m.entry(t, s), n.entry(y, x))?,
                        );
                    }
                }
            }
        }
        self.checked_cell(Cell {
            top: self.product_harr(m, n)?,
            bottom: n.clone(),
            left: vproj2(m.src(), n.src())?,
            right: vproj2(m.tgt(), n.tgt())?,
            payload: VMatCellFamily(family),
        })
    }

    fn terminal_cell(&self, m: &VMatrix) -> Result<CellOf<Self>, DblError> {
        let mut family = BTreeMap::new();
        for (t, s, set) in m.entries() {
            family.insert((t.to_string(), s.to_string()), FinFn::to_point(set));
        }
        self.checked_cell(Cell {
            top: m.clone(),
            bottom: self.unit(&FinSet::point()),
            left: FinFn::to_point(m.src()),
            right: FinFn::to_point(m.tgt()),
            payload: VMatCellFamily(family),
        })
    }
}

// ---------------------------------------------------------------------------
// Local (hom-wise) products
// ---------------------------------------------------------------------------

/// The hom-wise binary product of two parallel horizontal arrows
/// `M, N : A -/-> B`: the restriction of `M x N` along the two diagonals,
/// with globular projections and the hom-wise terminal object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalProduct<D: DoubleCategory> {
    /// The meet `M ∧ N : A -/-> B`.
    pub arrow: D::HArr,
    /// The Cartesian binding cell `arrow -> M x N` over the diagonals.
    pub binding: CellOf<D>,
    /// Globular projection `arrow -> M`.
    pub proj1: CellOf<D>,
    /// Globular projection `arrow -> N`.
    pub proj2: CellOf<D>,
    /// The hom-wise terminal arrow `A -/-> B`, the restriction of `U_I`.
    pub top: D::HArr,
}

/// Builds `M ∧ N` as the Cartesian filling of `M x N` over the diagonals,
/// together with the hom-wise terminal object over the same endpoints.
pub fn local_product<D: CartesianDouble>(
    d: &D,
    m: &D::HArr,
    n: &D::HArr,
) -> Result<LocalProduct<D>, DblError> {
    let a = d.h_src(m);
    let b = d.h_tgt(m);
    if d.h_src(n) != a || d.h_tgt(n) != b {
        return Err(DblError::BoundaryMismatch {
            detail: "hom-wise products need parallel horizontal arrows".to_string(),
        });
    }
    let niche = Niche::bottom(d, d.diagonal(&a)?, d.diagonal(&b)?, d.product_harr(m, n)?)?;
    let filling = cartesian_filling(d, &niche)?;
    let proj1 = d.vcomp_cell(&filling.binding, &d.proj1_cell(m, n)?)?;
    let proj2 = d.vcomp_cell(&filling.binding, &d.proj2_cell(m, n)?)?;
    let top_niche = Niche::bottom(
        d,
        d.to_terminal(&a),
        d.to_terminal(&b),
        d.unit(&d.terminal_obj()),
    )?;
    let top = cartesian_filling(d, &top_niche)?.arrow;
    Ok(LocalProduct {
        arrow: filling.arrow,
        binding: filling.binding,
        proj1,
        proj2,
        top,
    })
}

/// The unique globular cell `L -> M ∧ N` with the prescribed projections,
/// found by factoring the pairing through the binding cell.
pub fn local_pairing<D: CartesianDouble>(
    d: &D,
    lp: &LocalProduct<D>,
    alpha: &CellOf<D>,
    beta: &CellOf<D>,
    budget: &Budget,
) -> Result<CellOf<D>, DblError> {
    if alpha.top != beta.top {
        return Err(DblError::BoundaryMismatch {
            detail: "hom-wise pairing needs cells with a shared top boundary".to_string(),
        });
    }
    if !is_globular(d, alpha) || !is_globular(d, beta) {
        return Err(DblError::BoundaryMismatch {
            detail: "hom-wise pairing needs globular cells".to_string(),
        });
    }
    let paired = d.pair_cell(alpha, beta)?;
    let src = d.h_src(&alpha.top);
    let tgt = d.h_tgt(&alpha.top);
    factor_through_cartesian(d, &lp.binding, &paired, &d.v_id(&src), &d.v_id(&tgt), budget)
}

/// Checks that a hom-wise product of `m` and `n` really is one: valid
/// globular projections, a unique globular pairing for every compatible
/// pair of cells out of enumerated probe arrows, and a unique globular
/// cell into the hom-wise terminal object.
pub fn verify_local_product<D: CartesianDouble>(
    d: &D,
    m: &D::HArr,
    n: &D::HArr,
    lp: &LocalProduct<D>,
    budget: &Budget,
) -> VerdictReport {
    let mut report = VerdictReport::new();
    let a = d.h_src(m);
    let b = d.h_tgt(m);

    let boundaries_ok = d.cell_ok(&lp.binding).is_ok()
        && d.cell_ok(&lp.proj1).is_ok()
        && d.cell_ok(&lp.proj2).is_ok()
        && is_globular(d, &lp.proj1)
        && is_globular(d, &lp.proj2)
        && lp.proj1.bottom == *m
        && lp.proj2.bottom == *n
        && lp.proj1.top == lp.arrow
        && lp.proj2.top == lp.arrow;
    if boundaries_ok {
        report.pass("projections_valid");
    } else {
        report.fail(
            "projections_valid",
            "binding or projection cells are invalid or wrongly framed",
        );
        return report;
    }

    // Probe arrows: the meet itself, the two factors, and a sampled batch.
    let mut probes: Vec<D::HArr> = vec![lp.arrow.clone(), m.clone(), n.clone()];
    let mut rng = budget.rng("local-product-probes");
    let sampling = budget.sampling();
    for _ in 0..4 {
        if let Some(l) = d.sample_hom(&a, &b, &mut rng, &sampling) {
            probes.push(l);
        }
    }
    probes.dedup();

    // Uniqueness is checked against enumerated cells, so cell searches are
    // capped to keep the probe loop quadratic rather than cubic: cells into
    // the meet are projected once up front and compared by lookup.
    let search = Budget {
        max_cells: budget.max_cells.min(4096),
        ..budget.clone()
    };
    const PAIRS_PER_SIDE: usize = 16;

    let mut pairs_checked = 0usize;
    let mut truncated = false;
    let mut pairing_failure: Option<String> = None;
    let mut terminal_failure: Option<String> = None;

    'outer: for l in &probes {
        let into_m = d.cells(&globular(d, l, m), &search);
        let into_n = d.cells(&globular(d, l, n), &search);
        let into_meet = d.cells(&globular(d, l, &lp.arrow), &search);
        truncated |= into_m.truncated
            || into_n.truncated
            || into_meet.truncated
            || into_m.items.len() > PAIRS_PER_SIDE
            || into_n.items.len() > PAIRS_PER_SIDE;
        let mut projected = Vec::with_capacity(into_meet.items.len());
        for gamma in &into_meet.items {
            match (d.vcomp_cell(gamma, &lp.proj1), d.vcomp_cell(gamma, &lp.proj2)) {
                (Ok(p), Ok(q)) => projected.push((p, q)),
                (Err(e), _) | (_, Err(e)) => {
                    pairing_failure = Some(format!("projecting a cell into the meet failed: {e}"));
                    break 'outer;
                }
            }
        }
        for alpha in into_m.items.iter().take(PAIRS_PER_SIDE) {
            for beta in into_n.items.iter().take(PAIRS_PER_SIDE) {
                let matching = projected
                    .iter()
                    .filter(|(p, q)| p == alpha && q == beta)
                    .count();
                match matching {
                    1 => pairs_checked += 1,
                    0 if into_meet.truncated => {}
                    0 => {
                        pairing_failure =
                            Some(format!("no pairing for a compatible pair out of {l:?}"));
                        break 'outer;
                    }
                    k => {
                        pairing_failure =
                            Some(format!("{k} distinct pairings for a pair out of {l:?}"));
                        break 'outer;
                    }
                }
            }
        }

        let into_top = d.cells(&globular(d, l, &lp.top), &search);
        truncated |= into_top.truncated;
        if into_top.items.len() != 1 && !into_top.truncated {
            terminal_failure = Some(format!(
                "{} globular cells from {l:?} into the hom-wise terminal object, expected exactly 1",
                into_top.items.len()
            ));
            break;
        }
    }

    match pairing_failure {
        Some(detail) => report.fail("pairing_unique", detail),
        None if pairs_checked == 0 && truncated => report.partial(
            "pairing_unique",
            "enumeration truncated before any pair could be decided",
        ),
        None if pairs_checked == 0 => {
            report.fail("pairing_unique", "no compatible pairs found; the sweep was vacuous")
        }
        None if truncated => report.partial(
            "pairing_unique",
            format!("{pairs_checked} pairs checked, with truncated enumerations"),
        ),
        None => report.push(
            "pairing_unique",
            Verdict::Pass,
            Some(format!("{pairs_checked} pairs over {} probe arrows", probes.len())),
        ),
    }
    match terminal_failure {
        Some(detail) => report.fail("terminal_unique", detail),
        None => report.pass("terminal_unique"),
    }
    report
}

fn globular<D: DoubleCategory>(d: &D, top: &D::HArr, bottom: &D::HArr) -> Frame<D::HArr, D::VArr> {
    Frame {
        top: top.clone(),
        bottom: bottom.clone(),
        left: d.v_id(&d.h_src(top)),
        right: d.v_id(&d.h_tgt(top)),
    }
}

// ---------------------------------------------------------------------------
// Verdict sweeps
// ---------------------------------------------------------------------------

/// A row-level failure: either a law violation with a counterexample or an
/// operation error during a probe.
struct RowFail(String);

impl From<DblError> for RowFail {
    fn from(e: DblError) -> Self {
        RowFail(e.to_string())
    }
}

fn sweep(
    report: &mut VerdictReport,
    name: &str,
    samples: usize,
    mut draw: impl FnMut() -> Result<bool, RowFail>,
) {
    let mut checked = 0usize;
    let mut failure: Option<String> = None;
    for _ in 0..samples {
        match draw() {
            Ok(true) => checked += 1,
            Ok(false) => {}
            Err(RowFail(detail)) => {
                failure = Some(detail);
                break;
            }
        }
    }
    match failure {
        Some(detail) => report.fail(name, detail),
        None if checked == 0 => report.fail(
            name,
            format!("no probes drawn in {samples} attempts; the sweep was vacuous"),
        ),
        None => report.push(name, Verdict::Pass, Some(format!("{checked} probes"))),
    }
}

fn require<T: std::fmt::Debug + PartialEq>(lhs: T, rhs: T, law: &str) -> Result<(), RowFail> {
    if lhs == rhs {
        Ok(())
    } else {
        Err(RowFail(format!("{law}: {lhs:?} differs from {rhs:?}")))
    }
}

/// Checks the strict product structure: well-framed structure cells,
/// naturality of the diagonal, projection, and terminal cells in both the
/// vertical category and the cell category, compatibility with horizontal
/// composition and units through the comparison cells, the triangle
/// identities, and the determination of cells into a product by their
/// projections.
pub fn check_precartesian<D: CartesianDouble>(d: &D, budget: &Budget) -> VerdictReport {
    let mut report = VerdictReport::new();
    let pool = d.objects(budget);
    let sampling = budget.sampling();

    let pick_obj = |rng: &mut rand_chacha::ChaCha8Rng| pool.choose(rng).cloned();
    let pick_vert = |a: &D::Obj, b: &D::Obj, rng: &mut rand_chacha::ChaCha8Rng| {
        d.verticals(a, b).choose(rng).cloned()
    };

    // Structure cells land on the expected frames: this is where the
    // source/target functors are checked to commute with the product
    // operations.
    let mut rng = budget.rng("precartesian/structure");
    sweep(&mut report, "structure_cells_framed", budget.samples, || {
        let (Some(a), Some(b), Some(x), Some(y)) = (
            pick_obj(&mut rng),
            pick_obj(&mut rng),
            pick_obj(&mut rng),
            pick_obj(&mut rng),
        ) else {
            return Ok(false);
        };
        let (Some(m), Some(n)) = (
            d.sample_hom(&a, &b, &mut rng, &sampling),
            d.sample_hom(&x, &y, &mut rng, &sampling),
        ) else {
            return Ok(false);
        };

        let delta = d.diagonal_cell(&m)?;
        d.cell_ok(&delta)?;
        require(delta.top.clone(), m.clone(), "diagonal cell top")?;
        require(delta.bottom.clone(), d.product_harr(&m, &m)?, "diagonal cell bottom")?;
        require(delta.left.clone(), d.diagonal(&a)?, "diagonal cell left vertical")?;
        require(delta.right.clone(), d.diagonal(&b)?, "diagonal cell right vertical")?;

        let pi1 = d.proj1_cell(&m, &n)?;
        let pi2 = d.proj2_cell(&m, &n)?;
        d.cell_ok(&pi1)?;
        d.cell_ok(&pi2)?;
        require(pi1.top.clone(), d.product_harr(&m, &n)?, "projection cell top")?;
        require(pi1.bottom.clone(), m.clone(), "first projection cell bottom")?;
        require(pi2.bottom.clone(), n.clone(), "second projection cell bottom")?;
        require(pi1.left.clone(), d.proj1(&a, &x)?, "first projection cell left vertical")?;
        require(pi2.right.clone(), d.proj2(&b, &y)?, "second projection cell right vertical")?;

        let tau = d.terminal_cell(&m)?;
        d.cell_ok(&tau)?;
        require(tau.bottom.clone(), d.unit(&d.terminal_obj()), "terminal cell bottom")?;
        require(tau.left.clone(), d.to_terminal(&a), "terminal cell left vertical")?;
        require(tau.right.clone(), d.to_terminal(&b), "terminal cell right vertical")?;

        let (Some(a2), Some(b2), Some(x2), Some(y2)) = (
            pick_obj(&mut rng),
            pick_obj(&mut rng),
            pick_obj(&mut rng),
            pick_obj(&mut rng),
        ) else {
            return Ok(true);
        };
        let (Some(f), Some(g), Some(h), Some(k)) = (
            pick_vert(&a, &a2, &mut rng),
            pick_vert(&b, &b2, &mut rng),
            pick_vert(&x, &x2, &mut rng),
            pick_vert(&y, &y2, &mut rng),
        ) else {
            return Ok(true);
        };
        let (Some(alpha), Some(beta)) = (
            d.sample_cell_under(&m, &f, &g, &mut rng, &sampling),
            d.sample_cell_under(&n, &h, &k, &mut rng, &sampling),
        ) else {
            return Ok(true);
        };
        let prod = d.product_cell(&alpha, &beta)?;
        d.cell_ok(&prod)?;
        require(prod.top.clone(), d.product_harr(&alpha.top, &beta.top)?, "product cell top")?;
        require(
            prod.bottom.clone(),
            d.product_harr(&alpha.bottom, &beta.bottom)?,
            "product cell bottom",
        )?;
        require(
            prod.left.clone(),
            d.product_varr(&alpha.left, &beta.left)?,
            "product cell left vertical",
        )?;
        require(
            prod.right.clone(),
            d.product_varr(&alpha.right, &beta.right)?,
            "product cell right vertical",
        )?;
        Ok(true)
    });

    // Naturality in the vertical category.
    let mut rng = budget.rng("precartesian/vertical-naturality");
    sweep(&mut report, "vertical_naturality", budget.samples, || {
        let (Some(a), Some(b), Some(x), Some(y)) = (
            pick_obj(&mut rng),
            pick_obj(&mut rng),
            pick_obj(&mut rng),
            pick_obj(&mut rng),
        ) else {
            return Ok(false);
        };
        let (Some(f), Some(g)) = (pick_vert(&a, &b, &mut rng), pick_vert(&x, &y, &mut rng)) else {
            return Ok(false);
        };
        require(
            d.v_comp(&d.diagonal(&b)?, &f)?,
            d.v_comp(&d.product_varr(&f, &f)?, &d.diagonal(&a)?)?,
            "diagonal naturality",
        )?;
        require(
            d.v_comp(&d.proj1(&b, &y)?, &d.product_varr(&f, &g)?)?,
            d.v_comp(&f, &d.proj1(&a, &x)?)?,
            "first projection naturality",
        )?;
        require(
            d.v_comp(&d.proj2(&b, &y)?, &d.product_varr(&f, &g)?)?,
            d.v_comp(&g, &d.proj2(&a, &x)?)?,
            "second projection naturality",
        )?;
        require(
            d.v_comp(&d.to_terminal(&b), &f)?,
            d.to_terminal(&a),
            "terminal naturality",
        )?;
        require(
            d.product_varr(&d.v_id(&a), &d.v_id(&x))?,
            d.v_id(&d.product_obj(&a, &x)?),
            "product of identities",
        )?;
        Ok(true)
    });

    // Naturality at the cell level: the structure cells against sampled
    // cells.
    let mut rng = budget.rng("precartesian/cell-naturality");
    sweep(&mut report, "cell_naturality", budget.samples, || {
        let (Some(a), Some(b), Some(x), Some(y)) = (
            pick_obj(&mut rng),
            pick_obj(&mut rng),
            pick_obj(&mut rng),
            pick_obj(&mut rng),
        ) else {
            return Ok(false);
        };
        let (Some(m), Some(n)) = (
            d.sample_hom(&a, &b, &mut rng, &sampling),
            d.sample_hom(&x, &y, &mut rng, &sampling),
        ) else {
            return Ok(false);
        };
        let (Some(a2), Some(b2), Some(x2), Some(y2)) = (
            pick_obj(&mut rng),
            pick_obj(&mut rng),
            pick_obj(&mut rng),
            pick_obj(&mut rng),
        ) else {
            return Ok(false);
        };
        let (Some(f), Some(g), Some(h), Some(k)) = (
            pick_vert(&a, &a2, &mut rng),
            pick_vert(&b, &b2, &mut rng),
            pick_vert(&x, &x2, &mut rng),
            pick_vert(&y, &y2, &mut rng),
        ) else {
            return Ok(false);
        };
        let (Some(alpha), Some(beta)) = (
            d.sample_cell_under(&m, &f, &g, &mut rng, &sampling),
            d.sample_cell_under(&n, &h, &k, &mut rng, &sampling),
        ) else {
            return Ok(false);
        };

        require(
            d.vcomp_cell(&alpha, &d.diagonal_cell(&alpha.bottom)?)?,
            d.vcomp_cell(&d.diagonal_cell(&m)?, &d.product_cell(&alpha, &alpha)?)?,
            "diagonal cell naturality",
        )?;
        let prod = d.product_cell(&alpha, &beta)?;
        require(
            d.vcomp_cell(&prod, &d.proj1_cell(&alpha.bottom, &beta.bottom)?)?,
            d.vcomp_cell(&d.proj1_cell(&m, &n)?, &alpha)?,
            "first projection cell naturality",
        )?;
        require(
            d.vcomp_cell(&prod, &d.proj2_cell(&alpha.bottom, &beta.bottom)?)?,
            d.vcomp_cell(&d.proj2_cell(&m, &n)?, &beta)?,
            "second projection cell naturality",
        )?;
        require(
            d.vcomp_cell(&alpha, &d.terminal_cell(&alpha.bottom)?)?,
            d.terminal_cell(&m)?,
            "terminal cell naturality",
        )?;
        Ok(true)
    });

    // Compatibility with horizontal composition, mediated by the
    // comparison cell.
    let mut rng = budget.rng("precartesian/hcomp");
    sweep(&mut report, "hcomp_compatibility", budget.samples, || {
        let (Some(a), Some(b), Some(c), Some(x), Some(y), Some(z)) = (
            pick_obj(&mut rng),
            pick_obj(&mut rng),
            pick_obj(&mut rng),
            pick_obj(&mut rng),
            pick_obj(&mut rng),
            pick_obj(&mut rng),
        ) else {
            return Ok(false);
        };
        let (Some(m), Some(m2), Some(n), Some(n2)) = (
            d.sample_hom(&a, &b, &mut rng, &sampling),
            d.sample_hom(&b, &c, &mut rng, &sampling),
            d.sample_hom(&x, &y, &mut rng, &sampling),
            d.sample_hom(&y, &z, &mut rng, &sampling),
        ) else {
            return Ok(false);
        };

        let mm = d.hcomp(&m2, &m)?;
        let nn = d.hcomp(&n2, &n)?;
        require(
            d.diagonal_cell(&mm)?,
            d.vcomp_cell(
                &d.hcomp_cell(&d.diagonal_cell(&m2)?, &d.diagonal_cell(&m)?)?,
                &d.hcomp_comparison(&m2, &m, &m2, &m)?,
            )?,
            "diagonal against horizontal composition",
        )?;
        let comparison = d.hcomp_comparison(&m2, &m, &n2, &n)?;
        require(
            d.vcomp_cell(&comparison, &d.proj1_cell(&mm, &nn)?)?,
            d.hcomp_cell(&d.proj1_cell(&m2, &n2)?, &d.proj1_cell(&m, &n)?)?,
            "first projection against horizontal composition",
        )?;
        require(
            d.vcomp_cell(&comparison, &d.proj2_cell(&mm, &nn)?)?,
            d.hcomp_cell(&d.proj2_cell(&m2, &n2)?, &d.proj2_cell(&m, &n)?)?,
            "second projection against horizontal composition",
        )?;
        Ok(true)
    });

    // Compatibility with horizontal units.
    let mut rng = budget.rng("precartesian/units");
    sweep(&mut report, "unit_compatibility", budget.samples, || {
        let (Some(a), Some(b)) = (pick_obj(&mut rng), pick_obj(&mut rng)) else {
            return Ok(false);
        };
        require(
            d.diagonal_cell(&d.unit(&a))?,
            d.vcomp_cell(&d.unit_cell(&d.diagonal(&a)?), &d.unit_comparison(&a, &a)?)?,
            "diagonal against units",
        )?;
        let comparison = d.unit_comparison(&a, &b)?;
        require(
            d.vcomp_cell(&comparison, &d.proj1_cell(&d.unit(&a), &d.unit(&b))?)?,
            d.unit_cell(&d.proj1(&a, &b)?),
            "first projection against units",
        )?;
        require(
            d.vcomp_cell(&comparison, &d.proj2_cell(&d.unit(&a), &d.unit(&b))?)?,
            d.unit_cell(&d.proj2(&a, &b)?),
            "second projection against units",
        )?;
        Ok(true)
    });

    // Triangle identities, in the vertical category and at the cell level.
    let mut rng = budget.rng("precartesian/triangles");
    sweep(&mut report, "triangle_identities", budget.samples, || {
        let (Some(a), Some(b), Some(x), Some(y)) = (
            pick_obj(&mut rng),
            pick_obj(&mut rng),
            pick_obj(&mut rng),
            pick_obj(&mut rng),
        ) else {
            return Ok(false);
        };
        require(
            d.v_comp(&d.proj1(&a, &a)?, &d.diagonal(&a)?)?,
            d.v_id(&a),
            "first vertical triangle",
        )?;
        require(
            d.v_comp(&d.proj2(&a, &a)?, &d.diagonal(&a)?)?,
            d.v_id(&a),
            "second vertical triangle",
        )?;
        let ab = d.product_obj(&a, &b)?;
        require(
            d.v_comp(
                &d.product_varr(&d.proj1(&a, &b)?, &d.proj2(&a, &b)?)?,
                &d.diagonal(&ab)?,
            )?,
            d.v_id(&ab),
            "vertical projection-pair triangle",
        )?;
        let (Some(m), Some(n)) = (
            d.sample_hom(&a, &b, &mut rng, &sampling),
            d.sample_hom(&x, &y, &mut rng, &sampling),
        ) else {
            return Ok(true);
        };
        require(
            d.vcomp_cell(&d.diagonal_cell(&m)?, &d.proj1_cell(&m, &m)?)?,
            d.id_cell(&m),
            "first cell triangle",
        )?;
        require(
            d.vcomp_cell(&d.diagonal_cell(&m)?, &d.proj2_cell(&m, &m)?)?,
            d.id_cell(&m),
            "second cell triangle",
        )?;
        let mn = d.product_harr(&m, &n)?;
        require(
            d.vcomp_cell(
                &d.diagonal_cell(&mn)?,
                &d.product_cell(&d.proj1_cell(&m, &n)?, &d.proj2_cell(&m, &n)?)?,
            )?,
            d.id_cell(&mn),
            "cell projection-pair triangle",
        )?;
        Ok(true)
    });

    // The terminal cell is the only cell on its frame.
    let mut rng = budget.rng("precartesian/terminal");
    sweep(&mut report, "terminal_uniqueness", budget.samples, || {
        let (Some(a), Some(b)) = (pick_obj(&mut rng), pick_obj(&mut rng)) else {
            return Ok(false);
        };
        let Some(m) = d.sample_hom(&a, &b, &mut rng, &sampling) else {
            return Ok(false);
        };
        let tau = d.terminal_cell(&m)?;
        let found = d.cells(&tau.frame(), budget);
        if found.truncated {
            return Ok(false);
        }
        if found.items.len() != 1 || found.items[0] != tau {
            return Err(RowFail(format!(
                "{} cells from {m:?} into the terminal unit, expected the canonical one alone",
                found.items.len()
            )));
        }
        Ok(true)
    });

    // A cell into a product is determined by its two projections.
    let mut rng = budget.rng("precartesian/determined");
    sweep(&mut report, "cells_determined_by_projections", budget.samples, || {
        let (Some(a), Some(b), Some(x), Some(y), Some(c), Some(e)) = (
            pick_obj(&mut rng),
            pick_obj(&mut rng),
            pick_obj(&mut rng),
            pick_obj(&mut rng),
            pick_obj(&mut rng),
            pick_obj(&mut rng),
        ) else {
            return Ok(false);
        };
        let (Some(m), Some(n), Some(l)) = (
            d.sample_hom(&a, &b, &mut rng, &sampling),
            d.sample_hom(&x, &y, &mut rng, &sampling),
            d.sample_hom(&c, &e, &mut rng, &sampling),
        ) else {
            return Ok(false);
        };
        let mn = d.product_harr(&m, &n)?;
        let (Some(u), Some(v)) = (
            pick_vert(&c, &d.product_obj(&a, &x)?, &mut rng),
            pick_vert(&e, &d.product_obj(&b, &y)?, &mut rng),
        ) else {
            return Ok(false);
        };
        let frame = Frame { top: l.clone(), bottom: mn.clone(), left: u, right: v };
        let found = d.cells(&frame, &sampling);
        let pi1 = d.proj1_cell(&m, &n)?;
        let pi2 = d.proj2_cell(&m, &n)?;
        for i in 0..found.items.len() {
            for j in (i + 1)..found.items.len() {
                let (ci, cj) = (&found.items[i], &found.items[j]);
                if d.vcomp_cell(ci, &pi1)? == d.vcomp_cell(cj, &pi1)?
                    && d.vcomp_cell(ci, &pi2)? == d.vcomp_cell(cj, &pi2)?
                {
                    return Err(RowFail(format!(
                        "two distinct cells into {mn:?} share both projections"
                    )));
                }
            }
        }
        Ok(!found.items.is_empty())
    });

    report
}

/// Checks that the two comparison cells are invertible on sampled data:
/// `(M' x N') . (M x N) -> (M' . M) x (N' . N)` on composable pairs, and
/// `U_{A x B} -> U_A x U_B` on every pair of enumerated objects.
pub fn check_pseudo<D: CartesianDouble>(d: &D, budget: &Budget) -> VerdictReport {
    let mut report = VerdictReport::new();
    let pool = d.objects(budget);
    let sampling = budget.sampling();

    let mut rng = budget.rng("pseudo/hcomp");
    let pick_obj = |rng: &mut rand_chacha::ChaCha8Rng| pool.choose(rng).cloned();
    sweep(&mut report, "hcomp_comparison_invertible", budget.samples, || {
        let (Some(a), Some(b), Some(c), Some(x), Some(y), Some(z)) = (
            pick_obj(&mut rng),
            pick_obj(&mut rng),
            pick_obj(&mut rng),
            pick_obj(&mut rng),
            pick_obj(&mut rng),
            pick_obj(&mut rng),
        ) else {
            return Ok(false);
        };
        let (Some(m), Some(m2), Some(n), Some(n2)) = (
            d.sample_hom(&a, &b, &mut rng, &sampling),
            d.sample_hom(&b, &c, &mut rng, &sampling),
            d.sample_hom(&x, &y, &mut rng, &sampling),
            d.sample_hom(&y, &z, &mut rng, &sampling),
        ) else {
            return Ok(false);
        };
        let comparison = d.hcomp_comparison(&m2, &m, &n2, &n)?;
        check_invertible(d, &comparison, "horizontal composition comparison")?;
        Ok(true)
    });

    let mut failure: Option<String> = None;
    let mut checked = 0usize;
    'outer: for a in &pool {
        for b in &pool {
            let outcome = (|| -> Result<(), RowFail> {
                let comparison = d.unit_comparison(a, b)?;
                check_invertible(d, &comparison, "unit comparison")
            })();
            match outcome {
                Ok(()) => checked += 1,
                Err(RowFail(detail)) => {
                    failure = Some(detail);
                    break 'outer;
                }
            }
        }
    }
    match failure {
        Some(detail) => report.fail("unit_comparison_invertible", detail),
        None if checked == 0 => {
            report.fail("unit_comparison_invertible", "no objects enumerated; the sweep was vacuous")
        }
        None => report.push(
            "unit_comparison_invertible",
            Verdict::Pass,
            Some(format!("{checked} object pairs")),
        ),
    }
    report
}

fn check_invertible<D: DoubleCategory>(
    d: &D,
    c: &CellOf<D>,
    what: &str,
) -> Result<(), RowFail> {
    let inv = d
        .try_invert(c)
        .ok_or_else(|| RowFail(format!("{what} has no two-sided inverse: {c:?}")))?;
    if d.vcomp_cell(c, &inv)? != d.id_cell(&c.top) {
        return Err(RowFail(format!("{what}: composing with the inverse misses the identity")));
    }
    if d.vcomp_cell(&inv, c)? != d.id_cell(&c.bottom) {
        return Err(RowFail(format!("{what}: composing the inverse the other way misses the identity")));
    }
    Ok(())
}

/// Checks that the unit functor is full: every cell framed by horizontal
/// units is the unit cell of a vertical arrow.  The scan is exhaustive
/// over the enumerated objects and vertical arrows; a counterexample is a
/// unit-framed cell over `(f, g)` with `f != g`, or one that differs from
/// `U_f`.
pub fn check_unit_pure<D: DoubleCategory>(d: &D, budget: &Budget) -> VerdictReport {
    let mut report = VerdictReport::new();
    let pool = d.objects(budget);
    let mut frames = 0usize;
    let mut truncated = false;

    for a in &pool {
        for b in &pool {
            let ua = d.unit(a);
            let ub = d.unit(b);
            for f in d.verticals(a, b) {
                for g in d.verticals(a, b) {
                    let frame = Frame {
                        top: ua.clone(),
                        bottom: ub.clone(),
                        left: f.clone(),
                        right: g.clone(),
                    };
                    let found = d.cells(&frame, budget);
                    truncated |= found.truncated;
                    frames += 1;
                    for c in &found.items {
                        if f != g {
                            report.fail(
                                "unit_frames_carry_only_unit_cells",
                                format!(
                                    "unit-framed cell over distinct verticals {f:?} and {g:?}: {c:?}"
                                ),
                            );
                            return report;
                        }
                        if *c != d.unit_cell(&f) {
                            report.fail(
                                "unit_frames_carry_only_unit_cells",
                                format!("unit-framed cell over {f:?} is not the unit cell: {c:?}"),
                            );
                            return report;
                        }
                    }
                }
            }
        }
    }

    if frames == 0 {
        report.fail("unit_frames_carry_only_unit_cells", "no unit frames enumerated; the scan was vacuous");
    } else if truncated {
        report.partial(
            "unit_frames_carry_only_unit_cells",
            format!("{frames} unit frames scanned, with truncated enumerations"),
        );
    } else {
        report.push(
            "unit_frames_carry_only_unit_cells",
            Verdict::Pass,
            Some(format!("{frames} unit frames scanned exhaustively")),
        );
    }
    report
}

/// Checks the four natural isomorphisms that move a horizontal arrow
/// `F : A -/-> X` past the projections of a product with a fixed object
/// `B`:
///
/// * `p1! . (F x U_B)  ~  F . p1!`   (companions, first projection),
/// * `p2! . (U_B x F)  ~  F . p2!`   (companions, second projection),
/// * `(F x U_B) . p1?  ~  p1? . F`   (conjoints, first projection),
/// * `(U_B x F) . p2?  ~  p2? . F`   (conjoints, second projection).
///
/// Each comparison cell is found by factoring the projection collapse of
/// the left-hand side through the Cartesian collapse of the right-hand
/// side, then checked to be two-sided invertible.
pub fn check_horizontal_naturality<D: CartesianDouble>(
    d: &D,
    f: &D::HArr,
    b: &D::Obj,
    budget: &Budget,
) -> VerdictReport {
    let mut report = VerdictReport::new();
    let a = d.h_src(f);
    let x = d.h_tgt(f);
    let unit_b = d.unit(b);

    let companion_first = || -> Result<(), RowFail> {
        let p1_ax = d.proj1(&a, b)?;
        let p1_xb = d.proj1(&x, b)?;
        let cp_here = d.companion_pair(&p1_ax)?;
        let cp_there = d.companion_pair(&p1_xb)?;
        let lhs_collapse = d.vcomp_cell(
            &d.hcomp_cell(&cp_there.companion_counit, &d.proj1_cell(f, &unit_b)?)?,
            &d.lunitor(f)?,
        )?;
        let rhs_collapse = d.vcomp_cell(
            &d.hcomp_cell(&d.id_cell(f), &cp_here.companion_counit)?,
            &d.runitor(f)?,
        )?;
        comparison_is_iso(d, &lhs_collapse, &rhs_collapse, budget)
    };
    row(&mut report, "companion_first_projection", companion_first());

    let companion_second = || -> Result<(), RowFail> {
        let p2_ba = d.proj2(b, &a)?;
        let p2_bx = d.proj2(b, &x)?;
        let cp_here = d.companion_pair(&p2_ba)?;
        let cp_there = d.companion_pair(&p2_bx)?;
        let lhs_collapse = d.vcomp_cell(
            &d.hcomp_cell(&cp_there.companion_counit, &d.proj2_cell(&unit_b, f)?)?,
            &d.lunitor(f)?,
        )?;
        let rhs_collapse = d.vcomp_cell(
            &d.hcomp_cell(&d.id_cell(f), &cp_here.companion_counit)?,
            &d.runitor(f)?,
        )?;
        comparison_is_iso(d, &lhs_collapse, &rhs_collapse, budget)
    };
    row(&mut report, "companion_second_projection", companion_second());

    let conjoint_first = || -> Result<(), RowFail> {
        let p1_ax = d.proj1(&a, b)?;
        let p1_xb = d.proj1(&x, b)?;
        let cp_here = d.companion_pair(&p1_ax)?;
        let cp_there = d.companion_pair(&p1_xb)?;
        let lhs_collapse = d.vcomp_cell(
            &d.hcomp_cell(&d.proj1_cell(f, &unit_b)?, &cp_here.conjoint_counit)?,
            &d.runitor(f)?,
        )?;
        let rhs_collapse = d.vcomp_cell(
            &d.hcomp_cell(&cp_there.conjoint_counit, &d.id_cell(f))?,
            &d.lunitor(f)?,
        )?;
        comparison_is_iso(d, &lhs_collapse, &rhs_collapse, budget)
    };
    row(&mut report, "conjoint_first_projection", conjoint_first());

    let conjoint_second = || -> Result<(), RowFail> {
        let p2_ba = d.proj2(b, &a)?;
        let p2_bx = d.proj2(b, &x)?;
        let cp_here = d.companion_pair(&p2_ba)?;
        let cp_there = d.companion_pair(&p2_bx)?;
        let lhs_collapse = d.vcomp_cell(
            &d.hcomp_cell(&d.proj2_cell(&unit_b, f)?, &cp_here.conjoint_counit)?,
            &d.runitor(f)?,
        )?;
        let rhs_collapse = d.vcomp_cell(
            &d.hcomp_cell(&cp_there.conjoint_counit, &d.id_cell(f))?,
            &d.lunitor(f)?,
        )?;
        comparison_is_iso(d, &lhs_collapse, &rhs_collapse, budget)
    };
    row(&mut report, "conjoint_second_projection", conjoint_second());

    report
}

fn row(report: &mut VerdictReport, name: &str, outcome: Result<(), RowFail>) {
    match outcome {
        Ok(()) => report.pass(name),
        Err(RowFail(detail)) => report.fail(name, detail),
    }
}

/// Both collapses land on the same arrow over the same verticals; the
/// comparison between their sources is the unique globular factorization
/// of one collapse through the other, and must be two-sided invertible.
fn comparison_is_iso<D: DoubleCategory>(
    d: &D,
    lhs_collapse: &CellOf<D>,
    rhs_collapse: &CellOf<D>,
    budget: &Budget,
) -> Result<(), RowFail> {
    let src = d.v_id(&d.h_src(&lhs_collapse.top));
    let tgt = d.v_id(&d.h_tgt(&lhs_collapse.top));
    let gamma = factor_through_cartesian(d, rhs_collapse, lhs_collapse, &src, &tgt, budget)?;
    check_invertible(d, &gamma, "naturality comparison")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::double::DoubleCategory;
    use crate::finset::pair_fns;

    fn set(labels: &[&str]) -> FinSet {
        FinSet::new(labels.iter().copied()).expect("distinct labels")
    }

    #[test]
    fn rel_product_relation_relates_pairs_componentwise() {
        let d = RelDouble::new();
        let a = set(&["a1", "a2"]);
        let b = set(&["b1", "b2"]);
        let x = set(&["x1"]);
        let y = set(&["y1", "y2"]);
        let m = FinRel::new(
            a.clone(),
            b.clone(),
            [("a1".to_string(), "b2".to_string()), ("a2".to_string(), "b1".to_string())],
        )
        .expect("pairs in carriers");
        let n = FinRel::new(
            x.clone(),
            y.clone(),
            [("x1".to_string(), "y1".to_string())],
        )
        .expect("pairs in carriers");
        let prod = d.product_harr(&m, &n).expect("product relation");
        for ai in a.iter() {
            for xi in x.iter() {
                for bi in b.iter() {
                    for yi in y.iter() {
                        assert_eq!(
                            prod.contains(&pair_label(ai, xi), &pair_label(bi, yi)),
                            m.contains(ai, bi) && n.contains(xi, yi),
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn vmat_product_entries_are_set_products() {
        let d = VMatDouble::new();
        let a = set(&["a1", "a2"]);
        let b = set(&["b1"]);
        let m = VMatrix::from_fn(a.clone(), b.clone(), |_, s| {
            if s == "a1" { set(&["u", "v"]) } else { FinSet::empty() }
        })
        .expect("total");
        let n = VMatrix::from_fn(b.clone(), a.clone(), |t, _| {
            if t == "a2" { set(&["w"]) } else { FinSet::point() }
        })
        .expect("total");
        let prod = d.product_harr(&m, &n).expect("product matrix");
        assert_eq!(
            *prod.entry(&pair_label("b1", "a2"), &pair_label("a1", "b1")),
            product(&set(&["u", "v"]), &set(&["w"])).expect("product").set,
        );
        assert_eq!(
            *prod.entry(&pair_label("b1", "a1"), &pair_label("a2", "b1")),
            FinSet::empty(),
        );
    }

    #[test]
    fn span_product_of_units_is_the_unit_of_the_product() {
        let d = SpanDouble::new();
        let a = set(&["a1", "a2"]);
        let b = set(&["b1", "b2", "b3"]);
        let prod = d
            .product_harr(&d.unit(&a), &d.unit(&b))
            .expect("product span");
        let ab = d.product_obj(&a, &b).expect("product object");
        assert_eq!(prod, d.unit(&ab));
    }

    #[test]
    fn pairing_with_projections_recovers_the_components() {
        let d = SpanDouble::new();
        let a = set(&["a1", "a2"]);
        let b = set(&["b1"]);
        let f = FinFn::from_fn(&a, &a, |_| "a2".to_string()).expect("total");
        let g = FinFn::constant(&a, &b, "b1").expect("nonempty codomain");
        let paired = d.pair_varr(&f, &g).expect("pairing");
        assert_eq!(
            d.v_comp(&d.proj1(&a, &b).expect("projection"), &paired).expect("compose"),
            f,
        );
        assert_eq!(
            d.v_comp(&d.proj2(&a, &b).expect("projection"), &paired).expect("compose"),
            g,
        );
    }

    #[test]
    fn rel_local_product_is_the_intersection() {
        let d = RelDouble::new();
        let a = set(&["a1", "a2"]);
        let b = set(&["b1", "b2"]);
        for m in FinRel::enumerate(&a, &b) {
            for n in FinRel::enumerate(&a, &b) {
                let lp = local_product(&d, &m, &n).expect("hom-wise product");
                assert_eq!(lp.arrow, m.meet(&n).expect("parallel"));
            }
        }
    }

    #[test]
    fn span_local_product_is_the_pullback_of_the_leg_pairings() {
        let d = SpanDouble::new();
        let a = set(&["a1", "a2"]);
        let b = set(&["b1", "b2"]);
        let apex_m = set(&["r1", "r2", "r3"]);
        let apex_n = set(&["s1", "s2"]);
        let m = FinSpan::new(
            FinFn::from_fn(&apex_m, &a, |r| if r == "r1" { "a1" } else { "a2" }.to_string())
                .expect("total"),
            FinFn::from_fn(&apex_m, &b, |r| if r == "r3" { "b2" } else { "b1" }.to_string())
                .expect("total"),
        )
        .expect("span");
        let n = FinSpan::new(
            FinFn::from_fn(&apex_n, &a, |s| if s == "s1" { "a1" } else { "a2" }.to_string())
                .expect("total"),
            FinFn::from_fn(&apex_n, &b, |_| "b1".to_string()).expect("total"),
        )
        .expect("span");

        let lp = local_product(&d, &m, &n).expect("hom-wise product");
        let legs_m = pair_fns(m.left(), m.right()).expect("pairing");
        let legs_n = pair_fns(n.left(), n.right()).expect("pairing");
        let pb = crate::finset::pullback(&legs_m, &legs_n).expect("pullback");
        let oracle = FinSpan::new(
            m.left().compose(&pb.q1).expect("compose"),
            m.right().compose(&pb.q1).expect("compose"),
        )
        .expect("span");
        let search = crate::double::find_iso(&d, &lp.arrow, &oracle, &Budget::with_size(3))
            .expect("search");
        assert!(search.iso.is_some(), "meet differs from the pullback span");
    }

    #[test]
    fn hcomp_comparison_collapses_on_an_empty_middle() {
        let d = SpanDouble::new();
        let a = set(&["a1"]);
        let e = FinSet::empty();
        let c = set(&["c1"]);
        let empty_in = FinSpan::new(
            FinFn::new(e.clone(), a.clone(), BTreeMap::new()).expect("empty map"),
            FinFn::new(e.clone(), e.clone(), BTreeMap::new()).expect("empty map"),
        )
        .expect("span");
        let empty_out = FinSpan::new(
            FinFn::new(e.clone(), e.clone(), BTreeMap::new()).expect("empty map"),
            FinFn::new(e.clone(), c.clone(), BTreeMap::new()).expect("empty map"),
        )
        .expect("span");
        let comparison = d
            .hcomp_comparison(&empty_out, &empty_in, &empty_out, &empty_in)
            .expect("comparison");
        assert!(comparison.top.apex().is_empty());
        assert!(d.try_invert(&comparison).is_some());
    }
}
