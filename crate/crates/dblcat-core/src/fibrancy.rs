//! Companions, conjoints, and universal fillings.
//!
//! A double category is *fibrant* when every vertical arrow `f : A -> B`
//! extends to a companion/conjoint pair: horizontal arrows `f! : A -/-> B`
//! and `f? : B -/-> A` bound to `f` by four cells satisfying two stacking
//! equations (their vertical pastings give the unit cell on `f`) and two
//! snake equations (horizontal pastings collapse to identity cells).
//!
//! Out of those pairs this module builds the universal fillings: for a
//! bottom-niche `(f, g, M)` the arrow `(g? . M) . f!` with a Cartesian
//! binding cell, and for a top-niche the dual `(g! . M) . f?` with an
//! op-Cartesian one.  `verify_cartesian` / `verify_opcartesian` check the
//! universal property the honest way: enumerate candidate cells over
//! budget-bounded factoring frames and confirm each factors through the
//! binding exactly once.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;

use crate::double::{Budget, Cell, CellOf, DoubleCategory, Frame, Verdict, VerdictReport};
use crate::error::DblError;
use crate::finset::{FinFn, FinRel, FinSet, FinSpan};
use crate::instances::{RelDouble, SpanDouble, VMatDouble, VMatrix};

/// Two vertical arrows waiting for a horizontal arrow to close them into a
/// cell frame.  `horizontal` sits at the bottom (Cartesian case) or at the
/// top (op-Cartesian case); the corresponding constructor checks the
/// matching compatibility.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Niche<D: DoubleCategory> {
    pub left: D::VArr,
    pub right: D::VArr,
    pub horizontal: D::HArr,
}

impl<D: DoubleCategory> Niche<D> {
    /// A niche whose horizontal arrow spans the two codomains.
    pub fn bottom(
        d: &D,
        left: D::VArr,
        right: D::VArr,
        horizontal: D::HArr,
    ) -> Result<Self, DblError> {
        if d.h_src(&horizontal) != d.v_cod(&left) || d.h_tgt(&horizontal) != d.v_cod(&right) {
            return Err(DblError::BoundaryMismatch {
                detail: format!(
                    "horizontal arrow {horizontal:?} does not span the codomains of {left:?} and {right:?}"
                ),
            });
        }
        Ok(Niche { left, right, horizontal })
    }

    /// A niche whose horizontal arrow spans the two domains.
    pub fn top(
        d: &D,
        left: D::VArr,
        right: D::VArr,
        horizontal: D::HArr,
    ) -> Result<Self, DblError> {
        if d.h_src(&horizontal) != d.v_dom(&left) || d.h_tgt(&horizontal) != d.v_dom(&right) {
            return Err(DblError::BoundaryMismatch {
                detail: format!(
                    "horizontal arrow {horizontal:?} does not span the domains of {left:?} and {right:?}"
                ),
            });
        }
        Ok(Niche { left, right, horizontal })
    }
}

/// A universal completion of a niche: the horizontal arrow together with
/// its binding cell (Cartesian for bottom-niches, op-Cartesian for
/// top-niches).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filling<D: DoubleCategory> {
    pub arrow: D::HArr,
    pub binding: CellOf<D>,
}

/// The companion/conjoint pair of a vertical arrow `f : A -> B`, with the
/// four binding cells:
///
/// * `companion_counit : companion -> U_B` over `(f, 1)`,
/// * `companion_unit   : U_A -> companion` over `(1, f)`,
/// * `conjoint_counit  : conjoint -> U_B` over `(1, f)`,
/// * `conjoint_unit    : U_A -> conjoint` over `(f, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompanionPair<D: DoubleCategory> {
    pub vertical: D::VArr,
    pub companion: D::HArr,
    pub conjoint: D::HArr,
    pub companion_counit: CellOf<D>,
    pub companion_unit: CellOf<D>,
    pub conjoint_counit: CellOf<D>,
    pub conjoint_unit: CellOf<D>,
}

/// Instances whose vertical arrows all carry companion/conjoint pairs.
pub trait Fibrant: DoubleCategory {
    fn companion_pair(&self, f: &Self::VArr) -> Result<CompanionPair<Self>, DblError>;
}

/// Inverts a cell that the ambient structure promises to be invertible,
/// turning a missing inverse into an error instead of a panic.
pub fn require_invertible<D: DoubleCategory>(
    d: &D,
    c: &CellOf<D>,
) -> Result<CellOf<D>, DblError> {
    d.try_invert(c).ok_or_else(|| DblError::InvalidCell {
        detail: format!("expected an invertible cell, got {c:?}"),
    })
}

// ---------------------------------------------------------------------------
// Companion pair verification
// ---------------------------------------------------------------------------

/// Checks the four binding cells of a companion pair: their frames, their
/// validity, the two stacking equations, and the two snake equations.
pub fn verify_companion_pair<D: DoubleCategory>(d: &D, cp: &CompanionPair<D>) -> VerdictReport {
    let mut report = VerdictReport::new();
    let f = &cp.vertical;
    let a = d.v_dom(f);
    let b = d.v_cod(f);
    let ua = d.unit(&a);
    let ub = d.unit(&b);
    let ida = d.v_id(&a);
    let idb = d.v_id(&b);

    let expected_frames = [
        (
            "companion_counit",
            &cp.companion_counit,
            Frame {
                top: cp.companion.clone(),
                bottom: ub.clone(),
                left: f.clone(),
                right: idb.clone(),
            },
        ),
        (
            "companion_unit",
            &cp.companion_unit,
            Frame {
                top: ua.clone(),
                bottom: cp.companion.clone(),
                left: ida.clone(),
                right: f.clone(),
            },
        ),
        (
            "conjoint_counit",
            &cp.conjoint_counit,
            Frame {
                top: cp.conjoint.clone(),
                bottom: ub.clone(),
                left: idb.clone(),
                right: f.clone(),
            },
        ),
        (
            "conjoint_unit",
            &cp.conjoint_unit,
            Frame {
                top: ua.clone(),
                bottom: cp.conjoint.clone(),
                left: f.clone(),
                right: ida.clone(),
            },
        ),
    ];
    let mut frames_ok = true;
    for (name, cell, frame) in &expected_frames {
        if cell.frame() != *frame {
            report.fail(
                format!("{name}_frame"),
                format!("expected frame {frame:?}, found {:?}", cell.frame()),
            );
            frames_ok = false;
        } else if let Err(e) = d.cell_ok(cell) {
            report.fail(format!("{name}_frame"), e.to_string());
            frames_ok = false;
        } else {
            report.pass(format!("{name}_frame"));
        }
    }
    if !frames_ok {
        return report;
    }

    // Stacking equations: unit on top of counit is the unit cell on f.
    let uf = d.unit_cell(f);
    check_equation(
        d,
        &mut report,
        "companion_stack",
        d.vcomp_cell(&cp.companion_unit, &cp.companion_counit),
        &uf,
    );
    check_equation(
        d,
        &mut report,
        "conjoint_stack",
        d.vcomp_cell(&cp.conjoint_unit, &cp.conjoint_counit),
        &uf,
    );

    // Snake equations: the horizontal pasting of unit and counit collapses
    // to the identity once the unitors strip the units off.
    let companion_snake = (|| {
        let rho_inv = require_invertible(d, &d.runitor(&cp.companion)?)?;
        let pasted = d.hcomp_cell(&cp.companion_counit, &cp.companion_unit)?;
        let lam = d.lunitor(&cp.companion)?;
        d.vcomp_cell(&d.vcomp_cell(&rho_inv, &pasted)?, &lam)
    })();
    check_equation(
        d,
        &mut report,
        "companion_snake",
        companion_snake,
        &d.id_cell(&cp.companion),
    );

    let conjoint_snake = (|| {
        let lam_inv = require_invertible(d, &d.lunitor(&cp.conjoint)?)?;
        let pasted = d.hcomp_cell(&cp.conjoint_unit, &cp.conjoint_counit)?;
        let rho = d.runitor(&cp.conjoint)?;
        d.vcomp_cell(&d.vcomp_cell(&lam_inv, &pasted)?, &rho)
    })();
    check_equation(
        d,
        &mut report,
        "conjoint_snake",
        conjoint_snake,
        &d.id_cell(&cp.conjoint),
    );

    report
}

fn check_equation<D: DoubleCategory>(
    _d: &D,
    report: &mut VerdictReport,
    name: &str,
    computed: Result<CellOf<D>, DblError>,
    expected: &CellOf<D>,
) {
    match computed {
        Ok(cell) if cell == *expected => report.pass(name),
        Ok(cell) => report.fail(
            name,
            format!("pasting produced {cell:?}, expected {expected:?}"),
        ),
        Err(e) => report.fail(name, format!("pasting failed to compose: {e}")),
    }
}

// ---------------------------------------------------------------------------
// Adjunction between companion and conjoint
// ---------------------------------------------------------------------------

/// The unit `U_A -> conjoint . companion` of the companion-conjoint
/// adjunction, pasted from the two unit binding cells.
pub fn adjunction_unit<D: DoubleCategory>(
    d: &D,
    cp: &CompanionPair<D>,
) -> Result<CellOf<D>, DblError> {
    let ua = d.unit(&d.v_dom(&cp.vertical));
    let pasted = d.hcomp_cell(&cp.conjoint_unit, &cp.companion_unit)?;
    let lam_inv = require_invertible(d, &d.lunitor(&ua)?)?;
    d.vcomp_cell(&lam_inv, &pasted)
}

/// The counit `companion . conjoint -> U_B`, pasted from the two counit
/// binding cells.
pub fn adjunction_counit<D: DoubleCategory>(
    d: &D,
    cp: &CompanionPair<D>,
) -> Result<CellOf<D>, DblError> {
    let ub = d.unit(&d.v_cod(&cp.vertical));
    let pasted = d.hcomp_cell(&cp.companion_counit, &cp.conjoint_counit)?;
    d.vcomp_cell(&pasted, &d.lunitor(&ub)?)
}

/// Builds the companion pair of `f`, verifies its binding equations, and
/// checks both triangle identities of the adjunction between companion and
/// conjoint in the horizontal bicategory.
pub fn verify_companion_adjunction<D: Fibrant>(d: &D, f: &D::VArr) -> VerdictReport {
    let mut report = VerdictReport::new();
    let cp = match d.companion_pair(f) {
        Ok(cp) => cp,
        Err(e) => {
            report.fail("companion_pair", e.to_string());
            return report;
        }
    };
    report.merge(verify_companion_pair(d, &cp));
    if report.verdict() == Verdict::Fail {
        return report;
    }

    let eta = adjunction_unit(d, &cp);
    let eps = adjunction_counit(d, &cp);
    let (eta, eps) = match (eta, eps) {
        (Ok(eta), Ok(eps)) => (eta, eps),
        (Err(e), _) | (_, Err(e)) => {
            report.fail("adjunction_cells", e.to_string());
            return report;
        }
    };

    // companion -> companion . U_A -> companion . (conjoint . companion)
    // -> (companion . conjoint) . companion -> U_B . companion -> companion
    let companion_triangle = (|| {
        let start = require_invertible(d, &d.runitor(&cp.companion)?)?;
        let widen = d.hcomp_cell(&d.id_cell(&cp.companion), &eta)?;
        let rebracket =
            require_invertible(d, &d.associator(&cp.companion, &cp.conjoint, &cp.companion)?)?;
        let squash = d.hcomp_cell(&eps, &d.id_cell(&cp.companion))?;
        let finish = d.lunitor(&cp.companion)?;
        d.vcomp_cell(
            &d.vcomp_cell(&d.vcomp_cell(&d.vcomp_cell(&start, &widen)?, &rebracket)?, &squash)?,
            &finish,
        )
    })();
    check_equation(
        d,
        &mut report,
        "companion_triangle",
        companion_triangle,
        &d.id_cell(&cp.companion),
    );

    // conjoint -> U_A . conjoint -> (conjoint . companion) . conjoint
    // -> conjoint . (companion . conjoint) -> conjoint . U_B -> conjoint
    let conjoint_triangle = (|| {
        let start = require_invertible(d, &d.lunitor(&cp.conjoint)?)?;
        let widen = d.hcomp_cell(&eta, &d.id_cell(&cp.conjoint))?;
        let rebracket = d.associator(&cp.conjoint, &cp.companion, &cp.conjoint)?;
        let squash = d.hcomp_cell(&d.id_cell(&cp.conjoint), &eps)?;
        let finish = d.runitor(&cp.conjoint)?;
        d.vcomp_cell(
            &d.vcomp_cell(&d.vcomp_cell(&d.vcomp_cell(&start, &widen)?, &rebracket)?, &squash)?,
            &finish,
        )
    })();
    check_equation(
        d,
        &mut report,
        "conjoint_triangle",
        conjoint_triangle,
        &d.id_cell(&cp.conjoint),
    );

    report
}

// ---------------------------------------------------------------------------
// Fillings
// ---------------------------------------------------------------------------

/// The universal completion of a bottom-niche `(f, g, M)`: the arrow
/// `(g? . M) . f!` with its Cartesian binding cell, pasted from the counit
/// binding cells and the unitor collapse.
pub fn cartesian_filling<D: Fibrant>(d: &D, niche: &Niche<D>) -> Result<Filling<D>, DblError> {
    let m = &niche.horizontal;
    if d.h_src(m) != d.v_cod(&niche.left) || d.h_tgt(m) != d.v_cod(&niche.right) {
        return Err(DblError::BoundaryMismatch {
            detail: "filling requested for a niche whose horizontal arrow is not at the bottom"
                .to_string(),
        });
    }
    let cf = d.companion_pair(&niche.left)?;
    let cg = d.companion_pair(&niche.right)?;
    let gm = d.hcomp(&cg.conjoint, m)?;
    let arrow = d.hcomp(&gm, &cf.companion)?;

    let upper = d.hcomp_cell(
        &d.hcomp_cell(&cg.conjoint_counit, &d.id_cell(m))?,
        &cf.companion_counit,
    )?;
    let tgt_unit = d.unit(&d.h_tgt(m));
    let um = d.hcomp(&tgt_unit, m)?;
    let collapse = d.vcomp_cell(&d.runitor(&um)?, &d.lunitor(m)?)?;
    let binding = d.vcomp_cell(&upper, &collapse)?;
    Ok(Filling { arrow, binding })
}

/// The universal completion of a top-niche `(f, g, M)`: the arrow
/// `(g! . M) . f?` with its op-Cartesian binding cell.
pub fn opcartesian_filling<D: Fibrant>(d: &D, niche: &Niche<D>) -> Result<Filling<D>, DblError> {
    let m = &niche.horizontal;
    if d.h_src(m) != d.v_dom(&niche.left) || d.h_tgt(m) != d.v_dom(&niche.right) {
        return Err(DblError::BoundaryMismatch {
            detail: "filling requested for a niche whose horizontal arrow is not at the top"
                .to_string(),
        });
    }
    let cf = d.companion_pair(&niche.left)?;
    let cg = d.companion_pair(&niche.right)?;
    let gm = d.hcomp(&cg.companion, m)?;
    let arrow = d.hcomp(&gm, &cf.conjoint)?;

    let tgt_unit = d.unit(&d.h_tgt(m));
    let um = d.hcomp(&tgt_unit, m)?;
    let insert = d.vcomp_cell(
        &require_invertible(d, &d.lunitor(m)?)?,
        &require_invertible(d, &d.runitor(&um)?)?,
    )?;
    let lower = d.hcomp_cell(
        &d.hcomp_cell(&cg.companion_unit, &d.id_cell(m))?,
        &cf.conjoint_unit,
    )?;
    let binding = d.vcomp_cell(&insert, &lower)?;
    Ok(Filling { arrow, binding })
}

// ---------------------------------------------------------------------------
// Universal-property verification
// ---------------------------------------------------------------------------

/// Checks that `c` is Cartesian: over a budget of factoring frames
/// `(h, k, M')` with `M' : E -/-> F`, `h : E -> A`, `k : F -> C`, every
/// candidate cell `M' -> bottom(c)` over `(left(c) . h, right(c) . k)`
/// factors through `c` by exactly one cell `M' -> top(c)` over `(h, k)`.
///
/// The frame through `(1, 1, top(c))` is always included, so the sweep can
/// never be vacuous; further frames are drawn with the budget's seed.
pub fn verify_cartesian<D: DoubleCategory>(
    d: &D,
    c: &CellOf<D>,
    budget: &Budget,
) -> VerdictReport {
    let mut report = VerdictReport::new();
    if let Err(e) = d.cell_ok(c) {
        report.fail("cell_valid", e.to_string());
        return report;
    }
    report.pass("cell_valid");

    let a_obj = d.v_dom(&c.left);
    let c_obj = d.v_dom(&c.right);
    let mut rng = budget.rng(&format!("verify-cartesian-{}", d.name()));
    let probe_pool = d.objects(&Budget {
        max_size: budget.probe_size.min(budget.max_size),
        ..budget.clone()
    });
    let sampling = budget.sampling();

    let mut frames: BTreeSet<(D::VArr, D::VArr, D::HArr)> = BTreeSet::new();
    frames.insert((d.v_id(&a_obj), d.v_id(&c_obj), c.top.clone()));
    for _ in 0..budget.samples {
        let Some(e_obj) = probe_pool.choose(&mut rng) else { break };
        let Some(f_obj) = probe_pool.choose(&mut rng) else { break };
        let hs = d.verticals(e_obj, &a_obj);
        let ks = d.verticals(f_obj, &c_obj);
        let (Some(h), Some(k)) = (hs.choose(&mut rng), ks.choose(&mut rng)) else {
            continue;
        };
        let Some(m2) = d.sample_hom(e_obj, f_obj, &mut rng, &sampling) else {
            continue;
        };
        frames.insert((h.clone(), k.clone(), m2));
    }

    let mut scanned = 0usize;
    let mut truncated = false;
    for (h, k, m2) in &frames {
        let (fh, gk) = match (d.v_comp(&c.left, h), d.v_comp(&c.right, k)) {
            (Ok(fh), Ok(gk)) => (fh, gk),
            _ => continue,
        };
        let betas = d.cells(
            &Frame { top: m2.clone(), bottom: c.bottom.clone(), left: fh, right: gk },
            budget,
        );
        let gammas = d.cells(
            &Frame { top: m2.clone(), bottom: c.top.clone(), left: h.clone(), right: k.clone() },
            budget,
        );
        truncated |= betas.truncated || gammas.truncated;
        for beta in &betas.items {
            scanned += 1;
            let matches = gammas
                .items
                .iter()
                .filter(|gamma| {
                    d.vcomp_cell(gamma, c).map(|glued| glued == *beta).unwrap_or(false)
                })
                .count();
            match matches {
                1 => {}
                0 if gammas.truncated => {}
                0 => {
                    report.fail(
                        "unique_factorization",
                        format!("candidate does not factor through the cell: {beta:?}"),
                    );
                    return report;
                }
                n => {
                    report.fail(
                        "unique_factorization",
                        format!("candidate factors {n} times: {beta:?}"),
                    );
                    return report;
                }
            }
        }
    }

    if scanned == 0 {
        report.fail(
            "unique_factorization",
            "no candidate cells found over any factoring frame; the sweep was vacuous",
        );
    } else if truncated {
        report.partial(
            "unique_factorization",
            format!("{scanned} candidates over {} frames, with truncated enumerations", frames.len()),
        );
    } else {
        report.push(
            "unique_factorization",
            Verdict::Pass,
            Some(format!("{scanned} candidates over {} frames", frames.len())),
        );
    }
    report
}

/// Dual of [`verify_cartesian`]: every candidate cell out of `top(c)` into
/// a horizontal arrow below `bottom(c)` factors through `c` exactly once.
pub fn verify_opcartesian<D: DoubleCategory>(
    d: &D,
    c: &CellOf<D>,
    budget: &Budget,
) -> VerdictReport {
    let mut report = VerdictReport::new();
    if let Err(e) = d.cell_ok(c) {
        report.fail("cell_valid", e.to_string());
        return report;
    }
    report.pass("cell_valid");

    let b_obj = d.v_cod(&c.left);
    let d_obj = d.v_cod(&c.right);
    let mut rng = budget.rng(&format!("verify-opcartesian-{}", d.name()));
    let probe_pool = d.objects(&Budget {
        max_size: budget.probe_size.min(budget.max_size),
        ..budget.clone()
    });
    let sampling = budget.sampling();

    let mut frames: BTreeSet<(D::VArr, D::VArr, D::HArr)> = BTreeSet::new();
    frames.insert((d.v_id(&b_obj), d.v_id(&d_obj), c.bottom.clone()));
    for _ in 0..budget.samples {
        let Some(e_obj) = probe_pool.choose(&mut rng) else { break };
        let Some(f_obj) = probe_pool.choose(&mut rng) else { break };
        let hs = d.verticals(&b_obj, e_obj);
        let ks = d.verticals(&d_obj, f_obj);
        let (Some(h), Some(k)) = (hs.choose(&mut rng), ks.choose(&mut rng)) else {
            continue;
        };
        let Some(n2) = d.sample_hom(e_obj, f_obj, &mut rng, &sampling) else {
            continue;
        };
        frames.insert((h.clone(), k.clone(), n2));
    }

    let mut scanned = 0usize;
    let mut truncated = false;
    for (h, k, n2) in &frames {
        let (hf, kg) = match (d.v_comp(h, &c.left), d.v_comp(k, &c.right)) {
            (Ok(hf), Ok(kg)) => (hf, kg),
            _ => continue,
        };
        let betas = d.cells(
            &Frame { top: c.top.clone(), bottom: n2.clone(), left: hf, right: kg },
            budget,
        );
        let gammas = d.cells(
            &Frame { top: c.bottom.clone(), bottom: n2.clone(), left: h.clone(), right: k.clone() },
            budget,
        );
        truncated |= betas.truncated || gammas.truncated;
        for beta in &betas.items {
            scanned += 1;
            let matches = gammas
                .items
                .iter()
                .filter(|gamma| {
                    d.vcomp_cell(c, gamma).map(|glued| glued == *beta).unwrap_or(false)
                })
                .count();
            match matches {
                1 => {}
                0 if gammas.truncated => {}
                0 => {
                    report.fail(
                        "unique_factorization",
                        format!("candidate does not factor through the cell: {beta:?}"),
                    );
                    return report;
                }
                n => {
                    report.fail(
                        "unique_factorization",
                        format!("candidate factors {n} times: {beta:?}"),
                    );
                    return report;
                }
            }
        }
    }

    if scanned == 0 {
        report.fail(
            "unique_factorization",
            "no candidate cells found over any factoring frame; the sweep was vacuous",
        );
    } else if truncated {
        report.partial(
            "unique_factorization",
            format!("{scanned} candidates over {} frames, with truncated enumerations", frames.len()),
        );
    } else {
        report.push(
            "unique_factorization",
            Verdict::Pass,
            Some(format!("{scanned} candidates over {} frames", frames.len())),
        );
    }
    report
}

/// Factors `beta` through a Cartesian cell: returns the unique `gamma` on
/// the frame above `cart` (verticals `above_left` / `above_right`) with
/// `vcomp_cell(gamma, cart) == beta`.  The search is enumerative, so the
/// budget must be generous enough to cover the frame; a truncated
/// enumeration that finds nothing reports `NoFactorization` with a note.
pub fn factor_through_cartesian<D: DoubleCategory>(
    d: &D,
    cart: &CellOf<D>,
    beta: &CellOf<D>,
    above_left: &D::VArr,
    above_right: &D::VArr,
    budget: &Budget,
) -> Result<CellOf<D>, DblError> {
    let expected_left = d.v_comp(&cart.left, above_left)?;
    let expected_right = d.v_comp(&cart.right, above_right)?;
    if beta.bottom != cart.bottom || beta.left != expected_left || beta.right != expected_right {
        return Err(DblError::BoundaryMismatch {
            detail: format!(
                "cell to factor must share the Cartesian cell's bottom and compose its \
                 verticals with the given ones; got {:?}",
                beta.frame()
            ),
        });
    }
    let frame = Frame {
        top: beta.top.clone(),
        bottom: cart.top.clone(),
        left: above_left.clone(),
        right: above_right.clone(),
    };
    let gammas = d.cells(&frame, budget);
    let mut found: Vec<CellOf<D>> = gammas
        .items
        .into_iter()
        .filter(|g| d.vcomp_cell(g, cart).map(|c| c == *beta).unwrap_or(false))
        .collect();
    match found.len() {
        1 => Ok(found.pop().expect("length checked")),
        0 => Err(DblError::NoFactorization {
            detail: format!(
                "no cell over the upper frame composes to the given one{}",
                if gammas.truncated { " (enumeration truncated)" } else { "" }
            ),
        }),
        n => Err(DblError::AmbiguousFactorization {
            detail: format!("{n} distinct cells over the upper frame compose to the given one"),
        }),
    }
}

/// Dual of [`factor_through_cartesian`]: finds the unique `gamma` below an
/// op-Cartesian cell with `vcomp_cell(opcart, gamma) == beta`.
pub fn factor_through_opcartesian<D: DoubleCategory>(
    d: &D,
    opcart: &CellOf<D>,
    beta: &CellOf<D>,
    below_left: &D::VArr,
    below_right: &D::VArr,
    budget: &Budget,
) -> Result<CellOf<D>, DblError> {
    let expected_left = d.v_comp(below_left, &opcart.left)?;
    let expected_right = d.v_comp(below_right, &opcart.right)?;
    if beta.top != opcart.top || beta.left != expected_left || beta.right != expected_right {
        return Err(DblError::BoundaryMismatch {
            detail: format!(
                "cell to factor must share the op-Cartesian cell's top and compose its \
                 verticals with the given ones; got {:?}",
                beta.frame()
            ),
        });
    }
    let frame = Frame {
        top: opcart.bottom.clone(),
        bottom: beta.bottom.clone(),
        left: below_left.clone(),
        right: below_right.clone(),
    };
    let gammas = d.cells(&frame, budget);
    let mut found: Vec<CellOf<D>> = gammas
        .items
        .into_iter()
        .filter(|g| d.vcomp_cell(opcart, g).map(|c| c == *beta).unwrap_or(false))
        .collect();
    match found.len() {
        1 => Ok(found.pop().expect("length checked")),
        0 => Err(DblError::NoFactorization {
            detail: format!(
                "no cell under the lower frame composes to the given one{}",
                if gammas.truncated { " (enumeration truncated)" } else { "" }
            ),
        }),
        n => Err(DblError::AmbiguousFactorization {
            detail: format!("{n} distinct cells under the lower frame compose to the given one"),
        }),
    }
}

// ---------------------------------------------------------------------------
// Instance constructions
// ---------------------------------------------------------------------------

impl Fibrant for SpanDouble {
    fn companion_pair(&self, f: &FinFn) -> Result<CompanionPair<Self>, DblError> {
        let a = f.dom().clone();
        let b = f.cod().clone();
        let ida = FinFn::identity(&a);
        let idb = FinFn::identity(&b);
        let companion = FinSpan::new(ida.clone(), f.clone())?;
        let conjoint = FinSpan::new(f.clone(), ida.clone())?;
        let ua = self.unit(&a);
        let ub = self.unit(&b);
        Ok(CompanionPair {
            vertical: f.clone(),
            companion: companion.clone(),
            conjoint: conjoint.clone(),
            companion_counit: self.cell(
                companion.clone(),
                ub.clone(),
                f.clone(),
                idb.clone(),
                f.clone(),
            )?,
            companion_unit: self.cell(ua.clone(), companion, ida.clone(), f.clone(), ida.clone())?,
            conjoint_counit: self.cell(conjoint.clone(), ub, idb, f.clone(), f.clone())?,
            conjoint_unit: self.cell(ua, conjoint, f.clone(), ida.clone(), ida)?,
        })
    }
}

impl Fibrant for RelDouble {
    fn companion_pair(&self, f: &FinFn) -> Result<CompanionPair<Self>, DblError> {
        let a = f.dom().clone();
        let b = f.cod().clone();
        let ida = FinFn::identity(&a);
        let idb = FinFn::identity(&b);
        let companion = FinRel::graph(f);
        let conjoint = companion.converse();
        let ua = self.unit(&a);
        let ub = self.unit(&b);
        Ok(CompanionPair {
            vertical: f.clone(),
            companion: companion.clone(),
            conjoint: conjoint.clone(),
            companion_counit: self.witness(companion.clone(), ub.clone(), f.clone(), idb.clone())?,
            companion_unit: self.witness(ua.clone(), companion, ida.clone(), f.clone())?,
            conjoint_counit: self.witness(conjoint.clone(), ub, idb, f.clone())?,
            conjoint_unit: self.witness(ua, conjoint, f.clone(), ida)?,
        })
    }
}

impl VMatDouble {
    /// The cell whose every component sends each element of a (necessarily
    /// singleton-or-empty) entry to the unique element of its target entry.
    fn point_cell(
        &self,
        top: VMatrix,
        bottom: VMatrix,
        left: FinFn,
        right: FinFn,
    ) -> Result<CellOf<Self>, DblError> {
        let mut family = std::collections::BTreeMap::new();
        for (t, s, set) in top.entries() {
            let cod = bottom.entry(right.apply(t), left.apply(s)).clone();
            let component = if set.is_empty() {
                FinFn::from_fn(set, &cod, |x| x.to_string())
            } else {
                let target = cod.iter().next().ok_or_else(|| DblError::InvalidCell {
                    detail: format!(
                        "binding component at ({t},{s}) has a nonempty source but an empty target"
                    ),
                })?;
                FinFn::constant(set, &cod, target)
            }
            .map_err(DblError::from)?;
            family.insert((t.to_string(), s.to_string()), component);
        }
        let c = Cell {
            top,
            bottom,
            left,
            right,
            payload: crate::instances::VMatCellFamily(family),
        };
        self.cell_ok(&c)?;
        Ok(c)
    }
}

impl Fibrant for VMatDouble {
    fn companion_pair(&self, f: &FinFn) -> Result<CompanionPair<Self>, DblError> {
        let a = f.dom().clone();
        let b = f.cod().clone();
        let ida = FinFn::identity(&a);
        let idb = FinFn::identity(&b);
        // Companion: a singleton at (b, a) exactly when f sends a to b; the
        // conjoint is its transpose.
        let companion = VMatrix::from_fn(a.clone(), b.clone(), |t, s| {
            if f.apply(s) == t {
                FinSet::point()
            } else {
                FinSet::empty()
            }
        })
        .map_err(DblError::from)?;
        let conjoint = VMatrix::from_fn(b.clone(), a.clone(), |t, s| {
            if f.apply(t) == s {
                FinSet::point()
            } else {
                FinSet::empty()
            }
        })
        .map_err(DblError::from)?;
        let ua = self.unit(&a);
        let ub = self.unit(&b);
        Ok(CompanionPair {
            vertical: f.clone(),
            companion: companion.clone(),
            conjoint: conjoint.clone(),
            companion_counit: self.point_cell(
                companion.clone(),
                ub.clone(),
                f.clone(),
                idb.clone(),
            )?,
            companion_unit: self.point_cell(ua.clone(), companion, ida.clone(), f.clone())?,
            conjoint_counit: self.point_cell(conjoint.clone(), ub, idb, f.clone())?,
            conjoint_unit: self.point_cell(ua, conjoint, f.clone(), ida)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::double::find_iso;

    fn set(labels: &[&str]) -> FinSet {
        FinSet::new(labels.iter().copied()).unwrap()
    }

    fn fun(dom: &FinSet, cod: &FinSet, pairs: &[(&str, &str)]) -> FinFn {
        FinFn::new(
            dom.clone(),
            cod.clone(),
            pairs
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn identity_companion_is_isomorphic_to_the_unit() {
        let d = SpanDouble::new();
        let a = set(&["a1", "a2"]);
        let cp = d.companion_pair(&FinFn::identity(&a)).unwrap();
        let budget = Budget::default();
        assert!(find_iso(&d, &cp.companion, &d.unit(&a), &budget).unwrap().iso.is_some());
        assert!(find_iso(&d, &cp.conjoint, &d.unit(&a), &budget).unwrap().iso.is_some());
    }

    #[test]
    fn span_filling_apex_is_the_double_pullback() {
        // f : {a1,a2} -> {x} constant, g : {b1} -> {y}, and the middle span
        // has one apex point over (x, y).  The filling apex pairs every
        // element of A with the unique matched pair (s1, b1).
        let d = SpanDouble::new();
        let a = set(&["a1", "a2"]);
        let x = set(&["x"]);
        let y = set(&["y"]);
        let b = set(&["b1"]);
        let s = set(&["s1"]);
        let f = fun(&a, &x, &[("a1", "x"), ("a2", "x")]);
        let g = fun(&b, &y, &[("b1", "y")]);
        let span = FinSpan::new(fun(&s, &x, &[("s1", "x")]), fun(&s, &y, &[("s1", "y")])).unwrap();
        let niche = Niche::bottom(&d, f, g, span).unwrap();
        let filling = cartesian_filling(&d, &niche).unwrap();
        let apex: Vec<&str> = filling.arrow.apex().iter().collect();
        assert_eq!(apex, vec!["(a1,(s1,b1))", "(a2,(s1,b1))"]);
        d.cell_ok(&filling.binding).unwrap();
        assert_eq!(filling.binding.bottom, niche.horizontal);
    }

    #[test]
    fn rel_filling_is_the_preimage_comprehension() {
        let d = RelDouble::new();
        let a = set(&["a1", "a2"]);
        let x = set(&["x1", "x2"]);
        let budget = Budget::default();
        let mut rng = budget.rng("rel-filling");
        for _ in 0..25 {
            use rand::Rng;
            let f = FinFn::enumerate(&a, &x).swap_remove(rng.gen_range(0..4));
            let g = FinFn::enumerate(&a, &x).swap_remove(rng.gen_range(0..4));
            let s = FinRel::enumerate(&x, &x).swap_remove(rng.gen_range(0..16));
            let niche = Niche::bottom(&d, f.clone(), g.clone(), s.clone()).unwrap();
            let filling = cartesian_filling(&d, &niche).unwrap();
            let oracle = FinRel::new(
                a.clone(),
                a.clone(),
                a.iter().flat_map(|p| {
                    let (f, g, s) = (&f, &g, &s);
                    a.iter().filter_map(move |q| {
                        s.contains(f.apply(p), g.apply(q))
                            .then(|| (p.to_string(), q.to_string()))
                    })
                }),
            )
            .unwrap();
            assert_eq!(filling.arrow, oracle);
        }
    }

    #[test]
    fn rel_opcartesian_filling_is_the_image_relation() {
        let d = RelDouble::new();
        let a = set(&["a1", "a2"]);
        let b = set(&["b1", "b2"]);
        let budget = Budget::default();
        let mut rng = budget.rng("rel-op-filling");
        for _ in 0..25 {
            use rand::Rng;
            let f = FinFn::enumerate(&a, &b).swap_remove(rng.gen_range(0..4));
            let g = FinFn::enumerate(&a, &b).swap_remove(rng.gen_range(0..4));
            let r = FinRel::enumerate(&a, &a).swap_remove(rng.gen_range(0..16));
            let niche = Niche::top(&d, f.clone(), g.clone(), r.clone()).unwrap();
            let filling = opcartesian_filling(&d, &niche).unwrap();
            let oracle = FinRel::new(
                b.clone(),
                b.clone(),
                r.pairs()
                    .map(|(p, q)| (f.apply(p).to_string(), g.apply(q).to_string())),
            )
            .unwrap();
            assert_eq!(filling.arrow, oracle);
        }
    }

    #[test]
    fn companion_pairs_verify_on_a_sample_vertical() {
        let a = set(&["a1", "a2", "a3"]);
        let b = set(&["b1", "b2"]);
        let f = fun(&a, &b, &[("a1", "b1"), ("a2", "b1"), ("a3", "b2")]);

        let span = SpanDouble::new();
        assert!(verify_companion_pair(&span, &span.companion_pair(&f).unwrap()).all_pass());
        let rel = RelDouble::new();
        assert!(verify_companion_pair(&rel, &rel.companion_pair(&f).unwrap()).all_pass());
        let vmat = VMatDouble::new();
        assert!(verify_companion_pair(&vmat, &vmat.companion_pair(&f).unwrap()).all_pass());
    }
}
