//! The coherence-law suite that any `DoubleCategory` instance must pass:
//! pentagon, triangle, naturality of the coherence cells, their globularity
//! and invertibility, functoriality of the unit and of horizontal
//! composition, interchange, and the strict category laws of vertical
//! composition.
//!
//! Every law sweeps in two phases.  The exhaustive phase fixes each tuple
//! of objects drawn from the budget shrunk to size ≤ 2 and draws a couple
//! of seeded arrow/cell instances per tuple; the sampled phase draws
//! `budget.samples` further instances at the full budget.  Arrows and cells
//! are sampled because hom enumerations explode combinatorially; objects
//! are exhausted because the laws quantify over them first.  A sweep that
//! cannot draw a single instance fails loudly rather than passing
//! vacuously.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use super::{is_globular, Budget, CellOf, DoubleCategory, LawReport, LawRow, LawStatus};
use crate::error::DblError;

/// Seeded arrow draws per exhausted object tuple.
const DRAWS_PER_TUPLE: usize = 2;
/// Sampling keeps trying until `samples` instances checked or this multiple
/// of attempts is spent (frames without cells are skipped, not counted).
const RETRY_FACTOR: usize = 10;
/// Exhaustive object-tuple enumeration switches to seeded sampling above
/// this many tuples (only relevant for structured-object instances).
const TUPLE_CAP: usize = 4096;

enum Outcome {
    Checked,
    Skipped,
    Fail(String),
}

type Case<'c, D> = dyn FnMut(
        &[<D as DoubleCategory>::Obj],
        &[<D as DoubleCategory>::Obj],
        &mut ChaCha8Rng,
        &Budget,
    ) -> Result<Outcome, DblError>
    + 'c;

struct Ctx<'a, D: DoubleCategory> {
    d: &'a D,
    full: Budget,
    small: Budget,
    full_objs: Vec<D::Obj>,
    small_objs: Vec<D::Obj>,
}

/// Run the whole law suite and report one row per law.
pub fn check_laws<D: DoubleCategory>(d: &D, budget: &Budget) -> LawReport {
    let full = budget.clone();
    let small = budget.shrink_to(2);
    let ctx = Ctx {
        d,
        full_objs: d.objects(&full),
        small_objs: d.objects(&small),
        full,
        small,
    };
    LawReport {
        rows: vec![
            pentagon(&ctx),
            triangle(&ctx),
            associator_naturality(&ctx),
            left_unitor_naturality(&ctx),
            right_unitor_naturality(&ctx),
            coherence_globular(&ctx),
            coherence_invertible(&ctx),
            unit_functoriality(&ctx),
            hcomp_functoriality(&ctx),
            interchange(&ctx),
            vertical_category(&ctx),
        ],
    }
}

impl<'a, D: DoubleCategory> Ctx<'a, D> {
    /// Drive one law: exhaust object tuples at the small budget, then draw
    /// seeded samples at the full budget.
    fn sweep(&self, law: &'static str, chain_len: usize, case: &mut Case<'_, D>) -> LawRow {
        let pass = LawRow { law: law.to_string(), status: LawStatus::Pass, counterexample: None };
        let fail = |cx: String| LawRow {
            law: law.to_string(),
            status: LawStatus::Fail,
            counterexample: Some(cx),
        };

        // Exhaustive phase over small-object tuples.
        let n = self.small_objs.len();
        if n > 0 {
            if let Some(tuples) = index_tuples(n, chain_len, TUPLE_CAP) {
                for (i, tuple) in tuples.iter().enumerate() {
                    let objs: Vec<D::Obj> =
                        tuple.iter().map(|&j| self.small_objs[j].clone()).collect();
                    let mut rng = self.small.rng(&format!("{law}/exhaustive/{i}"));
                    for _ in 0..DRAWS_PER_TUPLE {
                        match case(&objs, &self.small_objs, &mut rng, &self.small) {
                            Ok(Outcome::Fail(cx)) => return fail(cx),
                            Ok(_) => {}
                            Err(e) => return fail(format!("internal error during {law}: {e}")),
                        }
                    }
                }
            } else {
                let mut rng = self.small.rng(&format!("{law}/exhaustive-sampled"));
                for _ in 0..self.small.samples {
                    let objs: Vec<D::Obj> = (0..chain_len)
                        .map(|_| self.small_objs.choose(&mut rng).unwrap().clone())
                        .collect();
                    match case(&objs, &self.small_objs, &mut rng, &self.small) {
                        Ok(Outcome::Fail(cx)) => return fail(cx),
                        Ok(_) => {}
                        Err(e) => return fail(format!("internal error during {law}: {e}")),
                    }
                }
            }
        }

        // Sampled phase at the full budget.
        if self.full_objs.is_empty() {
            return fail(format!("{law}: no objects enumerated at the full budget"));
        }
        let mut rng = self.full.rng(&format!("{law}/sampled"));
        let mut checked = 0usize;
        let mut attempts = 0usize;
        while checked < self.full.samples && attempts < self.full.samples * RETRY_FACTOR {
            attempts += 1;
            let objs: Vec<D::Obj> = (0..chain_len)
                .map(|_| self.full_objs.choose(&mut rng).unwrap().clone())
                .collect();
            match case(&objs, &self.full_objs, &mut rng, &self.full) {
                Ok(Outcome::Checked) => checked += 1,
                Ok(Outcome::Skipped) => {}
                Ok(Outcome::Fail(cx)) => return fail(cx),
                Err(e) => return fail(format!("internal error during {law}: {e}")),
            }
        }
        if checked == 0 {
            return fail(format!(
                "{law}: no checkable instance found in {attempts} sampling attempts"
            ));
        }
        pass
    }
}

/// All `len`-tuples of indices below `n`, unless there are more than `cap`.
fn index_tuples(n: usize, len: usize, cap: usize) -> Option<Vec<Vec<usize>>> {
    let mut total = 1usize;
    for _ in 0..len {
        total = total.checked_mul(n)?;
        if total > cap {
            return None;
        }
    }
    let mut out = Vec::with_capacity(total);
    let mut current = vec![0usize; len];
    loop {
        out.push(current.clone());
        let mut i = len;
        loop {
            if i == 0 {
                return Some(out);
            }
            i -= 1;
            current[i] += 1;
            if current[i] < n {
                break;
            }
            current[i] = 0;
        }
    }
}

fn sample_vert_into<D: DoubleCategory>(
    d: &D,
    dom: &D::Obj,
    pool: &[D::Obj],
    rng: &mut ChaCha8Rng,
) -> Option<D::VArr> {
    for _ in 0..4 {
        let cod = pool.choose(rng)?;
        if let Some(f) = d.verticals(dom, cod).choose(rng) {
            return Some(f.clone());
        }
    }
    None
}

macro_rules! draw {
    ($e:expr) => {
        match $e {
            Some(x) => x,
            None => return Ok(Outcome::Skipped),
        }
    };
}

fn pentagon<D: DoubleCategory>(ctx: &Ctx<'_, D>) -> LawRow {
    let d = ctx.d;
    ctx.sweep("pentagon", 5, &mut |o, _pool, rng, bud| {
        let q = draw!(d.sample_hom(&o[0], &o[1], rng, bud));
        let p = draw!(d.sample_hom(&o[1], &o[2], rng, bud));
        let n = draw!(d.sample_hom(&o[2], &o[3], rng, bud));
        let m = draw!(d.sample_hom(&o[3], &o[4], rng, bud));
        let np = d.hcomp(&n, &p)?;
        let mn = d.hcomp(&m, &n)?;
        let pq = d.hcomp(&p, &q)?;
        let s1 = d.hcomp_cell(&d.associator(&m, &n, &p)?, &d.id_cell(&q))?;
        let s2 = d.associator(&m, &np, &q)?;
        let s3 = d.hcomp_cell(&d.id_cell(&m), &d.associator(&n, &p, &q)?)?;
        let stepwise = d.vcomp_cell(&d.vcomp_cell(&s1, &s2)?, &s3)?;
        let direct = d.vcomp_cell(&d.associator(&mn, &p, &q)?, &d.associator(&m, &n, &pq)?)?;
        if stepwise == direct {
            Ok(Outcome::Checked)
        } else {
            Ok(Outcome::Fail(format!(
                "pentagon differs on chain q={q:?}, p={p:?}, n={n:?}, m={m:?}"
            )))
        }
    })
}

fn triangle<D: DoubleCategory>(ctx: &Ctx<'_, D>) -> LawRow {
    let d = ctx.d;
    ctx.sweep("triangle", 3, &mut |o, _pool, rng, bud| {
        let n = draw!(d.sample_hom(&o[0], &o[1], rng, bud));
        let m = draw!(d.sample_hom(&o[1], &o[2], rng, bud));
        let ub = d.unit(&o[1]);
        let lhs = d.vcomp_cell(
            &d.associator(&m, &ub, &n)?,
            &d.hcomp_cell(&d.id_cell(&m), &d.lunitor(&n)?)?,
        )?;
        let rhs = d.hcomp_cell(&d.runitor(&m)?, &d.id_cell(&n))?;
        if lhs == rhs {
            Ok(Outcome::Checked)
        } else {
            Ok(Outcome::Fail(format!("triangle differs on n={n:?}, m={m:?}")))
        }
    })
}

fn associator_naturality<D: DoubleCategory>(ctx: &Ctx<'_, D>) -> LawRow {
    let d = ctx.d;
    ctx.sweep("associator_naturality", 4, &mut |o, pool, rng, bud| {
        let p = draw!(d.sample_hom(&o[0], &o[1], rng, bud));
        let n = draw!(d.sample_hom(&o[1], &o[2], rng, bud));
        let m = draw!(d.sample_hom(&o[2], &o[3], rng, bud));
        let f0 = draw!(sample_vert_into(d, &o[0], pool, rng));
        let f1 = draw!(sample_vert_into(d, &o[1], pool, rng));
        let f2 = draw!(sample_vert_into(d, &o[2], pool, rng));
        let f3 = draw!(sample_vert_into(d, &o[3], pool, rng));
        let cp = draw!(d.sample_cell_under(&p, &f0, &f1, rng, bud));
        let cn = draw!(d.sample_cell_under(&n, &f1, &f2, rng, bud));
        let cm = draw!(d.sample_cell_under(&m, &f2, &f3, rng, bud));
        let nested_left = d.hcomp_cell(&d.hcomp_cell(&cm, &cn)?, &cp)?;
        let lhs = d.vcomp_cell(
            &nested_left,
            &d.associator(&cm.bottom, &cn.bottom, &cp.bottom)?,
        )?;
        let nested_right = d.hcomp_cell(&cm, &d.hcomp_cell(&cn, &cp)?)?;
        let rhs = d.vcomp_cell(&d.associator(&m, &n, &p)?, &nested_right)?;
        if lhs == rhs {
            Ok(Outcome::Checked)
        } else {
            Ok(Outcome::Fail(format!(
                "associator not natural at cells over p={p:?}, n={n:?}, m={m:?} \
                 (verticals f0={f0:?}, f1={f1:?}, f2={f2:?}, f3={f3:?})"
            )))
        }
    })
}

fn left_unitor_naturality<D: DoubleCategory>(ctx: &Ctx<'_, D>) -> LawRow {
    let d = ctx.d;
    ctx.sweep("left_unitor_naturality", 2, &mut |o, pool, rng, bud| {
        let m = draw!(d.sample_hom(&o[0], &o[1], rng, bud));
        let f = draw!(sample_vert_into(d, &o[0], pool, rng));
        let g = draw!(sample_vert_into(d, &o[1], pool, rng));
        let cm = draw!(d.sample_cell_under(&m, &f, &g, rng, bud));
        let lhs = d.vcomp_cell(
            &d.hcomp_cell(&d.unit_cell(&g), &cm)?,
            &d.lunitor(&cm.bottom)?,
        )?;
        let rhs = d.vcomp_cell(&d.lunitor(&m)?, &cm)?;
        if lhs == rhs {
            Ok(Outcome::Checked)
        } else {
            Ok(Outcome::Fail(format!(
                "left unitor not natural at cell over m={m:?} (f={f:?}, g={g:?})"
            )))
        }
    })
}

fn right_unitor_naturality<D: DoubleCategory>(ctx: &Ctx<'_, D>) -> LawRow {
    let d = ctx.d;
    ctx.sweep("right_unitor_naturality", 2, &mut |o, pool, rng, bud| {
        let m = draw!(d.sample_hom(&o[0], &o[1], rng, bud));
        let f = draw!(sample_vert_into(d, &o[0], pool, rng));
        let g = draw!(sample_vert_into(d, &o[1], pool, rng));
        let cm = draw!(d.sample_cell_under(&m, &f, &g, rng, bud));
        let lhs = d.vcomp_cell(
            &d.hcomp_cell(&cm, &d.unit_cell(&f))?,
            &d.runitor(&cm.bottom)?,
        )?;
        let rhs = d.vcomp_cell(&d.runitor(&m)?, &cm)?;
        if lhs == rhs {
            Ok(Outcome::Checked)
        } else {
            Ok(Outcome::Fail(format!(
                "right unitor not natural at cell over m={m:?} (f={f:?}, g={g:?})"
            )))
        }
    })
}

fn coherence_globular<D: DoubleCategory>(ctx: &Ctx<'_, D>) -> LawRow {
    let d = ctx.d;
    ctx.sweep("coherence_globular", 4, &mut |o, _pool, rng, bud| {
        let p = draw!(d.sample_hom(&o[0], &o[1], rng, bud));
        let n = draw!(d.sample_hom(&o[1], &o[2], rng, bud));
        let m = draw!(d.sample_hom(&o[2], &o[3], rng, bud));
        let assoc = d.associator(&m, &n, &p)?;
        let lam = d.lunitor(&p)?;
        let rho = d.runitor(&p)?;
        for (name, cell) in [("associator", &assoc), ("left unitor", &lam), ("right unitor", &rho)]
        {
            if !is_globular(d, cell) {
                return Ok(Outcome::Fail(format!(
                    "{name} is not globular on p={p:?}, n={n:?}, m={m:?}"
                )));
            }
            if let Err(e) = d.cell_ok(cell) {
                return Ok(Outcome::Fail(format!(
                    "{name} is not a valid cell on p={p:?}, n={n:?}, m={m:?}: {e}"
                )));
            }
        }
        let expected_top = d.hcomp(&d.hcomp(&m, &n)?, &p)?;
        let expected_bottom = d.hcomp(&m, &d.hcomp(&n, &p)?)?;
        if assoc.top != expected_top || assoc.bottom != expected_bottom {
            return Ok(Outcome::Fail(format!(
                "associator frame wrong on p={p:?}, n={n:?}, m={m:?}"
            )));
        }
        if lam.top != d.hcomp(&d.unit(&o[1]), &p)? || lam.bottom != p {
            return Ok(Outcome::Fail(format!("left unitor frame wrong on p={p:?}")));
        }
        if rho.top != d.hcomp(&p, &d.unit(&o[0]))? || rho.bottom != p {
            return Ok(Outcome::Fail(format!("right unitor frame wrong on p={p:?}")));
        }
        Ok(Outcome::Checked)
    })
}

fn coherence_invertible<D: DoubleCategory>(ctx: &Ctx<'_, D>) -> LawRow {
    let d = ctx.d;
    ctx.sweep("coherence_invertible", 4, &mut |o, _pool, rng, bud| {
        let p = draw!(d.sample_hom(&o[0], &o[1], rng, bud));
        let n = draw!(d.sample_hom(&o[1], &o[2], rng, bud));
        let m = draw!(d.sample_hom(&o[2], &o[3], rng, bud));
        let witnesses: [(&str, CellOf<D>); 3] = [
            ("associator", d.associator(&m, &n, &p)?),
            ("left unitor", d.lunitor(&p)?),
            ("right unitor", d.runitor(&p)?),
        ];
        for (name, cell) in &witnesses {
            let inv = match d.try_invert(cell) {
                Some(inv) => inv,
                None => {
                    return Ok(Outcome::Fail(format!(
                        "{name} has no inverse on p={p:?}, n={n:?}, m={m:?}"
                    )))
                }
            };
            if d.vcomp_cell(cell, &inv)? != d.id_cell(&cell.top)
                || d.vcomp_cell(&inv, cell)? != d.id_cell(&cell.bottom)
            {
                return Ok(Outcome::Fail(format!(
                    "claimed inverse of {name} is not two-sided on p={p:?}, n={n:?}, m={m:?}"
                )));
            }
        }
        Ok(Outcome::Checked)
    })
}

fn unit_functoriality<D: DoubleCategory>(ctx: &Ctx<'_, D>) -> LawRow {
    let d = ctx.d;
    ctx.sweep("unit_functoriality", 3, &mut |o, _pool, rng, _bud| {
        let ua = d.unit(&o[0]);
        if d.h_src(&ua) != o[0] || d.h_tgt(&ua) != o[0] {
            return Ok(Outcome::Fail(format!("unit of {:?} has wrong boundary", o[0])));
        }
        if d.unit_cell(&d.v_id(&o[0])) != d.id_cell(&ua) {
            return Ok(Outcome::Fail(format!(
                "unit cell of the identity on {:?} is not the identity cell",
                o[0]
            )));
        }
        let fs = d.verticals(&o[0], &o[1]);
        let gs = d.verticals(&o[1], &o[2]);
        let mut pairs: Vec<(usize, usize)> = (0..fs.len())
            .flat_map(|i| (0..gs.len()).map(move |j| (i, j)))
            .collect();
        if pairs.is_empty() {
            return Ok(Outcome::Skipped);
        }
        pairs.shuffle(rng);
        for (i, j) in pairs.into_iter().take(20) {
            let f = &fs[i];
            let g = &gs[j];
            let gf = d.v_comp(g, f)?;
            if d.vcomp_cell(&d.unit_cell(f), &d.unit_cell(g))? != d.unit_cell(&gf) {
                return Ok(Outcome::Fail(format!(
                    "unit cell of composite differs from stacked unit cells at f={f:?}, g={g:?}"
                )));
            }
        }
        Ok(Outcome::Checked)
    })
}

fn hcomp_functoriality<D: DoubleCategory>(ctx: &Ctx<'_, D>) -> LawRow {
    let d = ctx.d;
    ctx.sweep("hcomp_functoriality", 3, &mut |o, _pool, rng, bud| {
        let n = draw!(d.sample_hom(&o[0], &o[1], rng, bud));
        let m = draw!(d.sample_hom(&o[1], &o[2], rng, bud));
        let mn = d.hcomp(&m, &n)?;
        if d.h_src(&mn) != d.h_src(&n) || d.h_tgt(&mn) != d.h_tgt(&m) {
            return Ok(Outcome::Fail(format!(
                "composite boundary wrong for n={n:?}, m={m:?}"
            )));
        }
        if d.hcomp_cell(&d.id_cell(&m), &d.id_cell(&n))? != d.id_cell(&mn) {
            return Ok(Outcome::Fail(format!(
                "identity cells do not compose to the identity on n={n:?}, m={m:?}"
            )));
        }
        Ok(Outcome::Checked)
    })
}

fn interchange<D: DoubleCategory>(ctx: &Ctx<'_, D>) -> LawRow {
    let d = ctx.d;
    ctx.sweep("interchange", 3, &mut |o, pool, rng, bud| {
        let inner_top = draw!(d.sample_hom(&o[0], &o[1], rng, bud));
        let outer_top = draw!(d.sample_hom(&o[1], &o[2], rng, bud));
        let f0 = draw!(sample_vert_into(d, &o[0], pool, rng));
        let f1 = draw!(sample_vert_into(d, &o[1], pool, rng));
        let f2 = draw!(sample_vert_into(d, &o[2], pool, rng));
        let a = draw!(d.sample_cell_under(&inner_top, &f0, &f1, rng, bud));
        let c = draw!(d.sample_cell_under(&outer_top, &f1, &f2, rng, bud));
        let g0 = draw!(sample_vert_into(d, &d.v_cod(&f0), pool, rng));
        let g1 = draw!(sample_vert_into(d, &d.v_cod(&f1), pool, rng));
        let g2 = draw!(sample_vert_into(d, &d.v_cod(&f2), pool, rng));
        let b = draw!(d.sample_cell_under(&a.bottom, &g0, &g1, rng, bud));
        let e = draw!(d.sample_cell_under(&c.bottom, &g1, &g2, rng, bud));
        let lhs = d.hcomp_cell(&d.vcomp_cell(&c, &e)?, &d.vcomp_cell(&a, &b)?)?;
        let rhs = d.vcomp_cell(&d.hcomp_cell(&c, &a)?, &d.hcomp_cell(&e, &b)?)?;
        if lhs == rhs {
            Ok(Outcome::Checked)
        } else {
            Ok(Outcome::Fail(format!(
                "interchange differs on grid with tops {inner_top:?} | {outer_top:?} \
                 and cells a={a:?}, b={b:?}, c={c:?}, d={e:?}"
            )))
        }
    })
}

fn vertical_category<D: DoubleCategory>(ctx: &Ctx<'_, D>) -> LawRow {
    let d = ctx.d;
    ctx.sweep("vertical_category", 2, &mut |o, pool, rng, bud| {
        // Strict associativity and units in the vertical arrow category.
        let f = draw!(sample_vert_into(d, &o[0], pool, rng));
        let g = draw!(sample_vert_into(d, &d.v_cod(&f), pool, rng));
        let h = draw!(sample_vert_into(d, &d.v_cod(&g), pool, rng));
        let assoc_l = d.v_comp(&h, &d.v_comp(&g, &f)?)?;
        let assoc_r = d.v_comp(&d.v_comp(&h, &g)?, &f)?;
        if assoc_l != assoc_r {
            return Ok(Outcome::Fail(format!(
                "vertical composition not associative on f={f:?}, g={g:?}, h={h:?}"
            )));
        }
        let dom_id = d.v_id(&d.v_dom(&f));
        let cod_id = d.v_id(&d.v_cod(&f));
        if d.v_comp(&f, &dom_id)? != f || d.v_comp(&cod_id, &f)? != f {
            return Ok(Outcome::Fail(format!("identities do not absorb around f={f:?}")));
        }

        // Strict associativity and units for stacked cells.
        let m = draw!(d.sample_hom(&o[0], &o[1], rng, bud));
        let l0 = draw!(sample_vert_into(d, &o[0], pool, rng));
        let r0 = draw!(sample_vert_into(d, &o[1], pool, rng));
        let a = draw!(d.sample_cell_under(&m, &l0, &r0, rng, bud));
        let l1 = draw!(sample_vert_into(d, &d.v_cod(&l0), pool, rng));
        let r1 = draw!(sample_vert_into(d, &d.v_cod(&r0), pool, rng));
        let b = draw!(d.sample_cell_under(&a.bottom, &l1, &r1, rng, bud));
        let l2 = draw!(sample_vert_into(d, &d.v_cod(&l1), pool, rng));
        let r2 = draw!(sample_vert_into(d, &d.v_cod(&r1), pool, rng));
        let c = draw!(d.sample_cell_under(&b.bottom, &l2, &r2, rng, bud));
        let left = d.vcomp_cell(&d.vcomp_cell(&a, &b)?, &c)?;
        let right = d.vcomp_cell(&a, &d.vcomp_cell(&b, &c)?)?;
        if left != right {
            return Ok(Outcome::Fail(format!(
                "stacking not associative on cells a={a:?}, b={b:?}, c={c:?}"
            )));
        }
        if d.vcomp_cell(&d.id_cell(&a.top), &a)? != a
            || d.vcomp_cell(&a, &d.id_cell(&a.bottom))? != a
        {
            return Ok(Outcome::Fail(format!("identity cells do not absorb around a={a:?}")));
        }
        Ok(Outcome::Checked)
    })
}
