//! End-to-end checks of companions, conjoints, and universal fillings on
//! the three stock instances.

use dblcat_core::double::{find_iso, Budget, DoubleCategory, Verdict};
use dblcat_core::fibrancy::{
    cartesian_filling, opcartesian_filling, verify_cartesian, verify_companion_adjunction,
    verify_companion_pair, verify_opcartesian, Fibrant, Niche,
};
use dblcat_core::finset::{FinFn, FinRel, FinSet, FinSpan};
use dblcat_core::instances::{RelDouble, SpanDouble, VMatDouble};

fn set(labels: &[&str]) -> FinSet {
    FinSet::new(labels.iter().copied()).unwrap()
}

fn fun(dom: &FinSet, cod: &FinSet, pairs: &[(&str, &str)]) -> FinFn {
    FinFn::new(
        dom.clone(),
        cod.clone(),
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
    )
    .unwrap()
}

fn small_objects() -> Vec<FinSet> {
    vec![set(&[]), set(&["x1"]), set(&["x1", "x2"])]
}

/// Every vertical arrow between sets of size <= 2 gets a verified
/// companion pair and a verified adjunction, in all three instances.
fn sweep_companions<D: Fibrant<Obj = FinSet, VArr = FinFn>>(d: &D) {
    for a in small_objects() {
        for b in small_objects() {
            for f in FinFn::enumerate(&a, &b) {
                let cp = d.companion_pair(&f).unwrap();
                let pair_report = verify_companion_pair(d, &cp);
                assert!(
                    pair_report.all_pass(),
                    "{}: companion pair of {f:?} failed: {pair_report:?}",
                    d.name()
                );
                let adj_report = verify_companion_adjunction(d, &f);
                assert!(
                    adj_report.all_pass(),
                    "{}: adjunction for {f:?} failed: {adj_report:?}",
                    d.name()
                );
            }
        }
    }
}

#[test]
fn span_companions_and_adjunctions_hold_on_small_sets() {
    sweep_companions(&SpanDouble::new());
}

#[test]
fn rel_companions_and_adjunctions_hold_on_small_sets() {
    sweep_companions(&RelDouble::new());
}

#[test]
fn vmat_companions_and_adjunctions_hold_on_small_sets() {
    sweep_companions(&VMatDouble::new());
}

/// Filling the identity niche `(1_A, 1_B, M)` returns an arrow isomorphic
/// to `M` itself.
#[test]
fn identity_niche_filling_is_isomorphic_to_the_horizontal() {
    let d = SpanDouble::new();
    let a = set(&["a1", "a2"]);
    let b = set(&["b1"]);
    let budget = Budget::with_size(2);
    let mut rng = budget.rng("identity-niche");
    for _ in 0..10 {
        let m = d.sample_hom(&a, &b, &mut rng, &budget).unwrap();
        let niche =
            Niche::bottom(&d, FinFn::identity(&a), FinFn::identity(&b), m.clone()).unwrap();
        let filling = cartesian_filling(&d, &niche).unwrap();
        let search = find_iso(&d, &filling.arrow, &m, &budget).unwrap();
        assert!(search.iso.is_some(), "filling of identity niche not isomorphic to {m:?}");
    }
}

/// The op-Cartesian filling of a span's own legs recovers the span: for
/// `r = (r1, S, r2)` the filling of the top-niche `(r1, r2, U_S)` is
/// isomorphic to `r`.
#[test]
fn span_opcartesian_filling_of_own_legs_recovers_the_span() {
    let d = SpanDouble::new();
    let s = set(&["s1", "s2", "s3"]);
    let a = set(&["a1", "a2"]);
    let b = set(&["b1", "b2"]);
    let r1 = fun(&s, &a, &[("s1", "a1"), ("s2", "a1"), ("s3", "a2")]);
    let r2 = fun(&s, &b, &[("s1", "b1"), ("s2", "b2"), ("s3", "b2")]);
    let r = FinSpan::new(r1.clone(), r2.clone()).unwrap();

    let niche = Niche::top(&d, r1, r2, d.unit(&s)).unwrap();
    let filling = opcartesian_filling(&d, &niche).unwrap();
    let budget = Budget::with_size(3);
    let search = find_iso(&d, &filling.arrow, &r, &budget).unwrap();
    assert!(search.iso.is_some(), "expected {:?} to be isomorphic to {r:?}", filling.arrow);
}

/// In Rel the restriction `g? . S . f!` relates `a` to `b` exactly when
/// `f(a) S g(b)`; checked here through the verifier rather than the oracle
/// (the oracle compare lives in the unit tests).
#[test]
fn rel_cartesian_bindings_verify() {
    let d = RelDouble::new();
    let a = set(&["a1", "a2"]);
    let x = set(&["x1", "x2"]);
    let budget = Budget { samples: 30, ..Budget::with_size(2) };
    let mut rng = budget.rng("rel-bindings");
    for _ in 0..8 {
        use rand::Rng;
        let f = FinFn::enumerate(&a, &x).swap_remove(rng.gen_range(0..4));
        let g = FinFn::enumerate(&a, &x).swap_remove(rng.gen_range(0..4));
        let s = FinRel::enumerate(&x, &x).swap_remove(rng.gen_range(0..16));
        let niche = Niche::bottom(&d, f, g, s).unwrap();
        let filling = cartesian_filling(&d, &niche).unwrap();
        let report = verify_cartesian(&d, &filling.binding, &budget);
        assert!(report.all_pass(), "binding failed verification: {report:?}");
    }
}

#[test]
fn span_cartesian_binding_verifies() {
    let d = SpanDouble::new();
    let a = set(&["a1", "a2"]);
    let x = set(&["x1"]);
    let y = set(&["y1", "y2"]);
    let b = set(&["b1", "b2"]);
    let f = fun(&a, &x, &[("a1", "x1"), ("a2", "x1")]);
    let g = fun(&b, &y, &[("b1", "y1"), ("b2", "y2")]);
    let s = set(&["s1", "s2"]);
    let m = FinSpan::new(
        fun(&s, &x, &[("s1", "x1"), ("s2", "x1")]),
        fun(&s, &y, &[("s1", "y1"), ("s2", "y2")]),
    )
    .unwrap();
    let niche = Niche::bottom(&d, f, g, m).unwrap();
    let filling = cartesian_filling(&d, &niche).unwrap();
    let budget = Budget { samples: 25, ..Budget::with_size(2) };
    let report = verify_cartesian(&d, &filling.binding, &budget);
    assert!(report.all_pass(), "{report:?}");
}

#[test]
fn span_opcartesian_binding_verifies() {
    let d = SpanDouble::new();
    let s = set(&["s1", "s2"]);
    let a = set(&["a1"]);
    let b = set(&["b1", "b2"]);
    let r1 = fun(&s, &a, &[("s1", "a1"), ("s2", "a1")]);
    let r2 = fun(&s, &b, &[("s1", "b1"), ("s2", "b2")]);
    let niche = Niche::top(&d, r1, r2, d.unit(&s)).unwrap();
    let filling = opcartesian_filling(&d, &niche).unwrap();
    let budget = Budget { samples: 25, ..Budget::with_size(2) };
    let report = verify_opcartesian(&d, &filling.binding, &budget);
    assert!(report.all_pass(), "{report:?}");
}

/// The unit cell on a non-injective function is a perfectly valid cell but
/// not Cartesian: candidates from a frame that separates merged elements
/// cannot factor through it.  The verifier must say so.
#[test]
fn verifier_rejects_a_valid_but_noncartesian_cell() {
    let d = SpanDouble::new();
    let a = set(&["a1", "a2"]);
    let b = set(&["b1"]);
    let f = fun(&a, &b, &[("a1", "b1"), ("a2", "b1")]);
    let uf = d.unit_cell(&f);
    d.cell_ok(&uf).unwrap();
    let budget = Budget { samples: 60, ..Budget::with_size(2) };
    let report = verify_cartesian(&d, &uf, &budget);
    assert_eq!(report.verdict(), Verdict::Fail, "{report:?}");
}

/// Corrupting the payload of a Cartesian binding cell must be detected:
/// either the cell stops being well formed or it stops being Cartesian.
#[test]
fn corrupted_binding_cell_is_detected() {
    let d = SpanDouble::new();
    let a = set(&["a1", "a2"]);
    let x = set(&["x1"]);
    let b = set(&["b1", "b2"]);
    let y = set(&["y1"]);
    let f = fun(&a, &x, &[("a1", "x1"), ("a2", "x1")]);
    let g = fun(&b, &y, &[("b1", "y1"), ("b2", "y1")]);
    // Both legs of the middle span are constant, so collapsing the binding
    // payload onto one apex point still commutes with the frame: the
    // corrupted cell stays well formed but loses the universal property.
    let s = set(&["s1", "s2"]);
    let m = FinSpan::new(
        fun(&s, &x, &[("s1", "x1"), ("s2", "x1")]),
        fun(&s, &y, &[("s1", "y1"), ("s2", "y1")]),
    )
    .unwrap();
    let niche = Niche::bottom(&d, f, g, m).unwrap();
    let filling = cartesian_filling(&d, &niche).unwrap();

    let mut corrupted = filling.binding.clone();
    corrupted.payload =
        FinFn::constant(corrupted.payload.dom(), corrupted.payload.cod(), "s1").unwrap();
    assert_ne!(corrupted.payload, filling.binding.payload);
    d.cell_ok(&corrupted).unwrap();

    let budget = Budget { samples: 40, ..Budget::with_size(2) };
    let report = verify_cartesian(&d, &corrupted, &budget);
    assert_eq!(report.verdict(), Verdict::Fail, "{report:?}");
}

/// Companions turn composition into horizontal composition:
/// `(g . f)! ~ g! . f!` and `(g . f)? ~ f? . g?`.
#[test]
fn companion_of_composite_is_composite_of_companions() {
    let d = SpanDouble::new();
    let a = set(&["a1", "a2"]);
    let b = set(&["b1", "b2", "b3"]);
    let c = set(&["c1", "c2"]);
    let f = fun(&a, &b, &[("a1", "b2"), ("a2", "b3")]);
    let g = fun(&b, &c, &[("b1", "c1"), ("b2", "c1"), ("b3", "c2")]);
    let gf = d.v_comp(&g, &f).unwrap();
    let budget = Budget::with_size(3);

    let cf = d.companion_pair(&f).unwrap();
    let cg = d.companion_pair(&g).unwrap();
    let cgf = d.companion_pair(&gf).unwrap();

    let comp_side = d.hcomp(&cg.companion, &cf.companion).unwrap();
    assert!(find_iso(&d, &cgf.companion, &comp_side, &budget).unwrap().iso.is_some());

    let conj_side = d.hcomp(&cf.conjoint, &cg.conjoint).unwrap();
    assert!(find_iso(&d, &cgf.conjoint, &conj_side, &budget).unwrap().iso.is_some());
}

/// Restriction distributes over horizontal composition:
/// `(g? . (M . N)) . f!` is isomorphic to `((g? . M) . N) . f!`.
#[test]
fn restriction_of_a_composite_matches_the_spread_out_composite() {
    let d = SpanDouble::new();
    let a = set(&["a1", "a2"]);
    let x = set(&["x1", "x2"]);
    let y = set(&["y1"]);
    let z = set(&["z1", "z2"]);
    let b = set(&["b1"]);
    let f = fun(&a, &x, &[("a1", "x1"), ("a2", "x2")]);
    let g = fun(&b, &z, &[("b1", "z2")]);
    let budget = Budget::with_size(2);
    let mut rng = budget.rng("restriction-composite");

    for _ in 0..6 {
        let n = d.sample_hom(&x, &y, &mut rng, &budget).unwrap();
        let m = d.sample_hom(&y, &z, &mut rng, &budget).unwrap();
        let mn = d.hcomp(&m, &n).unwrap();

        let niche = Niche::bottom(&d, f.clone(), g.clone(), mn).unwrap();
        let once = cartesian_filling(&d, &niche).unwrap();

        let cf = d.companion_pair(&f).unwrap();
        let cg = d.companion_pair(&g).unwrap();
        let spread = d
            .hcomp(&d.hcomp(&d.hcomp(&cg.conjoint, &m).unwrap(), &n).unwrap(), &cf.companion)
            .unwrap();
        assert!(find_iso(&d, &once.arrow, &spread, &budget).unwrap().iso.is_some());
    }
}

/// The vertical composite of two Cartesian binding cells is again
/// Cartesian: restrict along `f` then along `h` and verify the pasted
/// cell directly.
#[test]
fn vertical_composite_of_cartesian_bindings_is_cartesian() {
    let d = RelDouble::new();
    let a = set(&["a1", "a2"]);
    let b = set(&["b1", "b2"]);
    let c = set(&["c1", "c2"]);
    let f = fun(&b, &c, &[("b1", "c1"), ("b2", "c2")]);
    let g = fun(&b, &c, &[("b1", "c2"), ("b2", "c2")]);
    let h = fun(&a, &b, &[("a1", "b1"), ("a2", "b1")]);
    let k = fun(&a, &b, &[("a1", "b2"), ("a2", "b1")]);
    let s = FinRel::new(
        c.clone(),
        c.clone(),
        [("c1".to_string(), "c2".to_string()), ("c2".to_string(), "c2".to_string())],
    )
    .unwrap();

    let lower = cartesian_filling(&d, &Niche::bottom(&d, f, g, s).unwrap()).unwrap();
    let upper =
        cartesian_filling(&d, &Niche::bottom(&d, h, k, lower.arrow.clone()).unwrap()).unwrap();
    let pasted = d.vcomp_cell(&upper.binding, &lower.binding).unwrap();

    let budget = Budget { samples: 30, ..Budget::with_size(2) };
    let report = verify_cartesian(&d, &pasted, &budget);
    assert!(report.all_pass(), "{report:?}");
}

/// V-Mat fillings exist and verify, with the entrywise cell enumeration
/// backing the universal-property sweep.
#[test]
fn vmat_cartesian_binding_verifies() {
    let d = VMatDouble::new();
    let a = set(&["a1", "a2"]);
    let x = set(&["x1"]);
    let f = fun(&a, &x, &[("a1", "x1"), ("a2", "x1")]);
    let g = fun(&a, &x, &[("a1", "x1"), ("a2", "x1")]);
    let budget = Budget { samples: 12, ..Budget::with_size(2) };
    let mut rng = budget.rng("vmat-binding");
    let m = d.sample_hom(&x, &x, &mut rng, &budget).unwrap();
    let niche = Niche::bottom(&d, f, g, m).unwrap();
    let filling = cartesian_filling(&d, &niche).unwrap();
    let report = verify_cartesian(&d, &filling.binding, &budget);
    assert_eq!(report.verdict(), Verdict::Pass, "{report:?}");
}
