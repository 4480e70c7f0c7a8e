//! Product structure across the three concrete instances: the strict
//! precartesian laws, invertibility of the comparison cells, unit purity,
//! hom-wise products against their oracles, the restriction formula for
//! products, and naturality of products against companions and conjoints.

use dblcat_core::cartesian::{
    check_horizontal_naturality, check_precartesian, check_pseudo, check_unit_pure,
    local_pairing, local_product, verify_local_product, CartesianDouble,
};
use dblcat_core::double::{find_iso, Budget, DoubleCategory, Verdict};
use dblcat_core::fibrancy::{cartesian_filling, verify_cartesian, Niche};
use dblcat_core::finset::{FinFn, FinRel, FinSet, FinSpan};
use dblcat_core::instances::{
    DiagonalTwist, RelDouble, SpanDouble, UnitPureBreaker, VMatDouble, VMatrix,
};

fn set(labels: &[&str]) -> FinSet {
    FinSet::new(labels.iter().copied()).expect("distinct labels")
}

fn quick() -> Budget {
    Budget { max_size: 2, samples: 25, ..Budget::default() }
}

fn assert_precartesian<D: CartesianDouble>(d: &D, budget: &Budget) {
    let report = check_precartesian(d, budget);
    assert!(
        report.all_pass(),
        "{} precartesian rows: {:#?}",
        d.name(),
        report.rows
    );
}

#[test]
fn precartesian_passes_on_span_rel_and_vmat() {
    let budget = quick();
    assert_precartesian(&SpanDouble::new(), &budget);
    assert_precartesian(&RelDouble::new(), &budget);
    assert_precartesian(&VMatDouble::new(), &budget);
}

#[test]
fn comparison_cells_are_invertible_on_span_rel_and_vmat() {
    let budget = quick();
    for report in [
        check_pseudo(&SpanDouble::new(), &budget),
        check_pseudo(&RelDouble::new(), &budget),
        check_pseudo(&VMatDouble::new(), &budget),
    ] {
        assert!(report.all_pass(), "rows: {:#?}", report.rows);
    }
}

#[test]
fn unit_purity_holds_in_span_rel_and_vmat() {
    let budget = Budget::with_size(2);
    for report in [
        check_unit_pure(&SpanDouble::new(), &budget),
        check_unit_pure(&RelDouble::new(), &budget),
        check_unit_pure(&VMatDouble::new(), &budget),
    ] {
        assert!(report.all_pass(), "rows: {:#?}", report.rows);
    }
}

#[test]
fn unit_purity_fails_on_the_junk_cell_mutant() {
    let report = check_unit_pure(&UnitPureBreaker::new(), &Budget::with_size(2));
    assert_eq!(report.verdict(), Verdict::Fail);
    let row = &report.rows[report.rows.len() - 1];
    let detail = row.detail.as_deref().unwrap_or("");
    assert!(
        detail.contains("unit"),
        "expected a concrete counterexample in the detail, got {detail:?}"
    );
}

#[test]
fn twisted_diagonal_is_caught_by_the_precartesian_check() {
    let report = check_precartesian(&DiagonalTwist::new(), &quick());
    assert_eq!(
        report.verdict(),
        Verdict::Fail,
        "the twisted diagonal slipped through: {:#?}",
        report.rows
    );
}

#[test]
fn local_products_satisfy_their_universal_property() {
    let budget = Budget { max_size: 2, samples: 10, ..Budget::default() };
    let mut rng = budget.rng("local-product-suite");
    let a = set(&["a1", "a2"]);
    let b = set(&["b1", "b2"]);

    let span = SpanDouble::new();
    for _ in 0..3 {
        let (Some(m), Some(n)) = (
            span.sample_hom(&a, &b, &mut rng, &budget),
            span.sample_hom(&a, &b, &mut rng, &budget),
        ) else {
            panic!("span sampling failed")
        };
        let lp = local_product(&span, &m, &n).expect("hom-wise product");
        let report = verify_local_product(&span, &m, &n, &lp, &budget);
        assert!(report.all_pass(), "span rows: {:#?}", report.rows);
    }

    let rel = RelDouble::new();
    for _ in 0..3 {
        let (Some(m), Some(n)) = (
            rel.sample_hom(&a, &b, &mut rng, &budget),
            rel.sample_hom(&a, &b, &mut rng, &budget),
        ) else {
            panic!("rel sampling failed")
        };
        let lp = local_product(&rel, &m, &n).expect("hom-wise product");
        let report = verify_local_product(&rel, &m, &n, &lp, &budget);
        assert!(report.all_pass(), "rel rows: {:#?}", report.rows);
    }

    // Matrix homs are families over every index pair, so full enumeration of
    // cells into the meet truncates; the universal-property sweep must stay
    // free of outright failures, and the meet itself is checked against the
    // entrywise oracle: |(M ∧ N)(t, s)| = |M(t, s)| * |N(t, s)|.
    let vmat = VMatDouble::new();
    for _ in 0..2 {
        let (Some(m), Some(n)) = (
            vmat.sample_hom(&a, &b, &mut rng, &budget),
            vmat.sample_hom(&a, &b, &mut rng, &budget),
        ) else {
            panic!("matrix sampling failed")
        };
        let lp = local_product(&vmat, &m, &n).expect("hom-wise product");
        let report = verify_local_product(&vmat, &m, &n, &lp, &budget);
        assert_ne!(report.verdict(), Verdict::Fail, "matrix rows: {:#?}", report.rows);
        for t in b.iter() {
            for s in a.iter() {
                assert_eq!(
                    lp.arrow.entry(t, s).len(),
                    m.entry(t, s).len() * n.entry(t, s).len(),
                    "meet entry at ({t},{s}) has the wrong size"
                );
            }
        }
    }
}

#[test]
fn local_pairing_of_the_projections_is_the_identity() {
    let d = RelDouble::new();
    let a = set(&["a1", "a2"]);
    let b = set(&["b1", "b2"]);
    let m = FinRel::new(
        a.clone(),
        b.clone(),
        [
            ("a1".to_string(), "b1".to_string()),
            ("a2".to_string(), "b1".to_string()),
            ("a2".to_string(), "b2".to_string()),
        ],
    )
    .expect("pairs in carriers");
    let n = FinRel::new(
        a.clone(),
        b.clone(),
        [
            ("a2".to_string(), "b1".to_string()),
            ("a2".to_string(), "b2".to_string()),
        ],
    )
    .expect("pairs in carriers");
    let budget = Budget::with_size(2);
    let lp = local_product(&d, &m, &n).expect("hom-wise product");
    let gamma = local_pairing(&d, &lp, &lp.proj1, &lp.proj2, &budget).expect("pairing");
    assert_eq!(gamma, d.id_cell(&lp.arrow));
}

#[test]
fn product_arrow_is_the_meet_of_the_projection_restrictions() {
    // The product of two horizontal arrows agrees (up to isomorphism) with
    // the hom-wise meet of their restrictions along the four projections.
    let budget = Budget::with_size(3);
    let a = set(&["a1", "a2"]);
    let b = set(&["b1", "b2"]);
    let x = set(&["x1"]);
    let y = set(&["y1", "y2"]);

    let rel = RelDouble::new();
    let m = FinRel::new(
        a.clone(),
        b.clone(),
        [("a1".to_string(), "b2".to_string()), ("a2".to_string(), "b1".to_string())],
    )
    .expect("pairs in carriers");
    let n = FinRel::new(x.clone(), y.clone(), [("x1".to_string(), "y1".to_string())])
        .expect("pairs in carriers");
    let restricted_m = cartesian_filling(
        &rel,
        &Niche::bottom(
            &rel,
            rel.proj1(&a, &x).expect("projection"),
            rel.proj1(&b, &y).expect("projection"),
            m.clone(),
        )
        .expect("niche"),
    )
    .expect("filling")
    .arrow;
    let restricted_n = cartesian_filling(
        &rel,
        &Niche::bottom(
            &rel,
            rel.proj2(&a, &x).expect("projection"),
            rel.proj2(&b, &y).expect("projection"),
            n.clone(),
        )
        .expect("niche"),
    )
    .expect("filling")
    .arrow;
    let meet = local_product(&rel, &restricted_m, &restricted_n).expect("meet");
    assert_eq!(meet.arrow, rel.product_harr(&m, &n).expect("product relation"));

    let span = SpanDouble::new();
    let apex_m = set(&["r1", "r2"]);
    let sm = FinSpan::new(
        FinFn::from_fn(&apex_m, &a, |r| if r == "r1" { "a1" } else { "a2" }.to_string())
            .expect("total"),
        FinFn::from_fn(&apex_m, &b, |_| "b1".to_string()).expect("total"),
    )
    .expect("span");
    let apex_n = set(&["s1", "s2"]);
    let sn = FinSpan::new(
        FinFn::from_fn(&apex_n, &x, |_| "x1".to_string()).expect("total"),
        FinFn::from_fn(&apex_n, &y, |s| if s == "s1" { "y1" } else { "y2" }.to_string())
            .expect("total"),
    )
    .expect("span");
    let restricted_sm = cartesian_filling(
        &span,
        &Niche::bottom(
            &span,
            span.proj1(&a, &x).expect("projection"),
            span.proj1(&b, &y).expect("projection"),
            sm.clone(),
        )
        .expect("niche"),
    )
    .expect("filling")
    .arrow;
    let restricted_sn = cartesian_filling(
        &span,
        &Niche::bottom(
            &span,
            span.proj2(&a, &x).expect("projection"),
            span.proj2(&b, &y).expect("projection"),
            sn.clone(),
        )
        .expect("niche"),
    )
    .expect("filling")
    .arrow;
    let meet = local_product(&span, &restricted_sm, &restricted_sn).expect("meet");
    let product = span.product_harr(&sm, &sn).expect("product span");
    let search = find_iso(&span, &meet.arrow, &product, &budget).expect("search");
    assert!(
        search.iso.is_some(),
        "meet of restrictions is not isomorphic to the product span"
    );
}

#[test]
fn product_of_cartesian_binding_cells_is_cartesian() {
    let d = SpanDouble::new();
    let a = set(&["a1", "a2"]);
    let b = set(&["b1"]);
    let c = set(&["c1", "c2"]);
    let f = FinFn::from_fn(&a, &c, |x| if x == "a1" { "c1" } else { "c2" }.to_string())
        .expect("total");
    let g = FinFn::constant(&b, &c, "c1").expect("nonempty codomain");
    let apex = set(&["r1", "r2"]);
    let m = FinSpan::new(
        FinFn::from_fn(&apex, &c, |r| if r == "r1" { "c1" } else { "c2" }.to_string())
            .expect("total"),
        FinFn::constant(&apex, &c, "c2").expect("nonempty codomain"),
    )
    .expect("span");

    let first = cartesian_filling(
        &d,
        &Niche::bottom(&d, f.clone(), g.clone(), m.clone()).expect("niche"),
    )
    .expect("filling");
    let second = cartesian_filling(
        &d,
        &Niche::bottom(&d, g.clone(), f.clone(), m.clone()).expect("niche"),
    )
    .expect("filling");

    let product = d.product_cell(&first.binding, &second.binding).expect("product cell");
    let budget = Budget { max_size: 2, samples: 12, ..Budget::default() };
    let report = verify_cartesian(&d, &product, &budget);
    assert!(report.all_pass(), "rows: {:#?}", report.rows);
}

#[test]
fn horizontal_naturality_passes_on_all_instances() {
    let budget = Budget::with_size(2);
    let a = set(&["a1", "a2"]);
    let x = set(&["x1", "x2"]);
    let b = set(&["b1", "b2"]);

    let span = SpanDouble::new();
    let apex = set(&["r1", "r2"]);
    let f_span = FinSpan::new(
        FinFn::from_fn(&apex, &a, |r| if r == "r1" { "a1" } else { "a2" }.to_string())
            .expect("total"),
        FinFn::constant(&apex, &x, "x2").expect("nonempty codomain"),
    )
    .expect("span");
    let report = check_horizontal_naturality(&span, &f_span, &b, &budget);
    assert!(report.all_pass(), "span rows: {:#?}", report.rows);

    let rel = RelDouble::new();
    let f_rel = FinRel::new(
        a.clone(),
        x.clone(),
        [("a1".to_string(), "x1".to_string()), ("a2".to_string(), "x1".to_string())],
    )
    .expect("pairs in carriers");
    let report = check_horizontal_naturality(&rel, &f_rel, &b, &budget);
    assert!(report.all_pass(), "rel rows: {:#?}", report.rows);

    let vmat = VMatDouble::new();
    let f_mat = VMatrix::from_fn(a.clone(), x.clone(), |t, s| {
        if t == "x1" && s == "a1" {
            set(&["u", "v"])
        } else if t == "x2" {
            FinSet::point()
        } else {
            FinSet::empty()
        }
    })
    .expect("total");
    let report = check_horizontal_naturality(&vmat, &f_mat, &b, &budget);
    assert!(report.all_pass(), "matrix rows: {:#?}", report.rows);
}

#[test]
fn pairings_respect_the_boundary_functors() {
    let d = SpanDouble::new();
    let budget = Budget::with_size(2);
    let mut rng = budget.rng("boundary-pairing");
    let a = set(&["a1", "a2"]);
    let b = set(&["b1", "b2"]);
    for _ in 0..5 {
        let (Some(l), Some(m), Some(n)) = (
            d.sample_hom(&a, &b, &mut rng, &budget),
            d.sample_hom(&a, &b, &mut rng, &budget),
            d.sample_hom(&a, &b, &mut rng, &budget),
        ) else {
            panic!("span sampling failed")
        };
        let frame_m = dblcat_core::double::Frame {
            top: l.clone(),
            bottom: m.clone(),
            left: d.v_id(&a),
            right: d.v_id(&b),
        };
        let frame_n = dblcat_core::double::Frame {
            top: l.clone(),
            bottom: n.clone(),
            left: d.v_id(&a),
            right: d.v_id(&b),
        };
        let (Some(alpha), Some(beta)) = (
            d.cells(&frame_m, &budget).items.first().cloned(),
            d.cells(&frame_n, &budget).items.first().cloned(),
        ) else {
            continue;
        };
        let paired = d.pair_cell(&alpha, &beta).expect("pairing");
        assert_eq!(paired.top, l);
        assert_eq!(paired.bottom, d.product_harr(&m, &n).expect("product span"));
        assert_eq!(paired.left, d.pair_varr(&alpha.left, &beta.left).expect("pairing"));
        assert_eq!(paired.right, d.pair_varr(&alpha.right, &beta.right).expect("pairing"));
    }
}
