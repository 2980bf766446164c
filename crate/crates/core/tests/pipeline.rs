mod common;

use common::{run, Vars};
use weblab_core::abelian::{encode_relation, residual};
use weblab_core::blaschke::{nakai_checks_d4, subweb_curvatures};
use weblab_core::connection::{connection_of, linearizability_d4};
use weblab_core::corpus::{self, Diffeo, LineFamily, ProjectiveParallel};
use weblab_core::dynamics::{compute_pw, interpolation_residuals};
use weblab_core::presentation::{validate, validate_polynomial, WebPresentation};
use weblab_core::rank::{d4_corollary_checks, determinant, ordering_diagnostic};
use weblab_core::series::rat;
use weblab_core::{SlopePolynomial, TruncatedSeries, WebError};

const N: usize = 12;

fn all_zero(v: &[TruncatedSeries]) -> bool {
    v.iter().all(TruncatedSeries::is_zero)
}

#[test]
fn known_relations_are_horizontal_sections() {
    for dirs in [&[0, 1, 2, 3][..], &[0, 1, 2, 3, -1][..]] {
        let pp = ProjectiveParallel::new(dirs, rat(1, 2), rat(-1, 3), N).unwrap();
        let r = run(&pp.web).unwrap();
        let relations = pp.relations().unwrap();
        assert_eq!(relations.len(), pp.web.rank_bound());
        for h in relations {
            let b = encode_relation(&pp.web, &h).unwrap();
            assert!(all_zero(&residual(&r.sys, &b).unwrap()));
            let f: Vec<TruncatedSeries> =
                r.conn.schema.labels().iter().map(|l| (0..l.dy).fold(b.get(l.function).clone(), |s, _| s.derive_y().unwrap())).collect();
            let [dx, dy] = r.conn.horizontality_defect(&f).unwrap();
            assert!(all_zero(&dx) && all_zero(&dy));
            // Every row of the rank matrix annihilates a horizontal section.
            assert!(all_zero(&r.matrix.matrix.mul_vec(&f)));
        }
    }
}

#[test]
fn a_non_relation_is_rejected() {
    let pp = ProjectiveParallel::new(&[0, 1, 2, 3], rat(1, 2), rat(-1, 3), N).unwrap();
    let v = Vars::new(N);
    let h = vec![v.c(1), v.c(-1), v.c(0), v.c(0)];
    assert!(encode_relation(&pp.web, &h).is_err());
}

#[test]
fn subweb_connections_agree_with_blaschke_curvature() {
    let v = Vars::new(N);
    let w = WebPresentation::from_slopes(vec![v.x.clone(), &v.c(3) + &v.y, v.c(1), &v.c(2) + &(&v.x * &v.y)]).unwrap();
    for (selector, k) in subweb_curvatures(&w).unwrap() {
        let sub = w.extract_subweb(&selector).unwrap();
        let conn = connection_of(&sub).unwrap();
        let n = conn.k[0].order().min(k.order());
        assert_eq!(conn.k[0].truncate(n), k.truncate(n), "subweb {:?}", selector.indices());
    }
}

#[test]
fn coefficient_presentation_matches_slopes() {
    let mut rng = common::rng(11);
    let w = corpus::random_web(&mut rng, 4, N).unwrap();
    let u = corpus::random_unit(&mut rng, N);
    let bare = WebPresentation::from_coefficients(w.polynomial().scale(&u).descending()).unwrap();
    assert!(bare.slopes().is_none());
    let a = run(&w).unwrap();
    let b = run(&bare).unwrap();
    assert_eq!(a.cert.rank_of_web, b.cert.rank_of_web);
    let n = a.conn.k[0].order().min(b.conn.k[0].order());
    assert_eq!(a.conn.k[0].truncate(n), b.conn.k[0].truncate(n));
}

#[test]
fn validation_accepts_random_webs_and_rejects_singular_ones() {
    let mut rng = common::rng(12);
    for d in 3..=5 {
        let w = corpus::random_web(&mut rng, d, N).unwrap();
        let report = validate(&w);
        assert!(report.is_valid());
        assert!(report.slopes_are_roots.unwrap().passed);
    }
    let v = Vars::new(N);
    // Two slopes through the same constant: the resultant vanishes at 0.
    let colliding = [v.c(1), &v.c(1) + &v.x, v.c(2)];
    let f = weblab_core::poly::product_of_linear_factors(&colliding, N);
    assert!(!validate_polynomial(&f, None).is_valid());
    assert!(matches!(WebPresentation::from_coefficients(f.descending()), Err(WebError::SingularAtOrigin { .. })));
    let degenerate = SlopePolynomial::from_descending(vec![v.x.clone(), v.c(1), v.c(0), v.c(-1)]);
    assert!(matches!(WebPresentation::from_coefficients(degenerate.descending()), Err(WebError::SingularAtOrigin { .. })));
}

#[test]
fn pw_interpolates_the_slope_transport() {
    let mut rng = common::rng(13);
    for d in 3..=5 {
        let w = corpus::random_web(&mut rng, d, N).unwrap();
        let pw = compute_pw(&w).unwrap();
        assert!(pw.degree_bound() < d);
        assert!(all_zero(&interpolation_residuals(&pw, w.slopes().unwrap()).unwrap()));
    }
}

fn held_out_linearizable(order: usize) -> Vec<WebPresentation> {
    let families = [
        LineFamily { base: 1, phi: vec![1, -1] },
        LineFamily { base: -2, phi: vec![2] },
        LineFamily { base: 0, phi: vec![-1, 0, 1] },
        LineFamily { base: 3, phi: vec![1, 1] },
    ];
    vec![
        corpus::line_families(&families, &Diffeo::default(), order).unwrap(),
        corpus::line_families(&families, &Diffeo { x_terms: vec![(1, 1, 1)], y_terms: vec![(0, 2, -1)] }, order).unwrap(),
        corpus::line_families(&families, &Diffeo { x_terms: vec![(2, 0, -1), (0, 3, 1)], y_terms: vec![(1, 2, 1)] }, order).unwrap(),
    ]
}

#[test]
fn linearizable_webs_pass_the_residual_test() {
    let mut rng = common::rng(14);
    for w in held_out_linearizable(N) {
        let u = corpus::random_unit(&mut rng, N);
        for w in [w.clone(), w.scaled(&u).unwrap()] {
            let r = run(&w).unwrap();
            let lin = linearizability_d4(&r.conn, &r.pw, &r.sys).unwrap();
            assert!(lin.degree_gate);
            assert!(lin.l1_residual.is_zero() && lin.l2_residual.is_zero());
            assert!(lin.linearizable);
        }
    }
}

#[test]
fn generic_webs_are_not_linearizable() {
    let mut rng = common::rng(15);
    for _ in 0..3 {
        let w = corpus::random_web(&mut rng, 4, N).unwrap();
        let r = run(&w).unwrap();
        assert!(!linearizability_d4(&r.conn, &r.pw, &r.sys).unwrap().linearizable);
    }
}

#[test]
fn derivation_order_does_not_add_constraints() {
    let mut rng = common::rng(16);
    let webs = [
        corpus::random_web(&mut rng, 4, N).unwrap(),
        corpus::constant_cross_ratio_affine(&[1, 2, 3, 5], N).unwrap(),
        corpus::random_web(&mut rng, 5, 10).unwrap(),
    ];
    for w in &webs {
        let r = run(w).unwrap();
        let diag = ordering_diagnostic(&r.conn, &r.matrix).unwrap();
        assert!(diag.consistent(), "{diag:?}");
    }
}

#[test]
fn four_web_corollaries_hold() {
    let mut rng = common::rng(17);
    let v = Vars::new(N);
    let webs = [
        corpus::random_web(&mut rng, 4, N).unwrap(),
        corpus::constant_cross_ratio_affine(&[1, 2, 3, 5], N).unwrap(),
        corpus::constant_cross_ratio_moebius(&[0, 1, 2, -1], N).unwrap(),
        corpus::rectified(&[&v.x + &v.y, v.poly(&[(1, 0, 1), (0, 1, 2), (2, 0, 1)])], &rat(1, 5)).unwrap(),
        ProjectiveParallel::new(&[0, 1, 2, 3], rat(1, 2), rat(-1, 3), N).unwrap().web,
    ];
    for w in &webs {
        let r = run(w).unwrap();
        let report = nakai_checks_d4(w).unwrap();
        let det = determinant(&r.matrix).unwrap();
        let checks = d4_corollary_checks(&r.cert, &report, &r.conn.trace, &det).unwrap();
        assert!(checks.all_hold(), "{checks:?} rank {}", r.cert.rank_of_web);
    }
}
