use projconvex::catalog::load_example;
use projconvex::flow::MAX_FLOW_TIME;
use projconvex::group::is_rank_one;
use projconvex::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn circle(a: f64) -> ProjectivePoint {
    ProjectivePoint::from_slice(&[a.cos(), a.sin(), 1.0]).unwrap()
}

fn random_tangent(omega: &ConvexBody, rng: &mut ChaCha8Rng) -> UnitTangent {
    let p = omega.sample_interior(rng, 2);
    UnitTangent::through(omega, &omega.to_point(&p[0]), &omega.to_point(&p[1])).unwrap()
}

#[test]
fn disc_flow_matches_tanh() {
    let t = load_example("triangle-pqr").unwrap();
    let o = t.domain.reference_point();
    let half = ProjectivePoint::from_slice(&[0.5, 0.0, 1.0]).unwrap();
    let v = UnitTangent::through(&t.domain, &o, &half).unwrap();
    let origin = t.domain.chart_point(&o).unwrap();
    for s in [0.0, 0.5, 2.0, 7.0] {
        let b = flow(&v, s).unwrap().base_chart().unwrap();
        let r = (&b - &origin).norm() / (t.domain.chart_point(&circle(0.0)).unwrap() - &origin).norm();
        assert!((r - s.tanh()).abs() < 1e-12);
    }
    assert!(flow(&v, f64::NAN).is_err());
    assert!(flow(&v, 1e6).is_ok());
}

#[test]
fn flow_is_additive_and_unit_speed() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for name in ["simplex-z2", "triangle-pqr", "sym2-fuchsian"] {
        let omega = load_example(name).unwrap().domain;
        for _ in 0..20 {
            let v = random_tangent(&omega, &mut rng);
            let (s, t) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            let a = flow(&flow(&v, s).unwrap(), t).unwrap();
            let b = flow(&v, s + t).unwrap();
            assert!((a.log_s() - b.log_s()).abs() <= 1e-12 * (1.0 + b.log_s().abs()));
            let d = omega.distance_vec(&v.base_chart().unwrap(), &b.base_chart().unwrap()).unwrap();
            assert!((d - (s + t).abs()).abs() <= 1e-8 * (1.0 + d), "{name}: {d} vs {}", (s + t).abs());
            assert!((v.distance_along(&b) - (s + t).abs()).abs() <= 1e-12 * (1.0 + d));
        }
    }
}

#[test]
fn flow_commutes_with_automorphisms() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for name in ["triangle-pqr", "simplex-z2"] {
        let e = load_example(name).unwrap();
        for g in e.group.generators() {
            for _ in 0..10 {
                let v = random_tangent(&e.domain, &mut rng);
                let t = rng.random_range(-4.0..4.0);
                let a = flow(&v.transform(g).unwrap(), t).unwrap().base().unwrap();
                let b = flow(&v, t).unwrap().transform(g).unwrap().base().unwrap();
                let gb = g.apply(&flow(&v, t).unwrap().base().unwrap());
                assert!(a.angle(&b) <= 1e-10 && a.angle(&gb) <= 1e-9, "{name}");
            }
        }
    }
}

#[test]
fn invariant_set_membership() {
    let t = load_example("triangle-pqr").unwrap();
    let v = UnitTangent::from_endpoints(&t.domain, &circle(0.2), &circle(2.0)).unwrap();
    assert!(in_invariant_set(&v, &t.domain).unwrap());
    let chart = t.domain.chart();
    let small: Vec<Vector> = (0..5).map(|k| chart.chart_point(&circle(k as f64)).unwrap() * 0.5 + t.domain.origin() * 0.5).collect();
    let core = ConvexBody::polytope(chart, &small).unwrap();
    assert!(!in_invariant_set(&v, &core).unwrap());
    let inside = ProjectivePoint::from_slice(&[0.1, 0.1, 1.0]).unwrap();
    assert!(matches!(UnitTangent::from_endpoints(&t.domain, &inside, &circle(1.0)), Err(Error::Precondition(_))));
}

fn rank_one(e: &projconvex::catalog::CatalogEntry, count: usize) -> Vec<ProjectiveMap> {
    let ball = e.group.ball(5).unwrap();
    (0..ball.len())
        .map(|i| ball.element(i))
        .filter(|g| is_rank_one(g, &e.domain).unwrap().rank_one)
        .take(count)
        .cloned()
        .collect()
}

#[test]
fn rays_shadow_the_axis() {
    let t = load_example("triangle-pqr").unwrap();
    let w = circle(0.93);
    for g in rank_one(&t, 5) {
        let prof = axis_shadowing_error(&t.domain, &g, &w, 20).unwrap();
        assert_eq!(prof.len(), 21);
        assert!(prof[20].1 <= 1e-3);
        assert!(prof[20].1 <= prof[0].1 + 1e-12);
        let gp = is_rank_one(&g, &t.domain).unwrap().attracting.unwrap();
        assert!(matches!(axis_shadowing_error(&t.domain, &g, &gp, 5), Err(Error::Precondition(_))));
    }
    let s = load_example("simplex-z2").unwrap();
    let w = ProjectivePoint::from_slice(&[1.0, 1.0, 0.0]).unwrap();
    assert!(matches!(axis_shadowing_error(&s.domain, &s.group.generators()[0], &w, 5), Err(Error::Precondition(_))));
}

fn check_witness(t: &projconvex::catalog::CatalogEntry, u: &EndpointBox, v: &EndpointBox, w: &TransitivityWitness) {
    assert!(u.contains(&t.domain, &w.u).unwrap());
    assert!(v.contains(&t.domain, &w.image).unwrap());
    assert!(w.t.abs() <= MAX_FLOW_TIME);
    assert!(t.group.evaluate(&w.word).approx_eq(&w.element, 1e-8));
    let again = flow(&w.u.transform(&w.element).unwrap(), w.t).unwrap();
    assert!(again.base().unwrap().angle(&w.image.base().unwrap()) <= 1e-9);
}

#[test]
fn transitivity_on_the_triangle_group() {
    let t = load_example("triangle-pqr").unwrap();
    let bx = |a: f64, b: f64| EndpointBox { backward: circle(a), forward: circle(b), radius: 0.2, base_radius: 1.0 };
    let u = bx(0.4, 2.6);
    match transitivity_experiment(&t.group, &t.domain, &t.domain, &u, &u, 4).unwrap() {
        TransitivityOutcome::Witness(w) => check_witness(&t, &u, &u, &w),
        TransitivityOutcome::Exhausted { .. } => panic!("U meets itself"),
    }
    for k in 0..3 {
        let a = k as f64 * 1.3;
        let (u, v) = (bx(a, a + 2.0), bx(a * 1.9 + 1.0, a * 1.9 + 3.5));
        match transitivity_experiment(&t.group, &t.domain, &t.domain, &u, &v, 10).unwrap() {
            TransitivityOutcome::Witness(w) => check_witness(&t, &u, &v, &w),
            TransitivityOutcome::Exhausted { examined } => panic!("pair {k}: exhausted after {examined}"),
        }
    }
}

#[test]
fn simplex_edges_are_not_mixed() {
    let s = load_example("simplex-z2").unwrap();
    let p = |v: [f64; 3]| ProjectivePoint::from_slice(&v).unwrap();
    let u = EndpointBox { backward: p([1.0, 2.0, 0.0]), forward: p([0.0, 1.0, 2.0]), radius: 0.05, base_radius: 1.0 };
    let v = EndpointBox { backward: p([2.0, 0.0, 1.0]), forward: p([0.0, 2.0, 1.0]), radius: 0.05, base_radius: 1.0 };
    match transitivity_experiment(&s.group, &s.domain, &s.domain, &u, &v, 6).unwrap() {
        TransitivityOutcome::Exhausted { examined } => assert_eq!(examined, s.group.ball(6).unwrap().len()),
        TransitivityOutcome::Witness(w) => panic!("unexpected witness {:?}", w.word),
    }
    let inside = EndpointBox { backward: p([1.0, 1.0, 1.0]), ..u.clone() };
    assert!(transitivity_experiment(&s.group, &s.domain, &s.domain, &inside, &v, 2).is_err());
}
