use projconvex::catalog::load_example;
use projconvex::group::convex_core_approx;
use projconvex::*;
use proptest::prelude::*;

// ln(μ1/μ2) through the eigenvalues of gᵀg
fn gap_oracle(g: &ProjectiveMap) -> f64 {
    let m = g.lift();
    let mut ev: Vec<f64> = (m.transpose() * m).symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    0.5 * (ev[0] / ev[1]).ln()
}

fn on_conic(p: &ProjectivePoint) -> f64 {
    let v = p.dir();
    (v[1] * v[1] - v[0] * v[2]).abs() / v.norm_squared()
}

#[test]
fn gaps_grow_linearly_along_powers() {
    let e = load_example("sym2-fuchsian").unwrap();
    let h = e.group.evaluate(&e.group.parse_word("xY").unwrap());
    let l = translation_length(&h).unwrap();
    for n in 1..=8 {
        let hn = h.pow(n);
        assert!((singular_gap(&hn, 1) - n as f64 * l).abs() <= 1e-9 * n as f64);
        assert!((singular_gap(&hn, 1) - gap_oracle(&hn)).abs() <= 1e-9 * n as f64);
    }
}

#[test]
fn gap_profiles() {
    let sym2 = gap_profile(&load_example("sym2-fuchsian").unwrap().group, 1, 8).unwrap();
    assert!(sym2.slope > 0.0);
    assert_eq!(sym2.envelope.len(), 8);
    let simplex = gap_profile(&load_example("simplex-z2").unwrap().group, 1, 8).unwrap();
    assert!(simplex.slope <= 0.05 * sym2.slope);
    let g = load_example("sym2-fuchsian").unwrap().group;
    assert!(matches!(gap_profile(&g, 3, 4), Err(Error::Precondition(_))));
    assert!(matches!(gap_profile(&g, 0, 4), Err(Error::Precondition(_))));
}

#[test]
fn boundary_sample_lies_on_the_conic() {
    let e = load_example("sym2-fuchsian").unwrap();
    let s = boundary_map_sample(&e.group, 6).unwrap();
    assert!(!s.is_empty());
    for (_, p) in &s.lines {
        assert!(on_conic(p) <= 1e-6);
    }
    // each hyperplane is the tangent line at its point
    for ((_, p), (_, h)) in s.lines.iter().zip(&s.hyperplanes) {
        assert!(h.contains(p.dir(), 1e-6));
    }
}

#[test]
fn boundary_sample_is_near_invariant() {
    let e = load_example("sym2-fuchsian").unwrap();
    let big = boundary_map_sample(&e.group, 7).unwrap();
    let small = boundary_map_sample(&e.group, 5).unwrap();
    let pts = big.points();
    for g in e.group.generators() {
        for p in small.points() {
            let q = g.apply(&p);
            assert!(pts.iter().any(|x| x.angle(&q) <= 1e-6));
        }
    }
}

#[test]
fn transversality_report() {
    let e = load_example("sym2-fuchsian").unwrap();
    let s = boundary_map_sample(&e.group, 6).unwrap();
    let r = transversality_check(&s, 1e-2).unwrap();
    assert!(r.pairs > 0);
    assert!(r.min_angle > 0.0);
    // angles shrink quadratically near the diagonal, so a stricter pair cut gives a larger minimum
    let r2 = transversality_check(&s, 1e-1).unwrap();
    assert!(r2.min_angle >= r.min_angle);
}

#[test]
fn chart_and_invariant_domain() {
    let e = load_example("sym2-fuchsian").unwrap();
    let mut last = f64::INFINITY;
    for l in [6, 8] {
        let s = boundary_map_sample(&e.group, l).unwrap();
        let (chart, margin) = chart_boundedness(&s).unwrap();
        assert!(margin >= 0.1);
        for p in s.points() {
            let c = chart.covector().dot(p.dir()).abs();
            assert!(c >= margin - 1e-12);
        }
        let inv = invariant_domain_from_limit(&e.group, &s, &e.base_point, None, l).unwrap();
        assert!(inv.drift <= 0.05 && inv.drift <= last);
        last = inv.drift;
        assert!(hyperplane_separation(&s, &inv.hull).unwrap() > 0.0);
        let h = hausdorff(&inv.body.rechart(e.domain.chart()).unwrap(), &e.domain).unwrap();
        assert!(h < 0.05);
    }
    let s = boundary_map_sample(&e.group, 4).unwrap();
    let far = ProjectivePoint::from_slice(&[1.0, 5.0, 1.0]).unwrap();
    assert!(matches!(invariant_domain_from_limit(&e.group, &s, &far, None, 4), Err(Error::Precondition(_))));
}

#[test]
fn collinearity_scan() {
    for name in ["sym2-fuchsian", "triangle-pqr"] {
        let e = load_example(name).unwrap();
        let s = boundary_map_sample(&e.group, 7).unwrap();
        let chart = e.domain.chart();
        let pts: Vec<Vector> = s.points().iter().map(|p| chart.chart_point(p).unwrap()).collect();
        assert!(collinear_triples(&pts, chart, 1e-6, 1e-3).unwrap().is_empty(), "{name}");
    }
    let e = load_example("simplex-z2").unwrap();
    // the sampled limit set is only the vertices here, so scan the boundary of the core
    let core = convex_core_approx(&e.group, &e.domain, 6).unwrap();
    let pts = core.sample_boundary(90);
    assert!(!collinear_triples(&pts, core.chart(), 1e-6, 1e-3).unwrap().is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn singular_gap_matches_the_oracle(v in proptest::collection::vec(-2.0f64..2.0, 9), k in 1usize..3) {
        let m = Mat::from_row_slice(3, 3, &v);
        prop_assume!(m.determinant().abs() > 1e-2);
        let g = ProjectiveMap::new(m.clone()).unwrap();
        let mut ev: Vec<f64> = (m.transpose() * &m).symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        let oracle = 0.5 * (ev[k - 1] / ev[k]).ln();
        prop_assert!((singular_gap(&g, k) - oracle).abs() <= 1e-8 * (1.0 + oracle));
        // invariant under scaling of the lift
        let g2 = ProjectiveMap::new(m * 3.7).unwrap();
        prop_assert!((singular_gap(&g2, k) - singular_gap(&g, k)).abs() <= 1e-12 * (1.0 + oracle));
    }
}
