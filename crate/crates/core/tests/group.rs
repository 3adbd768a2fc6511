use projconvex::catalog::load_example;
use projconvex::group::*;
use projconvex::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Brute-force ball: breadth-first products with pairwise comparison of
/// determinant-normalized lifts up to sign.
fn naive_ball_sizes(g: &MatrixGroup, l: usize) -> Vec<usize> {
    let d = g.dim();
    let norm = |m: &Mat| {
        let s = m.determinant().abs().powf(1.0 / d as f64);
        m / s
    };
    let same = |a: &Mat, b: &Mat| (a - b).amax() < 1e-7 || (a + b).amax() < 1e-7;
    let mut all = vec![Mat::identity(d, d)];
    let mut frontier = all.clone();
    let mut sizes = vec![1];
    for _ in 0..l {
        let mut next = Vec::new();
        for x in &frontier {
            for s in g.generators() {
                let y = norm(&(x * s.lift()));
                if !all.iter().any(|z| same(z, &y)) {
                    all.push(y.clone());
                    next.push(y);
                }
            }
        }
        sizes.push(all.len());
        frontier = next;
    }
    sizes
}

#[test]
fn ball_counts() {
    let s = load_example("simplex-z2").unwrap();
    for l in 0..=6 {
        assert_eq!(s.group.ball(l).unwrap().len(), 2 * l * l + 2 * l + 1);
    }
    let t = load_example("triangle-pqr").unwrap();
    let naive = naive_ball_sizes(&t.group, 6);
    for (l, n) in naive.iter().enumerate() {
        assert_eq!(t.group.ball(l).unwrap().len(), *n, "radius {l}");
    }
    let ball = t.group.ball(5).unwrap();
    for i in 0..ball.len() {
        assert!(t.group.evaluate(ball.word(i)).approx_eq(ball.element(i), 1e-9));
        assert_eq!(ball.word_length(i), ball.word(i).len());
    }
}

#[test]
fn budget_is_enforced() {
    let t = load_example("triangle-pqr").unwrap();
    let g = MatrixGroup::new(t.group.generators()[..t.group.generator_count()].to_vec(), None).unwrap().with_budget(50);
    assert!(matches!(g.ball(12), Err(Error::Budget(_))));
    assert!(g.ball(2).is_ok());
}

#[test]
fn words_round_trip() {
    let t = load_example("sym2-fuchsian").unwrap();
    let w = t.group.parse_word("xY").unwrap();
    assert_eq!(t.group.word_string(&w), "xY");
    assert!(t.group.parse_word("q").is_err());
}

#[test]
fn limit_points_lie_on_the_boundary() {
    for name in ["simplex-z2", "triangle-pqr"] {
        let e = load_example(name).unwrap();
        let s = orbital_limit_set(&e.group, &e.domain, &e.base_point, 6, DEFAULT_CLUSTER_TOL).unwrap();
        assert!(!s.is_empty());
        for p in &s.points {
            let x = e.domain.chart_point(p).unwrap();
            assert!(e.domain.contains_vec(&x, Mode::Closed, 1e-6), "{name}");
        }
        let exact = s.witnesses.iter().filter(|w| w.exact).count();
        assert!(exact > 0, "{name}");
    }
    let e = load_example("simplex-z2").unwrap();
    let outside = ProjectivePoint::from_slice(&[1.0, -1.0, 1.0]).unwrap();
    assert!(matches!(orbital_limit_set(&e.group, &e.domain, &outside, 3, DEFAULT_CLUSTER_TOL), Err(Error::Precondition(_))));
}

#[test]
fn cores_of_catalog_examples() {
    for name in ["simplex-z2", "cone-fuchsian"] {
        let e = load_example(name).unwrap();
        let core = convex_core_approx(&e.group, &e.domain, 8).unwrap();
        let h = hausdorff(&core.rechart(e.domain.chart()).unwrap(), &e.domain).unwrap();
        assert!(h <= 0.1, "{name}: {h}");
    }
}

#[test]
fn centralizer_of_the_diagonal_group() {
    let e = load_example("simplex-z2").unwrap();
    let sample = orbital_limit_set(&e.group, &e.domain, &e.base_point, 6, DEFAULT_CLUSTER_TOL).unwrap();
    let a = &e.group.generators()[..2];
    let c = centralizer_fixed_subspace(a, &sample, &e.domain).unwrap();
    assert_eq!(c.v.dim(), 3);
    assert_eq!(c.components.len(), 3);
    for comp in &c.components {
        assert_eq!(comp.space.dim(), 1);
        let v = comp.space.basis().column(0).into_owned();
        assert_eq!(v.iter().filter(|x| x.abs() > 1e-9).count(), 1);
    }
    let h = hausdorff(&c.core_slice.rechart(e.domain.chart()).unwrap(), &e.domain).unwrap();
    assert!(h <= 1e-6);

    let non_commuting = [ProjectiveMap::diag(&[4.0, 2.0, 1.0]).unwrap(), e.group.generators()[0].conjugate_by(&ProjectiveMap::from_rows(&[&[1.0, 0.3, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]).unwrap())];
    assert!(matches!(centralizer_fixed_subspace(&non_commuting, &sample, &e.domain), Err(Error::Precondition(_))));
    assert!(matches!(centralizer_fixed_subspace(&[ProjectiveMap::identity(3)], &sample, &e.domain), Err(Error::Precondition(_))));
}

fn rank_one_elements(e: &projconvex::catalog::CatalogEntry, l: usize) -> Vec<ProjectiveMap> {
    let ball = e.group.ball(l).unwrap();
    (0..ball.len())
        .filter(|&i| is_rank_one(ball.element(i), &e.domain).unwrap().rank_one)
        .map(|i| ball.element(i).clone())
        .collect()
}

#[test]
fn centralizer_of_a_hyperbolic_element() {
    let e = load_example("triangle-pqr").unwrap();
    let g = rank_one_elements(&e, 4).into_iter().next().unwrap();
    let r = is_rank_one(&g, &e.domain).unwrap();
    let (gp, gm) = (r.attracting.unwrap(), r.repelling.unwrap());
    let sample = orbital_limit_set(&e.group, &e.domain, &e.base_point, 6, DEFAULT_CLUSTER_TOL).unwrap();
    let c = centralizer_fixed_subspace(std::slice::from_ref(&g), &sample, &e.domain).unwrap();
    assert_eq!(c.v.dim(), 2);
    assert!(c.v.contains(gp.dir(), 1e-8) && c.v.contains(gm.dir(), 1e-8));
    assert_eq!(c.core_slice.body_dim(), 1);
    let chart = e.domain.chart();
    let axis = ConvexBody::polytope(chart, &[chart.chart_point(&gp).unwrap(), chart.chart_point(&gm).unwrap()]).unwrap();
    assert!(hausdorff(&c.core_slice.rechart(e.domain.chart()).unwrap(), &axis).unwrap() <= 1e-6);
}

#[test]
fn rank_one_inventory() {
    let t = load_example("triangle-pqr").unwrap();
    let ro = rank_one_elements(&t, 6);
    assert!(ro.len() >= 10);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let zs: Vec<ProjectivePoint> = t.domain.sample_interior(&mut rng, 20).iter().map(|x| t.domain.to_point(x)).collect();
    for g in ro.iter().take(10) {
        let gp = is_rank_one(g, &t.domain).unwrap().attracting.unwrap();
        let g200 = g.pow(200);
        for z in &zs {
            assert!(g200.apply(z).angle(&gp) <= 1e-6);
        }
    }
    let s = load_example("simplex-z2").unwrap();
    assert!(rank_one_elements(&s, 6).is_empty());
    let c = load_example("cone-fuchsian").unwrap();
    assert!(rank_one_elements(&c, 3).is_empty());
}

#[test]
fn rank_one_approximations() {
    let t = load_example("triangle-pqr").unwrap();
    let x1 = ProjectivePoint::from_slice(&[0.3f64.cos(), 0.3f64.sin(), 1.0]).unwrap();
    let x2 = ProjectivePoint::from_slice(&[2.5f64.cos(), 2.5f64.sin(), 1.0]).unwrap();
    let found = rank_one_approximation(&x1, &x2, &t.group, &t.domain, 6).unwrap();
    let best = &found[0];
    assert!(best.err_plus < 0.2 && best.err_minus < 0.2);
    assert!(is_rank_one(&best.psi, &t.domain).unwrap().rank_one);
    let w: Vec<u16> = best.g_word.iter().copied().chain(inverse_word(&t.group, &best.h_word)).collect();
    assert!(t.group.evaluate(&w).approx_eq(&best.psi, 1e-8));
    for pair in found.windows(2) {
        assert!(pair[0].err_plus.max(pair[0].err_minus) <= pair[1].err_plus.max(pair[1].err_minus));
    }
    assert!(matches!(rank_one_approximation(&x1, &x1, &t.group, &t.domain, 4), Err(Error::Precondition(_))));
}

fn inverse_word(g: &MatrixGroup, w: &[u16]) -> Vec<u16> {
    let gens = g.generators();
    w.iter()
        .rev()
        .map(|&i| {
            let inv = gens[i as usize].inverse();
            gens.iter().position(|h| h.approx_eq(&inv, 1e-9)).unwrap() as u16
        })
        .collect()
}

#[test]
fn edge_projection() {
    let s = load_example("simplex-z2").unwrap();
    let a = &s.group.generators()[..2];
    let t = simplex_edge_projection(&s.domain, a, 2).unwrap();
    assert_eq!(t.rank(), 2);
    // indices refer to the simplex's own vertex order
    let verts = s.domain.vertices().unwrap().to_vec();
    let e = |i: usize| verts[i].clone();
    assert!(t.image().contains(&e(0), 1e-9) && t.image().contains(&e(1), 1e-9));
    assert!(t.kernel().unwrap().contains(&e(2), 1e-9));
    assert!(matches!(simplex_edge_projection(&s.domain, a, 3), Err(Error::Precondition(_))));
    let t0 = simplex_edge_projection(&s.domain, a, 0).unwrap();
    assert!(t0.kernel().unwrap().contains(&e(0), 1e-9));
}

#[test]
fn minimal_translation_of_diagonal_maps() {
    let s = load_example("simplex-z2").unwrap();
    let g = ProjectiveMap::diag(&[9.0, 3.0, 1.0]).unwrap();
    let (tau, _) = minimal_translation_sample(&g, &s.domain, 40).unwrap();
    assert!((tau - 3f64.ln()).abs() <= 1e-3);
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for x in s.domain.sample_interior(&mut rng, 50) {
        let gx = s.domain.chart().normalize(&g.apply_vec(&x)).unwrap();
        assert!((s.domain.distance_vec(&x, &gx).unwrap() - tau).abs() <= 1e-3);
    }
    for _ in 0..20 {
        let h = loop {
            let m = Mat::from_fn(3, 3, |_, _| rng.random::<f64>() * 2.0 - 1.0);
            if m.determinant().abs() > 0.05 {
                break ProjectiveMap::new(m).unwrap();
            }
        };
        let ls: Vec<f64> = (0..3).map(|_| rng.random_range(0.2..3.0)).collect();
        let g = ProjectiveMap::diag(&ls).unwrap().conjugate_by(&h);
        let verts: Vec<ProjectivePoint> = (0..3).map(|i| h.apply(&ProjectivePoint::basis(3, i))).collect();
        let omega = make_simplex(&verts).unwrap();
        let (hi, lo) = (ls.iter().copied().fold(0.0, f64::max), ls.iter().copied().fold(f64::INFINITY, f64::min));
        let (tau, _) = minimal_translation_sample(&g, &omega, 40).unwrap();
        assert!((tau - 0.5 * (hi / lo).ln()).abs() <= 1e-3);
    }
    let rot = ProjectiveMap::from_rows(&[&[0.0, -1.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]).unwrap();
    assert!(matches!(minimal_translation_sample(&rot, &s.domain, 10), Err(Error::NotAutomorphism(_))));
}

#[test]
fn orbit_density_and_cocompactness() {
    let t = load_example("triangle-pqr").unwrap();
    let x0 = ProjectivePoint::from_slice(&[0.6, 0.8, 1.0]).unwrap();
    let eps8 = boundary_orbit_density(&t.group, &t.domain, &t.domain, &x0, 8).unwrap();
    let eps10 = boundary_orbit_density(&t.group, &t.domain, &t.domain, &x0, 10).unwrap();
    assert!(eps10 <= eps8 && eps10 < 0.1);
    assert!(matches!(boundary_orbit_density(&t.group, &t.domain, &t.domain, &t.base_point, 4), Err(Error::Precondition(_))));
    let s = load_example("simplex-z2").unwrap();
    let r = cocompactness_radius(&s.group, &s.domain, &s.domain, &s.base_point, 6, Some(2.0)).unwrap();
    assert!(r.is_finite() && r < 2.0);
}
