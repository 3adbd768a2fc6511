use projconvex::catalog::{cone_base, load_example, NAMES};
use projconvex::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pt(v: &[f64]) -> ProjectivePoint {
    ProjectivePoint::from_slice(v).unwrap()
}

fn disc() -> ConvexBody {
    let chart = AffineChart::from_slice(&[0.0, 0.0, 1.0]).unwrap();
    ConvexBody::ellipsoid(&chart, &Vector::from_vec(vec![0.0, 0.0, 1.0]), &Mat::identity(3, 2)).unwrap()
}

fn simplex() -> ConvexBody {
    make_simplex(&[ProjectivePoint::basis(3, 0), ProjectivePoint::basis(3, 1), ProjectivePoint::basis(3, 2)]).unwrap()
}

fn close(a: &ProjectivePoint, b: &ProjectivePoint, tol: f64) -> bool {
    a.angle(b) <= tol
}

#[test]
fn membership() {
    let d = disc();
    assert!(d.contains(&pt(&[0.0, 0.0, 1.0]), Mode::Open).unwrap());
    assert!(!d.contains(&pt(&[1.0, 0.0, 1.0]), Mode::Open).unwrap());
    assert!(d.contains(&pt(&[1.0, 0.0, 1.0]), Mode::Closed).unwrap());
    assert!(simplex().contains(&pt(&[1.0, 1.0, 1.0]), Mode::Open).unwrap());
}

#[test]
fn closed_form_distances() {
    // the interval (-1, 1) in the chart y = 1
    let lifts = [Vector::from_vec(vec![-1.0, 1.0]), Vector::from_vec(vec![1.0, 1.0])];
    let interval = make_simplex_from_lifts(&lifts).unwrap();
    let d = interval.hilbert_distance(&pt(&[0.0, 1.0]), &pt(&[0.5, 1.0])).unwrap();
    assert!((d - 0.5 * 3f64.ln()).abs() < 1e-12);
    let disc = disc();
    for r in [0.1, 0.5, 0.9, 0.999] {
        let d = disc.hilbert_distance(&pt(&[0.0, 0.0, 1.0]), &pt(&[r, 0.0, 1.0])).unwrap();
        assert!((d - f64::atanh(r)).abs() < 1e-9 * (1.0 + d));
    }
    let x = pt(&[0.3, -0.2, 1.0]);
    assert_eq!(disc.hilbert_distance(&x, &x).unwrap(), 0.0);
}

#[test]
fn chord_endpoints() {
    let disc = disc();
    let (a, b) = disc.line_boundary_points(&pt(&[0.0, 0.0, 1.0]), &pt(&[0.5, 0.0, 1.0])).unwrap();
    assert!(close(&a, &pt(&[-1.0, 0.0, 1.0]), 1e-12) && close(&b, &pt(&[1.0, 0.0, 1.0]), 1e-12));

    // simplex: barycentre toward e1 leaves through the edge {x1 = 0} behind and hits e1 ahead
    let s = simplex();
    let (a, b) = s.line_boundary_points(&pt(&[1.0, 1.0, 1.0]), &pt(&[2.0, 1.0, 1.0])).unwrap();
    assert!(close(&a, &pt(&[0.0, 1.0, 1.0]), 1e-12));
    assert!(close(&b, &pt(&[1.0, 0.0, 0.0]), 1e-12));
    // a generic direction crosses two edges; oracle: solve x + s u = 0 per coordinate
    let x = Vector::from_vec(vec![1.0, 2.0, 3.0]);
    let u = Vector::from_vec(vec![0.5, -1.5, 0.25]);
    let (a, b) = s.line_boundary_points(&ProjectivePoint::new(x.clone()).unwrap(), &ProjectivePoint::new(&x + &u * 0.1).unwrap()).unwrap();
    let fwd = (0..3).filter(|&i| u[i] < 0.0).map(|i| -x[i] / u[i]).fold(f64::INFINITY, f64::min);
    let back = (0..3).filter(|&i| u[i] > 0.0).map(|i| x[i] / u[i]).fold(f64::INFINITY, f64::min);
    assert!(close(&b, &ProjectivePoint::new(&x + &u * fwd).unwrap(), 1e-12));
    assert!(close(&a, &ProjectivePoint::new(&x - &u * back).unwrap(), 1e-12));

    // ellipse: endpoints are roots of the defining quadratic
    let chart = AffineChart::from_slice(&[0.0, 0.0, 1.0]).unwrap();
    let axes = Mat::from_row_slice(3, 2, &[2.0, 0.3, 0.0, 0.7, 0.0, 0.0]);
    let e = ConvexBody::ellipsoid(&chart, &Vector::from_vec(vec![0.4, -0.1, 1.0]), &axes).unwrap();
    let ainv = axes.view((0, 0), (2, 2)).into_owned().try_inverse().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let ps = e.sample_interior(&mut rng, 2);
        let (a, b) = e.line_boundary_points(&e.to_point(&ps[0]), &e.to_point(&ps[1])).unwrap();
        for q in [a, b] {
            let q = chart.chart_point(&q).unwrap();
            let z = &ainv * Vector::from_vec(vec![q[0] - 0.4, q[1] + 0.1]);
            assert!((z.norm_squared() - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn geodesic_points() {
    let disc = disc();
    let o = pt(&[0.0, 0.0, 1.0]);
    let eta = pt(&[1.0, 0.0, 1.0]);
    for t in [0.0, 0.3, 1.0, 4.0] {
        let p = disc.geodesic_point(&o, &eta, t).unwrap();
        assert!(close(&p, &pt(&[t.tanh(), 0.0, 1.0]), 1e-12));
    }
    let s = simplex();
    let x = pt(&[1.0, 2.0, 3.0]);
    let y = pt(&[1.5, 1.5, 3.0]);
    let (_, eta) = s.line_boundary_points(&x, &y).unwrap();
    let d = s.hilbert_distance(&x, &y).unwrap();
    assert!(close(&s.geodesic_point(&x, &eta, d).unwrap(), &y, 1e-7));
}

#[test]
fn faces() {
    let s = simplex();
    assert_eq!(s.open_face(&pt(&[1.0, 1.0, 1.0])).unwrap().kind, FaceKind::Interior);
    let f = s.open_face(&pt(&[1.0, 1.0, 0.0])).unwrap();
    assert_eq!(f.kind, FaceKind::OpenFace);
    assert_eq!(f.span.dim(), 2);
    assert_eq!(s.open_face(&pt(&[1.0, 0.0, 0.0])).unwrap().kind, FaceKind::Vertex);
    assert_eq!(disc().open_face(&pt(&[0.6, 0.8, 1.0])).unwrap().kind, FaceKind::Vertex);
}

#[test]
fn faces_of_limits_at_bounded_distance() {
    // x_n and y_n slide toward two points of the edge {x3 = 0} at bounded distance
    let s = simplex();
    let mut last = None;
    for n in 1..=30 {
        let e = 2f64.powi(-n);
        let x = pt(&[1.0, 1.0, e]);
        let y = pt(&[1.0, 3.0, e]);
        let d = s.hilbert_distance(&x, &y).unwrap();
        assert!(d <= 10.0);
        last = Some((x, y));
    }
    let (x, y) = last.unwrap();
    let lim = |p: &ProjectivePoint| {
        let v = p.dir();
        pt(&[v[0], v[1], 0.0])
    };
    let (fx, fy) = (s.open_face(&lim(&x)).unwrap(), s.open_face(&lim(&y)).unwrap());
    assert!(fx.span.max_angle(&fy.span) < 1e-9);
}

#[test]
fn hulls() {
    let conic: Vec<ProjectivePoint> = (0..=10).map(|i| {
        let t = i as f64 / 10.0;
        pt(&[1.0, t, t * t])
    }).collect();
    let c1 = AffineChart::from_slice(&[1.0, 0.0, 0.0]).unwrap();
    let c2 = AffineChart::from_slice(&[1.0, 0.2, 1.0]).unwrap();
    let h1 = convex_hull_connected(&conic, &[c1.clone()]).unwrap();
    let h2 = convex_hull_connected(&conic, &[c2]).unwrap().rechart(&c1).unwrap();
    assert!(hausdorff(&h1, &h2).unwrap() <= 1e-10);

    let one = convex_hull_connected(&[pt(&[0.2, 0.3, 1.0])], &[c1.clone()]).unwrap();
    assert_eq!(one.body_dim(), 0);
    let tri = [pt(&[1.0, 0.0, 0.0]), pt(&[1.0, 1.0, 0.0]), pt(&[1.0, 0.0, 1.0])];
    let h = convex_hull_connected(&tri, &[c1]).unwrap();
    assert_eq!(h.vertices().unwrap().len(), 3);
    assert!(hausdorff(&h, &make_simplex(&tri).unwrap().rechart(h.chart()).unwrap()).unwrap() < 1e-12);
}

#[test]
fn simplices_and_cones() {
    let seg = make_simplex(&[pt(&[1.0, 0.0]), pt(&[0.0, 1.0])]).unwrap();
    assert_eq!(seg.body_dim(), 1);
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let m = Mat::from_fn(4, 4, |_, _| rng.random::<f64>() - 0.5);
    let verts: Vec<ProjectivePoint> = (0..4).map(|i| ProjectivePoint::new(m.column(i).into_owned()).unwrap()).collect();
    let s3 = make_simplex(&verts).unwrap();
    assert_eq!(s3.body_dim(), 3);
    for v in &verts {
        assert_eq!(s3.open_face(v).unwrap().kind, FaceKind::Vertex);
    }
    for i in 0..4 {
        for j in i + 1..4 {
            let mid = ProjectivePoint::new(m.column(i) + m.column(j)).unwrap();
            let f = s3.open_face(&mid);
            // the midpoint of two lifts lies on an edge when both lifts are on the same side of the chart
            if let Ok(f) = f {
                if f.kind == FaceKind::OpenFace {
                    assert_eq!(f.span.dim(), 2);
                }
            }
        }
    }

    let c111 = AffineChart::from_slice(&[1.0, 1.0, 1.0]).unwrap();
    let e = |i| c111.chart_point(&ProjectivePoint::basis(3, i)).unwrap();
    let seg23 = ConvexBody::polytope(&c111, &[e(1), e(2)]).unwrap();
    let c = cone_over_base(&ProjectivePoint::basis(3, 0), &seg23).unwrap();
    assert!(hausdorff(&c.rechart(simplex().chart()).unwrap(), &simplex()).unwrap() < 1e-12);

    let chart = AffineChart::from_slice(&[1.0, 1.0, 0.0, 1.0]).unwrap();
    let base = cone_base(&chart).unwrap();
    let cone = cone_over_base(&ProjectivePoint::basis(4, 0), &base).unwrap();
    let apex = chart.chart_point(&ProjectivePoint::basis(4, 0)).unwrap();
    for b in base.sample_boundary(40) {
        for s in [0.0, 0.25, 0.5, 0.75] {
            let q = &apex * s + &b * (1.0 - s);
            assert!(cone.on_boundary(&q, 1e-9));
        }
    }
    assert!(matches!(cone_over_base(&pt(&[0.0, 1.0, 0.0, 1.0]), &base), Err(Error::Degenerate(_))));
}

#[test]
fn proper_embeddings() {
    let s = simplex();
    let median = make_simplex(&[ProjectivePoint::basis(3, 0), pt(&[0.0, 1.0, 1.0])]).unwrap();
    assert!(is_properly_embedded(&median, &s, 64).unwrap());
    let edge = make_simplex(&[ProjectivePoint::basis(3, 0), ProjectivePoint::basis(3, 1)]).unwrap();
    assert!(!is_properly_embedded(&edge, &s, 64).unwrap());
    let d = disc();
    let inner = make_simplex(&[pt(&[-0.5, 0.0, 1.0]), pt(&[0.5, 0.0, 1.0])]).unwrap();
    assert!(!is_properly_embedded(&inner, &d, 64).unwrap());
    let cone = load_example("cone-fuchsian").unwrap().domain;
    let chart = cone.chart().clone();
    let base = cone_base(&chart).unwrap();
    let (b1, b2) = {
        let bs = base.sample_boundary(3);
        (bs[0].clone(), bs[1].clone())
    };
    let tri = ConvexBody::polytope(&chart, &[chart.chart_point(&ProjectivePoint::basis(4, 0)).unwrap(), b1, b2]).unwrap();
    assert!(is_properly_embedded(&tri, &cone, 64).unwrap());
}

fn random_triples(b: &ConvexBody, seed: u64, n: usize) -> Vec<[Vector; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = b.sample_interior(&mut rng, 3 * n);
    pts.chunks(3).map(|c| [c[0].clone(), c[1].clone(), c[2].clone()]).collect()
}

#[test]
fn metric_axioms_on_catalog_bodies() {
    for name in NAMES {
        let e = load_example(name).unwrap();
        let b = &e.domain;
        for [x, y, z] in random_triples(b, 23, 200) {
            let dxy = b.distance_vec(&x, &y).unwrap();
            assert!((dxy - b.distance_vec(&y, &x).unwrap()).abs() <= 1e-12, "{name}");
            let dxz = b.distance_vec(&x, &z).unwrap();
            let dyz = b.distance_vec(&y, &z).unwrap();
            assert!(dxz <= dxy + dyz + 1e-9, "{name}");
            for g in e.group.generators() {
                let gx = b.chart().normalize(&g.apply_vec(&x)).unwrap();
                let gy = b.chart().normalize(&g.apply_vec(&y)).unwrap();
                assert!((b.distance_vec(&gx, &gy).unwrap() - dxy).abs() <= 1e-9 * (1.0 + dxy), "{name}");
            }
        }
    }
}

#[test]
fn segments_satisfy_the_distance_estimate() {
    for name in NAMES {
        let b = load_example(name).unwrap().domain;
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..100 {
            let p = b.sample_interior(&mut rng, 4);
            let (x1, y1, x2, y2) = (b.to_point(&p[0]), b.to_point(&p[1]), b.to_point(&p[2]), b.to_point(&p[3]));
            let (t1, t2) = (b.hilbert_distance(&x1, &y1).unwrap(), b.hilbert_distance(&x2, &y2).unwrap());
            let (_, e1) = b.line_boundary_points(&x1, &y1).unwrap();
            let (_, e2) = b.line_boundary_points(&x2, &y2).unwrap();
            let bound = b.hilbert_distance(&x1, &x2).unwrap() + b.hilbert_distance(&y1, &y2).unwrap();
            for k in 1..=9 {
                let l = k as f64 / 10.0;
                let s1 = b.geodesic_point(&x1, &e1, l * t1).unwrap();
                let s2 = b.geodesic_point(&x2, &e2, l * t2).unwrap();
                assert!(b.hilbert_distance(&s1, &s2).unwrap() <= bound + 1e-9, "{name}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hulls_are_equivariant(seed in 0u64..1000) {
        let e = load_example("triangle-pqr").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<ProjectivePoint> = e.domain.sample_interior(&mut rng, 12).iter().map(|x| e.domain.to_point(x)).collect();
        let g = &e.group.generators()[(seed % 3) as usize];
        let charts = [e.domain.chart().clone()];
        let h = convex_hull_connected(&xs, &charts).unwrap();
        let gxs: Vec<ProjectivePoint> = xs.iter().map(|x| g.apply(x)).collect();
        let gh = convex_hull_connected(&gxs, &charts).unwrap();
        let moved = h.transform(g).unwrap().rechart(&charts[0]).unwrap();
        prop_assert!(hausdorff(&gh, &moved).unwrap() <= 1e-9);
    }

    #[test]
    fn distance_vanishes_only_on_the_diagonal(a in -0.9f64..0.9, b in -0.9f64..0.9, c in -0.9f64..0.9) {
        let d = disc();
        let x = Vector::from_vec(vec![a * 0.7, b * 0.7, 1.0]);
        let y = Vector::from_vec(vec![c * 0.7, a * 0.7, 1.0]);
        let dist = d.distance_vec(&x, &y).unwrap();
        prop_assert_eq!(dist == 0.0, x == y);
        prop_assert!(dist >= 0.0);
    }
}
