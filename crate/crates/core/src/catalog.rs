//! Exactly known example domains and groups.

use std::f64::consts::PI;

use crate::domain::{cone_over_base, make_simplex, AffineChart, ConvexBody};
use crate::error::{Error, Result};
use crate::group::MatrixGroup;
use crate::projlin::{Mat, ProjectiveMap, ProjectivePoint, Vector};

pub const NAMES: [&str; 4] = ["simplex-z2", "triangle-pqr", "cone-fuchsian", "sym2-fuchsian"];

#[derive(Clone, Debug)]
pub struct Truth {
    pub core: &'static str,
    pub rank_one: &'static str,
    pub summary: &'static str,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub domain: ConvexBody,
    pub group: MatrixGroup,
    pub base_point: ProjectivePoint,
    pub truth: Truth,
}

pub fn load_example(name: &str) -> Result<CatalogEntry> {
    match name {
        "simplex-z2" => simplex_z2(),
        "triangle-pqr" => triangle_pqr(),
        "cone-fuchsian" => cone_fuchsian(),
        "sym2-fuchsian" => sym2_fuchsian(),
        _ => Err(Error::Lookup(name.to_string())),
    }
}

fn labels(ls: &[&str]) -> Option<Vec<String>> {
    Some(ls.iter().map(|s| s.to_string()).collect())
}

fn simplex_z2() -> Result<CatalogEntry> {
    let domain = make_simplex(&[ProjectivePoint::basis(3, 0), ProjectivePoint::basis(3, 1), ProjectivePoint::basis(3, 2)])?;
    let gens = vec![ProjectiveMap::diag(&[4.0, 2.0, 1.0])?, ProjectiveMap::diag(&[2.0, 4.0, 1.0])?];
    Ok(CatalogEntry {
        name: "simplex-z2",
        domain,
        group: MatrixGroup::new(gens, labels(&["a", "b"]))?,
        base_point: ProjectivePoint::from_slice(&[1.0, 1.0, 1.0])?,
        truth: Truth {
            core: "the open simplex itself",
            rank_one: "none: every axis lies in the boundary",
            summary: "diagonal Z^2 acting cocompactly on the standard open 2-simplex",
        },
    })
}

/// Cartan matrix B_ij = -cos(pi/m_ij) of a triangle group.
pub fn cartan_matrix(p: u32, q: u32, r: u32) -> Mat {
    let c = |m: u32| -(PI / m as f64).cos();
    Mat::from_row_slice(3, 3, &[1.0, c(p), c(q), c(p), 1.0, c(r), c(q), c(r), 1.0])
}

/// Tits reflections R_i = I - 2 e_i e_iᵀ B.
pub fn tits_reflections(b: &Mat) -> Vec<Mat> {
    (0..3)
        .map(|i| {
            let mut r = Mat::identity(3, 3);
            for j in 0..3 {
                r[(i, j)] -= 2.0 * b[(i, j)];
            }
            r
        })
        .collect()
}

/// P with B = Pᵀ diag(1,1,-1) P, for B of signature (2,1).
fn lorentz_frame(b: &Mat) -> Result<Mat> {
    let eig = b.clone().symmetric_eigen();
    let mut idx: Vec<usize> = (0..3).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    if !(eig.eigenvalues[idx[1]] > 0.0 && eig.eigenvalues[idx[2]] < 0.0) {
        return Err(Error::Degenerate("Cartan matrix is not of hyperbolic signature".into()));
    }
    let mut p = Mat::zeros(3, 3);
    for (row, &i) in idx.iter().enumerate() {
        let s = eig.eigenvalues[i].abs().sqrt();
        for j in 0..3 {
            p[(row, j)] = s * eig.eigenvectors[(j, i)];
        }
    }
    Ok(p)
}

fn triangle_pqr() -> Result<CatalogEntry> {
    let b = cartan_matrix(3, 3, 4);
    let p = lorentz_frame(&b)?;
    let pinv = p.clone().try_inverse().unwrap();
    let gens: Vec<ProjectiveMap> =
        tits_reflections(&b).into_iter().map(|r| ProjectiveMap::new(&p * r * &pinv)).collect::<Result<_>>()?;
    let chart = AffineChart::from_slice(&[0.0, 0.0, 1.0])?;
    let domain = ConvexBody::ellipsoid(&chart, &Vector::from_vec(vec![0.0, 0.0, 1.0]), &Mat::identity(3, 2))?;
    let binv = b.try_inverse().unwrap();
    let base = &p * (-(binv * Vector::from_element(3, 1.0)));
    Ok(CatalogEntry {
        name: "triangle-pqr",
        domain,
        group: MatrixGroup::new(gens, labels(&["a", "b", "c"]))?,
        base_point: ProjectivePoint::new(base)?,
        truth: Truth {
            core: "the whole domain (the Klein disc)",
            rank_one: "every infinite-order element",
            summary: "Tits representation of the (3,3,4) triangle reflection group, in a frame where the domain is the unit disc",
        },
    })
}

/// Symmetric square of an element of SL(2, R), in the basis (X², XY, Y²).
pub fn sym2(m: &Mat) -> Mat {
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    Mat::from_row_slice(3, 3, &[a * a, 2.0 * a * b, b * b, a * c, a * d + b * c, b * d, c * c, 2.0 * c * d, d * d])
}

/// Order-3 generators of the (3,3,4) rotation triangle group in SL(2, R),
/// conjugated so that x y⁻¹ is diagonal and i is the point of its axis
/// equidistant from the fixed points of x and y.
pub fn fuchsian_generators() -> (Mat, Mat) {
    let rot = |t: f64| Mat::from_row_slice(2, 2, &[(t / 2.0).cos(), (t / 2.0).sin(), -(t / 2.0).sin(), (t / 2.0).cos()]);
    let (a, g) = (PI / 3.0, PI / 4.0);
    let cosh_c = (g.cos() + a.cos() * a.cos()) / (a.sin() * a.sin());
    let c = cosh_c.acosh();
    let s = Mat::from_row_slice(2, 2, &[(c / 2.0).exp(), 0.0, 0.0, (-c / 2.0).exp()]);
    let sinv = s.clone().try_inverse().unwrap();
    let x = rot(2.0 * a);
    let mut y = &s * rot(2.0 * a) * &sinv;
    if ((&x * &y).trace().abs() - 2f64.sqrt()).abs() > 1e-9 {
        y = &s * rot(-2.0 * a) * &sinv;
    }
    let h = &x * y.clone().try_inverse().unwrap();
    // diagonalize h: columns are its eigenvectors
    let tr = h.trace();
    let disc = (tr * tr - 4.0).sqrt();
    let (l1, l2) = ((tr + disc) / 2.0, (tr - disc) / 2.0);
    let col = |l: f64| {
        let v = if h[(0, 1)].abs() > 1e-12 { [h[(0, 1)], l - h[(0, 0)]] } else { [l - h[(1, 1)], h[(1, 0)]] };
        let n = v[0].hypot(v[1]);
        [v[0] / n, v[1] / n]
    };
    let (v1, v2) = (col(l1), col(l2));
    let mut q = Mat::from_row_slice(2, 2, &[v1[0], v2[0], v1[1], v2[1]]);
    let det = q.determinant();
    q /= det.abs().sqrt();
    if det < 0.0 {
        q.column_mut(1).neg_mut();
    }
    let qinv = q.clone().try_inverse().unwrap();
    let (x, y) = (&qinv * x * &q, &qinv * y * &q);
    // |fix|² = -b/c for an elliptic [[a, b], [c, d]]; z ↦ eˢz sends |fix x|·|fix y| to 1
    let r2 = |m: &Mat| -m[(0, 1)] / m[(1, 0)];
    let s = -0.25 * (r2(&x) * r2(&y)).ln();
    let c = Mat::from_row_slice(2, 2, &[(s / 2.0).exp(), 0.0, 0.0, (-s / 2.0).exp()]);
    let cinv = Mat::from_row_slice(2, 2, &[(-s / 2.0).exp(), 0.0, 0.0, (s / 2.0).exp()]);
    (&c * x * &cinv, &c * y * &cinv)
}

fn conic_quadric() -> Mat {
    Mat::from_row_slice(3, 3, &[0.0, 0.0, -0.5, 0.0, 1.0, 0.0, -0.5, 0.0, 0.0])
}

fn sym2_fuchsian() -> Result<CatalogEntry> {
    let (x, y) = fuchsian_generators();
    let gens = vec![ProjectiveMap::new(sym2(&x))?, ProjectiveMap::new(sym2(&y))?];
    let s = 0.5f64.sqrt();
    let chart = AffineChart::from_slice(&[s, 0.0, s])?;
    let domain = ConvexBody::from_quadric(&chart, &conic_quadric(), None)?;
    Ok(CatalogEntry {
        name: "sym2-fuchsian",
        domain,
        group: MatrixGroup::new(gens, labels(&["x", "y"]))?,
        base_point: ProjectivePoint::from_slice(&[1.0, 0.0, 1.0])?,
        truth: Truth {
            core: "the whole domain bounded by the Veronese conic",
            rank_one: "every infinite-order element",
            summary: "symmetric square of the (3,3,4) rotation triangle group; Anosov with boundary the conic v2^2 = v1 v3",
        },
    })
}

fn block(a: f64, m: &Mat) -> Mat {
    let mut out = Mat::zeros(4, 4);
    out[(0, 0)] = a;
    out.view_mut((1, 1), (3, 3)).copy_from(m);
    out
}

/// The conic disc in P(span(e2, e3, e4)), in the cone's chart.
pub fn cone_base(chart: &AffineChart) -> Result<ConvexBody> {
    let mut q = Mat::zeros(4, 4);
    q.view_mut((1, 1), (3, 3)).copy_from(&conic_quadric());
    let span = crate::projlin::Subspace::span(&[
        Vector::from_vec(vec![0.0, 1.0, 0.0, 0.0]),
        Vector::from_vec(vec![0.0, 0.0, 1.0, 0.0]),
        Vector::from_vec(vec![0.0, 0.0, 0.0, 1.0]),
    ])?;
    ConvexBody::from_quadric(chart, &q, Some(&span))
}

fn cone_fuchsian() -> Result<CatalogEntry> {
    let (x, y) = fuchsian_generators();
    let gens = vec![
        ProjectiveMap::diag(&[2.0, 1.0, 1.0, 1.0])?,
        ProjectiveMap::new(block(1.0, &sym2(&x)))?,
        ProjectiveMap::new(block(1.0, &sym2(&y)))?,
    ];
    let chart = AffineChart::from_slice(&[1.0, 1.0, 0.0, 1.0])?;
    let base = cone_base(&chart)?;
    let domain = cone_over_base(&ProjectivePoint::basis(4, 0), &base)?;
    Ok(CatalogEntry {
        name: "cone-fuchsian",
        domain,
        group: MatrixGroup::new(gens, labels(&["z", "x", "y"]))?,
        base_point: ProjectivePoint::from_slice(&[1.0, 1.0, 0.0, 1.0])?,
        truth: Truth {
            core: "the cone with apex e1 over the conic disc",
            rank_one: "none: the centre direction e1 is fixed by everything",
            summary: "Z x Fuchsian block group [diag(2,1,1,1)], [1 + Sym2(x)], [1 + Sym2(y)] in P(R^4)",
        },
    })
}
