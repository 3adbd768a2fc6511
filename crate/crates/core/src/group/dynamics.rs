//! Centralizers, translation sets, rank-one elements and edge projections.

use rayon::prelude::*;

use super::limit::LimitSetSample;
use super::MatrixGroup;
use crate::domain::{convex_hull_connected, intersect, ConvexBody, Mode, Shape};
use crate::error::{Error, Result};
use crate::projlin::{
    classify_proximal, eigenvalue_moduli, sequence_limit, svd_sorted, EndomorphismClass, Mat, ProjectiveMap,
    ProjectivePoint, Subspace, Vector, DEFAULT_GAP_TOL,
};

#[derive(Clone, Debug)]
pub struct Component {
    pub space: Subspace,
    /// Eigenvalue of each element of A on this component (unit-determinant lifts).
    pub characters: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct CentralizerSubspace {
    pub v: Subspace,
    pub components: Vec<Component>,
    pub core_slice: ConvexBody,
}

fn commute(a: &ProjectiveMap, b: &ProjectiveMap, tol: f64) -> bool {
    a.compose(b).approx_eq(&b.compose(a), tol)
}

/// Real eigenvalues of m grouped into clusters, with an eigenspace basis each.
fn real_eigenspaces(m: &Mat) -> Result<Vec<(f64, Subspace)>> {
    let d = m.nrows();
    let schur = nalgebra::Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::InvalidMap("eigenvalue iteration did not converge".into()))?;
    let ev = schur.complex_eigenvalues();
    let scale = ev.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut reals: Vec<f64> = ev.iter().filter(|z| z.im.abs() <= 1e-9 * scale).map(|z| z.re).collect();
    reals.sort_by(|a, b| b.total_cmp(a));
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    for r in reals {
        match clusters.last_mut() {
            Some((c, n)) if (*c - r).abs() <= 1e-8 * scale => *n += 1,
            _ => clusters.push((r, 1)),
        }
    }
    let mut out = Vec::new();
    for (lam, mult) in clusters {
        let shifted = m - Mat::identity(d, d) * lam;
        let (_, s, vt) = svd_sorted(&shifted);
        let top = s[0].max(scale);
        let k = s.iter().rev().take(mult).filter(|&&x| x <= 1e-7 * top).count().max(1);
        let vs: Vec<Vector> = (d - k..d).map(|i| vt.row(i).transpose()).collect();
        out.push((lam, Subspace::span(&vs)?));
    }
    Ok(out)
}

/// Span of the A-fixed points in the closed hull of the sample, split by character.
pub fn centralizer_fixed_subspace(
    a: &[ProjectiveMap],
    sample: &LimitSetSample,
    omega: &ConvexBody,
) -> Result<CentralizerSubspace> {
    if a.is_empty() {
        return Err(Error::Precondition("A must be nonempty".into()));
    }
    for (i, x) in a.iter().enumerate() {
        for y in &a[i + 1..] {
            if !commute(x, y, 1e-8) {
                return Err(Error::Precondition("elements of A do not commute".into()));
            }
        }
    }
    let infinite = a.iter().any(|g| {
        eigenvalue_moduli(g).map(|m| m[0] / m[m.len() - 1] > 1.0 + DEFAULT_GAP_TOL).unwrap_or(false)
    });
    if !infinite {
        return Err(Error::Precondition("A has no element of infinite order".into()));
    }
    if sample.is_empty() {
        return Err(Error::Diagnostic("limit-set sample is empty".into()));
    }
    let hull = convex_hull_connected(&sample.points, std::slice::from_ref(omega.chart()))?;
    let d = a[0].dim();
    // a fixed irrational-weight combination separates joint eigenspaces
    let mut m = Mat::zeros(d, d);
    for (i, g) in a.iter().enumerate() {
        m += g.normalized() * (1.0 + (i as f64 + 2.0).sqrt().fract());
    }
    let mut pieces: Vec<Subspace> = Vec::new();
    for (_, e) in real_eigenspaces(&m)? {
        match e.dim() {
            1 => {
                let v = e.basis().column(0).into_owned();
                if let Ok(x) = hull.chart().normalize(&v) {
                    if hull.contains_vec(&x, Mode::Closed, 1e-6) {
                        pieces.push(e);
                    }
                }
            }
            2 => {
                let Some(w) = intersect(&e, hull.span())? else { continue };
                match w.dim() {
                    1 => {
                        if let Ok(x) = hull.chart().normalize(&w.basis().column(0).into_owned()) {
                            if hull.contains_vec(&x, Mode::Closed, 1e-6) {
                                pieces.push(w);
                            }
                        }
                    }
                    _ => {
                        let b = hull.chart().covector();
                        let (w1, w2) = (w.basis().column(0).into_owned(), w.basis().column(1).into_owned());
                        let (p1, p2) = (b.dot(&w1), b.dot(&w2));
                        if p1.hypot(p2) < 1e-12 {
                            continue;
                        }
                        let p = (&w1 * p1 + &w2 * p2) / (p1 * p1 + p2 * p2);
                        let u = (&w1 * (-p2) + &w2 * p1).normalize();
                        match hull.line_interval(&p, &u, 1e-6) {
                            Some((lo, hi)) if hi - lo > 1e-9 => pieces.push(w),
                            Some((lo, hi)) => pieces.push(Subspace::line(&ProjectivePoint::new(&p + &u * (0.5 * (lo + hi)))?)),
                            None => {}
                        }
                    }
                }
            }
            k => {
                return Err(Error::Degenerate(format!("joint eigenspaces of dimension {k} are not supported")));
            }
        }
    }
    if pieces.is_empty() {
        return Err(Error::Diagnostic("no A-fixed point lies in the sampled hull; sample too shallow".into()));
    }
    let mut components = Vec::with_capacity(pieces.len());
    for w in pieces {
        let mut chars = Vec::with_capacity(a.len());
        for g in a {
            let v = w.basis().column(0).into_owned();
            let nu = v.dot(&g.apply_vec(&v));
            for x in w.basis_vectors() {
                let gx = g.apply_vec(&x);
                if (&gx - &x * nu).norm() > 1e-7 * gx.norm().max(nu.abs()) {
                    return Err(Error::Diagnostic("A does not act by scaling on a fixed component".into()));
                }
            }
            chars.push(nu);
        }
        components.push(Component { space: w, characters: chars });
    }
    let all: Vec<Vector> = components.iter().flat_map(|c| c.space.basis_vectors()).collect();
    let v = Subspace::span(&all)?;
    let core_slice = omega.slice(&v)?;
    Ok(CentralizerSubspace { v, components, core_slice })
}

fn check_automorphism(g: &ProjectiveMap, omega: &ConvexBody) -> Result<()> {
    let chart = omega.chart();
    for x in omega.sample_boundary(64) {
        let y = chart.normalize(&g.apply_vec(&x)).map_err(|_| Error::NotAutomorphism("boundary leaves the chart".into()))?;
        if !omega.on_boundary(&y, 1e-7) {
            return Err(Error::NotAutomorphism("a boundary point is not mapped to the boundary".into()));
        }
    }
    let o = chart.normalize(&g.apply_vec(omega.origin()))?;
    if !omega.contains_vec(&o, Mode::Open, 0.0) {
        return Err(Error::NotAutomorphism("the reference point leaves the domain".into()));
    }
    Ok(())
}

/// Minimum of d(x, gx) over an interior grid, with the near-minimizers.
pub fn minimal_translation_sample(g: &ProjectiveMap, omega: &ConvexBody, grid: usize) -> Result<(f64, Vec<ProjectivePoint>)> {
    check_automorphism(g, omega)?;
    let chart = omega.chart();
    let pts = omega.interior_grid(grid);
    let ds: Vec<Option<f64>> = pts
        .par_iter()
        .map(|x| {
            let y = chart.normalize(&g.apply_vec(x)).ok()?;
            omega.distance_vec(x, &y).ok()
        })
        .collect();
    let tau = ds.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    if !tau.is_finite() {
        return Err(Error::Precondition("grid has no interior points".into()));
    }
    let arg = pts
        .iter()
        .zip(&ds)
        .filter(|(_, d)| d.is_some_and(|d| d <= tau + 1e-3))
        .map(|(x, _)| omega.to_point(x))
        .collect();
    Ok((tau, arg))
}

#[derive(Clone, Debug)]
pub struct RankOneReport {
    pub rank_one: bool,
    /// g⁺ and g⁻ when g is biproximal.
    pub attracting: Option<ProjectivePoint>,
    pub repelling: Option<ProjectivePoint>,
}

/// Biproximal with the open axis (g⁻, g⁺) inside Ω.
pub fn is_rank_one(g: &ProjectiveMap, omega: &ConvexBody) -> Result<RankOneReport> {
    let data = classify_proximal(g, DEFAULT_GAP_TOL)?;
    if !data.is_biproximal {
        return Ok(RankOneReport { rank_one: false, attracting: data.attracting, repelling: None });
    }
    let (gp, gm) = (data.attracting.unwrap(), data.repelling.unwrap());
    let chart = omega.chart();
    let inside = match (chart.chart_point(&gp), chart.chart_point(&gm)) {
        (Ok(p), Ok(m)) => (1..=11).all(|k| {
            let t = k as f64 / 12.0;
            omega.contains_vec(&(&m * (1.0 - t) + &p * t), Mode::Open, crate::domain::MEMBERSHIP_TOL)
        }),
        _ => false,
    };
    Ok(RankOneReport { rank_one: inside, attracting: Some(gp), repelling: Some(gm) })
}

#[derive(Clone, Debug)]
pub struct RankOneApprox {
    pub psi: ProjectiveMap,
    /// Words of g and h with ψ = g h⁻¹.
    pub g_word: Vec<u16>,
    pub h_word: Vec<u16>,
    pub attracting: ProjectivePoint,
    pub repelling: ProjectivePoint,
    /// Angles from ψ⁺ to x1 and from ψ⁻ to x2.
    pub err_plus: f64,
    pub err_minus: f64,
}

const NEAREST: usize = 30;
const KEEP: usize = 50;

/// Rank-one elements ψ = g h⁻¹ with ψ⁺ near x1 and ψ⁻ near x2.
pub fn rank_one_approximation(
    x1: &ProjectivePoint,
    x2: &ProjectivePoint,
    g: &MatrixGroup,
    omega: &ConvexBody,
    l: usize,
) -> Result<Vec<RankOneApprox>> {
    if x1.angle(x2) <= 1e-9 {
        return Err(Error::Precondition("x1 = x2: the segment (x1, x2) is empty".into()));
    }
    let (a, b) = (omega.chart_point(x1)?, omega.chart_point(x2)?);
    for x in [&a, &b] {
        if !omega.on_boundary(x, 1e-7) {
            return Err(Error::Precondition("x1 and x2 must lie on the boundary".into()));
        }
    }
    if !(1..=11).all(|k| {
        let t = k as f64 / 12.0;
        omega.contains_vec(&(&a * (1.0 - t) + &b * t), Mode::Open, crate::domain::MEMBERSHIP_TOL)
    }) {
        return Err(Error::Precondition("the open segment (x1, x2) is not inside the domain".into()));
    }
    let ball = g.ball(l)?;
    let p = omega.origin().clone();
    let chart = omega.chart();
    let orbit: Vec<Option<Vector>> =
        ball.elements().par_iter().map(|h| chart.normalize(&h.apply_vec(&p)).ok()).collect();
    let nearest = |target: &Vector| -> Vec<usize> {
        let mut idx: Vec<(f64, usize)> =
            orbit.iter().enumerate().filter_map(|(i, q)| q.as_ref().map(|q| ((q - target).norm(), i))).collect();
        idx.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        idx.into_iter().take(NEAREST).map(|(_, i)| i).collect()
    };
    let (near1, near2) = (nearest(&a), nearest(&b));
    let pairs: Vec<(usize, usize)> = near1.iter().flat_map(|&i| near2.iter().map(move |&j| (i, j))).collect();
    let found: Vec<Option<RankOneApprox>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let psi = ball.element(i).compose(&ball.element(j).inverse());
            let r = is_rank_one(&psi, omega).ok()?;
            if !r.rank_one {
                return None;
            }
            let (gp, gm) = (r.attracting?, r.repelling?);
            Some(RankOneApprox {
                err_plus: gp.angle(x1),
                err_minus: gm.angle(x2),
                attracting: gp,
                repelling: gm,
                psi,
                g_word: ball.word(i).to_vec(),
                h_word: ball.word(j).to_vec(),
            })
        })
        .collect();
    let mut out: Vec<RankOneApprox> = found.into_iter().flatten().collect();
    out.sort_by(|x, y| {
        x.err_plus.max(x.err_minus).total_cmp(&y.err_plus.max(y.err_minus)).then(
            (x.g_word.len() + x.h_word.len()).cmp(&(y.g_word.len() + y.h_word.len())),
        )
    });
    let mut kept: Vec<RankOneApprox> = Vec::new();
    for c in out {
        if !kept.iter().any(|k| k.psi.approx_eq(&c.psi, 1e-9)) {
            kept.push(c);
        }
        if kept.len() == KEEP {
            break;
        }
    }
    if kept.is_empty() {
        return Err(Error::Budget(format!("no rank-one element found within word length {l}")));
    }
    Ok(kept)
}

/// Limit T of powers of a stabilizer element that contracts toward the face
/// opposite `drop_vertex`.
pub fn simplex_edge_projection(s: &ConvexBody, a: &[ProjectiveMap], drop_vertex: usize) -> Result<EndomorphismClass> {
    let Shape::Polytope(poly) = s.shape() else {
        return Err(Error::Precondition("expected a simplex".into()));
    };
    let d = s.dim();
    let verts = &poly.vertices;
    if verts.len() != d || s.body_dim() + 1 != d {
        return Err(Error::Precondition("expected a full-dimensional simplex".into()));
    }
    if drop_vertex >= d {
        return Err(Error::Precondition(format!("vertex index {drop_vertex} out of range")));
    }
    if a.is_empty() {
        return Err(Error::Precondition("A must be nonempty".into()));
    }
    // log-characters at each vertex
    let mut chars: Vec<Vec<f64>> = Vec::with_capacity(a.len());
    for g in a {
        let mut row = Vec::with_capacity(d);
        for v in verts {
            let gv = g.apply_vec(v);
            let vp = ProjectivePoint::new(v.clone())?;
            if ProjectivePoint::new(gv.clone())?.angle(&vp) > 1e-8 {
                return Err(Error::Precondition("A does not fix the vertices of S".into()));
            }
            row.push((gv.dot(v) / v.norm_squared()).abs().ln());
        }
        chars.push(row);
    }
    let k = a.len();
    const MAX_EXP: i64 = 12;
    let mut found: Option<(Vec<i64>, f64)> = None;
    'search: for total in 1..=MAX_EXP * k as i64 {
        for m in exponent_vectors(k, total) {
            let l: Vec<f64> = (0..d).map(|i| (0..k).map(|j| m[j] as f64 * chars[j][i]).sum()).collect();
            let others: Vec<f64> = (0..d).filter(|&i| i != drop_vertex).map(|i| l[i]).collect();
            let hi = others.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = others.iter().copied().fold(f64::INFINITY, f64::min);
            let scale = 1.0 + l.iter().fold(0.0f64, |x, y| x.max(y.abs()));
            let gap = lo - l[drop_vertex];
            if hi - lo <= 1e-9 * scale && gap > 1e-6 {
                found = Some((m, gap));
                break 'search;
            }
        }
    }
    let Some((m, gap)) = found else {
        return Err(Error::Budget("no contracting product found in the exponent budget".into()));
    };
    let c = m.iter().zip(a).fold(ProjectiveMap::identity(d), |acc, (&e, g)| acc.compose(&g.pow(e)));
    let n = ((40.0 / gap).ceil() as usize + 4).min(4000);
    let mut seq = Vec::with_capacity(n);
    let mut cur = c.lift().clone();
    for _ in 0..n {
        seq.push(ProjectiveMap::new(cur.clone())?);
        cur = (c.lift() * cur).normalize();
    }
    let t = sequence_limit(&seq).ok_or_else(|| Error::Budget("power sequence did not converge".into()))?;
    let basis = Mat::from_columns(verts);
    let inv = basis.try_inverse().ok_or_else(|| Error::Degenerate("simplex vertices are dependent".into()))?;
    let samples = s.interior_grid(6);
    for x in samples.iter().take(20) {
        let coeff = &inv * (t.rep() * x);
        let top = coeff.amax();
        let sign = coeff[(drop_vertex + 1) % d].signum();
        let ok = (0..d).all(|i| {
            if i == drop_vertex {
                coeff[i].abs() <= 1e-9 * top
            } else {
                coeff[i] * sign > 1e-9 * top
            }
        });
        if !ok {
            return Err(Error::Diagnostic("limit does not map the simplex onto the opposite open face".into()));
        }
    }
    Ok(t)
}

/// Integer vectors of length k with ℓ¹ norm `total`, in a fixed order.
fn exponent_vectors(k: usize, total: i64) -> Vec<Vec<i64>> {
    fn rec(k: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == k - 1 {
            for v in if left == 0 { vec![0] } else { vec![left, -left] } {
                cur.push(v);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        for a in 0..=left {
            for v in if a == 0 { vec![0] } else { vec![a, -a] } {
                cur.push(v);
                rec(k, left - a, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(k, total, &mut Vec::new(), &mut out);
    out
}
