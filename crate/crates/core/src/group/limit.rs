//! Orbital limit sets, convex cores and orbit-density proxies.

use std::collections::HashMap;

use rayon::prelude::*;

use super::MatrixGroup;
use crate::domain::{convex_hull_connected, ConvexBody, Mode};
use crate::error::{Error, Result};
use crate::projlin::{classify_proximal, ProjectivePoint, Vector, DEFAULT_GAP_TOL};

/// Orbit points closer than this (Hilbert distance from p0) are not projected.
pub const LIMIT_DEPTH: f64 = 5.0;
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-3;

#[derive(Clone, Debug)]
pub struct Witness {
    pub word: Vec<u16>,
    pub base: ProjectivePoint,
    /// Attracting point of the element rather than a radial projection.
    pub exact: bool,
}

#[derive(Clone, Debug)]
pub struct LimitSetSample {
    pub points: Vec<ProjectivePoint>,
    pub witnesses: Vec<Witness>,
    pub radius: usize,
    pub diagnostic: Option<String>,
}

impl LimitSetSample {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Greedy clustering of chart points: a point is kept unless an earlier kept
/// point lies within `tol`.
pub(crate) fn cluster(points: &[Vector], tol: f64) -> Vec<usize> {
    cluster_impl(points, tol, false)
}

/// As `cluster`, for unit lifts of projective points (x and -x coincide).
pub(crate) fn cluster_signless(lifts: &[Vector], tol: f64) -> Vec<usize> {
    let units: Vec<Vector> = lifts.iter().map(|x| x.normalize()).collect();
    cluster_impl(&units, tol, true)
}

fn cluster_impl(points: &[Vector], tol: f64, signless: bool) -> Vec<usize> {
    let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    let mut kept = Vec::new();
    let cell = |p: &Vector| -> Vec<i64> { p.iter().map(|x| (x / tol).floor() as i64).collect() };
    for (i, p) in points.iter().enumerate() {
        let mut near = false;
        let probes: &[f64] = if signless { &[1.0, -1.0] } else { &[1.0] };
        for &sg in probes {
            let q = p * sg;
            let c = cell(&q);
            let d = c.len();
            let mut off = vec![-1i64; d];
            'scan: loop {
                let key: Vec<i64> = c.iter().zip(&off).map(|(a, b)| a + b).collect();
                if let Some(ids) = grid.get(&key) {
                    if ids.iter().any(|&j| (&points[j] - &q).norm() <= tol) {
                        near = true;
                        break 'scan;
                    }
                }
                let mut k = 0;
                loop {
                    if k == d {
                        break 'scan;
                    }
                    off[k] += 1;
                    if off[k] <= 1 {
                        break;
                    }
                    off[k] = -1;
                    k += 1;
                }
            }
            if near {
                break;
            }
        }
        if !near {
            grid.entry(cell(p)).or_default().push(i);
            kept.push(i);
        }
    }
    kept
}

/// Boundary accumulation points of the orbit of p0 under ball(L).
pub fn orbital_limit_set(
    g: &MatrixGroup,
    omega: &ConvexBody,
    p0: &ProjectivePoint,
    l: usize,
    cluster_tol: f64,
) -> Result<LimitSetSample> {
    let p = omega.chart_point(p0)?;
    if !omega.contains_vec(&p, Mode::Open, 0.0) {
        return Err(Error::Precondition("base point must be interior".into()));
    }
    let ball = g.ball(l)?;
    let chart = omega.chart();
    let exact: Vec<Option<Vector>> = (0..ball.len())
        .into_par_iter()
        .map(|i| {
            let data = classify_proximal(ball.element(i), DEFAULT_GAP_TOL).ok()?;
            let x = chart.chart_point(data.attracting.as_ref()?).ok()?;
            (omega.contains_vec(&x, Mode::Closed, 1e-7) && omega.depth(&x) <= 1e-7).then_some(x)
        })
        .collect();
    let radial: Vec<Option<Vector>> = (0..ball.len())
        .into_par_iter()
        .map(|i| {
            let q = chart.normalize(&ball.element(i).apply_vec(&p)).ok()?;
            if omega.distance_vec(&p, &q).ok()? < LIMIT_DEPTH {
                return None;
            }
            let u = &q - &p;
            let s = omega.exit(&p, &u).ok()?;
            Some(&p + u * s)
        })
        .collect();
    let mut pts = Vec::new();
    let mut wit = Vec::new();
    for (set, is_exact) in [(&exact, true), (&radial, false)] {
        for (i, x) in set.iter().enumerate() {
            if let Some(x) = x {
                pts.push(x.clone());
                wit.push(Witness { word: ball.word(i).to_vec(), base: p0.clone(), exact: is_exact });
            }
        }
    }
    let kept = cluster(&pts, cluster_tol);
    let points: Vec<ProjectivePoint> = kept.iter().map(|&i| omega.to_point(&pts[i])).collect();
    let witnesses: Vec<Witness> = kept.iter().map(|&i| wit[i].clone()).collect();
    let diagnostic = points
        .is_empty()
        .then(|| format!("no orbit point escaped beyond Hilbert distance {LIMIT_DEPTH} within word length {l}"));
    Ok(LimitSetSample { points, witnesses, radius: l, diagnostic })
}

/// Hull of the sampled limit set, from the domain's reference point.
pub fn convex_core_approx(g: &MatrixGroup, omega: &ConvexBody, l: usize) -> Result<ConvexBody> {
    let s = orbital_limit_set(g, omega, &omega.reference_point(), l, DEFAULT_CLUSTER_TOL)?;
    if s.is_empty() {
        return Err(Error::Diagnostic(s.diagnostic.unwrap_or_default()));
    }
    convex_hull_connected(&s.points, std::slice::from_ref(omega.chart()))
}

/// Covering radius of the orbit of p0 over core grid points within `depth`
/// of p0. A heuristic proxy for co-compactness, not a certificate.
pub fn cocompactness_radius(
    g: &MatrixGroup,
    omega: &ConvexBody,
    core: &ConvexBody,
    p0: &ProjectivePoint,
    l: usize,
    depth: Option<f64>,
) -> Result<f64> {
    let p = omega.chart_point(p0)?;
    let ball = g.ball(l)?;
    let chart = omega.chart();
    let orbit: Vec<Vector> = ball.elements().par_iter().filter_map(|h| chart.normalize(&h.apply_vec(&p)).ok()).collect();
    let depth = match depth {
        Some(d) => d,
        None => {
            let r = ball.sphere(l);
            let m = r
                .filter(|_| l > 0)
                .filter_map(|i| omega.distance_vec(&p, &chart.normalize(&ball.element(i).apply_vec(&p)).ok()?).ok())
                .fold(f64::INFINITY, f64::min);
            if m.is_finite() && m > 0.0 {
                0.5 * m
            } else {
                3.0
            }
        }
    };
    let core = core.rechart(chart)?;
    let per_axis = match core.body_dim() {
        0 | 1 => 200,
        2 => 40,
        _ => 14,
    };
    let pts: Vec<Vector> = core
        .interior_grid(per_axis)
        .into_iter()
        .filter(|x| omega.distance_vec(&p, x).is_ok_and(|d| d <= depth))
        .collect();
    let r = pts
        .par_iter()
        .map(|x| orbit.iter().filter_map(|y| omega.distance_vec(x, y).ok()).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max);
    Ok(r)
}

/// Directed chart Hausdorff distance from a boundary sample of the core to
/// the orbit of x0.
pub fn boundary_orbit_density(
    g: &MatrixGroup,
    omega: &ConvexBody,
    core: &ConvexBody,
    x0: &ProjectivePoint,
    l: usize,
) -> Result<f64> {
    let core = core.rechart(omega.chart())?;
    let x = core.chart_point(x0)?;
    if !core.contains_vec(&x, Mode::Closed, 1e-6) || core.depth(&x) > 1e-6 {
        return Err(Error::Precondition("x0 must lie on the boundary of the core".into()));
    }
    let ball = g.ball(l)?;
    let chart = core.chart();
    let orbit: Vec<Vector> = ball.elements().par_iter().filter_map(|h| chart.normalize(&h.apply_vec(&x)).ok()).collect();
    let n = match core.body_dim() {
        0 | 1 => 2,
        2 => 1024,
        _ => 4096,
    };
    let samples = core.sample_boundary(n);
    let eps = samples
        .par_iter()
        .map(|s| orbit.iter().map(|y| (y - s).norm()).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max);
    Ok(eps)
}
