//! Singular-value gaps, sampled boundary maps and the convex domains they
//! bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::domain::{hausdorff, sphere_directions, AffineChart, ConvexBody, Mode};
use crate::error::{Error, Result};
use crate::group::MatrixGroup;
use crate::projlin::{classify_proximal, singular_values, ProjectiveMap, ProjectivePoint, Subspace, Vector, DEFAULT_GAP_TOL};

pub const SAMPLE_CLUSTER_TOL: f64 = 1e-6;
pub const MIN_CHART_MARGIN: f64 = 1e-4;
const RANDOM_CHART_DIRECTIONS: usize = 10_000;
const CHART_SEED: u64 = 0x5eed_c4a7;

/// log μ_k/μ_{k+1}, 1-based k.
pub fn singular_gap(g: &ProjectiveMap, k: usize) -> f64 {
    let s = singular_values(g);
    (s[k - 1] / s[k]).ln()
}

#[derive(Clone, Debug)]
pub struct GapProfile {
    pub k: usize,
    /// (word length, gap) for every non-identity ball element.
    pub points: Vec<(usize, f64)>,
    /// Minimum gap per word length.
    pub envelope: Vec<(usize, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

fn linear_fit(xy: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_tot: f64 = xy.iter().map(|p| (p.1 - my).powi(2)).sum();
    let ss_res: f64 = xy.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else if ss_res == 0.0 { 1.0 } else { 0.0 };
    (slope, intercept, r2)
}

pub fn gap_profile(g: &MatrixGroup, k: usize, l: usize) -> Result<GapProfile> {
    if k < 1 || k >= g.dim() {
        return Err(Error::Precondition(format!("gap index k = {k} must satisfy 1 <= k < {}", g.dim())));
    }
    let ball = g.ball(l)?;
    let points: Vec<(usize, f64)> = (0..ball.len())
        .into_par_iter()
        .filter(|&i| ball.word_length(i) > 0)
        .map(|i| (ball.word_length(i), singular_gap(ball.element(i), k).max(0.0)))
        .collect();
    if points.is_empty() {
        return Err(Error::Precondition("the ball has no non-identity elements".into()));
    }
    let mut envelope: Vec<(usize, f64)> = Vec::new();
    for &(n, gap) in &points {
        match envelope.iter_mut().find(|e| e.0 == n) {
            Some(e) => e.1 = e.1.min(gap),
            None => envelope.push((n, gap)),
        }
    }
    envelope.sort_by_key(|e| e.0);
    let xy: Vec<(f64, f64)> = envelope.iter().map(|&(n, gap)| (n as f64, gap)).collect();
    let (slope, intercept, r2) = linear_fit(&xy);
    Ok(GapProfile { k, points, envelope, slope, intercept, r2 })
}

#[derive(Clone, Debug)]
pub struct BoundaryMapSample {
    /// (word, attracting line)
    pub lines: Vec<(Vec<u16>, ProjectivePoint)>,
    /// (word, attracting hyperplane), aligned with `lines`
    pub hyperplanes: Vec<(Vec<u16>, Subspace)>,
    pub diagnostic: Option<String>,
}

impl BoundaryMapSample {
    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn points(&self) -> Vec<ProjectivePoint> {
        self.lines.iter().map(|l| l.1.clone()).collect()
    }
}

/// Attracting lines and hyperplanes of the biproximal elements of ball(L).
pub fn boundary_map_sample(g: &MatrixGroup, l: usize) -> Result<BoundaryMapSample> {
    let ball = g.ball(l)?;
    let found: Vec<Option<(ProjectivePoint, Subspace)>> = (0..ball.len())
        .into_par_iter()
        .map(|i| {
            let d = classify_proximal(ball.element(i), DEFAULT_GAP_TOL).ok()?;
            if !d.is_biproximal {
                return None;
            }
            Some((d.attracting?, d.attracting_hyperplane?))
        })
        .collect();
    let mut lines: Vec<(Vec<u16>, ProjectivePoint)> = Vec::new();
    let mut hyperplanes = Vec::new();
    let mut lifts: Vec<Vector> = Vec::new();
    for (i, f) in found.into_iter().enumerate() {
        let Some((x, h)) = f else { continue };
        lifts.push(x.dir().clone());
        lines.push((ball.word(i).to_vec(), x));
        hyperplanes.push((ball.word(i).to_vec(), h));
    }
    let kept = crate::group::cluster_signless(&lifts, SAMPLE_CLUSTER_TOL);
    let lines: Vec<_> = kept.iter().map(|&i| lines[i].clone()).collect();
    let hyperplanes: Vec<_> = kept.iter().map(|&i| hyperplanes[i].clone()).collect();
    let diagnostic = lines.is_empty().then(|| format!("no biproximal element within word length {l}"));
    Ok(BoundaryMapSample { lines, hyperplanes, diagnostic })
}

fn unit_normal(h: &Subspace) -> Option<Vector> {
    let c = h.complement()?;
    (c.dim() == 1).then(|| c.basis().column(0).into_owned())
}

#[derive(Clone, Debug)]
pub struct TransversalityReport {
    /// Minimum angle between ξ(x) and ξ*(y) over distinct pairs.
    pub min_angle: f64,
    /// (line index, hyperplane index) attaining it.
    pub argmin: Option<(usize, usize)>,
    pub pairs: usize,
}

pub fn transversality_check(sample: &BoundaryMapSample, pair_tol: f64) -> Result<TransversalityReport> {
    let normals: Vec<Option<Vector>> = sample.hyperplanes.iter().map(|h| unit_normal(&h.1)).collect();
    let n = sample.lines.len();
    let best = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = &sample.lines[i].1;
            let mut best = (f64::INFINITY, None, 0usize);
            for j in 0..n {
                if i == j || x.angle(&sample.lines[j].1) <= pair_tol {
                    continue;
                }
                let Some(nj) = &normals[j] else { continue };
                let a = x.dir().dot(nj).abs().min(1.0).asin();
                best.2 += 1;
                if a < best.0 {
                    best = (a, Some((i, j)), best.2);
                }
            }
            best
        })
        .reduce(|| (f64::INFINITY, None, 0), |a, b| {
            let pairs = a.2 + b.2;
            if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1 && b.1.is_some()) {
                (b.0, b.1, pairs)
            } else {
                (a.0, a.1, pairs)
            }
        });
    Ok(TransversalityReport { min_angle: best.0, argmin: best.1, pairs: best.2 })
}

// min |⟨b, x⟩| over rows of a flat d-column array, abandoned once below `floor`
fn margin(b: &[f64], flat: &[f64], floor: f64) -> f64 {
    let mut m = f64::INFINITY;
    for x in flat.chunks_exact(b.len()) {
        let v = x.iter().zip(b).map(|(p, q)| p * q).sum::<f64>().abs();
        if v < m {
            m = v;
            if m <= floor {
                break;
            }
        }
    }
    m
}

/// A chart in which all sampled lines are bounded, with margin
/// min |⟨b, x⟩| over unit b and unit lifts x.
pub fn chart_boundedness(sample: &BoundaryMapSample) -> Result<(AffineChart, f64)> {
    if sample.is_empty() {
        return Err(Error::Precondition("empty boundary sample".into()));
    }
    let xs: Vec<Vector> = sample.lines.iter().map(|l| l.1.dir().normalize()).collect();
    let d = xs[0].len();
    let mut cands: Vec<Vector> = sample.hyperplanes.iter().filter_map(|h| unit_normal(&h.1)).collect();
    cands.extend(xs.iter().cloned());
    // dominant direction of the second-moment matrix
    let m = xs.iter().fold(crate::projlin::Mat::zeros(d, d), |acc, x| acc + x * x.transpose());
    let eig = m.symmetric_eigen();
    let top = eig.eigenvalues.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|e| e.0).unwrap();
    cands.push(eig.eigenvectors.column(top).into_owned());
    let mut rng = ChaCha8Rng::seed_from_u64(CHART_SEED);
    for _ in 0..RANDOM_CHART_DIRECTIONS {
        let v = Vector::from_fn(d, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        if v.norm() > 1e-3 {
            cands.push(v.normalize());
        }
    }
    let flat: Vec<f64> = xs.iter().flat_map(|x| x.iter().copied()).collect();
    let mut best = cands[0].normalize();
    let mut best_m = margin(best.as_slice(), &flat, f64::NEG_INFINITY);
    for c in &cands[1..] {
        let b = c.normalize();
        let m = margin(b.as_slice(), &flat, best_m);
        if m > best_m {
            best_m = m;
            best = b;
        }
    }
    // coordinate ascent on the margin
    let mut step = 0.1;
    let mut rounds = 0;
    while step > 1e-6 && rounds < 400 {
        rounds += 1;
        let mut improved = false;
        for i in 0..d {
            for s in [step, -step] {
                let mut b = best.clone();
                b[i] += s;
                let b = b.normalize();
                let mb = margin(b.as_slice(), &flat, best_m);
                if mb > best_m {
                    best_m = mb;
                    best = b;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    if best_m < MIN_CHART_MARGIN {
        return Err(Error::NoChart(format!("best chart margin {best_m:.3e} is below {MIN_CHART_MARGIN:.0e}")));
    }
    // orient so that most lifts are positive (cosmetic)
    let pos = xs.iter().filter(|x| best.dot(x) > 0.0).count();
    if 2 * pos < xs.len() {
        best = -best;
    }
    Ok((AffineChart::new(best)?, best_m))
}

#[derive(Clone, Debug)]
pub struct InvariantDomain {
    pub body: ConvexBody,
    /// Hull of the sample points alone.
    pub hull: ConvexBody,
    pub radius: f64,
    /// max over generators of Hausdorff(gΩ, Ω) in the chart.
    pub drift: f64,
}

fn ball_directions(omega: &ConvexBody) -> Vec<Vector> {
    let n = match omega.body_dim() {
        1 => 2,
        2 => 32,
        _ => 64,
    };
    sphere_directions(omega.body_dim(), n).iter().map(|z| omega.tangent() * Vector::from_column_slice(z)).collect()
}

/// Hull of the sample and of the ball(L)-orbit of a small chart ball around p.
pub fn invariant_domain_from_limit(
    g: &MatrixGroup,
    sample: &BoundaryMapSample,
    p: &ProjectivePoint,
    r: Option<f64>,
    l: usize,
) -> Result<InvariantDomain> {
    let (chart, _) = chart_boundedness(sample)?;
    let pts: Vec<Vector> = sample.lines.iter().map(|x| chart.chart_point(&x.1)).collect::<Result<_>>()?;
    let hull = ConvexBody::polytope(&chart, &pts)?;
    let ph = chart.chart_point(p)?;
    if !hull.contains_vec(&ph, Mode::Open, 0.0) {
        return Err(Error::Precondition("p must lie inside the hull of the sample".into()));
    }
    let radius = r.unwrap_or(0.5 * hull.depth(&ph));
    if !(radius > 0.0) {
        return Err(Error::Precondition("ball radius must be positive".into()));
    }
    let ball_pts: Vec<Vector> = ball_directions(&hull).into_iter().map(|u| &ph + u * radius).collect();
    // bounding neighbourhood of the hull
    let diam = pts.iter().map(|x| (x - &ph).norm()).fold(0.0, f64::max);
    let bound = 4.0 * diam + 1.0;
    let ball = g.ball(l)?;
    let orbit: Vec<Result<Vec<Vector>>> = ball
        .elements()
        .par_iter()
        .map(|h| {
            let lifts: Vec<Vector> = ball_pts.iter().map(|x| h.apply_vec(x)).collect();
            let vals: Vec<f64> = lifts.iter().map(|y| chart.covector().dot(y)).collect();
            let same_sign = vals.iter().all(|v| *v > 0.0) || vals.iter().all(|v| *v < 0.0);
            if !same_sign {
                return Err(Error::Instability("an orbit of the ball crosses the chart's hyperplane".into()));
            }
            let out: Vec<Vector> = lifts.iter().zip(&vals).map(|(y, v)| y / *v).collect();
            if out.iter().any(|y| (y - &ph).norm() > bound) {
                return Err(Error::Instability("an orbit of the ball leaves the bounding neighbourhood".into()));
            }
            Ok(out)
        })
        .collect();
    let mut all = pts.clone();
    for o in orbit {
        all.extend(o?);
    }
    let body = ConvexBody::polytope(&chart, &all)?;
    let mut drift: f64 = 0.0;
    for gen in g.generators() {
        let moved = body.transform(gen)?.rechart(&chart)?;
        drift = drift.max(hausdorff(&moved, &body)?);
    }
    Ok(InvariantDomain { body, hull, radius, drift })
}

/// Minimum over sampled hyperplanes of the signed chart separation from the
/// interior grid of `hull`; negative when a hyperplane cuts the interior.
pub fn hyperplane_separation(sample: &BoundaryMapSample, hull: &ConvexBody) -> Result<f64> {
    let chart = hull.chart();
    let b = chart.covector().normalize();
    let per_axis = if hull.body_dim() <= 2 { 24 } else { 10 };
    let grid = hull.interior_grid(per_axis);
    let mut sep = f64::INFINITY;
    for (_, h) in &sample.hyperplanes {
        let Some(n) = unit_normal(h) else { continue };
        let pn = &n - &b * b.dot(&n);
        let scale = pn.norm();
        if scale < 1e-12 {
            // the hyperplane is the chart's own boundary at infinity
            continue;
        }
        let vals: Vec<f64> = grid.iter().map(|x| n.dot(x) / scale).collect();
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let s = if lo > 0.0 {
            lo
        } else if hi < 0.0 {
            -hi
        } else {
            -(hi.min(-lo))
        };
        sep = sep.min(s);
    }
    Ok(sep)
}

/// Triples of consecutive (in angular order about the centroid) chart points
/// of a planar sample that are collinear within `tol`, measured as the
/// distance of the middle point to the outer chord relative to the chord.
/// Points closer than `min_sep` to the previously kept one are skipped.
pub fn collinear_triples(points: &[Vector], chart: &AffineChart, tol: f64, min_sep: f64) -> Result<Vec<[Vector; 3]>> {
    let t = chart.tangent_basis();
    if t.ncols() != 2 {
        return Err(Error::Precondition("collinearity scan needs a planar chart".into()));
    }
    if points.len() < 3 {
        return Ok(Vec::new());
    }
    let c = points.iter().fold(Vector::zeros(chart.dim()), |a, x| a + x) / points.len() as f64;
    let mut order: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let d = x - &c;
            (d.dot(&t.column(1)).atan2(d.dot(&t.column(0))), i)
        })
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut kept: Vec<&Vector> = Vec::new();
    for &(_, i) in &order {
        if kept.last().is_none_or(|y| (*y - &points[i]).norm() >= min_sep) {
            kept.push(&points[i]);
        }
    }
    while kept.len() > 1 && (kept[0] - kept[kept.len() - 1]).norm() < min_sep {
        kept.pop();
    }
    let n = kept.len();
    if n < 3 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for i in 0..n {
        let (x, y, z) = (kept[i], kept[(i + 1) % n], kept[(i + 2) % n]);
        let xz = z - x;
        let h = (y - x).cross(&xz).norm() / xz.norm();
        if h / xz.norm() <= tol {
            out.push([x.clone(), y.clone(), z.clone()]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_of_exact_line() {
        let (s, c, r2) = linear_fit(&[(1.0, 3.0), (2.0, 5.0), (3.0, 7.0)]);
        assert!((s - 2.0).abs() < 1e-14 && (c - 1.0).abs() < 1e-14 && (r2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn line_in_sample_has_no_chart() {
        // the projective line z = 0, sampled finely enough to beat the margin floor
        let lines = (0..40_000)
            .map(|i| {
                let a = i as f64 * std::f64::consts::PI / 40_000.0;
                (vec![], ProjectivePoint::from_slice(&[a.cos(), a.sin(), 0.0]).unwrap())
            })
            .collect();
        let s = BoundaryMapSample { lines, hyperplanes: vec![], diagnostic: None };
        assert!(matches!(chart_boundedness(&s), Err(Error::NoChart(_))));
    }

    #[test]
    fn single_point_chart() {
        let s = BoundaryMapSample {
            lines: vec![(vec![], ProjectivePoint::from_slice(&[1.0, 2.0, 2.0]).unwrap())],
            hyperplanes: vec![],
            diagnostic: None,
        };
        let (_, m) = chart_boundedness(&s).unwrap();
        assert!(m > 0.99);
    }
}
