//! Hilbert geodesic flow on T¹Ω.
//!
//! A unit tangent vector is stored as its two boundary endpoints (chart
//! normalized lifts â, b̂) and a parameter s > 0; the base point is
//! [â + s b̂]. Along the geodesic d([â + s b̂], [â + s' b̂]) = ½|log s'/s|, so
//! the flow is exact: φ_t adds 2t to log s.

use rayon::prelude::*;

use crate::domain::{AffineChart, ConvexBody, Mode};
use crate::error::{Error, Result};
use crate::group::{is_rank_one, MatrixGroup};
use crate::projlin::{classify_proximal, eigenvalue_moduli, ProjectiveMap, ProjectivePoint, Vector, DEFAULT_GAP_TOL};

// beyond this the base point is indistinguishable from an endpoint
const MAX_LOG_S: f64 = 27.6;

#[derive(Clone, Debug)]
pub struct UnitTangent {
    chart: AffineChart,
    backward: Vector,
    forward: Vector,
    log_s: f64,
}

impl UnitTangent {
    /// The vector on (backward, forward) based at the chart midpoint.
    pub fn from_endpoints(omega: &ConvexBody, backward: &ProjectivePoint, forward: &ProjectivePoint) -> Result<Self> {
        let a = omega.chart_point(backward)?;
        let b = omega.chart_point(forward)?;
        for x in [&a, &b] {
            if !omega.on_boundary(x, 1e-8) {
                return Err(Error::Precondition("endpoints must lie on the boundary".into()));
            }
        }
        let mid = (&a + &b) * 0.5;
        if !omega.contains_vec(&mid, Mode::Open, 0.0) {
            return Err(Error::Precondition("the open segment between the endpoints is not in the domain".into()));
        }
        Ok(Self { chart: omega.chart().clone(), backward: a, forward: b, log_s: 0.0 })
    }

    /// The vector based at x pointing toward y.
    pub fn through(omega: &ConvexBody, x: &ProjectivePoint, y: &ProjectivePoint) -> Result<Self> {
        let xh = omega.chart_point(x)?;
        let (a, b) = omega.chord(&xh, &omega.chart_point(y)?)?;
        let s = (&xh - &a).norm() / (&b - &xh).norm();
        Ok(Self { chart: omega.chart().clone(), backward: a, forward: b, log_s: s.ln() })
    }

    pub fn with_log_s(&self, log_s: f64) -> Self {
        Self { log_s, ..self.clone() }
    }

    pub fn log_s(&self) -> f64 {
        self.log_s
    }

    pub fn chart(&self) -> &AffineChart {
        &self.chart
    }

    pub fn backward(&self) -> ProjectivePoint {
        ProjectivePoint::new(self.backward.clone()).expect("chart points are nonzero")
    }

    pub fn forward(&self) -> ProjectivePoint {
        ProjectivePoint::new(self.forward.clone()).expect("chart points are nonzero")
    }

    pub fn backward_chart(&self) -> &Vector {
        &self.backward
    }

    pub fn forward_chart(&self) -> &Vector {
        &self.forward
    }

    /// Chart point of the base; a range error once it is numerically on the boundary.
    pub fn base_chart(&self) -> Result<Vector> {
        if self.log_s.abs() > MAX_LOG_S {
            return Err(Error::Range { achieved: 0.5 * self.log_s });
        }
        let s = self.log_s.exp();
        let u = s / (1.0 + s);
        Ok(&self.backward + (&self.forward - &self.backward) * u)
    }

    pub fn base(&self) -> Result<ProjectivePoint> {
        ProjectivePoint::new(self.base_chart()?)
    }

    /// φ_t.
    pub fn flowed(&self, t: f64) -> Self {
        self.with_log_s(self.log_s + 2.0 * t)
    }

    /// g·v; endpoints are mapped exactly and the base follows g.
    pub fn transform(&self, g: &ProjectiveMap) -> Result<Self> {
        let (ga, gb) = (g.apply_vec(&self.backward), g.apply_vec(&self.forward));
        let (al, be) = (self.chart.covector().dot(&ga), self.chart.covector().dot(&gb));
        if !(al * be > 0.0) {
            return Err(Error::NotAutomorphism("image geodesic leaves the chart".into()));
        }
        Ok(Self { chart: self.chart.clone(), backward: ga / al, forward: gb / be, log_s: self.log_s + (be / al).ln() })
    }

    /// Hilbert distance to another base on the same geodesic.
    pub fn distance_along(&self, other: &Self) -> f64 {
        0.5 * (self.log_s - other.log_s).abs()
    }
}

/// φ_t(v). Fails only when t is not finite.
pub fn flow(v: &UnitTangent, t: f64) -> Result<UnitTangent> {
    if !t.is_finite() {
        return Err(Error::Range { achieved: 0.0 });
    }
    Ok(v.flowed(t))
}

/// Both endpoints of v lie on the boundary of the core, within 1e-6.
pub fn in_invariant_set(v: &UnitTangent, core: &ConvexBody) -> Result<bool> {
    for x in [v.backward_chart(), v.forward_chart()] {
        let y = core.chart().normalize(x)?;
        if !(core.contains_vec(&y, Mode::Closed, 1e-6) && core.depth(&y) <= 1e-6) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// Profile of d(σ(t), ℓ(t)) for t = 0, 1, …, T, where σ runs from w to g⁺ and
/// ℓ is the axis (g⁻, g⁺) with a synchronizing offset fitted at t = T/2.
pub fn axis_shadowing_error(omega: &ConvexBody, g: &ProjectiveMap, w: &ProjectivePoint, t_max: usize) -> Result<Vec<(f64, f64)>> {
    let r = is_rank_one(g, omega)?;
    if !r.rank_one {
        return Err(Error::Precondition("g is not a rank-one automorphism".into()));
    }
    let (gp, gm) = (r.attracting.unwrap(), r.repelling.unwrap());
    if w.approx_eq(&gp) {
        return Err(Error::Precondition("w must differ from g⁺".into()));
    }
    let chart = omega.chart();
    let (gp, gm) = (chart.chart_point(&gp)?, chart.chart_point(&gm)?);
    let wh = chart.chart_point(w)?;
    if !omega.on_boundary(&wh, 1e-8) {
        return Err(Error::Precondition("w must lie on the boundary".into()));
    }
    let lam_p = g.apply_vec(&gp).dot(&gp) / gp.norm_squared();
    let lam_m = g.apply_vec(&gm).dot(&gm) / gm.norm_squared();
    let tau_g = 0.5 * (lam_p / lam_m).abs().ln();
    let ginv = g.inverse();
    // w_n = λ₋ⁿ g⁻ⁿ ŵ, kept bounded
    let n_max = ((t_max as f64 + 60.0) / tau_g).ceil() as usize + 2;
    let mut wn = vec![wh.clone()];
    for _ in 0..n_max {
        let next = ginv.apply_vec(wn.last().unwrap()) * lam_m;
        wn.push(next);
    }
    let sigma = |t: f64| -> Vector {
        let n = ((t / tau_g).floor().max(0.0) as usize).min(n_max);
        let c = (2.0 * t - 2.0 * n as f64 * tau_g).exp();
        chart.normalize(&(&wn[n] + &gp * c)).unwrap_or_else(|_| gp.clone())
    };
    let ell = |t: f64, tau: f64| -> Vector {
        let n = ((t / tau_g).floor().max(0.0) as usize).min(n_max);
        let e = 2.0 * (t + tau - n as f64 * tau_g);
        let u = 1.0 / (1.0 + (-e).exp());
        &gm + (&gp - &gm) * u
    };
    let dist = |x: &Vector, y: &Vector| omega.distance_vec(x, y).unwrap_or(f64::INFINITY);
    let t0 = 0.5 * t_max as f64;
    let s0 = sigma(t0);
    let tau = golden_min(|tau| dist(&s0, &ell(t0, tau)), -40.0, 40.0, 1e-12);
    Ok((0..=t_max).map(|t| (t as f64, dist(&sigma(t as f64), &ell(t as f64, tau)))).collect())
}

/// Open set of unit tangent vectors: endpoints within `radius` (chart distance)
/// of the given ones and base within `base_radius` (Hilbert) of the chart
/// midpoint of their geodesic.
#[derive(Clone, Debug)]
pub struct EndpointBox {
    pub backward: ProjectivePoint,
    pub forward: ProjectivePoint,
    pub radius: f64,
    pub base_radius: f64,
}

impl EndpointBox {
    pub fn anchor(&self, omega: &ConvexBody) -> Result<UnitTangent> {
        UnitTangent::from_endpoints(omega, &self.backward, &self.forward)
    }

    pub fn contains(&self, omega: &ConvexBody, v: &UnitTangent) -> Result<bool> {
        let a = self.anchor(omega)?;
        let near = (v.backward_chart() - a.backward_chart()).norm() <= self.radius
            && (v.forward_chart() - a.forward_chart()).norm() <= self.radius;
        if !near {
            return Ok(false);
        }
        let d = omega.distance_vec(&v.base_chart()?, &a.base_chart()?)?;
        Ok(d <= self.base_radius)
    }
}

#[derive(Clone, Debug)]
pub struct TransitivityWitness {
    pub word: Vec<u16>,
    pub element: ProjectiveMap,
    pub t: f64,
    pub u: UnitTangent,
    pub image: UnitTangent,
}

#[derive(Clone, Debug)]
pub enum TransitivityOutcome {
    Witness(TransitivityWitness),
    Exhausted { examined: usize },
}

/// Maximum |t| searched for a connecting flow time.
pub const MAX_FLOW_TIME: f64 = 30.0;

// Boundary point in direction θ around the origin, for 2-dimensional bodies.
fn boundary_at(omega: &ConvexBody, th: f64) -> Option<Vector> {
    let t = omega.tangent();
    let u = t.column(0) * th.cos() + t.column(1) * th.sin();
    let s = omega.exit(omega.origin(), &u).ok()?;
    Some(omega.origin() + u * s)
}

fn angle_of(omega: &ConvexBody, x: &Vector) -> f64 {
    let t = omega.tangent();
    let d = x - omega.origin();
    d.dot(&t.column(1)).atan2(d.dot(&t.column(0)))
}

fn wrap(a: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    a - tau * (a / tau).floor()
}

/// Arc (start, length) of boundary points within chart distance r of x.
fn box_arc(omega: &ConvexBody, x: &Vector, r: f64) -> Option<(f64, f64)> {
    let th = angle_of(omega, x);
    let side = |sgn: f64| -> Option<f64> {
        let (mut lo, mut hi) = (0.0, std::f64::consts::PI);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let p = boundary_at(omega, th + sgn * mid)?;
            if (&p - x).norm() <= r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(lo)
    };
    let (a, b) = (side(-1.0)?, side(1.0)?);
    Some((wrap(th - a), a + b))
}

fn arc_image(omega: &ConvexBody, g: &ProjectiveMap, arc: (f64, f64)) -> Option<(f64, f64)> {
    let img = |th: f64| -> Option<f64> {
        let p = boundary_at(omega, th)?;
        let q = omega.chart().normalize(&g.apply_vec(&p)).ok()?;
        Some(wrap(angle_of(omega, &q)))
    };
    let (a, m, b) = (img(arc.0)?, img(arc.0 + 0.5 * arc.1)?, img(arc.0 + arc.1)?);
    let ccw = wrap(m - a) <= wrap(b - a);
    Some(if ccw { (a, wrap(b - a)) } else { (b, wrap(a - b)) })
}

fn arc_intersection(x: (f64, f64), y: (f64, f64)) -> Option<(f64, f64)> {
    // try y's start inside x, then x's start inside y
    let off = wrap(y.0 - x.0);
    if off <= x.1 {
        return Some((y.0, (x.1 - off).min(y.1)));
    }
    let off = wrap(x.0 - y.0);
    if off <= y.1 {
        return Some((x.0, (y.1 - off).min(x.1)));
    }
    None
}

/// Closest base on v's geodesic to a target chart point: (log s, distance).
fn closest_base(omega: &ConvexBody, v: &UnitTangent, target: &Vector) -> (f64, f64) {
    let f = |ls: f64| {
        v.with_log_s(ls).base_chart().ok().and_then(|b| omega.distance_vec(&b, target).ok()).unwrap_or(f64::INFINITY)
    };
    let ls = golden_min(f, -MAX_LOG_S, MAX_LOG_S, 1e-10);
    (ls, f(ls))
}

/// Searches g ∈ ball(L) and t with g·φ_t(u) ∈ V for some u ∈ U.
pub fn transitivity_experiment(
    grp: &MatrixGroup,
    omega: &ConvexBody,
    core: &ConvexBody,
    u_box: &EndpointBox,
    v_box: &EndpointBox,
    l: usize,
) -> Result<TransitivityOutcome> {
    let (ua, va) = (u_box.anchor(omega)?, v_box.anchor(omega)?);
    for v in [&ua, &va] {
        if !in_invariant_set(v, core)? {
            return Err(Error::Precondition("box endpoints must lie on the boundary of the core".into()));
        }
    }
    let ball = grp.ball(l)?;
    let v_anchor = va.base_chart()?;
    let u_anchor = ua.base_chart()?;
    let try_element = |i: usize| -> Option<TransitivityWitness> {
        let g = ball.element(i);
        let pairs: Vec<(Vector, Vector)> = if omega.body_dim() == 2 {
            let mut ends = Vec::with_capacity(2);
            for (ub, vb) in [(ua.backward_chart(), va.backward_chart()), (ua.forward_chart(), va.forward_chart())] {
                let src = box_arc(omega, ub, u_box.radius)?;
                let dst = box_arc(omega, vb, v_box.radius)?;
                let hit = arc_intersection(arc_image(omega, g, src)?, dst)?;
                // pull the middle of the overlap back by g
                let q = boundary_at(omega, hit.0 + 0.5 * hit.1)?;
                let p = omega.chart().normalize(&g.inverse().apply_vec(&q)).ok()?;
                ends.push(p);
            }
            vec![(ends[0].clone(), ends[1].clone())]
        } else {
            sampled_pairs(omega, &ua, u_box.radius)
        };
        for (a, b) in pairs {
            let u0 = UnitTangent::from_endpoints(omega, &omega.to_point(&a), &omega.to_point(&b)).ok()?;
            let (ls, d) = closest_base(omega, &u0, &u_anchor);
            if d > u_box.base_radius {
                continue;
            }
            let u = u0.with_log_s(ls);
            if !u_box.contains(omega, &u).ok()? {
                continue;
            }
            let gu = u.transform(g).ok()?;
            let t = if v_box.contains(omega, &gu).ok()? {
                0.0
            } else {
                let (ls2, _) = closest_base(omega, &gu, &v_anchor);
                0.5 * (ls2 - gu.log_s())
            };
            if t.abs() > MAX_FLOW_TIME {
                continue;
            }
            let image = gu.flowed(t);
            if v_box.contains(omega, &image).ok()? {
                return Some(TransitivityWitness { word: ball.word(i).to_vec(), element: g.clone(), t, u, image });
            }
        }
        None
    };
    // first witness in ball order wins
    let found = (0..ball.len()).into_par_iter().find_map_first(try_element);
    Ok(match found {
        Some(w) => TransitivityOutcome::Witness(w),
        None => TransitivityOutcome::Exhausted { examined: ball.len() },
    })
}

// Endpoint pairs near the anchor's endpoints, for bodies of dimension > 2.
fn sampled_pairs(omega: &ConvexBody, anchor: &UnitTangent, r: f64) -> Vec<(Vector, Vector)> {
    let dirs = crate::domain::sphere_directions(omega.body_dim(), 24);
    let near = |x: &Vector| -> Vec<Vector> {
        let mut out = vec![x.clone()];
        for z in &dirs {
            let off = omega.tangent() * Vector::from_column_slice(z) * (0.5 * r);
            let u = x + off - omega.origin();
            if let Ok(s) = omega.exit(omega.origin(), &u) {
                let p = omega.origin() + u * s;
                if (&p - x).norm() <= r {
                    out.push(p);
                }
            }
        }
        out
    };
    let (bs, fs) = (near(anchor.backward_chart()), near(anchor.forward_chart()));
    bs.iter().flat_map(|a| fs.iter().map(move |b| (a.clone(), b.clone()))).collect()
}

/// Translation length of a rank-one element, for profile bookkeeping.
pub fn axis_translation(g: &ProjectiveMap) -> Result<f64> {
    let d = classify_proximal(g, DEFAULT_GAP_TOL)?;
    if !d.is_biproximal {
        return Err(Error::Precondition("g is not biproximal".into()));
    }
    let m = eigenvalue_moduli(g)?;
    Ok(0.5 * (m[0] / m[m.len() - 1]).ln())
}
