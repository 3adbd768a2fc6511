//! Properly convex bodies in an affine chart and their Hilbert geometry.

pub(crate) mod hull;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::projlin::{svd_sorted, Mat, ProjectiveMap, ProjectivePoint, Subspace, Vector};

/// Default slack for membership queries.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Open,
    Closed,
}

/// The chart {x : <b,x> ≠ 0}, with chart points normalized to <b,x̂> = 1.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineChart {
    b: Vector,
}

impl AffineChart {
    pub fn new(b: Vector) -> Result<Self> {
        let n = b.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Degenerate("chart covector must be finite and nonzero".into()));
        }
        Ok(Self { b: b / n })
    }

    pub fn from_slice(b: &[f64]) -> Result<Self> {
        Self::new(Vector::from_column_slice(b))
    }

    pub fn covector(&self) -> &Vector {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn normalize(&self, x: &Vector) -> Result<Vector> {
        let p = self.b.dot(x);
        if !(p.abs() > 1e-12 * x.norm()) {
            return Err(Error::Chart(format!("pairing with chart covector is {p:e}")));
        }
        Ok(x / p)
    }

    pub fn chart_point(&self, x: &ProjectivePoint) -> Result<Vector> {
        self.normalize(x.dir())
    }

    /// Orthonormal basis of b⊥, built from the standard basis in order
    /// (skipping the dominant coordinate of b).
    pub fn tangent_basis(&self) -> Mat {
        let d = self.dim();
        let skip = (0..d).max_by(|&i, &j| self.b[i].abs().total_cmp(&self.b[j].abs())).unwrap();
        let mut cols: Vec<Vector> = vec![self.b.clone()];
        for i in (0..d).filter(|&i| i != skip) {
            let mut v = Vector::zeros(d);
            v[i] = 1.0;
            for c in &cols {
                let a = c.dot(&v);
                v -= c * a;
            }
            cols.push(v.normalize());
        }
        Mat::from_columns(&cols[1..])
    }

    /// Chart coordinates (d−1 numbers) of a chart point.
    pub fn coords(&self, xhat: &Vector) -> Vec<f64> {
        (self.tangent_basis().transpose() * (xhat - &self.b)).iter().copied().collect()
    }

    pub fn from_coords(&self, y: &[f64]) -> Result<Vector> {
        if y.len() + 1 != self.dim() {
            return Err(Error::Parse(format!("expected {} chart coordinates, got {}", self.dim() - 1, y.len())));
        }
        Ok(&self.b + self.tangent_basis() * Vector::from_column_slice(y))
    }
}

/// Homogeneous constraint, nonnegative on the body.
#[derive(Clone, Debug)]
pub(crate) enum Constraint {
    /// w·x ≥ 0, scaled so the value at chart points is a chart distance.
    Linear(Vector),
    /// xᵀMx ≤ 0.
    Quadric(Mat),
}

impl Constraint {
    fn value(&self, x: &Vector) -> f64 {
        match self {
            Constraint::Linear(w) => w.dot(x),
            Constraint::Quadric(m) => -(x.dot(&(m * x))),
        }
    }

    /// Smallest s > 0 where the constraint fails along p + s u.
    fn exit(&self, p: &Vector, u: &Vector) -> Option<f64> {
        match self {
            Constraint::Linear(w) => {
                let (wp, wu) = (w.dot(p), w.dot(u));
                (wu < 0.0).then(|| -wp / wu)
            }
            Constraint::Quadric(m) => {
                let mu = m * u;
                let a = u.dot(&mu);
                let b = p.dot(&mu);
                let c = p.dot(&(m * p));
                smallest_positive_root(a, b, c)
            }
        }
    }

    fn depth(&self, x: &Vector, tangent: &Mat) -> f64 {
        match self {
            Constraint::Linear(w) => w.dot(x),
            Constraint::Quadric(m) => {
                let mx = m * x;
                let f = x.dot(&mx);
                let g = 2.0 * (tangent.transpose() * mx).norm();
                if g > 0.0 {
                    -f / g
                } else if f < 0.0 {
                    f64::INFINITY
                } else {
                    -f64::INFINITY
                }
            }
        }
    }
}

/// Smallest positive root of a s² + 2 b s + c, given c < 0.
fn smallest_positive_root(a: f64, b: f64, c: f64) -> Option<f64> {
    if a == 0.0 {
        return (b > 0.0).then(|| -c / (2.0 * b));
    }
    let disc = b * b - a * c;
    if disc < 0.0 {
        return None;
    }
    let q = if b >= 0.0 { -(b + disc.sqrt()) } else { -(b - disc.sqrt()) };
    let mut best: Option<f64> = None;
    for r in [q / a, if q != 0.0 { c / q } else { f64::NAN }] {
        if r > 0.0 && r.is_finite() {
            best = Some(best.map_or(r, |x: f64| x.min(r)));
        }
    }
    best
}

#[derive(Clone, Debug)]
pub struct Facet {
    /// Homogeneous functional, nonnegative on the polytope.
    pub normal: Vector,
    /// Indices of incident vertices.
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Polytope {
    /// Chart points.
    pub vertices: Vec<Vector>,
    pub facets: Vec<Facet>,
}

#[derive(Clone, Debug)]
pub struct Ellipsoid {
    /// Chart point.
    pub center: Vector,
    /// d×k semi-axes, tangent to the chart: the body is {c + A z : |z| < 1}.
    pub axes: Mat,
}

impl Ellipsoid {
    /// Quadratic form P with (x̂−c)ᵀP(x̂−c) < 1 on the body.
    pub fn quadratic(&self) -> Mat {
        let pinv = pseudo_inverse(&self.axes);
        pinv.transpose() * pinv
    }
}

#[derive(Clone, Debug)]
pub struct Cone {
    pub apex: Vector,
    pub base: Box<ConvexBody>,
    // φ(apex) = 1 and φ vanishes on the base span
    phi: Vector,
}

#[derive(Clone, Debug)]
pub enum Shape {
    Polytope(Polytope),
    Ellipsoid(Ellipsoid),
    Cone(Cone),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceKind {
    Interior,
    Vertex,
    OpenFace,
}

#[derive(Clone, Debug)]
pub struct FaceDescriptor {
    pub kind: FaceKind,
    pub span: Subspace,
    pub sample: ProjectivePoint,
}

#[derive(Clone, Debug)]
pub struct ConvexBody {
    chart: AffineChart,
    span: Subspace,
    // orthonormal basis of span ∩ b⊥
    tangent: Mat,
    origin: Vector,
    constraints: Vec<Constraint>,
    shape: Shape,
}

fn pseudo_inverse(a: &Mat) -> Mat {
    let ata = a.transpose() * a;
    ata.try_inverse().expect("axes have full rank") * a.transpose()
}

fn tangent_of(chart: &AffineChart, span: &Subspace) -> Result<Mat> {
    let bs = span.project(chart.covector());
    if bs.norm() < 1e-12 {
        return Err(Error::Chart("span lies in the hyperplane at infinity".into()));
    }
    let q = span.basis();
    let m = span.dim();
    if m == 1 {
        return Ok(Mat::zeros(chart.dim(), 0));
    }
    let c = q.transpose() * &bs;
    let comp = Subspace::kernel_of_covector(&c)?;
    Ok(q * comp.basis())
}

impl ConvexBody {
    fn assemble(chart: AffineChart, span: Subspace, origin: Vector, constraints: Vec<Constraint>, shape: Shape) -> Result<Self> {
        let tangent = tangent_of(&chart, &span)?;
        let constraints = constraints
            .into_iter()
            .map(|c| match c {
                Constraint::Linear(w) => {
                    let s = (tangent.transpose() * &w).norm();
                    Constraint::Linear(if s > 0.0 { w / s } else { w })
                }
                q => q,
            })
            .collect();
        Ok(Self { chart, span, tangent, origin, constraints, shape })
    }

    /// Relative interior of the convex hull of the given points in `chart`.
    pub fn polytope(chart: &AffineChart, points: &[Vector]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Degenerate("polytope needs at least one point".into()));
        }
        let pts: Vec<Vector> = points.iter().map(|p| chart.normalize(p)).collect::<Result<_>>()?;
        let n = pts.len() as f64;
        let o = pts.iter().fold(Vector::zeros(chart.dim()), |a, p| a + p) / n;
        let diffs: Vec<Vector> = pts.iter().map(|p| p - &o).collect();
        let scale = diffs.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let e = if scale > 0.0 {
            let m = Mat::from_columns(&diffs);
            let (u, s, _) = svd_sorted(&m);
            let k = s.iter().filter(|&&x| x > 1e-10 * scale * n.sqrt()).count();
            Mat::from_columns(&(0..k).map(|i| u.column(i).into_owned()).collect::<Vec<_>>())
        } else {
            Mat::zeros(chart.dim(), 0)
        };
        let k = e.ncols();
        let local: Vec<Vec<f64>> = diffs.iter().map(|v| (e.transpose() * v).iter().copied().collect()).collect();
        let lh = hull::hull_local(&local, k, scale.max(1e-300))?;
        let vertices: Vec<Vector> = lh.vertices.iter().map(|&i| pts[i].clone()).collect();
        let b = chart.covector();
        let mut facets = Vec::with_capacity(lh.facets.len());
        let mut constraints = Vec::with_capacity(lh.facets.len());
        for f in &lh.facets {
            let en = &e * Vector::from_column_slice(&f.normal);
            let w = b * (f.offset + en.dot(&o)) - en;
            let inc: Vec<usize> = (0..vertices.len()).filter(|&j| w.dot(&vertices[j]).abs() <= 1e-9 * (1.0 + scale)).collect();
            facets.push(Facet { normal: w.clone(), vertices: inc });
            constraints.push(Constraint::Linear(w));
        }
        let mut span_vecs = vec![o.clone()];
        span_vecs.extend((0..k).map(|i| e.column(i).into_owned()));
        let span = Subspace::span(&span_vecs)?;
        let origin = vertices.iter().fold(Vector::zeros(chart.dim()), |a, v| a + v) / vertices.len() as f64;
        Self::assemble(chart.clone(), span, origin, constraints, Shape::Polytope(Polytope { vertices, facets }))
    }

    /// {c + A z : |z| < 1} with c a chart point and A tangent to the chart.
    pub fn ellipsoid(chart: &AffineChart, center: &Vector, axes: &Mat) -> Result<Self> {
        let c = chart.normalize(center)?;
        let b = chart.covector();
        let a = axes - b * (b.transpose() * axes);
        let (_, s, _) = svd_sorted(&a);
        if a.ncols() == 0 || s[s.len() - 1] <= 1e-12 * s[0] {
            return Err(Error::Degenerate("ellipsoid axes must be independent".into()));
        }
        let p = {
            let pinv = pseudo_inverse(&a);
            pinv.transpose() * pinv
        };
        let d = chart.dim();
        let k = Mat::identity(d, d) - &c * b.transpose();
        let m = k.transpose() * p * k - b * b.transpose();
        let mut span_vecs = vec![c.clone()];
        span_vecs.extend((0..a.ncols()).map(|i| a.column(i).into_owned()));
        let span = Subspace::span(&span_vecs)?;
        Self::assemble(
            chart.clone(),
            span,
            c.clone(),
            vec![Constraint::Quadric(m)],
            Shape::Ellipsoid(Ellipsoid { center: c, axes: a }),
        )
    }

    /// The set {xᵀMx < 0} ∩ P(span), which must be an ellipsoid in `chart`.
    pub fn from_quadric(chart: &AffineChart, m: &Mat, span: Option<&Subspace>) -> Result<Self> {
        let span = span.cloned().unwrap_or_else(|| Subspace::full(chart.dim()));
        let (c, a) = ellipsoid_from_quadric(chart, m, &span)?;
        Self::ellipsoid(chart, &c, &a)
    }

    pub fn chart(&self) -> &AffineChart {
        &self.chart
    }

    pub fn span(&self) -> &Subspace {
        &self.span
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// Dimension of the body itself (span dimension minus one).
    pub fn body_dim(&self) -> usize {
        self.tangent.ncols()
    }

    /// Orthonormal basis of the body's tangent directions in the chart.
    pub fn tangent(&self) -> &Mat {
        &self.tangent
    }

    /// An interior chart point.
    pub fn origin(&self) -> &Vector {
        &self.origin
    }

    pub fn reference_point(&self) -> ProjectivePoint {
        ProjectivePoint::new(self.origin.clone()).expect("origin is nonzero")
    }

    pub fn vertices(&self) -> Option<&[Vector]> {
        match &self.shape {
            Shape::Polytope(p) => Some(&p.vertices),
            _ => None,
        }
    }

    pub fn chart_point(&self, x: &ProjectivePoint) -> Result<Vector> {
        self.chart.chart_point(x)
    }

    pub fn to_point(&self, xhat: &Vector) -> ProjectivePoint {
        ProjectivePoint::new(xhat.clone()).expect("chart points are nonzero")
    }

    /// Signed distance-like depth of a chart point (negative outside).
    pub fn depth(&self, xhat: &Vector) -> f64 {
        self.constraints.iter().map(|c| c.depth(xhat, &self.tangent)).fold(f64::INFINITY, f64::min)
    }

    fn strictly_inside(&self, xhat: &Vector) -> bool {
        self.constraints.iter().all(|c| c.value(xhat) > 0.0)
    }

    pub fn contains_vec(&self, xhat: &Vector, mode: Mode, tol: f64) -> bool {
        if self.span.residual(xhat) > tol.max(1e-10) {
            return false;
        }
        let d = self.depth(xhat);
        match mode {
            Mode::Closed => d >= -tol,
            Mode::Open => d > tol,
        }
    }

    pub fn contains_tol(&self, x: &ProjectivePoint, mode: Mode, tol: f64) -> Result<bool> {
        Ok(self.contains_vec(&self.chart_point(x)?, mode, tol))
    }

    pub fn contains(&self, x: &ProjectivePoint, mode: Mode) -> Result<bool> {
        self.contains_tol(x, mode, MEMBERSHIP_TOL)
    }

    /// Whether a chart point lies on the relative boundary within `tol`.
    pub fn on_boundary(&self, xhat: &Vector, tol: f64) -> bool {
        self.span.residual(xhat) <= tol && self.depth(xhat).abs() <= tol
    }

    /// Forward exit parameter along p + s u from an interior chart point.
    pub fn exit(&self, p: &Vector, u: &Vector) -> Result<f64> {
        self.constraints
            .iter()
            .filter_map(|c| c.exit(p, u))
            .fold(None, |acc: Option<f64>, s| Some(acc.map_or(s, |a| a.min(s))))
            .ok_or(Error::Unbounded)
    }

    fn check_interior(&self, xhat: &Vector) -> Result<()> {
        if self.span.residual(xhat) > MEMBERSHIP_TOL {
            return Err(Error::Precondition("point is off the body's span".into()));
        }
        if !self.strictly_inside(xhat) {
            return Err(Error::Precondition("point is not interior".into()));
        }
        Ok(())
    }

    /// Chart distances (in units of ŷ−x̂) from x̂ back to ∂ and from ŷ on to ∂.
    fn clip(&self, x: &Vector, y: &Vector) -> Result<(f64, f64)> {
        self.check_interior(x)?;
        self.check_interior(y)?;
        let u = y - x;
        let back = self.exit(x, &(-&u))?;
        let fwd = self.exit(y, &u)?;
        Ok((back, fwd))
    }

    /// Endpoints (a, b) of the chord through x and y, ordered a, x, y, b.
    pub fn line_boundary_points(&self, x: &ProjectivePoint, y: &ProjectivePoint) -> Result<(ProjectivePoint, ProjectivePoint)> {
        let (xh, yh) = (self.chart_point(x)?, self.chart_point(y)?);
        let (a, b) = self.chord(&xh, &yh)?;
        Ok((self.to_point(&a), self.to_point(&b)))
    }

    pub fn chord(&self, x: &Vector, y: &Vector) -> Result<(Vector, Vector)> {
        if (x - y).norm() <= 1e-15 * x.norm() {
            return Err(Error::Degenerate("x = y does not determine a line".into()));
        }
        let (al, be) = self.clip(x, y)?;
        let u = y - x;
        Ok((x - &u * al, y + &u * be))
    }

    pub fn hilbert_distance(&self, x: &ProjectivePoint, y: &ProjectivePoint) -> Result<f64> {
        self.distance_vec(&self.chart_point(x)?, &self.chart_point(y)?)
    }

    /// Hilbert distance between chart points.
    pub fn distance_vec(&self, x: &Vector, y: &Vector) -> Result<f64> {
        // evaluate in a canonical order so the result is exactly symmetric
        let swap = x.iter().zip(y.iter()).find(|(a, b)| a != b).is_some_and(|(a, b)| a > b);
        let (x, y) = if swap { (y, x) } else { (x, y) };
        if x == y {
            self.check_interior(x)?;
            return Ok(0.0);
        }
        let (al, be) = self.clip(x, y)?;
        Ok(0.5 * ((1.0 / al).ln_1p() + (1.0 / be).ln_1p()))
    }

    /// Point at distance t from x along the ray toward the boundary point η.
    pub fn geodesic_point(&self, x: &ProjectivePoint, eta: &ProjectivePoint, t: f64) -> Result<ProjectivePoint> {
        if !(t >= 0.0) {
            return Err(Error::Precondition("t must be nonnegative".into()));
        }
        let xh = self.chart_point(x)?;
        let eh = self.chart_point(eta)?;
        if !self.on_boundary(&eh, 1e-8) {
            return Err(Error::Precondition("η is not on the boundary".into()));
        }
        self.check_interior(&xh)?;
        let u = &eh - &xh;
        let al = self.exit(&xh, &(-&u))?;
        let s = if 2.0 * t < 700.0 {
            al * (2.0 * t).exp_m1() / (1.0 + al * (2.0 * t).exp())
        } else {
            1.0
        };
        Ok(self.to_point(&(&xh + u * s)))
    }

    /// Parameters s with p + s u in the closure, relaxed by `tol`; p and u
    /// are assumed to lie in the span.
    pub fn line_interval(&self, p: &Vector, u: &Vector, tol: f64) -> Option<(f64, f64)> {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for c in &self.constraints {
            match c {
                Constraint::Linear(w) => {
                    let (a, k) = (w.dot(p) + tol, w.dot(u));
                    if k > 0.0 {
                        lo = lo.max(-a / k);
                    } else if k < 0.0 {
                        hi = hi.min(-a / k);
                    } else if a < 0.0 {
                        return None;
                    }
                }
                Constraint::Quadric(m) => {
                    // xᵀMx ≤ 0 along the line: a s² + 2 b s + c ≤ 0
                    let mu = m * u;
                    let (a, b, c) = (u.dot(&mu), p.dot(&mu), p.dot(&(m * p)));
                    let disc = b * b - a * c;
                    if a <= 0.0 || disc < 0.0 {
                        return None;
                    }
                    let r = disc.sqrt();
                    lo = lo.max((-b - r) / a);
                    hi = hi.min((-b + r) / a);
                }
            }
        }
        (lo <= hi).then_some((lo, hi))
    }

    pub fn support(&self, u: &Vector) -> f64 {
        match &self.shape {
            Shape::Polytope(p) => p.vertices.iter().map(|v| u.dot(v)).fold(f64::NEG_INFINITY, f64::max),
            Shape::Ellipsoid(e) => u.dot(&e.center) + (e.axes.transpose() * u).norm(),
            Shape::Cone(c) => u.dot(&c.apex).max(c.base.support(u)),
        }
    }

    pub fn open_face(&self, x: &ProjectivePoint) -> Result<FaceDescriptor> {
        let xh = self.chart_point(x)?;
        if !self.contains_vec(&xh, Mode::Closed, MEMBERSHIP_TOL) {
            return Err(Error::Precondition("point is outside the closure".into()));
        }
        if self.contains_vec(&xh, Mode::Open, MEMBERSHIP_TOL) {
            return Ok(FaceDescriptor { kind: FaceKind::Interior, span: self.span.clone(), sample: x.clone() });
        }
        match &self.shape {
            Shape::Polytope(p) => {
                let active: Vec<&Facet> = p.facets.iter().filter(|f| f.normal.dot(&xh) <= MEMBERSHIP_TOL).collect();
                let verts: Vec<Vector> = (0..p.vertices.len())
                    .filter(|j| active.iter().all(|f| f.vertices.contains(j)))
                    .map(|j| p.vertices[j].clone())
                    .collect();
                face_from_vertices(&verts, x)
            }
            Shape::Ellipsoid(_) => Ok(FaceDescriptor { kind: FaceKind::Vertex, span: Subspace::line(x), sample: x.clone() }),
            Shape::Cone(c) => {
                let y = &xh - &c.apex * c.phi.dot(&xh);
                if y.norm() <= 1e-9 * xh.norm() {
                    return Ok(FaceDescriptor { kind: FaceKind::Vertex, span: Subspace::line(x), sample: x.clone() });
                }
                let yp = ProjectivePoint::new(y)?;
                let bf = c.base.open_face(&yp)?;
                if c.phi.dot(&xh) <= MEMBERSHIP_TOL {
                    let kind = if bf.kind == FaceKind::Interior { FaceKind::OpenFace } else { bf.kind };
                    return Ok(FaceDescriptor { kind, span: bf.span, sample: x.clone() });
                }
                let span = bf.span.sum(&Subspace::line(&self.to_point(&c.apex)))?;
                Ok(FaceDescriptor { kind: FaceKind::OpenFace, span, sample: x.clone() })
            }
        }
    }

    /// g·Ω in the same chart.
    pub fn transform(&self, g: &ProjectiveMap) -> Result<Self> {
        match &self.shape {
            Shape::Polytope(p) => {
                let imgs: Vec<Vector> = p.vertices.iter().map(|v| g.apply_vec(v)).collect();
                let signs: Vec<f64> = imgs.iter().map(|v| self.chart.covector().dot(v)).collect();
                if !(signs.iter().all(|&s| s > 0.0) || signs.iter().all(|&s| s < 0.0)) {
                    return Err(Error::Chart("image polytope leaves the chart".into()));
                }
                Self::polytope(&self.chart, &imgs)
            }
            Shape::Ellipsoid(_) => {
                let Constraint::Quadric(m) = &self.constraints[0] else { unreachable!() };
                let gi = g.inverse();
                let m2 = gi.lift().transpose() * m * gi.lift();
                let span = Subspace::span(&self.span.basis_vectors().iter().map(|v| g.apply_vec(v)).collect::<Vec<_>>())?;
                Self::from_quadric(&self.chart, &m2, Some(&span))
            }
            Shape::Cone(c) => {
                let base = c.base.transform(g)?;
                cone_over_base(&ProjectivePoint::new(g.apply_vec(&c.apex))?, &base)
            }
        }
    }

    /// The same projective set described in another chart.
    pub fn rechart(&self, chart: &AffineChart) -> Result<Self> {
        if chart == &self.chart {
            return Ok(self.clone());
        }
        match &self.shape {
            Shape::Polytope(p) => {
                let signs: Vec<f64> = p.vertices.iter().map(|v| chart.covector().dot(v)).collect();
                if !(signs.iter().all(|&s| s > 0.0) || signs.iter().all(|&s| s < 0.0)) {
                    return Err(Error::Chart("polytope is not contained in the target chart".into()));
                }
                Self::polytope(chart, &p.vertices)
            }
            Shape::Ellipsoid(_) => {
                let Constraint::Quadric(m) = &self.constraints[0] else { unreachable!() };
                Self::from_quadric(chart, m, Some(&self.span))
            }
            Shape::Cone(c) => {
                let base = c.base.rechart(chart)?;
                cone_over_base(&self.to_point(&c.apex), &base)
            }
        }
    }

    /// Unit directions in the chart tangent space, sampled deterministically.
    fn chart_directions(&self, n: usize) -> Vec<Vector> {
        let t = self.chart.tangent_basis();
        sphere_directions(t.ncols(), n).into_iter().map(|z| &t * Vector::from_vec(z)).collect()
    }

    fn body_directions(&self, n: usize) -> Vec<Vector> {
        sphere_directions(self.tangent.ncols(), n).into_iter().map(|z| &self.tangent * Vector::from_vec(z)).collect()
    }

    /// Boundary chart points hit by rays from the origin.
    pub fn sample_boundary(&self, n: usize) -> Vec<Vector> {
        let mut out: Vec<Vector> = self
            .body_directions(n)
            .into_iter()
            .filter_map(|u| self.exit(&self.origin, &u).ok().map(|s| &self.origin + u * s))
            .collect();
        if let Shape::Polytope(p) = &self.shape {
            out.extend(p.vertices.iter().cloned());
        }
        out
    }

    fn local_box(&self) -> Vec<(f64, f64)> {
        (0..self.tangent.ncols())
            .map(|i| {
                let t = self.tangent.column(i).into_owned();
                let o = t.dot(&self.origin);
                (-self.support(&(-&t)) - o, self.support(&t) - o)
            })
            .collect()
    }

    /// Uniform samples from the interior, by rejection from a bounding box.
    pub fn sample_interior<R: Rng>(&self, rng: &mut R, n: usize) -> Vec<Vector> {
        let bx = self.local_box();
        let mut out = Vec::with_capacity(n);
        let mut tries = 0usize;
        while out.len() < n && tries < 1000 * n.max(1) {
            tries += 1;
            let mut x = self.origin.clone();
            for (i, &(lo, hi)) in bx.iter().enumerate() {
                x += self.tangent.column(i) * rng.random_range(lo..=hi);
            }
            if self.strictly_inside(&x) && self.depth(&x) > MEMBERSHIP_TOL {
                out.push(x);
            }
        }
        out
    }

    /// Interior points of a regular grid with `per_axis` points per tangent axis.
    pub fn interior_grid(&self, per_axis: usize) -> Vec<Vector> {
        let bx = self.local_box();
        let k = bx.len();
        let per = per_axis.max(2);
        let mut out = Vec::new();
        let total = per.pow(k as u32);
        for idx in 0..total {
            let mut x = self.origin.clone();
            let mut r = idx;
            for (i, &(lo, hi)) in bx.iter().enumerate() {
                let j = r % per;
                r /= per;
                let f = (j as f64 + 0.5) / per as f64;
                x += self.tangent.column(i) * (lo + f * (hi - lo));
            }
            if self.strictly_inside(&x) && self.depth(&x) > MEMBERSHIP_TOL {
                out.push(x);
            }
        }
        out
    }

    /// Ω ∩ P(V).
    pub fn slice(&self, v: &Subspace) -> Result<Self> {
        if self.span.basis_vectors().iter().all(|b| v.contains(b, 1e-9)) {
            return Ok(self.clone());
        }
        let w = intersect(&self.span, v)?;
        let Some(w) = w else {
            return Err(Error::Degenerate("slice is empty".into()));
        };
        match w.dim() {
            1 => {
                let p = ProjectivePoint::new(w.basis().column(0).into_owned())?;
                let ph = self.chart_point(&p)?;
                if !self.contains_vec(&ph, Mode::Open, 0.0) {
                    return Err(Error::Degenerate("slice is empty".into()));
                }
                Self::polytope(&self.chart, &[ph])
            }
            2 => {
                let (w1, w2) = (w.basis().column(0).into_owned(), w.basis().column(1).into_owned());
                let inner = (0..720).find_map(|i| {
                    let th = std::f64::consts::PI * i as f64 / 720.0;
                    let x = &w1 * th.cos() + &w2 * th.sin();
                    let xh = self.chart.normalize(&x).ok()?;
                    self.strictly_inside(&xh).then_some(xh)
                });
                let Some(p) = inner else {
                    return Err(Error::Degenerate("slice is empty".into()));
                };
                let b = self.chart.covector();
                let dir = {
                    let d = if (&w1 - b * b.dot(&w1)).norm() > (&w2 - b * b.dot(&w2)).norm() { &w1 } else { &w2 };
                    let t = d - &p * b.dot(d);
                    t.normalize()
                };
                let s1 = self.exit(&p, &dir)?;
                let s0 = self.exit(&p, &(-&dir))?;
                Self::polytope(&self.chart, &[&p + &dir * s1, &p - &dir * s0])
            }
            _ => {
                let mut rng = ChaCha8Rng::seed_from_u64(0);
                let basis = w.basis_vectors();
                let mut inner = None;
                for _ in 0..20_000 {
                    let x = basis.iter().fold(Vector::zeros(self.dim()), |a, b| a + b * rng.random_range(-1.0..1.0));
                    if let Ok(xh) = self.chart.normalize(&x) {
                        if self.strictly_inside(&xh) {
                            inner = Some(xh);
                            break;
                        }
                    }
                }
                let p = inner.ok_or_else(|| Error::Degenerate("slice is empty".into()))?;
                let sub = Self::assemble(self.chart.clone(), w.clone(), p.clone(), vec![], self.shape.clone())?;
                let pts: Vec<Vector> = sphere_directions(sub.tangent.ncols(), 2000)
                    .into_iter()
                    .map(|z| &sub.tangent * Vector::from_vec(z))
                    .filter_map(|u| self.exit(&p, &u).ok().map(|s| &p + u * s))
                    .collect();
                Self::polytope(&self.chart, &pts)
            }
        }
    }
}

pub(crate) fn intersect(a: &Subspace, b: &Subspace) -> Result<Option<Subspace>> {
    let q = a.basis();
    let r = q - b.basis() * (b.basis().transpose() * q);
    let (_, s, vt) = svd_sorted(&r);
    let m = q.ncols();
    let mut vs = Vec::new();
    for i in 0..m {
        let sv = if i < s.len() { s[i] } else { 0.0 };
        if sv <= 1e-9 && i < vt.nrows() {
            vs.push(q * vt.row(i).transpose());
        }
    }
    // thin SVD drops trailing right vectors when r has fewer rows than columns
    if vt.nrows() < m {
        return Err(Error::Degenerate("subspace intersection needs a full decomposition".into()));
    }
    if vs.is_empty() {
        return Ok(None);
    }
    Ok(Some(Subspace::span(&vs)?))
}

fn face_from_vertices(verts: &[Vector], x: &ProjectivePoint) -> Result<FaceDescriptor> {
    if verts.len() <= 1 {
        return Ok(FaceDescriptor { kind: FaceKind::Vertex, span: Subspace::line(x), sample: x.clone() });
    }
    let span = Subspace::span_tol(verts, 1e-9)?;
    let kind = if span.dim() == 1 { FaceKind::Vertex } else { FaceKind::OpenFace };
    Ok(FaceDescriptor { kind, span, sample: x.clone() })
}

/// Center and tangent semi-axes of {xᵀMx < 0} ∩ P(span) in `chart`.
pub(crate) fn ellipsoid_from_quadric(chart: &AffineChart, m: &Mat, span: &Subspace) -> Result<(Vector, Mat)> {
    let m = (m + m.transpose()) * 0.5;
    let b = chart.covector();
    let bs = span.project(b);
    let x0 = &bs / bs.norm_squared();
    let t = tangent_of(chart, span)?;
    let h = t.transpose() * &m * &t;
    let g = t.transpose() * &m * &x0;
    let k0 = x0.dot(&(&m * &x0));
    let eig = h.clone().symmetric_eigen();
    let lmax = eig.eigenvalues.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if eig.eigenvalues.iter().any(|&l| l <= 1e-12 * lmax) {
        return Err(Error::Chart("quadric is not an ellipsoid in this chart".into()));
    }
    let hinv = &eig.eigenvectors * Mat::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l)) * eig.eigenvectors.transpose();
    let z0 = -(&hinv * &g);
    let kmin = k0 + g.dot(&z0);
    if !(kmin < 0.0) {
        return Err(Error::Degenerate("quadric has no interior in this chart".into()));
    }
    let hsqrt_inv = &eig.eigenvectors * Mat::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt())) * eig.eigenvectors.transpose();
    let c = &x0 + &t * z0;
    let a = &t * hsqrt_inv * (-kmin).sqrt();
    Ok((c, a))
}

/// Deterministic unit vectors in R^k.
pub(crate) fn sphere_directions(k: usize, n: usize) -> Vec<Vec<f64>> {
    match k {
        0 => vec![],
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..n)
            .map(|i| {
                let th = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                vec![th.cos(), th.sin()]
            })
            .collect(),
        3 => {
            let ga = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..n)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
                    let r = (1.0 - z * z).sqrt();
                    let th = ga * i as f64;
                    vec![r * th.cos(), r * th.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            (0..n)
                .map(|_| {
                    let v: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
                    let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    v.into_iter().map(|x| x / s).collect()
                })
                .collect()
        }
    }
}

fn default_direction_count(k: usize) -> usize {
    match k {
        0 | 1 => 2,
        2 => 2048,
        3 => 8192,
        _ => 20_000,
    }
}

/// sup_u |h_A(u) − h_B(u)| over sampled unit directions of A's chart.
pub fn hausdorff(a: &ConvexBody, b: &ConvexBody) -> Result<f64> {
    let b = b.rechart(a.chart())?;
    let dirs = a.chart_directions(default_direction_count(a.dim() - 1));
    Ok(dirs.iter().map(|u| (a.support(u) - b.support(u)).abs()).fold(0.0, f64::max))
}

/// Open simplex on the given lifts (positive combinations).
pub fn make_simplex_from_lifts(lifts: &[Vector]) -> Result<ConvexBody> {
    if lifts.is_empty() {
        return Err(Error::Degenerate("simplex needs vertices".into()));
    }
    let v = Mat::from_columns(lifts);
    let (_, s, _) = svd_sorted(&v);
    if s.iter().filter(|&&x| x > 1e-10 * s[0]).count() < lifts.len() {
        return Err(Error::Degenerate("simplex vertices are linearly dependent".into()));
    }
    let gram = v.transpose() * &v;
    let ones = Vector::from_element(lifts.len(), 1.0);
    let b = &v * gram.try_inverse().ok_or_else(|| Error::Degenerate("dependent vertices".into()))? * ones;
    let chart = AffineChart::new(b)?;
    ConvexBody::polytope(&chart, lifts)
}

pub fn make_simplex(vertices: &[ProjectivePoint]) -> Result<ConvexBody> {
    make_simplex_from_lifts(&vertices.iter().map(|p| p.dir().clone()).collect::<Vec<_>>())
}

/// Open cone over B with apex v, in B's chart.
pub fn cone_over_base(v: &ProjectivePoint, base: &ConvexBody) -> Result<ConvexBody> {
    let chart = base.chart().clone();
    let vh = chart.chart_point(v)?;
    if base.span().residual(&vh) < 1e-9 {
        return Err(Error::Degenerate("apex lies in the span of the base".into()));
    }
    if let Shape::Polytope(p) = base.shape() {
        let mut pts = vec![vh];
        pts.extend(p.vertices.iter().cloned());
        return ConvexBody::polytope(&chart, &pts);
    }
    let n = &vh - base.span().project(&vh);
    let phi = &n / n.dot(&vh);
    let d = chart.dim();
    let pi = Mat::identity(d, d) - &vh * phi.transpose();
    let mut cons = vec![Constraint::Linear(phi.clone()), Constraint::Linear(pi.transpose() * chart.covector())];
    for c in &base.constraints {
        cons.push(match c {
            Constraint::Linear(w) => Constraint::Linear(pi.transpose() * w),
            Constraint::Quadric(m) => Constraint::Quadric(pi.transpose() * m * &pi),
        });
    }
    let span = base.span().sum(&Subspace::line(v))?;
    let origin = &vh * 0.3 + base.origin() * 0.7;
    ConvexBody::assemble(chart, span, origin, cons, Shape::Cone(Cone { apex: vh, base: Box::new(base.clone()), phi }))
}

/// Convex hull of a (connected) point set, in the first candidate chart that
/// contains it; a second qualifying chart is used as a cross-check.
pub fn convex_hull_connected(xs: &[ProjectivePoint], charts: &[AffineChart]) -> Result<ConvexBody> {
    if xs.is_empty() {
        return Err(Error::Degenerate("empty point set".into()));
    }
    // lifts are chosen by the chart itself, so only the margin matters
    let fits = |c: &AffineChart| xs.iter().all(|x| c.covector().dot(x.dir()).abs() >= 1e-6);
    let good: Vec<&AffineChart> = charts.iter().filter(|c| fits(c)).collect();
    let Some(first) = good.first() else {
        return Err(Error::NoChart("no candidate chart contains the point set".into()));
    };
    let lifts: Vec<Vector> = xs.iter().map(|x| x.dir().clone()).collect();
    let body = ConvexBody::polytope(first, &lifts)?;
    if let Some(second) = good.get(1) {
        let other = ConvexBody::polytope(second, &lifts)?;
        if let Shape::Polytope(p) = other.shape() {
            let m = p.vertices.len() as f64;
            let c = p.vertices.iter().fold(Vector::zeros(body.dim()), |a, v| a + v) / m;
            let probes = std::iter::once(c.clone()).chain(p.vertices.iter().map(|v| (v + &c * 3.0) / 4.0));
            for q in probes {
                let qh = first.normalize(&q)?;
                if !body.contains_vec(&qh, Mode::Closed, 1e-8) {
                    return Err(Error::Diagnostic("hull depends on the chart; the point set is not connected".into()));
                }
            }
        }
    }
    Ok(body)
}

/// Whether ∂B lies in ∂Ω and B ⊂ Ω, checked on samples.
pub fn is_properly_embedded(b: &ConvexBody, omega: &ConvexBody, samples: usize) -> Result<bool> {
    let to_omega = |x: &Vector| omega.chart.normalize(x);
    let n = samples.max(8);
    for p in b.sample_boundary(n) {
        let q = to_omega(&p)?;
        if !omega.contains_vec(&q, Mode::Closed, 1e-7) || omega.depth(&q) > 1e-7 {
            return Ok(false);
        }
    }
    let per_axis = match b.body_dim() {
        0 | 1 => n,
        2 => (n as f64).sqrt().ceil() as usize,
        _ => (n as f64).cbrt().ceil() as usize,
    };
    for p in b.interior_grid(per_axis) {
        if !omega.strictly_inside(&to_omega(&p)?) {
            return Ok(false);
        }
    }
    Ok(true)
}
