//! Projective points, subspaces, maps and classes in P(End(R^d)).

use nalgebra::{Complex, DMatrix, DVector, Schur};

use crate::error::{Error, Result};

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Points are equal when |<u,v>| >= 1 - POINT_EQ_TOL.
pub const POINT_EQ_TOL: f64 = 1e-12;
/// Frobenius-normalized lifts closer than this (up to sign) are the same map.
pub const MAP_EQ_TOL: f64 = 1e-10;
/// Singular values of a unit-norm representative below this count as zero.
pub const RANK_TOL: f64 = 1e-9;
pub const DEFAULT_GAP_TOL: f64 = 1e-8;
// Modulus ratios closer to 1 than this are treated as exact ties.
const EQUAL_MODULI: f64 = 1e-11;

fn all_finite(it: impl IntoIterator<Item = f64>) -> bool {
    it.into_iter().all(f64::is_finite)
}

fn first_significant(v: &[f64], frac: f64) -> Option<f64> {
    let m = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    v.iter().copied().find(|x| x.abs() > frac * m && *x != 0.0)
}

/// Singular value decomposition with columns ordered by decreasing value.
/// The default-tolerance SVD can stop early on rank-deficient input, so each
/// attempt is checked by reconstruction.
pub(crate) fn svd_sorted(m: &Mat) -> (Mat, Vec<f64>, Mat) {
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let mut best: Option<(f64, nalgebra::SVD<f64, nalgebra::Dyn, nalgebra::Dyn>)> = None;
    for eps in [f64::EPSILON, 1e-20, 4.0 * f64::EPSILON] {
        let Some(svd) = m.clone().try_svd(true, true, eps, 0) else { continue };
        let (u, vt) = (svd.u.as_ref().unwrap(), svd.v_t.as_ref().unwrap());
        let err = (u * Mat::from_diagonal(&svd.singular_values) * vt - m).amax() / scale;
        if best.as_ref().is_none_or(|b| err < b.0) {
            best = Some((err, svd));
        }
        if err <= 1e-12 {
            break;
        }
    }
    let svd = best.map(|b| b.1).unwrap_or_else(|| m.clone().svd(true, true));
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let s: Vec<f64> = idx.iter().map(|&i| svd.singular_values[i]).collect();
    let u = Mat::from_columns(&idx.iter().map(|&i| u.column(i).into_owned()).collect::<Vec<_>>());
    let vt = Mat::from_rows(&idx.iter().map(|&i| vt.row(i).into_owned()).collect::<Vec<_>>());
    let err = (&u * Mat::from_diagonal(&Vector::from_vec(s.clone())) * &vt - m).amax() / scale;
    if err > 1e-12 && m.is_square() {
        // the 2×2 kernel inside nalgebra's bidiagonal iteration can lose several
        // digits near rank one
        let alt = svd_via_gram(m);
        let alt_err = (&alt.0 * Mat::from_diagonal(&Vector::from_vec(alt.1.clone())) * &alt.2 - m).amax() / scale;
        if alt_err < err {
            return alt;
        }
    }
    (u, s, vt)
}

/// Right vectors from the eigenvectors of mᵀm, σᵢ = |m vᵢ|, left vectors by
/// Gram-Schmidt on the m vᵢ, completed where σᵢ is negligible.
fn svd_via_gram(m: &Mat) -> (Mat, Vec<f64>, Mat) {
    let d = m.nrows();
    let eig = (m.transpose() * m).symmetric_eigen();
    let mut idx: Vec<usize> = (0..d).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let v: Vec<Vector> = idx.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    let mv: Vec<Vector> = v.iter().map(|x| m * x).collect();
    let s: Vec<f64> = mv.iter().map(|x| x.norm()).collect();
    let floor = s[0] * 64.0 * f64::EPSILON;
    let mut us: Vec<Vector> = Vec::with_capacity(d);
    for x in &mv {
        let mut x = x.clone();
        for q in &us {
            x -= q * q.dot(&x);
        }
        if x.norm() > floor {
            us.push(x.normalize());
            continue;
        }
        // complete from the standard basis
        let next = (0..d)
            .map(|k| {
                let mut e = Vector::zeros(d);
                e[k] = 1.0;
                for q in &us {
                    e -= q * q.dot(&e);
                }
                e
            })
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .expect("d > 0");
        us.push(next.normalize());
    }
    let vt = Mat::from_rows(&v.iter().map(|x| x.transpose()).collect::<Vec<_>>());
    (Mat::from_columns(&us), s, vt)
}

/// Unit vector spanning the (approximate) kernel of a square matrix.
pub(crate) fn null_vector(m: &Mat) -> Vector {
    let (_, _, vt) = svd_sorted(m);
    vt.row(vt.nrows() - 1).transpose()
}

pub fn mat_from_row_major(d: usize, data: &[f64]) -> Result<Mat> {
    if data.len() != d * d {
        return Err(Error::Parse(format!("expected {} entries for a {d}x{d} matrix, got {}", d * d, data.len())));
    }
    Ok(Mat::from_row_slice(d, d, data))
}

pub fn row_major(m: &Mat) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectivePoint {
    dir: Vector,
}

impl ProjectivePoint {
    pub fn new(v: Vector) -> Result<Self> {
        if !all_finite(v.iter().copied()) {
            return Err(Error::Degenerate("non-finite coordinates".into()));
        }
        let n = v.norm();
        if n == 0.0 {
            return Err(Error::Degenerate("zero vector has no projective class".into()));
        }
        let mut u = v / n;
        if let Some(s) = first_significant(u.as_slice(), 1e-12) {
            if s < 0.0 {
                u.neg_mut();
            }
        }
        Ok(Self { dir: u })
    }

    pub fn from_slice(x: &[f64]) -> Result<Self> {
        Self::new(Vector::from_column_slice(x))
    }

    pub fn basis(d: usize, i: usize) -> Self {
        let mut v = Vector::zeros(d);
        v[i] = 1.0;
        Self { dir: v }
    }

    pub fn dir(&self) -> &Vector {
        &self.dir
    }

    pub fn dim(&self) -> usize {
        self.dir.len()
    }

    /// Angle between the lines, in [0, pi/2].
    pub fn angle(&self, other: &Self) -> f64 {
        let a = (&self.dir - &other.dir).norm();
        let b = (&self.dir + &other.dir).norm();
        2.0 * (a.min(b) / 2.0).min(1.0).asin()
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.dir.dot(&other.dir).abs() >= 1.0 - POINT_EQ_TOL
    }
}

/// Linear subspace stored by an orthonormal column basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    basis: Mat,
}

impl Subspace {
    /// Span of the given vectors; directions with relative singular value
    /// below `tol` are dropped.
    pub fn span_tol(vs: &[Vector], tol: f64) -> Result<Self> {
        if vs.is_empty() {
            return Err(Error::Degenerate("empty spanning set".into()));
        }
        let d = vs[0].len();
        let m = Mat::from_columns(vs);
        let (u, s, _) = svd_sorted(&m);
        let top = s.first().copied().unwrap_or(0.0);
        if top == 0.0 || !top.is_finite() {
            return Err(Error::Degenerate("spanning set is zero".into()));
        }
        let k = s.iter().filter(|&&x| x > tol * top).count();
        let cols: Vec<Vector> = (0..k).map(|i| u.column(i).into_owned()).collect();
        debug_assert!(cols.iter().all(|c| c.len() == d));
        Ok(Self { basis: Mat::from_columns(&cols) })
    }

    pub fn span(vs: &[Vector]) -> Result<Self> {
        Self::span_tol(vs, 1e-10)
    }

    pub fn full(d: usize) -> Self {
        Self { basis: Mat::identity(d, d) }
    }

    pub fn line(p: &ProjectivePoint) -> Self {
        Self { basis: Mat::from_columns(&[p.dir().clone()]) }
    }

    /// The hyperplane annihilated by a covector.
    pub fn kernel_of_covector(c: &Vector) -> Result<Self> {
        let d = c.len();
        let n = c.norm();
        if n == 0.0 {
            return Err(Error::Degenerate("zero covector".into()));
        }
        let proj = Mat::identity(d, d) - (c * c.transpose()) / (n * n);
        let cols: Vec<Vector> = (0..d).map(|i| proj.column(i).into_owned()).collect();
        let s = Self::span_tol(&cols, 1e-8)?;
        debug_assert_eq!(s.dim(), d - 1);
        Ok(s)
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vector> {
        (0..self.dim()).map(|i| self.basis.column(i).into_owned()).collect()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn project(&self, v: &Vector) -> Vector {
        &self.basis * (self.basis.transpose() * v)
    }

    /// Sine of the angle between `v` and the subspace.
    pub fn residual(&self, v: &Vector) -> f64 {
        let n = v.norm();
        if n == 0.0 {
            return 0.0;
        }
        (v - self.project(v)).norm() / n
    }

    pub fn contains(&self, v: &Vector, tol: f64) -> bool {
        self.residual(v) <= tol
    }

    pub fn complement(&self) -> Option<Self> {
        let d = self.ambient_dim();
        if self.dim() >= d {
            return None;
        }
        let proj = Mat::identity(d, d) - &self.basis * self.basis.transpose();
        let cols: Vec<Vector> = (0..d).map(|i| proj.column(i).into_owned()).collect();
        Self::span_tol(&cols, 1e-8).ok()
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        let mut vs = self.basis_vectors();
        vs.extend(other.basis_vectors());
        Self::span(&vs)
    }

    /// Largest principal angle; meaningful for subspaces of equal dimension.
    pub fn max_angle(&self, other: &Self) -> f64 {
        let r = other.basis() - &self.basis * (self.basis.transpose() * other.basis());
        let (_, s, _) = svd_sorted(&r);
        s.first().copied().unwrap_or(0.0).min(1.0).asin()
    }

    /// Smallest principal angle.
    pub fn min_angle(&self, other: &Self) -> f64 {
        let c = self.basis.transpose() * other.basis();
        let (_, s, _) = svd_sorted(&c);
        s.first().copied().unwrap_or(0.0).min(1.0).acos()
    }
}

/// Element of PGL_d(R) stored by a lift with |det| = 1.
#[derive(Clone, Debug)]
pub struct ProjectiveMap {
    lift: Mat,
}

impl ProjectiveMap {
    pub fn new(m: Mat) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::InvalidMap("matrix must be square and nonempty".into()));
        }
        if !all_finite(m.iter().copied()) {
            return Err(Error::InvalidMap("non-finite entry".into()));
        }
        let (_, s, _) = svd_sorted(&m);
        let (top, bottom) = (s[0], s[s.len() - 1]);
        if top == 0.0 || bottom == 0.0 || !(top / bottom).is_finite() {
            return Err(Error::InvalidMap("singular matrix".into()));
        }
        // |det| = prod of singular values; the log form avoids overflow
        let scale = (s.iter().map(|x| x.ln()).sum::<f64>() / s.len() as f64).exp();
        Ok(Self { lift: m / scale })
    }

    pub fn from_row_major(d: usize, data: &[f64]) -> Result<Self> {
        Self::new(mat_from_row_major(d, data)?)
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let d = rows.len();
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::from_row_major(d, &flat)
    }

    pub fn diag(entries: &[f64]) -> Result<Self> {
        Self::new(Mat::from_diagonal(&Vector::from_column_slice(entries)))
    }

    pub fn identity(d: usize) -> Self {
        Self { lift: Mat::identity(d, d) }
    }

    pub fn lift(&self) -> &Mat {
        &self.lift
    }

    pub fn dim(&self) -> usize {
        self.lift.nrows()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self { lift: &self.lift * &other.lift }
    }

    pub fn inverse(&self) -> Self {
        let inv = self.lift.clone().try_inverse().expect("lift invertible by construction");
        Self { lift: inv }
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Mat::identity(self.dim(), self.dim());
        let mut sq = base.lift;
        while e > 0 {
            // rescale as we go: the class is what matters and long powers overflow
            if e & 1 == 1 {
                acc = &acc * &sq;
                acc /= acc.amax();
            }
            sq = &sq * &sq;
            sq /= sq.amax();
            e >>= 1;
        }
        // back to |det| = 1 unless the bottom singular value underflowed
        Self::new(acc.clone()).unwrap_or(Self { lift: acc })
    }

    /// `h ∘ self ∘ h⁻¹`.
    pub fn conjugate_by(&self, h: &Self) -> Self {
        h.compose(self).compose(&h.inverse())
    }

    pub fn apply_vec(&self, v: &Vector) -> Vector {
        &self.lift * v
    }

    pub fn apply(&self, x: &ProjectivePoint) -> ProjectivePoint {
        ProjectivePoint::new(self.apply_vec(x.dir())).expect("invertible map sends lines to lines")
    }

    /// Frobenius-normalized lift with a canonical sign.
    pub fn normalized(&self) -> Mat {
        canonical_matrix(&self.lift)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let a = self.lift.normalize();
        let b = other.lift.normalize();
        let plus = (&a - &b).amax();
        let minus = (&a + &b).amax();
        plus.min(minus) <= tol
    }

    pub fn row_major(&self) -> Vec<f64> {
        row_major(&self.lift)
    }
}

/// Frobenius-normalized matrix whose first large entry is positive.
pub(crate) fn canonical_matrix(m: &Mat) -> Mat {
    let mut a = m.normalize();
    let flat = row_major(&a);
    if let Some(s) = first_significant(&flat, 0.5) {
        if s < 0.0 {
            a.neg_mut();
        }
    }
    a
}

/// Nonzero endomorphism up to scale.
#[derive(Clone, Debug)]
pub struct EndomorphismClass {
    rep: Mat,
    kernel: Option<Subspace>,
    image: Subspace,
}

impl EndomorphismClass {
    pub fn new(m: Mat) -> Result<Self> {
        if !m.is_square() || !all_finite(m.iter().copied()) {
            return Err(Error::InvalidMap("endomorphism must be a finite square matrix".into()));
        }
        let (u, s, vt) = svd_sorted(&m);
        let top = s[0];
        if top == 0.0 {
            return Err(Error::InvalidMap("zero matrix has no projective class".into()));
        }
        let mut rep = m / top;
        if let Some(sg) = first_significant(&row_major(&rep), 0.5) {
            if sg < 0.0 {
                rep.neg_mut();
            }
        }
        let rank = s.iter().filter(|&&x| x / top > RANK_TOL).count();
        let d = rep.nrows();
        let image = Subspace { basis: Mat::from_columns(&(0..rank).map(|i| u.column(i).into_owned()).collect::<Vec<_>>()) };
        let kernel = (rank < d).then(|| Subspace {
            basis: Mat::from_columns(&(rank..d).map(|i| vt.row(i).transpose()).collect::<Vec<_>>()),
        });
        Ok(Self { rep, kernel, image })
    }

    pub fn rep(&self) -> &Mat {
        &self.rep
    }

    pub fn kernel(&self) -> Option<&Subspace> {
        self.kernel.as_ref()
    }

    pub fn image(&self) -> &Subspace {
        &self.image
    }

    pub fn rank(&self) -> usize {
        self.image.dim()
    }
}

#[derive(Clone, Debug)]
pub struct ProximalData {
    pub is_proximal: bool,
    pub is_biproximal: bool,
    /// g⁺
    pub attracting: Option<ProjectivePoint>,
    /// H_g⁻
    pub repelling_hyperplane: Option<Subspace>,
    /// g⁻
    pub repelling: Option<ProjectivePoint>,
    /// H_g⁺
    pub attracting_hyperplane: Option<Subspace>,
    /// λ1/λ2 and λ_{d-1}/λ_d
    pub top_ratio: f64,
    pub bottom_ratio: f64,
}

fn eigenvalues(m: &Mat) -> Result<Vec<Complex<f64>>> {
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::InvalidMap("eigenvalue iteration did not converge".into()))?;
    let mut ev: Vec<Complex<f64>> = schur.complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    Ok(ev)
}

/// λ_1(g) ≥ … ≥ λ_d(g) for the |det| = 1 lift.
pub fn eigenvalue_moduli(g: &ProjectiveMap) -> Result<Vec<f64>> {
    Ok(eigenvalues(g.lift())?.iter().map(|z| z.norm()).collect())
}

/// μ_1(g) ≥ … ≥ μ_d(g) for the |det| = 1 lift.
pub fn singular_values(g: &ProjectiveMap) -> Vec<f64> {
    svd_sorted(g.lift()).1
}

fn strict_gap(ratio: f64, tol: f64) -> Result<bool> {
    if ratio > 1.0 + tol {
        Ok(true)
    } else if ratio - 1.0 <= EQUAL_MODULI {
        Ok(false)
    } else {
        Err(Error::Ambiguous { ratio, tol })
    }
}

/// Right eigenline and left eigen-covector for a simple real eigenvalue.
fn eigen_pair(m: &Mat, lambda: f64) -> (Vector, Vector) {
    let d = m.nrows();
    let shift = Mat::identity(d, d) * lambda;
    let right = null_vector(&(m - &shift));
    let left = null_vector(&(m.transpose() - shift));
    (right, left)
}

pub fn classify_proximal(g: &ProjectiveMap, gap_tol: f64) -> Result<ProximalData> {
    let d = g.dim();
    if d < 2 {
        return Err(Error::Precondition("proximality needs d >= 2".into()));
    }
    let ev = eigenvalues(g.lift())?;
    let top_ratio = ev[0].norm() / ev[1].norm();
    let bottom_ratio = ev[d - 2].norm() / ev[d - 1].norm();
    let mut out = ProximalData {
        is_proximal: false,
        is_biproximal: false,
        attracting: None,
        repelling_hyperplane: None,
        repelling: None,
        attracting_hyperplane: None,
        top_ratio,
        bottom_ratio,
    };
    if !strict_gap(top_ratio, gap_tol)? {
        return Ok(out);
    }
    out.is_proximal = true;
    let (v, phi) = eigen_pair(g.lift(), ev[0].re);
    out.attracting = Some(ProjectivePoint::new(v)?);
    out.repelling_hyperplane = Some(Subspace::kernel_of_covector(&phi)?);
    if strict_gap(bottom_ratio, gap_tol)? {
        out.is_biproximal = true;
        let (w, psi) = eigen_pair(g.lift(), ev[d - 1].re);
        out.repelling = Some(ProjectivePoint::new(w)?);
        out.attracting_hyperplane = Some(Subspace::kernel_of_covector(&psi)?);
    }
    Ok(out)
}

fn align(m: Mat, prev: &Mat) -> Mat {
    if m.dot(prev) < 0.0 {
        -m
    } else {
        m
    }
}

/// T_g = lim gⁿ in P(End(R^d)) for proximal g.
pub fn power_limit(g: &ProjectiveMap) -> Result<EndomorphismClass> {
    let data = classify_proximal(g, DEFAULT_GAP_TOL)?;
    if !data.is_proximal {
        return Err(Error::Precondition("power_limit needs a proximal map".into()));
    }
    let mut cur = g.lift().normalize();
    for _ in 0..10_000 {
        let next = align((g.lift() * &cur).normalize(), &cur);
        let diff = (&next - &cur).norm();
        cur = next;
        if diff < 1e-12 {
            return EndomorphismClass::new(cur);
        }
    }
    // slow gap: build v ⊗ φ from the eigen data instead
    let ev = eigenvalues(g.lift())?;
    let (v, phi) = eigen_pair(g.lift(), ev[0].re);
    EndomorphismClass::new(&v * phi.transpose())
}

/// Limit of a sequence in P(End(R^d)); `None` when the tail does not settle.
pub fn sequence_limit(gs: &[ProjectiveMap]) -> Option<EndomorphismClass> {
    let first = gs.first()?;
    let mut cur = first.lift().normalize();
    if gs.len() == 1 {
        return EndomorphismClass::new(cur).ok();
    }
    let tail = (gs.len() / 4).max(1);
    let mut worst_tail = 0.0f64;
    for (i, g) in gs.iter().enumerate().skip(1) {
        let next = align(g.lift().normalize(), &cur);
        if i >= gs.len() - tail {
            worst_tail = worst_tail.max((&next - &cur).norm());
        }
        cur = next;
    }
    if worst_tail < 1e-10 {
        EndomorphismClass::new(cur).ok()
    } else {
        None
    }
}

/// The map P(R^d) \ P(ker T) → P(R^d) induced by T.
pub fn apply_endo(t: &EndomorphismClass, x: &ProjectivePoint) -> Result<ProjectivePoint> {
    if let Some(k) = t.kernel() {
        let dist = k.residual(x.dir());
        if dist < 1e-9 {
            return Err(Error::KernelProximity(dist));
        }
    }
    ProjectivePoint::new(t.rep() * x.dir())
}

/// ½ log(λ1/λd): the minimal translation length in any invariant domain.
pub fn translation_length(g: &ProjectiveMap) -> Result<f64> {
    let m = eigenvalue_moduli(g)?;
    Ok(0.5 * (m[0] / m[m.len() - 1]).ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moduli_of_diagonal() {
        let g = ProjectiveMap::diag(&[4.0, 1.0]).unwrap();
        let m = eigenvalue_moduli(&g).unwrap();
        assert!((m[0] - 2.0).abs() < 1e-14 && (m[1] - 0.5).abs() < 1e-14);
        let id = eigenvalue_moduli(&ProjectiveMap::identity(3)).unwrap();
        assert!(id.iter().all(|x| (x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn svd_of_rank_one_projector() {
        let b = Mat::from_row_slice(3, 2, &[0.9900845615290093, 0.0, 0.09199458939985602, -0.7557213403979824, -0.10615816757584877, -0.6548933162485907]);
        let p = Mat::identity(3, 3) - &b * b.transpose();
        let (u, s, vt) = svd_sorted(&p);
        let rec = &u * Mat::from_diagonal(&Vector::from_vec(s.clone())) * vt;
        assert!((rec - &p).amax() < 1e-14);
        assert!((s[0] - 1.0).abs() < 1e-14);
        let h = Subspace { basis: b };
        let n = h.complement().unwrap().basis().column(0).into_owned();
        assert!((h.basis.transpose() * n).amax() < 1e-14);
    }

    #[test]
    fn svd_of_nearly_rank_one_2x2() {
        let m = Mat::from_row_slice(2, 2, &[0.14679619832656524, -0.37269779002071646, -0.3357869160100282, 0.8525223605386293]);
        let (u, s, vt) = svd_sorted(&m);
        let rec = &u * Mat::from_diagonal(&Vector::from_vec(s.clone())) * vt;
        assert!((rec - &m).amax() < 1e-13);
        assert!(s[1] < 1e-12);
        assert!((u.transpose() * &u - Mat::identity(2, 2)).amax() < 1e-12);
        let col = m.column(1).normalize();
        assert!((u.column(0).dot(&col).abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singular_values_orthogonal_and_diagonal() {
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let r = ProjectiveMap::from_rows(&[&[c, -s], &[s, c]]).unwrap();
        assert!(singular_values(&r).iter().all(|x| (x - 1.0).abs() < 1e-14));
        let g = ProjectiveMap::diag(&[3.0, 1.0 / 3.0]).unwrap();
        let sv = singular_values(&g);
        assert!((sv[0] - 3.0).abs() < 1e-14 && (sv[1] - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_classification() {
        let g = ProjectiveMap::diag(&[2.0, 1.0, 0.5]).unwrap();
        let p = classify_proximal(&g, DEFAULT_GAP_TOL).unwrap();
        assert!(p.is_biproximal);
        assert!(p.attracting.unwrap().approx_eq(&ProjectivePoint::basis(3, 0)));
        assert!(p.repelling.unwrap().approx_eq(&ProjectivePoint::basis(3, 2)));
        let q = classify_proximal(&ProjectiveMap::diag(&[2.0, 2.0, 1.0]).unwrap(), DEFAULT_GAP_TOL).unwrap();
        assert!(!q.is_proximal);
    }

    #[test]
    fn ambiguous_band_is_an_error() {
        let g = ProjectiveMap::diag(&[1.0 + 1e-9, 1.0, 0.5]).unwrap();
        assert!(matches!(classify_proximal(&g, 1e-8), Err(Error::Ambiguous { .. })));
    }

    #[test]
    fn power_limits_of_diagonals() {
        let t = power_limit(&ProjectiveMap::diag(&[2.0, 1.0]).unwrap()).unwrap();
        assert!((t.rep() - Mat::from_diagonal(&Vector::from_vec(vec![1.0, 0.0]))).amax() < 1e-12);
        let t = power_limit(&ProjectiveMap::diag(&[4.0, 2.0, 1.0]).unwrap()).unwrap();
        assert_eq!(t.rank(), 1);
        let k = t.kernel().unwrap();
        assert!(k.contains(&Vector::from_vec(vec![0.0, 1.0, 0.0]), 1e-12));
        assert!(k.contains(&Vector::from_vec(vec![0.0, 0.0, 1.0]), 1e-12));
    }

    #[test]
    fn sequence_limits() {
        let gs: Vec<_> = (0..60).map(|n| ProjectiveMap::diag(&[2f64.powi(n), 2f64.powi(n), 1.0]).unwrap()).collect();
        let t = sequence_limit(&gs).unwrap();
        let want = Mat::from_diagonal(&Vector::from_vec(vec![1.0, 1.0, 0.0]));
        assert!((t.rep() - want).amax() < 1e-10);
        let g = ProjectiveMap::diag(&[3.0, 1.0]).unwrap();
        let c = sequence_limit(&vec![g.clone(); 5]).unwrap();
        assert!((c.rep() - Mat::from_diagonal(&Vector::from_vec(vec![1.0, 1.0 / 3.0]))).amax() < 1e-14);
        let osc: Vec<_> = (0..20)
            .map(|n| ProjectiveMap::diag(&[if n % 2 == 0 { 2.0 } else { 0.5 }, 1.0]).unwrap())
            .collect();
        assert!(sequence_limit(&osc).is_none());
    }

    #[test]
    fn endo_application() {
        let t = EndomorphismClass::new(Mat::from_diagonal(&Vector::from_vec(vec![1.0, 0.0]))).unwrap();
        let y = apply_endo(&t, &ProjectivePoint::from_slice(&[1.0, 1.0]).unwrap()).unwrap();
        assert!(y.approx_eq(&ProjectivePoint::basis(2, 0)));
        assert!(matches!(apply_endo(&t, &ProjectivePoint::basis(2, 1)), Err(Error::KernelProximity(_))));
    }

    #[test]
    fn translation_lengths() {
        assert!(translation_length(&ProjectiveMap::identity(3)).unwrap().abs() < 1e-15);
        let g = ProjectiveMap::diag(&[9.0, 3.0, 1.0]).unwrap();
        assert!((translation_length(&g).unwrap() - 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn point_canonical_sign() {
        let p = ProjectivePoint::from_slice(&[-1.0, 2.0]).unwrap();
        assert!(p.dir()[0] > 0.0);
        assert!(p.approx_eq(&ProjectivePoint::from_slice(&[2.0, -4.0]).unwrap()));
        assert!(ProjectivePoint::from_slice(&[0.0, 0.0]).is_err());
    }
}
