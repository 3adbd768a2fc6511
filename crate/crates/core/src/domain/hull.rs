//! Convex hulls of point sets in local affine coordinates (dimension ≤ 3).

use std::collections::HashSet;

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub(crate) struct LocalFacet {
    /// Unit outward normal.
    pub normal: Vec<f64>,
    /// Supporting value: `normal · z <= offset` on the hull.
    pub offset: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct LocalHull {
    pub vertices: Vec<usize>,
    pub facets: Vec<LocalFacet>,
}

pub(crate) fn hull_local(points: &[Vec<f64>], k: usize, scale: f64) -> Result<LocalHull> {
    match k {
        0 => Ok(LocalHull { vertices: vec![0], facets: vec![] }),
        1 => Ok(hull1(points)),
        2 => Ok(hull2(points, 1e-12 * scale)),
        3 => hull3(points, 1e-11 * scale),
        _ => Err(Error::Degenerate(format!("hulls of affine dimension {k} are not supported"))),
    }
}

fn hull1(p: &[Vec<f64>]) -> LocalHull {
    let lo = (0..p.len()).min_by(|&a, &b| p[a][0].total_cmp(&p[b][0])).unwrap();
    let hi = (0..p.len()).max_by(|&a, &b| p[a][0].total_cmp(&p[b][0])).unwrap();
    LocalHull {
        vertices: vec![lo, hi],
        facets: vec![
            LocalFacet { normal: vec![-1.0], offset: -p[lo][0] },
            LocalFacet { normal: vec![1.0], offset: p[hi][0] },
        ],
    }
}

fn cross2(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

// Andrew's monotone chain; returns counter-clockwise vertices.
fn hull2(p: &[Vec<f64>], eps: f64) -> LocalHull {
    // x values equal up to rounding are snapped together, so near-vertical
    // edges are ordered by y
    let mut idx: Vec<usize> = (0..p.len()).collect();
    idx.sort_by(|&a, &b| p[a][0].total_cmp(&p[b][0]));
    let mut col = vec![0usize; p.len()];
    for w in 1..idx.len() {
        let step = p[idx[w]][0] - p[idx[w - 1]][0] > 1e3 * eps;
        col[idx[w]] = col[idx[w - 1]] + step as usize;
    }
    idx.sort_by(|&a, &b| col[a].cmp(&col[b]).then(p[a][1].total_cmp(&p[b][1])));
    idx.dedup_by(|a, b| (p[*a][0] - p[*b][0]).abs() <= eps && (p[*a][1] - p[*b][1]).abs() <= eps);
    let mut chain: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for pass in 0..2 {
        let start = chain.len();
        let it: Box<dyn Iterator<Item = &usize>> = if pass == 0 { Box::new(idx.iter()) } else { Box::new(idx.iter().rev()) };
        for &i in it {
            while chain.len() >= start + 2 {
                let (a, b) = (chain[chain.len() - 2], chain[chain.len() - 1]);
                if cross2(&p[a], &p[b], &p[i]) <= eps * (dist(&p[a], &p[i]) + eps) {
                    chain.pop();
                } else {
                    break;
                }
            }
            chain.push(i);
        }
        chain.pop();
    }
    let n = chain.len();
    let mut facets = Vec::with_capacity(n);
    for j in 0..n {
        let (a, b) = (&p[chain[j]], &p[chain[(j + 1) % n]]);
        let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
        let len = (ex * ex + ey * ey).sqrt();
        let normal = vec![ey / len, -ex / len];
        let offset = normal[0] * a[0] + normal[1] * a[1];
        facets.push(LocalFacet { normal, offset });
    }
    LocalHull { vertices: chain, facets }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

type P3 = [f64; 3];

fn sub(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}
fn cross(a: P3, b: P3) -> P3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}
fn dot(a: P3, b: P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
fn norm(a: P3) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Clone, Copy)]
struct Face {
    v: [usize; 3],
    n: P3,
    off: f64,
}

fn make_face(p: &[P3], v: [usize; 3], inside: P3) -> Face {
    let mut n = cross(sub(p[v[1]], p[v[0]]), sub(p[v[2]], p[v[0]]));
    let len = norm(n);
    if len > 0.0 {
        n = [n[0] / len, n[1] / len, n[2] / len];
    }
    let off = dot(n, p[v[0]]);
    if dot(n, inside) - off > 0.0 {
        Face { v: [v[0], v[2], v[1]], n: [-n[0], -n[1], -n[2]], off: -off }
    } else {
        Face { v, n, off }
    }
}

// Incremental hull. Faces stay outward because every new face is oriented
// against a fixed interior point of the initial tetrahedron.
fn hull3(pts: &[Vec<f64>], eps: f64) -> Result<LocalHull> {
    let p: Vec<P3> = pts.iter().map(|z| [z[0], z[1], z[2]]).collect();
    let n = p.len();
    let i0 = (0..n).min_by(|&a, &b| p[a][0].total_cmp(&p[b][0])).unwrap();
    let i1 = (0..n).max_by(|&a, &b| norm(sub(p[a], p[i0])).total_cmp(&norm(sub(p[b], p[i0])))).unwrap();
    let e = sub(p[i1], p[i0]);
    let line_d = |i: usize| norm(cross(sub(p[i], p[i0]), e));
    let i2 = (0..n).max_by(|&a, &b| line_d(a).total_cmp(&line_d(b))).unwrap();
    let nrm = cross(e, sub(p[i2], p[i0]));
    let plane_d = |i: usize| dot(sub(p[i], p[i0]), nrm).abs();
    let i3 = (0..n).max_by(|&a, &b| plane_d(a).total_cmp(&plane_d(b))).unwrap();
    if line_d(i2) <= eps * norm(e) || plane_d(i3) <= eps * norm(nrm) {
        return Err(Error::Degenerate("point set is not 3-dimensional".into()));
    }
    let tet = [i0, i1, i2, i3];
    let inside = {
        let mut c = [0.0; 3];
        for &i in &tet {
            for k in 0..3 {
                c[k] += p[i][k] / 4.0;
            }
        }
        c
    };
    let mut faces: Vec<Face> = vec![
        make_face(&p, [i0, i1, i2], inside),
        make_face(&p, [i0, i1, i3], inside),
        make_face(&p, [i0, i2, i3], inside),
        make_face(&p, [i1, i2, i3], inside),
    ];
    // farthest points first so that most later points fall inside quickly
    let mut order: Vec<usize> = (0..n).filter(|i| !tet.contains(i)).collect();
    order.sort_by(|&a, &b| norm(sub(p[b], inside)).total_cmp(&norm(sub(p[a], inside))).then(a.cmp(&b)));
    for i in order {
        let q = p[i];
        let visible: Vec<bool> = faces.iter().map(|f| dot(f.n, q) - f.off > eps).collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let mut edges: HashSet<(usize, usize)> = HashSet::new();
        for (f, _) in faces.iter().zip(&visible).filter(|(_, &v)| v) {
            for k in 0..3 {
                edges.insert((f.v[k], f.v[(k + 1) % 3]));
            }
        }
        let mut horizon: Vec<(usize, usize)> = edges.iter().copied().filter(|&(a, b)| !edges.contains(&(b, a))).collect();
        horizon.sort_unstable();
        let mut kept: Vec<Face> = faces.iter().zip(&visible).filter(|(_, &v)| !v).map(|(f, _)| *f).collect();
        for (a, b) in horizon {
            kept.push(make_face(&p, [a, b, i], inside));
        }
        faces = kept;
    }
    let mut verts: Vec<usize> = faces.iter().flat_map(|f| f.v).collect();
    verts.sort_unstable();
    verts.dedup();
    // merge coplanar triangles into facets
    let mut facets: Vec<LocalFacet> = Vec::new();
    for f in &faces {
        if norm(f.n) == 0.0 {
            continue;
        }
        let dup = facets.iter().any(|g| {
            let gn = [g.normal[0], g.normal[1], g.normal[2]];
            norm(sub(gn, f.n)) < 1e-9 && (g.offset - f.off).abs() < 1e-9 * (1.0 + f.off.abs())
        });
        if !dup {
            facets.push(LocalFacet { normal: f.n.to_vec(), offset: f.off });
        }
    }
    Ok(LocalHull { vertices: verts, facets })
}
