//! Versioned JSON formats for bodies and groups.
//!
//! Vectors are homogeneous coordinates. Matrices are lists of rows.

use serde::{Deserialize, Serialize};

use crate::catalog::load_example;
use crate::domain::{cone_over_base, make_simplex_from_lifts, AffineChart, ConvexBody, Shape};
use crate::error::{Error, Result};
use crate::group::MatrixGroup;
use crate::projlin::{Mat, ProjectiveMap, ProjectivePoint, Vector};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodyJson {
    /// Hull of the given points in the chart.
    Polytope { chart: Vec<f64>, vertices: Vec<Vec<f64>> },
    /// Open simplex on linearly independent lifts.
    Simplex { vertices: Vec<Vec<f64>> },
    /// {c + A z : |z| < 1}; `axes` are the columns of A.
    Ellipsoid { chart: Vec<f64>, center: Vec<f64>, axes: Vec<Vec<f64>> },
    /// {xᵀMx < 0}, optionally within the span of `span`.
    Quadric {
        chart: Vec<f64>,
        matrix: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        span: Option<Vec<Vec<f64>>>,
    },
    Cone { apex: Vec<f64>, base: Box<BodyJson> },
    Catalog { name: String },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BodyFile {
    pub schema_version: u32,
    pub body: BodyJson,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupJson {
    Matrices {
        generators: Vec<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
    },
    Catalog { name: String },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    pub schema_version: u32,
    pub group: GroupJson,
}

fn located(e: serde_json::Error, source: &str) -> Error {
    Error::Parse(format!("{source}:{}:{}: {e}", e.line(), e.column()))
}

fn check_version(v: u32, source: &str) -> Result<()> {
    if v != SCHEMA_VERSION {
        return Err(Error::Parse(format!("{source}: unsupported schema_version {v} (expected {SCHEMA_VERSION})")));
    }
    Ok(())
}

fn vector(v: &[f64]) -> Vector {
    Vector::from_column_slice(v)
}

fn matrix(rows: &[Vec<f64>], what: &str) -> Result<Mat> {
    let n = rows.first().map_or(0, |r| r.len());
    if rows.is_empty() || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Parse(format!("{what}: rows must be nonempty and of equal length")));
    }
    Ok(Mat::from_row_iterator(rows.len(), n, rows.iter().flatten().copied()))
}

fn columns(cols: &[Vec<f64>], what: &str) -> Result<Mat> {
    Ok(matrix(cols, what)?.transpose())
}

pub fn body_from_json(desc: &BodyJson) -> Result<ConvexBody> {
    match desc {
        BodyJson::Polytope { chart, vertices } => {
            let chart = AffineChart::from_slice(chart)?;
            let pts: Vec<Vector> = vertices.iter().map(|v| vector(v)).collect();
            ConvexBody::polytope(&chart, &pts)
        }
        BodyJson::Simplex { vertices } => make_simplex_from_lifts(&vertices.iter().map(|v| vector(v)).collect::<Vec<_>>()),
        BodyJson::Ellipsoid { chart, center, axes } => {
            ConvexBody::ellipsoid(&AffineChart::from_slice(chart)?, &vector(center), &columns(axes, "axes")?)
        }
        BodyJson::Quadric { chart, matrix: m, span } => {
            let span = match span {
                Some(vs) => Some(crate::projlin::Subspace::span(&vs.iter().map(|v| vector(v)).collect::<Vec<_>>())?),
                None => None,
            };
            ConvexBody::from_quadric(&AffineChart::from_slice(chart)?, &matrix(m, "matrix")?, span.as_ref())
        }
        BodyJson::Cone { apex, base } => cone_over_base(&ProjectivePoint::from_slice(apex)?, &body_from_json(base)?),
        BodyJson::Catalog { name } => Ok(load_example(name)?.domain),
    }
}

pub fn body_json(b: &ConvexBody) -> BodyJson {
    let chart = b.chart().covector().as_slice().to_vec();
    match b.shape() {
        Shape::Polytope(p) => BodyJson::Polytope { chart, vertices: p.vertices.iter().map(|v| v.as_slice().to_vec()).collect() },
        Shape::Ellipsoid(e) => BodyJson::Ellipsoid {
            chart,
            center: e.center.as_slice().to_vec(),
            axes: e.axes.column_iter().map(|c| c.iter().copied().collect()).collect(),
        },
        Shape::Cone(c) => BodyJson::Cone { apex: c.apex.as_slice().to_vec(), base: Box::new(body_json(&c.base)) },
    }
}

pub fn parse_body(text: &str, source: &str) -> Result<ConvexBody> {
    let f: BodyFile = serde_json::from_str(text).map_err(|e| located(e, source))?;
    check_version(f.schema_version, source)?;
    body_from_json(&f.body)
}

pub fn body_to_json(b: &ConvexBody) -> String {
    let f = BodyFile { schema_version: SCHEMA_VERSION, body: body_json(b) };
    serde_json::to_string_pretty(&f).expect("body descriptions serialize")
}

pub fn group_from_json(desc: &GroupJson) -> Result<MatrixGroup> {
    match desc {
        GroupJson::Matrices { generators, labels } => {
            if generators.is_empty() {
                return Err(Error::Parse("a group needs at least one generator".into()));
            }
            let gens = generators
                .iter()
                .enumerate()
                .map(|(i, g)| {
                    let m = matrix(g, &format!("generator {i}"))?;
                    if !m.is_square() {
                        return Err(Error::Parse(format!("generator {i} is not square")));
                    }
                    ProjectiveMap::new(m)
                })
                .collect::<Result<Vec<_>>>()?;
            MatrixGroup::new(gens, labels.clone())
        }
        GroupJson::Catalog { name } => Ok(load_example(name)?.group),
    }
}

pub fn group_json(g: &MatrixGroup) -> GroupJson {
    // only the forward generators; inverses are regenerated on load
    let n = g.generator_count();
    GroupJson::Matrices {
        generators: g.generators()[..n]
            .iter()
            .map(|m| m.lift().row_iter().map(|r| r.iter().copied().collect()).collect())
            .collect(),
        labels: Some(g.labels()[..n].to_vec()),
    }
}

pub fn parse_group(text: &str, source: &str) -> Result<MatrixGroup> {
    let f: GroupFile = serde_json::from_str(text).map_err(|e| located(e, source))?;
    check_version(f.schema_version, source)?;
    group_from_json(&f.group)
}

pub fn group_to_json(g: &MatrixGroup) -> String {
    let f = GroupFile { schema_version: SCHEMA_VERSION, group: group_json(g) };
    serde_json::to_string_pretty(&f).expect("group descriptions serialize")
}
