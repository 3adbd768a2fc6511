use std::fmt;
use std::result::Result;
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use projconvex::catalog::{load_example, NAMES};
use projconvex::group::{
    boundary_orbit_density, centralizer_fixed_subspace, convex_core_approx, is_rank_one, orbital_limit_set,
    rank_one_approximation, simplex_edge_projection,
};
use projconvex::io::{parse_body, parse_group, body_json, group_json};
use projconvex::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::report::{val, Report};

pub enum CliError {
    Input(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(s) => write!(f, "{s}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

type Out = Result<Report, CliError>;

#[derive(Args)]
pub struct BodySource {
    /// Catalog example supplying the body.
    #[arg(long)]
    example: Option<String>,
    /// Body JSON file.
    #[arg(long, value_name = "FILE")]
    body: Option<PathBuf>,
}

#[derive(Args)]
pub struct Source {
    /// Catalog example supplying body, group and base point.
    #[arg(long)]
    example: Option<String>,
    /// Body JSON file (overrides the example's body).
    #[arg(long, value_name = "FILE")]
    body: Option<PathBuf>,
    /// Group JSON file (overrides the example's group).
    #[arg(long, value_name = "FILE")]
    group: Option<PathBuf>,
}

struct Setup {
    body: ConvexBody,
    group: MatrixGroup,
    base: Option<ProjectivePoint>,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn body_file(path: &Path) -> Result<ConvexBody, CliError> {
    Ok(parse_body(&read(path)?, &path.display().to_string())?)
}

fn group_file(path: &Path) -> Result<MatrixGroup, CliError> {
    Ok(parse_group(&read(path)?, &path.display().to_string())?)
}

fn body_of(src: &BodySource) -> Result<ConvexBody, CliError> {
    match (&src.body, &src.example) {
        (Some(p), _) => body_file(p),
        (None, Some(n)) => Ok(load_example(n)?.domain),
        (None, None) => Err(CliError::Input("one of --body or --example is required".into())),
    }
}

fn with_budget(g: MatrixGroup, cfg: &RunConfig) -> MatrixGroup {
    match cfg.budgets.search_budget {
        Some(b) => g.with_budget(b),
        None => g,
    }
}

fn group_of(src: &Source, cfg: &RunConfig) -> Result<MatrixGroup, CliError> {
    let g = match (&src.group, &src.example) {
        (Some(p), _) => group_file(p)?,
        (None, Some(n)) => load_example(n)?.group,
        (None, None) => return Err(CliError::Input("one of --group or --example is required".into())),
    };
    Ok(with_budget(g, cfg))
}

fn setup(src: &Source, cfg: &RunConfig) -> Result<Setup, CliError> {
    let entry = src.example.as_deref().map(load_example).transpose()?;
    let body = match (&src.body, &entry) {
        (Some(p), _) => body_file(p)?,
        (None, Some(e)) => e.domain.clone(),
        (None, None) => return Err(CliError::Input("--body or --example is required".into())),
    };
    let group = match (&src.group, &entry) {
        (Some(p), _) => group_file(p)?,
        (None, Some(e)) => e.group.clone(),
        (None, None) => return Err(CliError::Input("--group or --example is required".into())),
    };
    if group.dim() != body.dim() {
        return Err(CliError::Input(format!("group acts on R^{} but the body lives in P(R^{})", group.dim(), body.dim())));
    }
    let base = if src.body.is_none() { entry.map(|e| e.base_point) } else { None };
    Ok(Setup { body, group: with_budget(group, cfg), base })
}

fn numbers(s: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Input(format!("--{flag}: `{t}` is not a number"))))
        .collect()
}

/// A point given in the body's chart coordinates.
fn point(body: &ConvexBody, s: &str, flag: &str) -> Result<ProjectivePoint, CliError> {
    let y = numbers(s, flag)?;
    let v = body.chart().from_coords(&y).map_err(|e| CliError::Input(format!("--{flag}: {e}")))?;
    Ok(ProjectivePoint::new(v)?)
}

fn coords(body: &ConvexBody, p: &ProjectivePoint) -> Result<Vec<f64>, CliError> {
    let x = body.chart().chart_point(p)?;
    Ok(body.chart().coords(&x))
}

fn coord_columns(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("{prefix}{i}")).collect()
}

fn homog(p: &ProjectivePoint) -> Vec<f64> {
    p.dir().iter().copied().collect()
}

fn rows_of(m: &Mat) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn basis_of(s: &Subspace) -> Vec<Vec<f64>> {
    s.basis_vectors().iter().map(|v| v.iter().copied().collect()).collect()
}

fn rng(cfg: &RunConfig) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed)
}

fn random_boundary(body: &ConvexBody, rng: &mut ChaCha8Rng) -> Result<ProjectivePoint, CliError> {
    let k = body.body_dim();
    let z = loop {
        let z = Vector::from_iterator(k, (0..k).map(|_| rng.random::<f64>() * 2.0 - 1.0));
        let n = z.norm();
        if n > 1e-3 && n <= 1.0 {
            break z / n;
        }
    };
    let u = body.tangent() * z;
    let s = body.exit(body.origin(), &u)?;
    Ok(ProjectivePoint::new(body.origin() + u * s)?)
}

fn words(g: &MatrixGroup, list: Option<&str>) -> Result<Vec<(String, ProjectiveMap)>, CliError> {
    match list {
        Some(s) => s
            .split(',')
            .map(|w| {
                let w = w.trim();
                let word = g.parse_word(w).map_err(|e| CliError::Input(format!("--A: {e}")))?;
                Ok((w.to_string(), g.evaluate(&word)))
            })
            .collect(),
        None => Ok((0..g.generator_count()).map(|i| (g.labels()[i].clone(), g.generators()[i].clone())).collect()),
    }
}

fn base_point(s: &Setup, given: Option<&str>) -> Result<ProjectivePoint, CliError> {
    match (given, &s.base) {
        (Some(b), _) => point(&s.body, b, "base"),
        (None, Some(p)) => Ok(p.clone()),
        (None, None) => Ok(s.body.reference_point()),
    }
}

// ---------------------------------------------------------------- dist

#[derive(Args)]
pub struct DistArgs {
    #[command(flatten)]
    src: BodySource,
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    #[arg(long, allow_hyphen_values = true)]
    y: String,
}

pub fn dist(_cfg: &RunConfig, a: &DistArgs) -> Out {
    let b = body_of(&a.src)?;
    let (x, y) = (point(&b, &a.x, "x")?, point(&b, &a.y, "y")?);
    Ok(Report::new("dist").field("distance", b.hilbert_distance(&x, &y)?))
}

// ---------------------------------------------------------------- geodesic

#[derive(Args)]
pub struct GeodesicArgs {
    #[command(flatten)]
    src: BodySource,
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    #[arg(long, allow_hyphen_values = true)]
    y: String,
    /// Number of sample points; they span [0, T], or [0, d(x, y)] without --T.
    #[arg(long, default_value_t = 11)]
    samples: usize,
}

pub fn geodesic(cfg: &RunConfig, a: &GeodesicArgs) -> Out {
    let b = body_of(&a.src)?;
    let (x, y) = (point(&b, &a.x, "x")?, point(&b, &a.y, "y")?);
    let d = b.hilbert_distance(&x, &y)?;
    let (back, fwd) = b.line_boundary_points(&x, &y)?;
    let t_max = cfg.flow_t(d);
    let n = a.samples.max(2);
    let mut rows = Vec::with_capacity(n);
    for k in 0..n {
        let t = t_max * k as f64 / (n - 1) as f64;
        let p = b.geodesic_point(&x, &fwd, t)?;
        let mut r = vec![val(t)];
        r.extend(coords(&b, &p)?.into_iter().map(val));
        rows.push(r);
    }
    let mut cols = vec!["t".to_string()];
    cols.extend(coord_columns("y", b.dim() - 1));
    let cols: Vec<&str> = cols.iter().map(|s| s.as_str()).collect();
    Ok(Report::new("geodesic")
        .field("distance", d)
        .field("backward", coords(&b, &back)?)
        .field("forward", coords(&b, &fwd)?)
        .table(&cols, rows))
}

// ---------------------------------------------------------------- limit-set

#[derive(Args)]
pub struct LimitArgs {
    #[command(flatten)]
    src: Source,
    /// Base point (chart coordinates); defaults to the example's.
    #[arg(long, allow_hyphen_values = true)]
    base: Option<String>,
}

pub fn limit_set(cfg: &RunConfig, a: &LimitArgs) -> Out {
    let s = setup(&a.src, cfg)?;
    let p = base_point(&s, a.base.as_deref())?;
    let l = cfg.radius(8);
    let sample = orbital_limit_set(&s.group, &s.body, &p, l, cfg.tol("cluster"))?;
    let mut rows = Vec::new();
    for (pt, w) in sample.points.iter().zip(&sample.witnesses) {
        let mut r = vec![val(s.group.word_string(&w.word)), val(w.exact)];
        r.extend(coords(&s.body, pt)?.into_iter().map(val));
        rows.push(r);
    }
    let mut cols = vec!["word".to_string(), "exact".to_string()];
    cols.extend(coord_columns("y", s.body.dim() - 1));
    let cols: Vec<&str> = cols.iter().map(|c| c.as_str()).collect();
    Ok(Report::new("limit-set")
        .field("radius", l)
        .field("count", sample.points.len())
        .field("diagnostic", &sample.diagnostic)
        .table(&cols, rows))
}

// ---------------------------------------------------------------- core

#[derive(Args)]
pub struct CoreArgs {
    #[command(flatten)]
    src: Source,
}

pub fn core(cfg: &RunConfig, a: &CoreArgs) -> Out {
    let s = setup(&a.src, cfg)?;
    let l = cfg.radius(8);
    let core = convex_core_approx(&s.group, &s.body, l)?.rechart(s.body.chart())?;
    let h = hausdorff(&core, &s.body)?;
    let rows: Vec<Vec<Value>> = core
        .vertices()
        .unwrap_or(&[])
        .iter()
        .map(|v| s.body.chart().coords(v).into_iter().map(val).collect())
        .collect();
    let cols = coord_columns("y", s.body.dim() - 1);
    let cols: Vec<&str> = cols.iter().map(|c| c.as_str()).collect();
    Ok(Report::new("core")
        .field("radius", l)
        .field("body_dim", core.body_dim())
        .field("hausdorff_to_domain", h)
        .field("body", body_json(&core))
        .table(&cols, rows))
}

// ---------------------------------------------------------------- centralizer

#[derive(Args)]
pub struct CentralizerArgs {
    #[command(flatten)]
    src: Source,
    /// Comma-separated words generating A; defaults to the generators.
    #[arg(long = "A", value_name = "WORDS")]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    base: Option<String>,
}

pub fn centralizer(cfg: &RunConfig, a: &CentralizerArgs) -> Out {
    let s = setup(&a.src, cfg)?;
    let fam = words(&s.group, a.a.as_deref())?;
    let maps: Vec<ProjectiveMap> = fam.iter().map(|w| w.1.clone()).collect();
    let p = base_point(&s, a.base.as_deref())?;
    let l = cfg.radius(6);
    let sample = orbital_limit_set(&s.group, &s.body, &p, l, cfg.tol("cluster"))?;
    let c = centralizer_fixed_subspace(&maps, &sample, &s.body)?;
    let comps: Vec<Value> = c
        .components
        .iter()
        .map(|k| json!({"dim": k.space.dim(), "basis": basis_of(&k.space), "characters": k.characters}))
        .collect();
    let names: Vec<&str> = fam.iter().map(|w| w.0.as_str()).collect();
    Ok(Report::new("centralizer")
        .field("A", names)
        .field("v_dim", c.v.dim())
        .field("v_basis", basis_of(&c.v))
        .field("components", comps)
        .field("core_slice_dim", c.core_slice.body_dim())
        .field("core_slice", body_json(&c.core_slice)))
}

// ---------------------------------------------------------------- classify

#[derive(Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    src: Source,
    /// Matrix rows separated by `;`, entries by `,`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "word")]
    matrix: Option<String>,
    /// Word in the group's generators (upper case = inverse).
    #[arg(long)]
    word: Option<String>,
}

fn parse_matrix(s: &str) -> Result<ProjectiveMap, CliError> {
    let rows: Vec<Vec<f64>> = s.split(';').map(|r| numbers(r, "matrix")).collect::<Result<_, _>>()?;
    let d = rows.len();
    if rows.iter().any(|r| r.len() != d) {
        return Err(CliError::Input("--matrix: expected a square matrix".into()));
    }
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    Ok(ProjectiveMap::from_row_major(d, &flat)?)
}

pub fn classify(cfg: &RunConfig, a: &ClassifyArgs) -> Out {
    let body = match (&a.src.body, &a.src.example) {
        (Some(p), _) => Some(body_file(p)?),
        (None, Some(n)) => Some(load_example(n)?.domain),
        _ => None,
    };
    let g = match (&a.matrix, &a.word) {
        (Some(m), _) => parse_matrix(m)?,
        (None, Some(w)) => {
            let grp = group_of(&a.src, cfg)?;
            let word = grp.parse_word(w).map_err(|e| CliError::Input(format!("--word: {e}")))?;
            grp.evaluate(&word)
        }
        (None, None) => return Err(CliError::Input("one of --matrix or --word is required".into())),
    };
    let data = classify_proximal(&g, cfg.tol("gap"))?;
    let tl = translation_length(&g).ok();
    let mut r = Report::new("classify")
        .field("eigenvalue_moduli", eigenvalue_moduli(&g)?)
        .field("singular_values", singular_values(&g))
        .field("proximal", data.is_proximal)
        .field("biproximal", data.is_biproximal)
        .field("attracting", data.attracting.as_ref().map(homog))
        .field("repelling", data.repelling.as_ref().map(homog))
        .field("translation_length", tl);
    if let Some(b) = body {
        if b.dim() == g.dim() {
            r = r.field("rank_one", is_rank_one(&g, &b)?.rank_one);
            // grid minimum of d(x, gx); null when g does not preserve the body
            let tau = projconvex::group::minimal_translation_sample(&g, &b, cfg.grid(40));
            r = match tau {
                Ok((t, _)) => r.field("grid_min_translation", t),
                Err(Error::NotAutomorphism(_)) => r.field("grid_min_translation", Value::Null),
                Err(e) => return Err(e.into()),
            };
        }
    }
    Ok(r)
}

// ---------------------------------------------------------------- rank-one

#[derive(Args)]
pub struct RankOneArgs {
    #[command(flatten)]
    src: Source,
    /// Boundary point approximated by attracting points (with --x2).
    #[arg(long, allow_hyphen_values = true, requires = "x2")]
    x1: Option<String>,
    /// Boundary point approximated by repelling points.
    #[arg(long, allow_hyphen_values = true, requires = "x1")]
    x2: Option<String>,
}

pub fn rank_one(cfg: &RunConfig, a: &RankOneArgs) -> Out {
    let s = setup(&a.src, cfg)?;
    let l = cfg.radius(6);
    let k = s.body.dim() - 1;
    if let (Some(x1), Some(x2)) = (&a.x1, &a.x2) {
        let (x1, x2) = (point(&s.body, x1, "x1")?, point(&s.body, x2, "x2")?);
        let found = rank_one_approximation(&x1, &x2, &s.group, &s.body, l)?;
        let mut rows = Vec::new();
        for f in &found {
            let mut r = vec![
                val(s.group.word_string(&f.g_word)),
                val(s.group.word_string(&f.h_word)),
                val(f.err_plus),
                val(f.err_minus),
            ];
            r.extend(coords(&s.body, &f.attracting)?.into_iter().map(val));
            r.extend(coords(&s.body, &f.repelling)?.into_iter().map(val));
            rows.push(r);
        }
        let mut cols = vec!["g".to_string(), "h".to_string(), "err_plus".to_string(), "err_minus".to_string()];
        cols.extend(coord_columns("plus", k));
        cols.extend(coord_columns("minus", k));
        let cols: Vec<&str> = cols.iter().map(|c| c.as_str()).collect();
        return Ok(Report::new("rank-one").field("radius", l).field("count", found.len()).table(&cols, rows));
    }
    let ball = s.group.ball(l)?;
    let mut rows = Vec::new();
    for i in 0..ball.len() {
        let g = ball.element(i);
        let r = is_rank_one(g, &s.body)?;
        if !r.rank_one {
            continue;
        }
        let mut row = vec![val(s.group.word_string(ball.word(i))), val(translation_length(g)?)];
        row.extend(coords(&s.body, r.attracting.as_ref().unwrap())?.into_iter().map(val));
        row.extend(coords(&s.body, r.repelling.as_ref().unwrap())?.into_iter().map(val));
        rows.push(row);
    }
    let mut cols = vec!["word".to_string(), "translation_length".to_string()];
    cols.extend(coord_columns("plus", k));
    cols.extend(coord_columns("minus", k));
    let cols: Vec<&str> = cols.iter().map(|c| c.as_str()).collect();
    Ok(Report::new("rank-one")
        .field("radius", l)
        .field("examined", ball.len())
        .field("count", rows.len())
        .table(&cols, rows))
}

// ---------------------------------------------------------------- edge-projection

#[derive(Args)]
pub struct EdgeArgs {
    #[command(flatten)]
    src: Source,
    #[arg(long = "A", value_name = "WORDS")]
    a: Option<String>,
    /// Index of the vertex collapsed into the kernel (in the listed vertex order).
    #[arg(long)]
    drop: Option<usize>,
}

pub fn edge_projection(cfg: &RunConfig, a: &EdgeArgs) -> Out {
    let s = setup(&a.src, cfg)?;
    let fam = words(&s.group, a.a.as_deref())?;
    let maps: Vec<ProjectiveMap> = fam.iter().map(|w| w.1.clone()).collect();
    let drop = a.drop.unwrap_or(s.body.dim() - 1);
    let t = simplex_edge_projection(&s.body, &maps, drop)?;
    let verts: Vec<Vec<f64>> =
        s.body.vertices().unwrap_or(&[]).iter().map(|v| s.body.chart().coords(v)).collect();
    let m = t.rep() / t.rep().amax();
    Ok(Report::new("edge-projection")
        .field("vertices", verts)
        .field("drop", drop)
        .field("matrix", rows_of(&m))
        .field("rank", t.rank())
        .field("image", basis_of(t.image()))
        .field("kernel", t.kernel().map(basis_of)))
}

// ---------------------------------------------------------------- flow

#[derive(Args)]
pub struct FlowArgs {
    #[command(flatten)]
    src: BodySource,
    /// Base point.
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    /// A second point fixing the direction.
    #[arg(long, allow_hyphen_values = true)]
    y: String,
    #[arg(long, allow_hyphen_values = true)]
    t: f64,
    #[arg(long, default_value_t = 10)]
    samples: usize,
}

pub fn flow(_cfg: &RunConfig, a: &FlowArgs) -> Out {
    let b = body_of(&a.src)?;
    let v = UnitTangent::through(&b, &point(&b, &a.x, "x")?, &point(&b, &a.y, "y")?)?;
    let n = a.samples.max(1);
    let mut rows = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let t = a.t * k as f64 / n as f64;
        let w = projconvex::flow(&v, t)?;
        let mut r = vec![val(t), val(w.log_s())];
        r.extend(coords(&b, &w.base()?)?.into_iter().map(val));
        rows.push(r);
    }
    let end = projconvex::flow(&v, a.t)?;
    let mut cols = vec!["t".to_string(), "log_s".to_string()];
    cols.extend(coord_columns("y", b.dim() - 1));
    let cols: Vec<&str> = cols.iter().map(|c| c.as_str()).collect();
    Ok(Report::new("flow")
        .field("backward", coords(&b, &end.backward())?)
        .field("forward", coords(&b, &end.forward())?)
        .field("log_s", end.log_s())
        .field("base", coords(&b, &end.base()?)?)
        .table(&cols, rows))
}

// ---------------------------------------------------------------- shadow

#[derive(Args)]
pub struct ShadowArgs {
    #[command(flatten)]
    src: Source,
    /// Rank-one element as a word.
    #[arg(long)]
    word: String,
    /// Start of the ray on the boundary; random from the seed if absent.
    #[arg(long, allow_hyphen_values = true)]
    w: Option<String>,
}

pub fn shadow(cfg: &RunConfig, a: &ShadowArgs) -> Out {
    let s = setup(&a.src, cfg)?;
    let word = s.group.parse_word(&a.word).map_err(|e| CliError::Input(format!("--word: {e}")))?;
    let g = s.group.evaluate(&word);
    let w = match &a.w {
        Some(w) => point(&s.body, w, "w")?,
        None => random_boundary(&s.body, &mut rng(cfg))?,
    };
    let t = cfg.flow_t(20.0);
    if t < 0.0 {
        return Err(CliError::Input("--T must be nonnegative".into()));
    }
    let prof = axis_shadowing_error(&s.body, &g, &w, t.round() as usize)?;
    let rows = prof.iter().map(|&(t, e)| vec![val(t), val(e)]).collect();
    Ok(Report::new("shadow")
        .field("word", &a.word)
        .field("w", coords(&s.body, &w)?)
        .field("final_error", prof.last().map(|p| p.1))
        .table(&["t", "error"], rows))
}

// ---------------------------------------------------------------- transitivity

#[derive(Args)]
pub struct TransArgs {
    #[command(flatten)]
    src: Source,
    #[arg(long, allow_hyphen_values = true)]
    u_back: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    u_fwd: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    v_back: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    v_fwd: Option<String>,
    /// Chart radius of the endpoint boxes.
    #[arg(long, default_value_t = 0.2)]
    radius: f64,
    /// Hilbert radius of the base-point window.
    #[arg(long, default_value_t = 1.0)]
    base_radius: f64,
}

pub fn transitivity(cfg: &RunConfig, a: &TransArgs) -> Out {
    let s = setup(&a.src, cfg)?;
    let mut r = rng(cfg);
    let mut end = |given: &Option<String>, flag: &str| -> Result<ProjectivePoint, CliError> {
        match given {
            Some(x) => point(&s.body, x, flag),
            None => random_boundary(&s.body, &mut r),
        }
    };
    let (ub, uf) = (end(&a.u_back, "u-back")?, end(&a.u_fwd, "u-fwd")?);
    let (vb, vf) = (end(&a.v_back, "v-back")?, end(&a.v_fwd, "v-fwd")?);
    let bx = |b: ProjectivePoint, f: ProjectivePoint| EndpointBox {
        backward: b,
        forward: f,
        radius: a.radius,
        base_radius: a.base_radius,
    };
    let (u, v) = (bx(ub, uf), bx(vb, vf));
    let l = cfg.radius(10);
    let rep = Report::new("transitivity")
        .field("radius", l)
        .field("u", [coords(&s.body, &u.backward)?, coords(&s.body, &u.forward)?])
        .field("v", [coords(&s.body, &v.backward)?, coords(&s.body, &v.forward)?]);
    Ok(match transitivity_experiment(&s.group, &s.body, &s.body, &u, &v, l)? {
        TransitivityOutcome::Witness(w) => rep
            .field("outcome", "witness")
            .field("word", s.group.word_string(&w.word))
            .field("t", w.t)
            .field("u_base", coords(&s.body, &w.u.base()?)?)
            .field("image_base", coords(&s.body, &w.image.base()?)?),
        TransitivityOutcome::Exhausted { examined } => rep.field("outcome", "exhausted").field("examined", examined),
    })
}

// ---------------------------------------------------------------- minimality

#[derive(Args)]
pub struct MinimalityArgs {
    #[command(flatten)]
    src: Source,
    /// Boundary base point; random from the seed if absent.
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
}

pub fn minimality(cfg: &RunConfig, a: &MinimalityArgs) -> Out {
    let s = setup(&a.src, cfg)?;
    let x0 = match &a.x0 {
        Some(x) => point(&s.body, x, "x0")?,
        None => random_boundary(&s.body, &mut rng(cfg))?,
    };
    let l = cfg.radius(12);
    let eps = boundary_orbit_density(&s.group, &s.body, &s.body, &x0, l)?;
    Ok(Report::new("minimality").field("radius", l).field("x0", coords(&s.body, &x0)?).field("epsilon", eps))
}

// ---------------------------------------------------------------- gap-audit

#[derive(Args)]
pub struct GapArgs {
    #[command(flatten)]
    src: Source,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Tabulate every element instead of the per-length envelope.
    #[arg(long)]
    all: bool,
}

pub fn gap_audit(cfg: &RunConfig, a: &GapArgs) -> Out {
    let g = group_of(&a.src, cfg)?;
    let l = cfg.radius(10);
    let p = gap_profile(&g, a.k, l)?;
    let r = Report::new("gap-audit")
        .field("k", p.k)
        .field("radius", l)
        .field("elements", p.points.len())
        .field("slope", p.slope)
        .field("intercept", p.intercept)
        .field("r2", p.r2);
    Ok(if a.all {
        r.table(&["word_length", "gap"], p.points.iter().map(|&(n, x)| vec![val(n), val(x)]).collect())
    } else {
        r.table(&["word_length", "min_gap"], p.envelope.iter().map(|&(n, x)| vec![val(n), val(x)]).collect())
    })
}

// ---------------------------------------------------------------- boundary-map

#[derive(Args)]
pub struct BoundaryArgs {
    #[command(flatten)]
    src: Source,
}

pub fn boundary_map(cfg: &RunConfig, a: &BoundaryArgs) -> Out {
    let g = group_of(&a.src, cfg)?;
    let l = cfg.radius(8);
    let sample = boundary_map_sample(&g, l)?;
    if sample.is_empty() {
        return Err(Error::Diagnostic(sample.diagnostic.clone().unwrap_or_else(|| "empty boundary sample".into())).into());
    }
    let tr = transversality_check(&sample, cfg.tol("pair"))?;
    let (chart, margin) = chart_boundedness(&sample)?;
    let collinear = if g.dim() == 3 {
        let pts: Vec<Vector> = sample.points().iter().map(|p| chart.chart_point(p)).collect::<projconvex::Result<_>>()?;
        Some(collinear_triples(&pts, &chart, cfg.tol("collinear"), cfg.tol("min_sep"))?.len())
    } else {
        None
    };
    let argmin = tr.argmin.map(|(i, j)| (g.word_string(&sample.lines[i].0), g.word_string(&sample.hyperplanes[j].0)));
    let rows: Vec<Vec<Value>> = sample
        .lines
        .iter()
        .map(|(w, p)| {
            let x = chart.chart_point(p).map(|v| v.iter().copied().collect()).unwrap_or_else(|_| homog(p));
            std::iter::once(val(g.word_string(w))).chain(x.into_iter().map(val)).collect()
        })
        .collect();
    let mut cols = vec!["word".to_string()];
    cols.extend((0..g.dim()).map(|i| format!("x{i}")));
    let cols: Vec<&str> = cols.iter().map(|c| c.as_str()).collect();
    Ok(Report::new("boundary-map")
        .field("radius", l)
        .field("lines", sample.lines.len())
        .field("transversality_min_angle", tr.min_angle)
        .field("transversality_pairs", tr.pairs)
        .field("transversality_argmin", argmin)
        .field("chart", chart.covector().as_slice())
        .field("chart_margin", margin)
        .field("collinear_triples", collinear)
        .table(&cols, rows))
}

// ---------------------------------------------------------------- invariant-domain

#[derive(Args)]
pub struct InvariantArgs {
    #[command(flatten)]
    src: Source,
    #[arg(long, allow_hyphen_values = true)]
    base: Option<String>,
    /// Chart radius of the seed ball; half the depth of the base point by default.
    #[arg(long)]
    r: Option<f64>,
}

pub fn invariant_domain(cfg: &RunConfig, a: &InvariantArgs) -> Out {
    let s = setup(&a.src, cfg)?;
    let p = base_point(&s, a.base.as_deref())?;
    let l = cfg.radius(8);
    let sample = boundary_map_sample(&s.group, l)?;
    let inv = invariant_domain_from_limit(&s.group, &sample, &p, a.r, l)?;
    let sep = hyperplane_separation(&sample, &inv.hull)?;
    let h = inv.body.rechart(s.body.chart()).and_then(|b| hausdorff(&b, &s.body)).ok();
    let rows: Vec<Vec<Value>> =
        inv.body.vertices().unwrap_or(&[]).iter().map(|v| v.iter().copied().map(val).collect()).collect();
    let cols: Vec<String> = (0..s.body.dim()).map(|i| format!("x{i}")).collect();
    let cols: Vec<&str> = cols.iter().map(|c| c.as_str()).collect();
    Ok(Report::new("invariant-domain")
        .field("radius", l)
        .field("ball_radius", inv.radius)
        .field("drift", inv.drift)
        .field("separation", sep)
        .field("chart", inv.body.chart().covector().as_slice())
        .field("hausdorff_to_domain", h)
        .table(&cols, rows))
}

// ---------------------------------------------------------------- catalog

#[derive(Args)]
pub struct CatalogArgs {
    #[command(subcommand)]
    action: CatalogAction,
}

#[derive(Subcommand)]
enum CatalogAction {
    /// One row per example.
    List,
    /// Body, group and known facts of one example.
    Show { name: String },
}

pub fn catalog(_cfg: &RunConfig, a: &CatalogArgs) -> Out {
    match &a.action {
        CatalogAction::List => {
            let mut rows = Vec::new();
            for n in NAMES {
                let e = load_example(n)?;
                rows.push(vec![val(n), val(e.domain.dim()), val(e.group.generator_count()), val(e.truth.summary)]);
            }
            Ok(Report::new("catalog list").field("count", rows.len()).table(&["name", "dim", "generators", "summary"], rows))
        }
        CatalogAction::Show { name } => {
            let e = load_example(name)?;
            Ok(Report::new("catalog show")
                .field("name", e.name)
                .field("body", body_json(&e.domain))
                .field("group", group_json(&e.group))
                .field("base_point", homog(&e.base_point))
                .field("truth", json!({"core": e.truth.core, "rank_one": e.truth.rank_one, "summary": e.truth.summary})))
        }
    }
}
