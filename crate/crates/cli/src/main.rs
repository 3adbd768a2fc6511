//! `projconvex`: Hilbert geometry and projective group dynamics from the command line.
//!
//! Exit codes: 0 success, 1 malformed input, 2 precondition violated,
//! 3 budget exhausted, 4 diagnostic outcome (no chart, unstable orbit, ...).

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use projconvex::ErrorKind;

use config::{parse_tol, Format, RunConfig};

#[derive(Parser)]
#[command(name = "projconvex", version, about = "Convex projective domains, their automorphism groups and geodesic flows")]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    command: Command,
}

/// Run configuration. A `--config` file is read first; flags override it.
#[derive(Args)]
struct RunArgs {
    /// JSON RunConfig file.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Seed for every random choice (default 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Tolerance override; keys: cluster, gap, pair, collinear, min_sep.
    #[arg(long = "tol", global = true, value_name = "KEY=VALUE", value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
    /// Word-length radius of ball enumerations.
    #[arg(long = "L", global = true, value_name = "L")]
    ball_radius: Option<usize>,
    /// Grid resolution per axis for grid searches.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Flow time horizon.
    #[arg(long = "T", global = true, value_name = "T", allow_hyphen_values = true)]
    flow_t: Option<f64>,
    /// Maximum number of group elements a ball may hold.
    #[arg(long = "budget", global = true)]
    search_budget: Option<usize>,
    /// Write the artifact here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Hilbert distance between two chart points.
    Dist(commands::DistArgs),
    /// Points along the geodesic from x through y.
    Geodesic(commands::GeodesicArgs),
    /// Boundary accumulation points of an orbit.
    LimitSet(commands::LimitArgs),
    /// Hull of the sampled limit set.
    Core(commands::CoreArgs),
    /// Fixed subspace of a commuting family, split by character.
    Centralizer(commands::CentralizerArgs),
    /// Eigenvalue moduli, proximality and translation length of one map.
    Classify(commands::ClassifyArgs),
    /// Rank-one elements of a ball, or rank-one approximations of a segment.
    RankOne(commands::RankOneArgs),
    /// Limit endomorphism collapsing a simplex onto an opposite face.
    EdgeProjection(commands::EdgeArgs),
    /// Geodesic flow of a unit tangent vector.
    Flow(commands::FlowArgs),
    /// Distance between a ray and the axis of a rank-one element.
    Shadow(commands::ShadowArgs),
    /// Search for g, t with φ_t(gU) meeting V.
    Transitivity(commands::TransArgs),
    /// Density of a boundary orbit in the boundary of the core.
    Minimality(commands::MinimalityArgs),
    /// Singular-value gaps against word length.
    GapAudit(commands::GapArgs),
    /// Sampled limit lines and hyperplanes with transversality and chart checks.
    BoundaryMap(commands::BoundaryArgs),
    /// Invariant domain grown from the sampled limit set.
    InvariantDomain(commands::InvariantArgs),
    /// Built-in examples.
    Catalog(commands::CatalogArgs),
}

fn config(run: &RunArgs) -> Result<RunConfig, String> {
    let mut cfg = match &run.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            serde_json::from_str::<RunConfig>(&text)
                .map_err(|e| format!("{}:{}:{}: {e}", p.display(), e.line(), e.column()))?
        }
        None => RunConfig::default(),
    };
    if let Some(s) = run.seed {
        cfg.seed = s;
    }
    for (k, v) in &run.tol {
        cfg.tolerances.insert(k.clone(), *v);
    }
    let b = &mut cfg.budgets;
    b.ball_radius = run.ball_radius.or(b.ball_radius);
    b.grid = run.grid.or(b.grid);
    b.flow_t = run.flow_t.or(b.flow_t);
    b.search_budget = run.search_budget.or(b.search_budget);
    if run.output.is_some() {
        cfg.output = run.output.clone();
    }
    if let Some(f) = run.format {
        cfg.format = f;
    }
    cfg.check()?;
    Ok(cfg)
}

fn exit_code(e: &commands::CliError) -> u8 {
    match e {
        commands::CliError::Input(_) => 1,
        commands::CliError::Core(e) => match e.kind() {
            ErrorKind::Input => 1,
            ErrorKind::Precondition => 2,
            ErrorKind::Budget => 3,
            ErrorKind::Diagnostic => 4,
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match config(&cli.run) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let result = match &cli.command {
        Command::Dist(a) => commands::dist(&cfg, a),
        Command::Geodesic(a) => commands::geodesic(&cfg, a),
        Command::LimitSet(a) => commands::limit_set(&cfg, a),
        Command::Core(a) => commands::core(&cfg, a),
        Command::Centralizer(a) => commands::centralizer(&cfg, a),
        Command::Classify(a) => commands::classify(&cfg, a),
        Command::RankOne(a) => commands::rank_one(&cfg, a),
        Command::EdgeProjection(a) => commands::edge_projection(&cfg, a),
        Command::Flow(a) => commands::flow(&cfg, a),
        Command::Shadow(a) => commands::shadow(&cfg, a),
        Command::Transitivity(a) => commands::transitivity(&cfg, a),
        Command::Minimality(a) => commands::minimality(&cfg, a),
        Command::GapAudit(a) => commands::gap_audit(&cfg, a),
        Command::BoundaryMap(a) => commands::boundary_map(&cfg, a),
        Command::InvariantDomain(a) => commands::invariant_domain(&cfg, a),
        Command::Catalog(a) => commands::catalog(&cfg, a),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let text = match cfg.format {
        Format::Json => report.to_json(&cfg),
        Format::Csv => {
            if report.has_table() {
                eprint!("{}", report.summary());
            }
            report.to_csv()
        }
    };
    match &cfg.output {
        Some(p) => {
            if let Err(e) = std::fs::write(p, text) {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::SUCCESS
}
