//! The `geocenter` command line: solve, chord, oracle, spt and validate.
//!
//! Exit codes: 0 on success, 2 on invalid input, 3 when the workspace
//! budget is exceeded, 1 for anything else.

pub mod io;
pub mod svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use geocenter::center::{geodesic_center_with, CenterConfig, CenterResult, Stage};
use geocenter::chord_center::{constrained_geodesic_center, SolverConfig};
use geocenter::geom::DEFAULT_EPS;
use geocenter::oracle::{brute_center, VisibilityGraph};
use geocenter::polygon::{validate_simple, Polygon};
use geocenter::spt::{FunnelProvider, Parent, SptProvider};
use geocenter::workspace::{ceil_log2, BudgetPolicy, Meter, WorkspaceBudget, WorkspaceReport};
use geocenter::{Error, Point, Segment};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "geocenter",
    version,
    about = "Geodesic center of a simple polygon in bounded workspace"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args, Debug)]
struct Solver {
    /// Workspace parameter s (default max(ceil(log2 n), 8)).
    #[arg(long)]
    space: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative tolerance for ties.
    #[arg(long, default_value_t = DEFAULT_EPS)]
    eps: f64,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Print `center_x center_y radius`.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        solver: Solver,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Write the workspace report as JSON.
        #[arg(long)]
        stats: Option<PathBuf>,
        /// Add wall-clock time to the stats (makes them non-reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Center constrained to the segment a-b; prints `t x y radius`.
    Chord {
        file: PathBuf,
        #[arg(long, value_parser = io::parse_point, allow_hyphen_values = true)]
        a: Point,
        #[arg(long, value_parser = io::parse_point, allow_hyphen_values = true)]
        b: Point,
        #[command(flatten)]
        solver: Solver,
    },
    /// Brute-force center; prints `center_x center_y radius`.
    Oracle {
        file: PathBuf,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long, default_value_t = 60)]
        iters: usize,
    },
    /// Dump the shortest path tree of a point as `parent child cum_dist`.
    Spt {
        file: PathBuf,
        #[arg(long, value_parser = io::parse_point, allow_hyphen_values = true)]
        root: Point,
    },
    /// Check that the file holds a simple counter-clockwise polygon.
    Validate { file: PathBuf },
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }

    fn other(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_FAILURE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } => EXIT_BUDGET,
            Error::InvalidPolygon(_) | Error::OutsidePolygon { .. } | Error::Geom(_) => {
                EXIT_INVALID
            }
            _ => EXIT_FAILURE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::other(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_vertices(path: &Path) -> CliResult<Vec<Point>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
    io::parse_polygon(&text).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

fn read_polygon(path: &Path) -> CliResult<Polygon> {
    let v = read_vertices(path)?;
    if let Err(violations) = validate_simple(&v) {
        let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(CliError::invalid(format!(
            "{}: {}",
            path.display(),
            list.join("; ")
        )));
    }
    Ok(Polygon::new(v)?)
}

fn budget(poly: &Polygon, space: Option<usize>) -> WorkspaceBudget {
    let s = space.unwrap_or_else(|| ceil_log2(poly.len()).max(8));
    WorkspaceBudget::new(s, BudgetPolicy::Enforce)
}

#[derive(Serialize)]
struct Stats<'a> {
    center: [f64; 2],
    radius: f64,
    support: &'a [usize],
    stage: Stage,
    seed: u64,
    eps: f64,
    chord_counts: &'a [usize],
    prune_rounds: usize,
    #[serde(flatten)]
    report: &'a WorkspaceReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<f64>,
}

/// Shortest paths from `root` to `targets`, read off one tree replay.
fn tree_paths(
    provider: &dyn SptProvider,
    root: Point,
    targets: &[usize],
) -> CliResult<Vec<Vec<Point>>> {
    let poly = provider.polygon();
    let meter = Meter::unbounded(poly.len());
    let mut parent = vec![None; poly.len()];
    for e in provider.stream(root, &meter)? {
        parent[e.child] = Some(e.parent);
    }
    let mut paths = Vec::new();
    for &t in targets {
        let mut path = vec![poly.vertex(t)];
        let mut at = t;
        // A tree path has at most n vertices.
        for _ in 0..poly.len() {
            match parent[at] {
                Some(Parent::Vertex(p)) => {
                    path.push(poly.vertex(p));
                    at = p;
                }
                Some(Parent::Root) | None => break,
            }
        }
        path.push(root);
        path.reverse();
        paths.push(path);
    }
    Ok(paths)
}

fn solve(
    file: &Path,
    solver: &Solver,
    svg_out: Option<&Path>,
    stats_out: Option<&Path>,
    timings: bool,
    out: &mut dyn Write,
) -> CliResult<()> {
    let poly = read_polygon(file)?;
    let cfg = CenterConfig {
        budget: budget(&poly, solver.space),
        seed: solver.seed,
        solver: SolverConfig {
            eps: solver.eps,
            ..SolverConfig::default()
        },
    };
    let start = Instant::now();
    let provider = FunnelProvider::new(&poly);
    let meter = Meter::new(cfg.budget, poly.len());
    let r: CenterResult = geodesic_center_with(&provider, &meter, &cfg)?;
    let elapsed = start.elapsed();
    writeln!(out, "{} {} {}", r.center.x, r.center.y, r.radius)?;
    if let Some(path) = stats_out {
        let stats = Stats {
            center: [r.center.x, r.center.y],
            radius: r.radius,
            support: &r.support,
            stage: r.stage,
            seed: solver.seed,
            eps: solver.eps,
            chord_counts: &r.chord_counts,
            prune_rounds: r.prune_rounds,
            report: &r.report,
            elapsed_ms: timings.then(|| elapsed.as_secs_f64() * 1e3),
        };
        let json =
            serde_json::to_string_pretty(&stats).map_err(|e| CliError::other(e.to_string()))?;
        std::fs::write(path, json + "\n")?;
    }
    if let Some(path) = svg_out {
        let pic = svg::Picture {
            polygon: poly.vertices(),
            center: r.center,
            radius: r.radius,
            paths: tree_paths(&provider, r.center, &r.support)?,
        };
        std::fs::write(path, pic.render())?;
    }
    Ok(())
}

fn chord(file: &Path, a: Point, b: Point, solver: &Solver, out: &mut dyn Write) -> CliResult<()> {
    let poly = read_polygon(file)?;
    let tol = 1e-12 * poly.scale();
    if !poly.contains(a, tol) || !poly.contains(b, tol) || !poly.segment_inside(a, b) {
        return Err(CliError::invalid("segment a-b does not lie in the polygon"));
    }
    let seg = Segment::new(a, b).map_err(Error::from)?;
    let provider = FunnelProvider::new(&poly);
    let meter = Meter::new(budget(&poly, solver.space), poly.len());
    let mut rng = ChaCha8Rng::seed_from_u64(solver.seed);
    let cfg = SolverConfig {
        eps: solver.eps,
        ..SolverConfig::default()
    };
    let c = constrained_geodesic_center(&provider, &seg, &mut rng, &meter, &cfg)?;
    writeln!(out, "{} {} {} {}", c.t, c.point.x, c.point.y, c.radius)?;
    Ok(())
}

fn execute(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    match cli.cmd {
        Cmd::Solve {
            file,
            solver,
            svg,
            stats,
            timings,
        } => solve(
            &file,
            &solver,
            svg.as_deref(),
            stats.as_deref(),
            timings,
            out,
        ),
        Cmd::Chord { file, a, b, solver } => chord(&file, a, b, &solver, out),
        Cmd::Oracle { file, grid, iters } => {
            let poly = read_polygon(&file)?;
            let (c, r) = brute_center(&VisibilityGraph::new(&poly), grid.max(2), iters);
            writeln!(out, "{} {} {}", c.x, c.y, r)?;
            Ok(())
        }
        Cmd::Spt { file, root } => {
            let poly = read_polygon(&file)?;
            let provider = FunnelProvider::new(&poly);
            let meter = Meter::unbounded(poly.len());
            for e in provider.stream(root, &meter)? {
                match e.parent {
                    Parent::Root => writeln!(out, "root {} {}", e.child, e.cum_dist)?,
                    Parent::Vertex(p) => writeln!(out, "{p} {} {}", e.child, e.cum_dist)?,
                }
            }
            Ok(())
        }
        Cmd::Validate { file } => {
            let v = read_vertices(&file)?;
            match validate_simple(&v) {
                Ok(()) => {
                    writeln!(out, "ok")?;
                    Ok(())
                }
                Err(violations) => {
                    for x in &violations {
                        writeln!(out, "violation: {x}")?;
                    }
                    Err(CliError::invalid(format!(
                        "{} violation(s)",
                        violations.len()
                    )))
                }
            }
        }
    }
}

/// Run the command line and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    EXIT_OK
                }
                _ => EXIT_INVALID,
            };
        }
    };
    match execute(cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}
