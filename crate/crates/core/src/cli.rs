//! The `minkowski-ramsey` command line.
//!
//! Every subcommand prints one JSON document on stdout. With `--out DIR` the
//! document goes to `DIR/<command>.json` instead, next to a `manifest.json`
//! describing the run. Exit codes: 0 success, 1 domain error (JSON
//! `{"error": kind, "message": …}` on stdout), 2 usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::bisector::{count_intersections, linearity_test, trace_bisector, BisectorSpec, DEFAULT_HALF_WIDTH, DEFAULT_STEP};
use crate::distinct::{
    brute_force_distinct_subset, distances_distinct, red_blue_filter, select_contracting, select_contracting_towards,
    BRUTE_FORCE_LIMIT,
};
use crate::error::Error;
use crate::geom::{Vec2, Window, DEFAULT_EPS};
use crate::hypergraph::{core_disjointness_check, peel_transversals, FiniteHypergraph};
use crate::norm::Norm;
use crate::oracle;
use crate::progression::{verify_copy, GeoProgression};
use crate::ring::{psi, GeometricSet, PointSampler, PowersOfTwo, RingColouring};
use crate::search::{find_copy, CopyCertificate, SearchConfig, DEFAULT_DENSITY, DENSITY_CAP, DEFAULT_MAX_ITERATIONS};
use crate::svg;

/// Environment variable holding the default tolerance.
pub const TOL_ENV: &str = "MINKRAMSEY_TOL";

#[derive(Parser, Debug, Serialize)]
#[command(name = "minkowski-ramsey", version, about = "Norms, colourings and monochromatic progressions in Minkowski planes")]
pub struct Cli {
    /// Absolute tolerance for distance checks.
    #[arg(long, global = true, env = TOL_ENV, default_value_t = DEFAULT_EPS)]
    tol: f64,
    /// Write results and a run manifest into this directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Validate a norm file and evaluate it.
    Norm(NormArgs),
    /// Check a copy certificate.
    VerifyCopy(VerifyArgs),
    /// Search for a monochromatic copy of a G(q) prefix.
    FindCopy(FindArgs),
    /// Build the nested-ring colouring of an unbounded set.
    RingColouring(RingArgs),
    /// Extract a subset with pairwise distinct distances.
    DistinctSubset(DistinctArgs),
    /// Polychromatic colouring of a finite hypergraph by transversal peeling.
    Peel(PeelArgs),
    /// lp bisector experiments.
    #[command(subcommand)]
    Bisector(BisectorCommand),
}

#[derive(Args, Debug, Serialize)]
struct NormArgs {
    #[arg(long)]
    file: PathBuf,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    eval: Option<Vec2>,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    #[arg(long)]
    cert: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct FindArgs {
    #[arg(long)]
    norm: PathBuf,
    #[arg(long)]
    oracle: String,
    #[arg(long)]
    q: f64,
    /// Number of progression points.
    #[arg(long)]
    prefix: usize,
    #[arg(long, default_value_t = DEFAULT_DENSITY)]
    density: usize,
    #[arg(long, default_value_t = DENSITY_CAP)]
    density_cap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Scale level s; the copy is found at scale q^(s-1).
    #[arg(long, default_value_t = 1)]
    level: u32,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERATIONS)]
    max_iterations: usize,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct RingArgs {
    #[arg(long)]
    norm: PathBuf,
    /// `powers-of-two` or `geometric:Q`.
    #[arg(long, default_value = "powers-of-two")]
    set: String,
    #[arg(long, default_value_t = 10)]
    rings: usize,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    query: Vec<Vec2>,
}

#[derive(Args, Debug, Serialize)]
struct DistinctArgs {
    #[arg(long)]
    norm: PathBuf,
    /// JSON array of `[x, y]` pairs.
    #[arg(long)]
    points: PathBuf,
    /// Known accumulation point; guessed when absent.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    y: Option<Vec2>,
    /// Also run the exhaustive search for comparison.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args, Debug, Serialize)]
struct PeelArgs {
    /// Hypergraph JSON `{"V": n, "edges": [[…], …]}`.
    #[arg(long)]
    file: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    colours: usize,
}

#[derive(Args, Debug, Serialize)]
struct Scan {
    #[arg(long)]
    p: f64,
    /// `xmin,ymin,xmax,ymax`.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    window: Option<Window>,
    #[arg(long, default_value_t = DEFAULT_STEP)]
    step: f64,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum BisectorCommand {
    /// Trace B(y1, y2).
    Trace {
        #[command(flatten)]
        scan: Scan,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        y1: Vec2,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        y2: Vec2,
    },
    /// Intersect B(y1, y2) with B(y3, y4).
    Intersect {
        #[command(flatten)]
        scan: Scan,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        y1: Vec2,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        y2: Vec2,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        y3: Vec2,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        y4: Vec2,
        /// Residual bound for reported intersections.
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
    },
}

fn parse_reals(s: &str, count: usize) -> Result<Vec<f64>, String> {
    let v = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if v.len() != count {
        return Err(format!("expected {count} comma-separated numbers, got {}", v.len()));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err("coordinates must be finite".into());
    }
    Ok(v)
}

fn parse_point(s: &str) -> Result<Vec2, String> {
    let v = parse_reals(s, 2)?;
    Ok(Vec2::new(v[0], v[1]))
}

fn parse_window(s: &str) -> Result<Window, String> {
    let v = parse_reals(s, 4)?;
    Ok(Window::new(Vec2::new(v[0], v[1]), Vec2::new(v[2], v[3])))
}

/// Provenance of one CLI run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub norm_hash: Option<String>,
    pub oracle: Option<String>,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub outputs: Vec<String>,
}

/// Hex SHA-256 of the canonical JSON form of a norm.
pub fn norm_hash(norm: &Norm) -> String {
    let text = serde_json::to_string(&norm.to_spec()).expect("norm spec serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

enum Failure {
    Domain(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl Failure {
    fn to_json(&self) -> Value {
        match self {
            Failure::Domain(e) => json!({"error": e.kind(), "message": e.to_string()}),
            Failure::Io(p, e) => json!({"error": "Io", "message": format!("{}: {e}", p.display())}),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// What a subcommand hands back: the main JSON document, files to write,
/// and whether it counts as success.
struct Report {
    body: Value,
    files: Vec<(PathBuf, String)>,
    norm: Option<Norm>,
    oracle: Option<String>,
    seed: Option<u64>,
    ok: bool,
}

impl Report {
    fn new(body: Value) -> Self {
        Report { body, files: Vec::new(), norm: None, oracle: None, seed: None, ok: true }
    }
}

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn load_norm(path: &Path) -> Outcome<Norm> {
    Ok(Norm::from_json(&read(path)?)?)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn run_norm(a: &NormArgs) -> Outcome<Report> {
    let norm = load_norm(&a.file)?;
    let mut body = json!({"norm": norm.to_spec()});
    if let Some(poly) = norm.as_polygonal() {
        body["facets"] = to_value(&poly.facets());
        body["lambda"] = json!(poly.min_side_length());
    }
    if let Some(x) = a.eval {
        body["point"] = to_value(&x);
        body["value"] = json!(norm.eval(x));
        if let Some(poly) = norm.as_polygonal() {
            if x != Vec2::ZERO {
                body["facet_index"] = to_value(&poly.facet_index(x)?);
            }
        }
    }
    let mut r = Report::new(body);
    r.norm = Some(norm);
    Ok(r)
}

fn run_verify(a: &VerifyArgs, tol: f64) -> Outcome<Report> {
    let text = read(&a.cert)?;
    let cert: CopyCertificate = serde_json::from_str(&text).map_err(|e| Error::Malformed(e.to_string()))?;
    let norm = Norm::from_spec(&cert.norm)?;
    let g = GeoProgression::new(cert.points.q, cert.points.points.len())?;
    let verdict = verify_copy(&norm, &g, &cert.points, tol)?;
    // Colours can only be rechecked for oracles this tool knows by name.
    let colour_check = match oracle::parse(&cert.oracle, &norm) {
        Ok(o) if cert.points.points.iter().all(|&p| o.colour(p) == cert.colour) => "passed",
        Ok(_) => "failed",
        Err(_) => "skipped",
    };
    let accepted = verdict.accepted && colour_check != "failed";
    let mut r = Report::new(json!({
        "accepted": accepted,
        "max_deviation": verdict.max_deviation,
        "tolerance": tol,
        "colour_check": colour_check,
    }));
    r.ok = accepted;
    r.norm = Some(norm);
    r.oracle = Some(cert.oracle);
    Ok(r)
}

fn run_find(a: &FindArgs, tol: f64) -> Outcome<Report> {
    let norm = load_norm(&a.norm)?;
    let o = oracle::parse(&a.oracle, &norm)?;
    let cfg = SearchConfig {
        density: a.density,
        density_cap: a.density_cap,
        tol,
        max_iterations: a.max_iterations,
        seed: a.seed,
        ..SearchConfig::new(a.q, a.prefix)
    }
    .rescaled(a.level)?;
    let out = find_copy(&norm, o.as_ref(), &cfg)?;
    let mut r = Report::new(to_value(&out.certificate));
    if let Some(p) = &a.svg {
        r.files.push((p.clone(), svg::search_svg(&out.trace, &out.certificate)));
    }
    if let Some(p) = &a.trace {
        r.files.push((p.clone(), pretty(&out.trace)));
    }
    r.norm = Some(norm);
    r.oracle = Some(o.name());
    r.seed = Some(a.seed);
    Ok(r)
}

fn sampler(set: &str) -> Outcome<Box<dyn PointSampler>> {
    if set == "powers-of-two" {
        return Ok(Box::new(PowersOfTwo));
    }
    if let Some(q) = set.strip_prefix("geometric:") {
        let q: f64 = q.parse().map_err(|_| Error::Malformed(format!("bad ratio in `{set}`")))?;
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::PreconditionViolated(format!("ratio must lie in (0, 1), got {q}")).into());
        }
        return Ok(Box::new(GeometricSet { q, terms: 1024 }));
    }
    Err(Error::Malformed(format!("unknown set `{set}`; use powers-of-two or geometric:Q")).into())
}

fn run_ring(a: &RingArgs) -> Outcome<Report> {
    let norm = load_norm(&a.norm)?;
    let s = sampler(&a.set)?;
    let mut rc = RingColouring::build(&norm, s.as_ref(), a.rings)?;
    let base = rc.anchors()[0];
    let mut queries = Vec::new();
    for &x in &a.query {
        // Rings are extended on demand so that every query lands in one.
        rc = rc.covering(s.as_ref(), norm.dist(x, base))?;
        let ring = rc.ring_of(x)?;
        let colour = rc.colour(x)?;
        queries.push(json!({"point": x, "ring": ring, "colour": colour, "parity": colour % 2}));
    }
    let colours: Vec<u64> = (1..=rc.radii().len() as u64).map(psi).collect();
    let mut r = Report::new(json!({
        "set": s.name(),
        "radii": rc.radii(),
        "anchors": rc.anchors(),
        "colours": colours,
        "queries": queries,
    }));
    r.norm = Some(norm);
    Ok(r)
}

fn run_distinct(a: &DistinctArgs, tol: f64) -> Outcome<Report> {
    let norm = load_norm(&a.norm)?;
    let points: Vec<Vec2> = serde_json::from_str(&read(&a.points)?).map_err(|e| Error::Malformed(e.to_string()))?;
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite.into());
    }
    let cs = match a.y {
        Some(y) => select_contracting_towards(&points, y, &norm)?,
        None => select_contracting(&points, &norm)?,
    };
    let filtered = red_blue_filter(&cs, &norm, tol);
    let mut body = json!({
        "sequence": cs,
        "red": filtered.red,
        "blue": filtered.blue,
        "dropped": filtered.dropped,
        "distinct": distances_distinct(&filtered.red, &norm, tol),
    });
    if a.oracle {
        if cs.pts.len() <= BRUTE_FORCE_LIMIT {
            let best = brute_force_distinct_subset(&cs.pts, &norm, tol, None)?;
            body["brute_force"] = json!({"size": best.len(), "points": best});
        } else {
            body["brute_force"] = json!(null);
        }
    }
    let mut r = Report::new(body);
    r.norm = Some(norm);
    Ok(r)
}

fn run_peel(a: &PeelArgs) -> Outcome<Report> {
    let h = FiniteHypergraph::from_json(&read(&a.file)?)?;
    let clash = core_disjointness_check(&h, a.k).err();
    let peeling = peel_transversals(&h, a.k, a.colours)?;
    let polychromatic = peeling.is_polychromatic(&h);
    Ok(Report::new(json!({
        "cores_disjoint": clash.is_none(),
        "clash": clash,
        "colours": peeling.colours,
        "transversals": peeling.transversals,
        "redundant": peeling.redundant,
        "polychromatic": polychromatic,
    })))
}

fn run_bisector(c: &BisectorCommand) -> Outcome<Report> {
    match c {
        BisectorCommand::Trace { scan, y1, y2 } => {
            let b = BisectorSpec::new(scan.p, *y1, *y2)?;
            let window = scan.window.unwrap_or(Window::square(DEFAULT_HALF_WIDTH));
            let t = trace_bisector(&b, &window, scan.step)?;
            let pts = t.points();
            let linearity = if pts.len() >= 3 { Some(linearity_test(&pts, window.diameter(), DEFAULT_EPS)?) } else { None };
            let mut r = Report::new(json!({"trace": t, "window": window, "linearity": linearity}));
            if let Some(p) = &scan.svg {
                r.files.push((p.clone(), svg::bisector_svg(std::slice::from_ref(&t), &[], &window)));
            }
            Ok(r)
        }
        BisectorCommand::Intersect { scan, y1, y2, y3, y4, eps } => {
            let b1 = BisectorSpec::new(scan.p, *y1, *y2)?;
            let b2 = BisectorSpec::new(scan.p, *y3, *y4)?;
            let window = scan.window.unwrap_or(Window::square(DEFAULT_HALF_WIDTH));
            let found = count_intersections(&b1, &b2, &window, scan.step, *eps)?;
            let mut r = Report::new(json!({"bisectors": [b1, b2], "window": window, "intersections": found}));
            if let Some(p) = &scan.svg {
                let traces = [trace_bisector(&b1, &window, scan.step)?, trace_bisector(&b2, &window, scan.step)?];
                r.files.push((p.clone(), svg::bisector_svg(&traces, &found.points, &window)));
            }
            Ok(r)
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Norm(_) => "norm",
        Command::VerifyCopy(_) => "verify-copy",
        Command::FindCopy(_) => "find-copy",
        Command::RingColouring(_) => "ring-colouring",
        Command::DistinctSubset(_) => "distinct-subset",
        Command::Peel(_) => "peel",
        Command::Bisector(_) => "bisector",
    }
}

fn execute(cli: &Cli) -> Outcome<Report> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(Error::PreconditionViolated(format!("tolerance must be positive, got {}", cli.tol)).into());
    }
    match &cli.command {
        Command::Norm(a) => run_norm(a),
        Command::VerifyCopy(a) => run_verify(a, cli.tol),
        Command::FindCopy(a) => run_find(a, cli.tol),
        Command::RingColouring(a) => run_ring(a),
        Command::DistinctSubset(a) => run_distinct(a, cli.tol),
        Command::Peel(a) => run_peel(a),
        Command::Bisector(c) => run_bisector(c),
    }
}

fn write_file(path: &Path, text: &str) -> Outcome<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::Io(dir.to_path_buf(), e))?;
    }
    fs::write(path, text).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn emit(cli: &Cli, report: Report, stdout: &mut dyn Write) -> Outcome<()> {
    let name = command_name(&cli.command);
    let place = |p: &Path| match &cli.out {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p.to_path_buf(),
    };
    let mut outputs = Vec::new();
    for (path, text) in &report.files {
        let target = place(path);
        write_file(&target, text)?;
        outputs.push(target.display().to_string());
    }
    let body = pretty(&report.body);
    match &cli.out {
        None => {
            let _ = stdout.write_all(body.as_bytes());
        }
        Some(dir) => {
            let main = dir.join(format!("{name}.json"));
            write_file(&main, &body)?;
            outputs.insert(0, main.display().to_string());
            let manifest = RunManifest {
                command: name.to_string(),
                parameters: to_value(cli),
                norm_hash: report.norm.as_ref().map(norm_hash),
                oracle: report.oracle.clone(),
                seed: report.seed,
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                outputs,
            };
            write_file(&dir.join("manifest.json"), &pretty(&manifest))?;
            let _ = writeln!(stdout, "{}", dir.join(format!("{name}.json")).display());
        }
    }
    Ok(())
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn dispatch<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let _ = stderr.write_all(text.as_bytes());
            }
            return if code == 0 { 0 } else { 2 };
        }
    };
    let result = execute(&cli).and_then(|report| {
        let ok = report.ok;
        emit(&cli, report, stdout).map(|_| ok)
    });
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(f) => {
            let _ = stdout.write_all(pretty(&f.to_json()).as_bytes());
            1
        }
    }
}
