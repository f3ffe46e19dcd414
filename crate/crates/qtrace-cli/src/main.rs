//! `qtrace`: build quivers and networks, compute corner-arc traces, and verify the
//! naturality of traces under flips from the command line.
//!
//! Every command prints JSON on stdout. On invalid input the process prints an error
//! object `{"error": {"kind", "message"}}` on stderr and exits with status 2; a
//! verification that runs but fails exits with status 1.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qtrace::balance::{is_balanced, is_balanced_via_h};
use qtrace::mutation::{
    theta_apply, thread_count, verify_consistency, verify_naturality_with_plan, FlipPlan,
    VerificationReport,
};
use qtrace::surface::{fan, p4};
use qtrace::trace::{ArcTracer, CornerArc};
use qtrace::{Lattice, Network, TorusElement, TriSurface};

#[derive(Parser)]
#[command(name = "qtrace", version, about = "Quantum traces of corner arcs on triangulated polygons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Where the triangulated surface comes from.
#[derive(clap::Args, Clone)]
struct SurfaceArgs {
    /// Builtin polygon `P3`, `P4`, `P5`, … or a path to a surface JSON file.
    #[arg(long, default_value = "P4")]
    surface: String,
    /// Triangulation of the builtin `P4`; other builtin polygons use the fan at vertex 0.
    #[arg(long, value_enum, default_value = "lambda")]
    tri: Tri,
    /// Rank `n ≥ 2`.
    #[arg(long)]
    n: usize,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Tri {
    #[value(name = "lambda")]
    Lambda,
    #[value(name = "lambda'")]
    LambdaPrime,
}

#[derive(Subcommand)]
enum Command {
    /// The n-triangulation quiver: vertices and the matrix 2Q.
    Quiver {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Also write the quiver as a DOT file.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Directed paths of a corner-arc network from source i to sink j.
    Paths {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Corner arc `a`, `b`, `c` or `d` (polygon corners 0–3).
        #[arg(long, default_value = "a")]
        arc: char,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
        /// Also write the network as a DOT file.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// The quantum trace of a stated corner arc, with balancedness certificates.
    Trace {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, default_value = "a")]
        arc: char,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
    },
    /// Run a verification and emit its JSON report.
    Verify {
        #[command(subcommand)]
        what: Verify,
    },
    /// Apply the flip map Θ to an element over the flipped triangulation.
    Theta {
        /// Plan JSON: `{"surface": <builtin name or surface object>, "n": N, "flip": <edge id or label>, "shuffle_seed": optional}`.
        #[arg(long)]
        plan: PathBuf,
        /// Torus element JSON over the flipped triangulation's vertex names.
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum Verify {
    /// Θ(tr_λ′) = tr_λ for the flip of the diagonal `d13` of P4, plus the normalizer check.
    Naturality {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Restrict to one arc; default is all of a, b, c, d.
        #[arg(long)]
        arc: Option<char>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Shuffle the order inside each mutation stage with this seed.
        #[arg(long)]
        shuffle_seed: Option<u64>,
    },
    /// Five flips around the pentagon of P5 return every corner-arc trace to itself.
    Pentagon {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Re-check the certificates of a saved report against its verdict.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        surface: SurfaceArgs,
    },
}

/// A failure reported as a JSON error object.
struct CliError {
    kind: &'static str,
    message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            kind: "invalid_input",
            message: message.into(),
        }
    }
}

impl From<qtrace::Error> for CliError {
    fn from(e: qtrace::Error) -> Self {
        CliError {
            kind: "computation",
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// What a command produced: its JSON and whether any requested check failed.
struct Output {
    value: Value,
    ok: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            let text = serde_json::to_string_pretty(&out.value).expect("json");
            // A closed pipe downstream is not an error of ours.
            let _ = writeln!(std::io::stdout(), "{text}");
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let obj = json!({ "error": { "kind": e.kind, "message": e.message } });
            eprintln!("{obj}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> CliResult<Output> {
    match command {
        Command::Quiver { surface, dot } => {
            let lat = lattice(&surface)?;
            if let Some(path) = dot {
                write_file(&path, &lat.to_dot())?;
            }
            let seed = lat.seed();
            let value = json!({
                "n": lat.n(),
                "vertices": seed.vertices(),
                "mutable": seed.mutable_mask(),
                "two_q": seed.two_q_matrix(),
            });
            Ok(Output { value, ok: true })
        }
        Command::Paths { surface, arc, i, j, dot } => {
            let lat = lattice(&surface)?;
            let arc = CornerArc::named(lat.surface(), arc, i, j)?;
            check_states(&lat, i, j)?;
            let net = Network::corner(&lat, arc.source_edge, arc.sink_edge)?;
            if let Some(path) = dot {
                write_file(&path, &net.to_dot())?;
            }
            let paths: Vec<Value> = net
                .enumerate_paths(i, j)
                .iter()
                .map(|p| {
                    let k = net.left_exponent(p, &lat)?;
                    Ok(json!({
                        "edges": p.edges,
                        "length": p.len(),
                        "exponent": named_exponent(&lat, k.as_slice()),
                    }))
                })
                .collect::<qtrace::Result<_>>()?;
            let value = json!({
                "n": lat.n(),
                "i": i,
                "j": j,
                "acyclic": net.is_acyclic(),
                "degree_pattern": net.degree_pattern_holds(),
                "count": paths.len(),
                "paths": paths,
            });
            Ok(Output { value, ok: true })
        }
        Command::Trace { surface, arc, i, j } => {
            let lat = lattice(&surface)?;
            check_states(&lat, i, j)?;
            let arc = CornerArc::named(lat.surface(), arc, i, j)?;
            let tracer = ArcTracer::for_arc(&lat, &arc)?;
            let certificates: Vec<Value> = tracer
                .summands(i, j)?
                .into_iter()
                .map(|(p, k)| {
                    json!({
                        "path": p.edges,
                        "exponent": named_exponent(&lat, k.as_slice()),
                        "balanced": is_balanced(&k, &lat),
                        "balanced_via_h": is_balanced_via_h(&k, &lat),
                    })
                })
                .collect();
            let ok = certificates
                .iter()
                .all(|c| c["balanced"] == json!(true) && c["balanced_via_h"] == json!(true));
            let value = json!({
                "n": lat.n(),
                "i": i,
                "j": j,
                "element": tracer.trace(i, j)?.to_json(),
                "normalizer": named_exponent(&lat, tracer.normalizer().as_slice()),
                "certificates": certificates,
            });
            Ok(Output { value, ok })
        }
        Command::Verify { what } => verify(what),
        Command::Theta { plan, input } => {
            let plan_json = read_json(&plan)?;
            let plan = plan_from_json(&plan_json)?;
            let input = TorusElement::from_json(plan.target.seed().clone(), &read_json(&input)?)?;
            let (out, steps) = theta_apply(&plan, &input)?;
            let value = json!({
                "n": plan.n(),
                "stages": plan.stages.iter().map(|s| names(&plan.source, s)).collect::<Vec<_>>(),
                "output": out.to_json(),
                "steps": steps,
            });
            Ok(Output { value, ok: true })
        }
    }
}

fn verify(what: Verify) -> CliResult<Output> {
    let threads = thread_count();
    match what {
        Verify::Naturality { surface, arc, json, shuffle_seed } => {
            let lat = lattice(&surface)?;
            let arcs: Vec<char> = match arc {
                Some(a) => vec![a],
                None => vec!['a', 'b', 'c', 'd'],
            };
            let report = verify_naturality_with_plan(&lat, &arcs, threads, shuffle_seed)?;
            emit_report(report, json)
        }
        Verify::Pentagon { n, json } => {
            check_rank(n)?;
            let lat = Lattice::new(&fan(5)?, n)?;
            let flips = pentagon_flips(lat.surface())?;
            let report = verify_consistency(&lat, &flips, &['a', 'b', 'c', 'd', 'e'], threads)?;
            emit_report(report, json)
        }
        Verify::Report { input, surface } => {
            let report: VerificationReport = serde_json::from_value(read_json(&input)?)
                .map_err(|e| CliError::input(format!("report: {e}")))?;
            let lat = lattice(&surface)?;
            let reproduced = qtrace::mutation::recheck_report(&report, &lat, threads)?;
            let value = json!({ "verdict": report.verdict, "reproduced": reproduced });
            Ok(Output { value, ok: reproduced })
        }
    }
}

fn emit_report(report: VerificationReport, path: Option<PathBuf>) -> CliResult<Output> {
    let ok = report.verdict;
    let value = serde_json::to_value(&report).expect("report serializes");
    match path {
        Some(p) => {
            write_file(&p, &serde_json::to_string_pretty(&value).expect("json"))?;
            let summary = json!({
                "kind": report.kind,
                "n": report.n,
                "cases": report.cases.len(),
                "passed": report.passed(),
                "verdict": report.verdict,
                "report": p,
            });
            Ok(Output { value: summary, ok })
        }
        None => Ok(Output { value, ok }),
    }
}

/// The five flips of the pentagon on the fan of P5: flip the diagonal from vertex 0
/// whose flip is allowed, alternating between the two diagonals present.
fn pentagon_flips(s: &TriSurface) -> CliResult<Vec<usize>> {
    let first = s.edge_between(0, 2).ok_or_else(|| CliError::input("fan(5) lacks the diagonal 02"))?;
    let second = s.edge_between(0, 3).ok_or_else(|| CliError::input("fan(5) lacks the diagonal 03"))?;
    Ok(vec![first, second, first, second, first])
}

fn check_rank(n: usize) -> CliResult<()> {
    if n < 2 {
        return Err(CliError::input(format!("n must be at least 2, got {n}")));
    }
    Ok(())
}

fn check_states(lat: &Lattice, i: usize, j: usize) -> CliResult<()> {
    let n = lat.n();
    if !(1..=n).contains(&i) || !(1..=n).contains(&j) {
        return Err(CliError::input(format!("states must lie in 1..={n}, got i={i}, j={j}")));
    }
    Ok(())
}

fn lattice(args: &SurfaceArgs) -> CliResult<Lattice> {
    check_rank(args.n)?;
    let s = surface(&args.surface, args.tri)?;
    Ok(Lattice::new(&s, args.n)?)
}

/// Resolves a builtin polygon name (`P3`, `P4`, …) or a surface JSON file.
fn surface(spec: &str, tri: Tri) -> CliResult<TriSurface> {
    if let Some(k) = spec.strip_prefix(['P', 'p']).and_then(|k| k.parse::<usize>().ok()) {
        return Ok(match k {
            4 => p4(tri == Tri::LambdaPrime),
            _ => fan(k)?,
        });
    }
    Ok(TriSurface::from_json(&read_json(Path::new(spec))?)?)
}

/// Plan JSON: the surface (builtin name or surface object), the rank, the flipped edge
/// (id or label), and an optional stage shuffle seed.
fn plan_from_json(v: &Value) -> CliResult<FlipPlan> {
    let n = v["n"].as_u64().ok_or_else(|| CliError::input("plan: missing integer \"n\""))? as usize;
    check_rank(n)?;
    let tri = match v["tri"].as_str() {
        Some("lambda'") => Tri::LambdaPrime,
        _ => Tri::Lambda,
    };
    let s = match &v["surface"] {
        Value::String(name) => surface(name, tri)?,
        Value::Object(_) => TriSurface::from_json(&v["surface"])?,
        _ => return Err(CliError::input("plan: \"surface\" must be a name or a surface object")),
    };
    let lat = Lattice::new(&s, n)?;
    let edge = match &v["flip"] {
        Value::Number(x) => x.as_u64().map(|x| x as usize),
        Value::String(label) => s.edge_by_label(label),
        _ => None,
    }
    .filter(|&e| e < s.edges().len())
    .ok_or_else(|| CliError::input("plan: \"flip\" must be an edge id or label of the surface"))?;
    Ok(match v["shuffle_seed"].as_u64() {
        Some(seed) => FlipPlan::shuffled(&lat, edge, seed)?,
        None => FlipPlan::new(&lat, edge)?,
    })
}

fn names(lat: &Lattice, vs: &[usize]) -> Vec<String> {
    vs.iter().map(|&v| lat.seed().vertices()[v].clone()).collect()
}

/// An exponent vector as `{vertex name: entry}`, zero entries omitted.
fn named_exponent(lat: &Lattice, t: &[i64]) -> Value {
    let map: serde_json::Map<String, Value> = t
        .iter()
        .enumerate()
        .filter(|(_, x)| **x != 0)
        .map(|(v, x)| (lat.seed().vertices()[v].clone(), json!(x)))
        .collect();
    Value::Object(map)
}

fn read_json(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError {
        kind: "io",
        message: format!("{}: {e}", path.display()),
    })
}
