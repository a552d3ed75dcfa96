//! `knotgenus`: orbit counting, normal surface analysis, the ONE-IN-THREE SAT
//! reduction and certificate checking from the command line.
//!
//! Exit codes: 0 success or accept, 1 reject (verdict on stdout), 2 usage
//! error or malformed input (message on stderr).

use std::fmt::Display;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use knotgenus_core::{count_orbits_oracle, run, PairingSystem, RunOptions, RunOutcome, WeightList};
use knotgenus_topology::certificate::{Certificate, Verdict, Verifier};
use knotgenus_topology::normal::{analyze_components, build_pairings, check_admissible, NormalVector};
use knotgenus_topology::sat::{reduce, CnfInstance, Literal};
use knotgenus_topology::{fixtures, KnotComplement, KnotSpec, TetComplex, Triangulation};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "knotgenus", version, about = "Orbit counting, normal surfaces and knot genus certificates")]
struct Cli {
    /// Write the orbit engine's per-step trace (cycle, step, n, k, x) as CSV.
    #[arg(long, global = true, value_name = "CSVPATH")]
    trace: Option<PathBuf>,
    /// Seed for generated fixtures.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest n the brute-force orbit oracle accepts.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    oracle_cap: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Orbits of interval pairing systems.
    #[command(subcommand)]
    Orbits(OrbitsCmd),
    /// Normal surfaces in a triangulation.
    #[command(subcommand)]
    Surface(SurfaceCmd),
    /// The ONE-IN-THREE SAT reduction.
    #[command(subcommand)]
    Reduce(ReduceCmd),
    /// Check a genus certificate for a knot.
    Verify {
        /// Triangulation JSON, or the output of `reduce sat`.
        tri: PathBuf,
        /// Knot as a JSON list of edge class ids, or the output of `reduce sat`.
        knot: PathBuf,
        /// Genus bound.
        g: BigInt,
        /// Certificate JSON.
        cert: PathBuf,
    },
    /// Generate inputs.
    #[command(subcommand)]
    Gen(GenCmd),
}

#[derive(Subcommand, Debug)]
enum OrbitsCmd {
    /// Number of orbits.
    Count { file: PathBuf },
    /// Per-orbit weight sums.
    Weighted { file: PathBuf, weights: PathBuf },
    /// Number of orbits by union-find over every point.
    Oracle { file: PathBuf },
}

#[derive(Args, Debug)]
struct SurfaceArgs {
    /// Triangulation JSON, or the output of `reduce sat`.
    tri: PathBuf,
    /// Normal vector JSON.
    vec: PathBuf,
    /// Read the vector in the complement of this knot (edge class ids, or
    /// the output of `reduce sat`).
    #[arg(long)]
    knot: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum SurfaceCmd {
    /// Number of connected components.
    Components(SurfaceArgs),
    /// Components with their topology.
    Analyze(SurfaceArgs),
    /// Matching equations and the quadrilateral condition; exit 1 if violated.
    Admissible(SurfaceArgs),
}

#[derive(Subcommand, Debug)]
enum ReduceCmd {
    /// Triangulation, knot and genus bound for a CNF instance (DIMACS or JSON).
    Sat { cnf: PathBuf },
    /// Certificate for a satisfying assignment, given as a file or inline
    /// as a JSON list of booleans or a string of 0/1 or T/F.
    Witness { cnf: PathBuf, assignment: String },
}

#[derive(Subcommand, Debug)]
enum GenCmd {
    /// A named triangulation, `random-system`, or `planted-cnf`.
    Fixture {
        name: String,
        /// Variables for `planted-cnf`.
        #[arg(long, default_value_t = 3)]
        vars: usize,
        /// Clauses for `planted-cnf`.
        #[arg(long, default_value_t = 2)]
        clauses: usize,
    },
}

enum Failure {
    Usage(String),
    Input(String),
}

fn bad(e: impl Display) -> Failure {
    Failure::Input(e.to_string())
}

type Res<T> = Result<T, Failure>;

fn read(path: &Path) -> Res<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(bad)?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_json(path: &Path) -> Res<Value> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// A triangulation file, or a `reduce sat` bundle holding one.
fn read_triangulation(path: &Path) -> Res<Triangulation> {
    let v = read_json(path)?;
    let inner = v.get("triangulation").unwrap_or(&v);
    Triangulation::from_json(&inner.to_string()).map_err(bad)
}

fn read_knot(path: &Path) -> Res<KnotSpec> {
    let v = read_json(path)?;
    let inner = v.get("knot").unwrap_or(&v);
    KnotSpec::from_json(&inner.to_string()).map_err(bad)
}

fn read_system(path: &Path) -> Res<PairingSystem> {
    PairingSystem::from_json(&read(path)?).map_err(bad)
}

fn read_vector(path: &Path) -> Res<NormalVector> {
    let v = read_json(path)?;
    // certificates carry their vector under "w"
    let inner = v.get("w").unwrap_or(&v);
    NormalVector::from_json_value(inner).map_err(bad)
}

fn parse_assignment(text: &str, n: usize) -> Res<Vec<bool>> {
    let text = match fs::read_to_string(text) {
        Ok(s) => s,
        Err(_) => text.to_string(),
    };
    let t = text.trim();
    let out: Vec<bool> = if t.starts_with('[') {
        serde_json::from_str(t).map_err(|e| Failure::Input(format!("assignment: {e}")))?
    } else {
        t.chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                '1' | 'T' | 't' => Ok(true),
                '0' | 'F' | 'f' => Ok(false),
                _ => Err(Failure::Input(format!("assignment: unexpected {c:?}"))),
            })
            .collect::<Res<_>>()?
    };
    if out.len() != n {
        return Err(Failure::Input(format!("assignment has {} values for {n} variables", out.len())));
    }
    Ok(out)
}

fn write_trace(path: &Path, out: &RunOutcome) -> Res<()> {
    let csv = out.trace.as_ref().map(|t| t.to_csv()).unwrap_or_default();
    fs::write(path, csv).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn run_traced(cli: &Cli, sys: &PairingSystem, weights: Option<&WeightList>) -> Res<RunOutcome> {
    let out = run(sys, weights, &RunOptions { trace: cli.trace.is_some(), ..Default::default() }).map_err(bad)?;
    if let Some(path) = &cli.trace {
        write_trace(path, &out)?;
    }
    Ok(out)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

/// Output and exit code of a successful run.
struct Done {
    stdout: String,
    code: u8,
}

fn ok(stdout: String) -> Res<Done> {
    Ok(Done { stdout, code: 0 })
}

/// Runs `f` on the triangulation, or on the knot complement when a knot is
/// given.
fn with_complex<T>(a: &SurfaceArgs, f: impl FnOnce(&dyn TetComplex) -> Res<T>) -> Res<T> {
    let t = read_triangulation(&a.tri)?;
    match &a.knot {
        None => f(&t),
        Some(k) => {
            let kc = KnotComplement::new(&t, &read_knot(k)?).map_err(bad)?;
            f(&kc)
        }
    }
}

fn dispatch(cli: &Cli) -> Res<Done> {
    let traced = matches!(
        cli.command,
        Command::Orbits(OrbitsCmd::Count { .. }) | Command::Orbits(OrbitsCmd::Weighted { .. }) | Command::Surface(SurfaceCmd::Components(_))
    );
    if cli.trace.is_some() && !traced {
        return Err(Failure::Usage("--trace applies to `orbits count`, `orbits weighted` and `surface components`".into()));
    }
    match &cli.command {
        Command::Orbits(OrbitsCmd::Count { file }) => {
            let sys = read_system(file)?;
            ok(run_traced(cli, &sys, None)?.orbits.to_string())
        }
        Command::Orbits(OrbitsCmd::Weighted { file, weights }) => {
            let sys = read_system(file)?;
            let w = WeightList::from_json(&read(weights)?).map_err(bad)?;
            ok(run_traced(cli, &sys, Some(&w))?.report.expect("weighted run").to_json())
        }
        Command::Orbits(OrbitsCmd::Oracle { file }) => {
            let sys = read_system(file)?;
            ok(count_orbits_oracle(&sys, cli.oracle_cap).map_err(bad)?.to_string())
        }
        Command::Surface(SurfaceCmd::Components(a)) => with_complex(a, |c| {
            let v = read_vector(&a.vec)?;
            let (sys, _) = build_pairings(c, &v).map_err(bad)?;
            ok(run_traced(cli, &sys, None)?.orbits.to_string())
        }),
        Command::Surface(SurfaceCmd::Analyze(a)) => with_complex(a, |c| {
            let v = read_vector(&a.vec)?;
            ok(pretty(&analyze_components(c, &v).map_err(bad)?.to_json_value()))
        }),
        Command::Surface(SurfaceCmd::Admissible(a)) => with_complex(a, |c| {
            let v = read_vector(&a.vec)?;
            match check_admissible(c, &v).map_err(bad)? {
                None => ok(pretty(&json!({ "admissible": true }))),
                Some(why) => Ok(Done { stdout: pretty(&json!({ "admissible": false, "violation": why.to_string() })), code: 1 }),
            }
        }),
        Command::Reduce(ReduceCmd::Sat { cnf }) => {
            let inst = CnfInstance::parse(&read(cnf)?).map_err(bad)?;
            ok(reduce(&inst).map_err(bad)?.to_json())
        }
        Command::Reduce(ReduceCmd::Witness { cnf, assignment }) => {
            let inst = CnfInstance::parse(&read(cnf)?).map_err(bad)?;
            let a = parse_assignment(assignment, inst.n)?;
            let r = reduce(&inst).map_err(bad)?;
            ok(r.assemble(&inst, &a).map_err(bad)?.to_json())
        }
        Command::Verify { tri, knot, g, cert } => {
            let t = read_triangulation(tri)?;
            let k = read_knot(knot)?;
            let cert = Certificate::from_json(&read(cert)?).map_err(bad)?;
            let verdict = Verifier::new(&t, &k, g.clone()).map_err(bad)?.verify(&cert).map_err(bad)?;
            let code = if matches!(verdict, Verdict::Accept { .. }) { 0 } else { 1 };
            Ok(Done { stdout: pretty(&verdict.to_json_value()), code })
        }
        Command::Gen(GenCmd::Fixture { name, vars, clauses }) => generate(cli.seed, name, *vars, *clauses),
    }
}

fn generate(seed: u64, name: &str, vars: usize, clauses: usize) -> Res<Done> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match name {
        "random-system" => {
            let n: i64 = rng.gen_range(1..=1000);
            let k = rng.gen_range(1..=8);
            let pairings = (0..k)
                .map(|_| {
                    let w = rng.gen_range(1..=(n + 1) / 2);
                    let a = rng.gen_range(1..=n - w + 1);
                    let c = rng.gen_range(1..=n - w + 1);
                    let iv = |lo: i64| knotgenus_core::Interval::new(lo.into(), (lo + w - 1).into()).unwrap();
                    knotgenus_core::Pairing::new(iv(a), iv(c), rng.gen_bool(0.5)).unwrap()
                })
                .collect();
            ok(PairingSystem::new(n.into(), pairings).map_err(bad)?.to_json())
        }
        "planted-cnf" => {
            if vars == 0 {
                return Err(Failure::Usage("planted-cnf needs at least one variable".into()));
            }
            let hidden: Vec<bool> = (0..vars).map(|_| rng.gen_bool(0.5)).collect();
            let lit = |var: usize, truth: bool| if hidden[var] == truth { Literal::pos(var) } else { Literal::neg(var) };
            let cs = (0..clauses)
                .map(|_| {
                    let mut c = [0; 3].map(|_| lit(rng.gen_range(0..vars), false));
                    c[rng.gen_range(0..3)] = lit(rng.gen_range(0..vars), true);
                    c
                })
                .collect();
            let inst = CnfInstance::new(vars, cs).map_err(bad)?;
            ok(inst.to_json())
        }
        _ => match fixtures::by_name(name) {
            Some(t) => ok(t.to_json()),
            None => {
                let names: Vec<&str> = fixtures::all().iter().map(|(n, _)| *n).collect();
                Err(Failure::Usage(format!("unknown fixture {name:?}; try random-system, planted-cnf, {}", names.join(", "))))
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(done) => {
            let mut out = io::stdout().lock();
            let _ = writeln!(out, "{}", done.stdout);
            ExitCode::from(done.code)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("{}", json!({ "error": msg }));
            ExitCode::from(2)
        }
    }
}
