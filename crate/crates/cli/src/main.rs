//! `polyvol`: classification, volumes, rectification, admissibility checks and
//! angle flows for generalized hyperbolic polyhedra.
//!
//! Exit status is 0 on success, 1 on a domain error (reported on stderr as
//! `ERR <code> <detail>`) and 2 on a usage error.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polyvol::flow::{nudge_adaptive, run_flow, FlowOptions};
use polyvol::graphs::{check_bao_bonahon, parse_graph, Admissibility, PlanarGraph};
use polyvol::numfmt::format_sig;
use polyvol::polyhedron::{parse_polyhedron, Polyhedron};
use polyvol::rectify::rectification;
use polyvol::volume::{truncation_volume, volume_with, QuadratureOptions};
use polyvol::{Error, PointKind};

const SEED_VAR: &str = "POLYVOL_SEED";

#[derive(Parser, Debug)]
#[command(name = "polyvol", version, about = "Generalized hyperbolic polyhedra in the projective model")]
#[command(after_help = "Environment: POLYVOL_SEED overrides --seed.\n\
Domain errors exit with status 1 and print `ERR <code> <detail>`; usage errors exit with status 2.")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Write the result here instead of standard output.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Absolute tolerance of the volume quadrature.
    #[arg(long, global = true, default_value_t = 1e-5)]
    tol: f64,
    /// Evaluation budget of the volume quadrature.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    budget: usize,
    /// Seed of the random perturbation used by `flow`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the kind and properness status of every vertex.
    Classify { polyhedron: PathBuf },
    /// Check a dihedral angle vector against the Bao-Bonahon conditions.
    AnglesCheck {
        graph: PathBuf,
        /// One angle per edge, in the edge order of the graph, separated by commas.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true, allow_negative_numbers = true)]
        angles: Vec<f64>,
    },
    /// Print `VOL <value> <error>` for the truncation of a polyhedron.
    Volume { polyhedron: PathBuf },
    /// Print the rectification of a graph and its volume.
    Rectify { graph: PathBuf },
    /// Run the angle flow from a polyhedron and print the trace as CSV.
    Flow {
        polyhedron: PathBuf,
        /// Smallest angle scale visited.
        #[arg(long, default_value_t = 0.02)]
        t_min: f64,
        /// Maximum number of events; defaults to ten times the edge count.
        #[arg(long)]
        max_events: Option<usize>,
    },
    /// Run the acceptance criteria and print PASS/FAIL per criterion.
    Selftest {
        /// Run only this criterion.
        #[arg(long)]
        criterion: Option<usize>,
    },
}

/// Failure of a command: a library error or a CLI-level one.
enum Failure {
    Domain(Error),
    Io(String),
    Usage(String),
    /// Some acceptance criteria failed; the report was already written.
    Selftest(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn read_graph(path: &PathBuf) -> Result<PlanarGraph, Failure> {
    Ok(parse_graph(&read(path)?)?)
}

fn read_polyhedron(path: &PathBuf) -> Result<Polyhedron, Failure> {
    Ok(parse_polyhedron(&read(path)?)?)
}

fn vol_line(value: f64, error: f64) -> String {
    format!("VOL {} {}\n", format_sig(value), format_sig(error))
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn classify(p: &Polyhedron) -> String {
    let report = p.classify_vertices();
    report.kinds.iter().zip(&report.statuses).map(|(k, s)| format!("{k} {s}\n")).collect()
}

fn angles_check(g: &PlanarGraph, angles: &[f64]) -> Result<String, Failure> {
    let verdict = check_bao_bonahon(g, angles)?;
    let mut out = format!("{}\n", verdict.name());
    if let Some(w) = verdict.witness() {
        let kind = match verdict {
            Admissibility::ViolatedArc(_) => "arc",
            _ => "curve",
        };
        out.push_str(&format!(
            "WITNESS {kind} faces {} edges {} sum {} bound {}\n",
            join(&w.faces),
            join(&w.edges),
            format_sig(w.sum),
            format_sig(w.bound)
        ));
    }
    Ok(out)
}

fn seed(common: &Common) -> Result<u64, Failure> {
    match std::env::var(SEED_VAR) {
        Ok(s) => s.trim().parse().map_err(|_| Failure::Usage(format!("{SEED_VAR} must be an unsigned integer, got {s:?}"))),
        Err(_) => Ok(common.seed),
    }
}

fn execute(cli: &Cli) -> Result<String, Failure> {
    let c = &cli.common;
    if !(c.tol > 0.0) || c.budget == 0 {
        return Err(Failure::Usage("--tol and --budget must be positive".into()));
    }
    let quad = QuadratureOptions { tol: c.tol, budget: c.budget };
    match &cli.command {
        Command::Classify { polyhedron } => Ok(classify(&read_polyhedron(polyhedron)?)),
        Command::AnglesCheck { graph, angles } => angles_check(&read_graph(graph)?, angles),
        Command::Volume { polyhedron } => {
            let v = volume_with(&read_polyhedron(polyhedron)?, &quad)?;
            Ok(vol_line(v.value, v.error_estimate))
        }
        Command::Rectify { graph } => {
            let p = rectification(&read_graph(graph)?)?;
            let v = truncation_volume(&p.truncate()?, &quad)?;
            Ok(format!("{}{}", p.to_text_with(format_sig), vol_line(v.value, v.error_estimate)))
        }
        Command::Flow { polyhedron, t_min, max_events } => {
            let mut p = read_polyhedron(polyhedron)?;
            if p.classify_vertices().count(PointKind::Ideal) > 0 {
                p = nudge_adaptive(&p)?.0;
            }
            let opts = FlowOptions {
                seed: seed(c)?,
                t_min: *t_min,
                max_events: *max_events,
                final_quadrature: quad,
                ..FlowOptions::default()
            };
            let trace = run_flow(&p, &opts)?;
            if let Some(reason) = &trace.stopped_early {
                eprintln!("flow stopped early: {reason}");
            }
            Ok(trace.to_csv())
        }
        Command::Selftest { criterion } => {
            let outcomes = match criterion {
                Some(id) => vec![polyvol::acceptance::run_criterion(*id)
                    .ok_or_else(|| Failure::Usage(format!("no criterion {id}")))?],
                None => polyvol::acceptance::run_all(),
            };
            let report: String = outcomes.iter().map(|o| format!("{}\n", o.line())).collect();
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            emit(c, &report)?;
            if failed > 0 {
                return Err(Failure::Selftest(failed));
            }
            Ok(String::new())
        }
    }
}

fn emit(c: &Common, text: &str) -> Result<(), Failure> {
    match &c.output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = execute(&cli).and_then(|text| if text.is_empty() { Ok(()) } else { emit(&cli.common, &text) });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(e)) => {
            eprintln!("ERR {} {e}", e.code());
            ExitCode::from(1)
        }
        Err(Failure::Io(detail)) => {
            eprintln!("ERR Io {detail}");
            ExitCode::from(1)
        }
        Err(Failure::Selftest(n)) => {
            eprintln!("ERR SelftestFailed {n} criteria failed");
            ExitCode::from(1)
        }
        Err(Failure::Usage(detail)) => {
            eprintln!("error: {detail}");
            ExitCode::from(2)
        }
    }
}
