use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qmpath::cauchon::enumerate_cauchon_diagrams;
use qmpath::groebner::{hprime_minors, minimal_groebner};
use qmpath::minors::minor_poly;
use qmpath::verify::{
    ddalg_suite, groebner_suite, lindstrom_suite, path_identity_suite, relations_suite, shapes_up_to, SuiteReport,
};
use qmpath::{CauchonGraph, Diagram, Error, HPrimeHandle, MinorSpec, Shape, Threshold, SCHEMA_VERSION};

#[derive(Parser)]
#[command(name = "qmpath", version, about = "Cauchon graphs, path models and Gröbner bases for quantum matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphFormat {
    Dot,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Relations,
    Lindstrom,
    Ddalg,
    Groebner,
    All,
}

#[derive(Args)]
struct DiagramSource {
    /// Inline diagram: rows of '#' (black) and '.' (white) joined by '/'.
    #[arg(long, short = 'd', conflicts_with = "diagram_file")]
    diagram: Option<String>,
    /// File holding one diagram row per line.
    #[arg(long)]
    diagram_file: Option<PathBuf>,
}

impl DiagramSource {
    fn load(&self) -> Result<Diagram, CliError> {
        let text = match (&self.diagram, &self.diagram_file) {
            (Some(s), _) => s.clone(),
            (None, Some(p)) => std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?,
            (None, None) => return Err(CliError::Usage("a diagram is required (--diagram or --diagram-file)".into())),
        };
        Ok(Diagram::parse(&text)?)
    }

    fn load_cauchon(&self) -> Result<Diagram, CliError> {
        let d = self.load()?;
        if let Some(v) = d.violation() {
            return Err(Error::NotCauchon(v).into());
        }
        Ok(d)
    }
}

#[derive(Subcommand)]
enum Command {
    /// List the Cauchon diagrams of an m×n grid.
    Diagrams {
        m: usize,
        n: usize,
        #[arg(long)]
        count_only: bool,
        /// Allow a single row or column.
        #[arg(long)]
        relaxed: bool,
        /// Largest m·n accepted.
        #[arg(long, default_value_t = 16)]
        cap: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check the Cauchon condition.
    Validate {
        #[command(flatten)]
        source: DiagramSource,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Export the Cauchon graph.
    Graph {
        #[command(flatten)]
        source: DiagramSource,
        #[arg(long, value_enum, default_value_t = GraphFormat::Dot)]
        format: GraphFormat,
    },
    /// Path-sum generator matrix at a threshold.
    Generators {
        #[command(flatten)]
        source: DiagramSource,
        /// Threshold in 1..=mn; defaults to mn.
        #[arg(long, short = 't')]
        t: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Evaluate a quantum minor through its vertex-disjoint path systems.
    Minor {
        #[command(flatten)]
        source: DiagramSource,
        /// Minor such as "[1,2|1,3]" or "[12|13]".
        spec: String,
        #[arg(long, short = 't')]
        t: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Kernel minors spanning the torus-invariant prime.
    Hprime {
        #[command(flatten)]
        source: DiagramSource,
        #[arg(long, short = 't')]
        t: Option<usize>,
        /// Only minors with no diagonal subminor in the kernel (t = mn).
        #[arg(long)]
        minimal: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Largest shape covered, as "M N".
        #[arg(long, num_args = 2, value_names = ["M", "N"], default_values_t = [3, 3])]
        max: Vec<usize>,
        /// Restrict the Gröbner suite to one diagram.
        #[command(flatten)]
        source: DiagramSource,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

enum CliError {
    Usage(String),
    Lib(Error),
    Io(io::Error),
    Failed,
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

fn threshold(shape: Shape, t: Option<usize>) -> Result<Threshold, CliError> {
    match t {
        Some(t) => Ok(Threshold::new(shape, t)?),
        None => Ok(Threshold::top(shape)),
    }
}

fn print_json(out: &mut impl Write, v: Value) -> io::Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("JSON values always serialize"))
}

fn run(cli: Cli, out: &mut impl Write) -> Result<(), CliError> {
    match cli.command {
        Command::Diagrams { m, n, count_only, relaxed, cap, format } => {
            let shape = if relaxed { Shape::relaxed(m, n)? } else { Shape::new(m, n)? };
            if shape.size() > cap {
                return Err(Error::CapExceeded { cells: shape.size(), cap }.into());
            }
            let all = enumerate_cauchon_diagrams(shape);
            match (format, count_only) {
                (Format::Text, true) => writeln!(out, "{}", all.len())?,
                (Format::Text, false) => {
                    for d in &all {
                        writeln!(out, "{}\n", d.to_text())?;
                    }
                }
                (Format::Json, _) => {
                    let mut v = json!({"schema_version": SCHEMA_VERSION, "m": m, "n": n, "count": all.len()});
                    if !count_only {
                        v["diagrams"] = all.iter().map(Diagram::to_json).collect();
                    }
                    print_json(out, v)?;
                }
            }
        }
        Command::Validate { source, format } => {
            let d = source.load()?;
            let violation = d.violation();
            match format {
                Format::Text => match violation {
                    None => writeln!(out, "Cauchon")?,
                    Some(c) => writeln!(out, "not Cauchon: black square {c} has a white square both to its left and above")?,
                },
                Format::Json => print_json(out, json!({
                    "schema_version": SCHEMA_VERSION,
                    "diagram": d.to_inline(),
                    "cauchon": violation.is_none(),
                    "violation": violation.map(|c| [c.row, c.col]),
                }))?,
            }
            if violation.is_some() {
                return Err(CliError::Failed);
            }
        }
        Command::Graph { source, format } => {
            let g = CauchonGraph::build(&source.load_cauchon()?)?;
            match format {
                GraphFormat::Dot => write!(out, "{}", g.export_dot())?,
                GraphFormat::Json => print_json(out, json!({
                    "schema_version": SCHEMA_VERSION,
                    "diagram": g.diagram().to_json(),
                    "edges": g.edges().iter().map(|(u, v, _)| [u.to_string(), v.to_string()]).collect::<Vec<_>>(),
                }))?,
            }
        }
        Command::Generators { source, t, format } => {
            let d = source.load_cauchon()?;
            let th = threshold(d.shape(), t)?;
            let h = HPrimeHandle::new(&d, th)?;
            match format {
                Format::Text => {
                    for c in d.shape().coords() {
                        writeln!(out, "x_{{{},{}}} = {}", c.row, c.col, h.generator(c))?;
                    }
                }
                Format::Json => print_json(out, json!({
                    "schema_version": SCHEMA_VERSION,
                    "diagram": d.to_inline(),
                    "t": th.t,
                    "generators": d.shape().coords().map(|c| json!({
                        "coord": [c.row, c.col],
                        "value": h.generator(c).to_json(),
                    })).collect::<Vec<_>>(),
                }))?,
            }
        }
        Command::Minor { source, spec, t, format } => {
            let d = source.load_cauchon()?;
            let th = threshold(d.shape(), t)?;
            let h = HPrimeHandle::new(&d, th)?;
            let spec = MinorSpec::parse(&spec)?;
            let systems = h.vdps(&spec)?;
            let value = h.lindstrom_eval(&spec)?;
            let direct = h.sigma(&minor_poly(&spec, &th)?)?;
            if value != direct {
                eprintln!("path sum {value} disagrees with the expanded minor {direct}");
                return Err(CliError::Failed);
            }
            match format {
                Format::Text => {
                    writeln!(out, "{spec} = {value}")?;
                    for sys in &systems {
                        let paths: Vec<String> = sys.paths.iter().map(ToString::to_string).collect();
                        writeln!(out, "  {}", paths.join(" "))?;
                    }
                }
                Format::Json => print_json(out, json!({
                    "schema_version": SCHEMA_VERSION,
                    "diagram": d.to_inline(),
                    "t": th.t,
                    "minor": spec.to_string(),
                    "value": value.to_json(),
                    "in_kernel": value.is_zero(),
                    "systems": systems.iter().map(|s| s.paths.iter().map(ToString::to_string).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                }))?,
            }
        }
        Command::Hprime { source, t, minimal, format } => {
            let d = source.load_cauchon()?;
            let th = threshold(d.shape(), t)?;
            let h = HPrimeHandle::new(&d, th)?;
            let members: Vec<String> = if minimal {
                minimal_groebner(&h)?.iter().map(ToString::to_string).collect()
            } else {
                hprime_minors(&h)?.iter().map(ToString::to_string).collect()
            };
            match format {
                Format::Text => {
                    for m in &members {
                        writeln!(out, "{m}")?;
                    }
                }
                Format::Json => print_json(out, json!({
                    "schema_version": SCHEMA_VERSION,
                    "diagram": d.to_inline(),
                    "t": th.t,
                    "minimal": minimal,
                    "basis": members,
                }))?,
            }
        }
        Command::Verify { suite, max, source, samples, seed, format } => {
            let shapes = shapes_up_to(max[0], max[1]);
            let only = if source.diagram.is_some() || source.diagram_file.is_some() {
                Some(source.load_cauchon()?)
            } else {
                None
            };
            let mut reports: Vec<SuiteReport> = Vec::new();
            let wants = |s: Suite| suite == s || suite == Suite::All;
            if wants(Suite::Relations) {
                reports.push(relations_suite(&shapes)?);
            }
            if wants(Suite::Lindstrom) {
                reports.push(lindstrom_suite(&shapes)?);
            }
            if wants(Suite::Ddalg) {
                reports.push(ddalg_suite(&shapes, samples, seed)?);
                reports.push(path_identity_suite(&shapes)?);
            }
            if wants(Suite::Groebner) {
                let diagrams = match &only {
                    Some(d) => vec![d.clone()],
                    None => shapes.iter().flat_map(|&s| enumerate_cauchon_diagrams(s)).collect(),
                };
                reports.push(groebner_suite(&diagrams, samples, seed)?);
            }
            let ok = reports.iter().all(SuiteReport::passed);
            match format {
                Format::Text => {
                    for r in &reports {
                        let status = if r.passed() { "PASS" } else { "FAIL" };
                        writeln!(out, "{status} {} ({} checks, {} failures)", r.name, r.checks, r.failures.len())?;
                        for f in &r.failures {
                            writeln!(out, "  {f}")?;
                        }
                    }
                }
                Format::Json => print_json(out, json!({
                    "schema_version": SCHEMA_VERSION,
                    "passed": ok,
                    "suites": reports.iter().map(SuiteReport::to_json).collect::<Vec<_>>(),
                }))?,
            }
            if !ok {
                return Err(CliError::Failed);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = run(cli, &mut out).and_then(|()| out.flush().map_err(CliError::from));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(CliError::Failed) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
