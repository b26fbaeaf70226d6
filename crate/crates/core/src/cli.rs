//! Command-line front end: argument parsing, job dispatch and JSON reports.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cobordism::{compose_movie, parse_movie};
use crate::cube::FrobeniusFlavor;
use crate::diagram::{parse_named_pd, PlanarDiagram};
use crate::error::{Error, Result};
use crate::exactalg::Coefficients;
use crate::homology::{bar_natan_homology, khovanov_homology};
use crate::refine::{export_basis, refined_invariants, s_field, s_integral, Operation, OperationMatrix, SCHEMA};

#[derive(Debug, Parser)]
#[command(name = "khref", version, about = "Khovanov homology, s-invariants and their refinements")]
pub struct Cli {
    /// Worker threads for batch jobs and per-grading sections.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the JSON report here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Input {
    /// Inline diagram, e.g. `PD[X[1,4,2,5],X[3,6,4,1],X[5,2,6,3]]`.
    #[arg(long, conflicts_with = "knot")]
    pub pd: Option<String>,
    /// File holding a diagram, either bare or as `name<TAB>PD[...]`.
    #[arg(long)]
    pub knot: Option<PathBuf>,
    /// Use the mirror of the diagram.
    #[arg(long)]
    pub mirror: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FlavorArg {
    Khovanov,
    BarNatan,
}

impl From<FlavorArg> for FrobeniusFlavor {
    fn from(f: FlavorArg) -> Self {
        match f {
            FlavorArg::Khovanov => FrobeniusFlavor::Khovanov,
            FlavorArg::BarNatan => FrobeniusFlavor::BarNatan,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RefineArgs {
    #[arg(long, default_value = "f2")]
    pub field: Coefficients,
    /// `sq1`, `zero`, or a path to an operation file.
    #[arg(long, default_value = "sq1")]
    pub op: String,
    /// Operation file for the mirror, required with an imported operation.
    #[arg(long)]
    pub mirror_op: Option<PathBuf>,
    /// Include the certifying elements in the report.
    #[arg(long)]
    pub witnesses: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bigraded Khovanov homology.
    Kh {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "z")]
        ring: Coefficients,
    },
    /// Bar-Natan homology by homological degree.
    Bn {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "q")]
        ring: Coefficients,
    },
    /// s_min, s_max and s over a field.
    S {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "q")]
        field: Coefficients,
    },
    /// Integral s-invariants for a modulus m >= 1.
    Sz {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1)]
        m: u64,
    },
    /// r and s refined by a cohomology operation.
    Refine {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        refine: RefineArgs,
    },
    /// Canonical homology basis and its fingerprint.
    Basis {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "f2")]
        field: Coefficients,
    },
    /// Chain map of a movie of Morse moves.
    Cobordism {
        #[command(flatten)]
        input: Input,
        /// JSON list of moves.
        #[arg(long)]
        movie: PathBuf,
        #[arg(long, value_enum, default_value = "bar-natan")]
        flavor: FlavorArg,
        /// Field for the induced maps on homology.
        #[arg(long, default_value = "q")]
        field: Coefficients,
    },
    /// Runs one command over every diagram of a corpus file.
    Batch {
        /// Lines of `name<TAB>PD[...]`; further columns are ignored.
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_enum)]
        cmd: BatchCommand,
        #[arg(long, default_value = "q")]
        field: Coefficients,
        #[arg(long, default_value_t = 1)]
        m: u64,
        /// Operation for `refine`: `sq1` or `zero`.
        #[arg(long, default_value = "sq1")]
        op: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BatchCommand {
    Kh,
    Bn,
    S,
    Sz,
    Refine,
}

fn read_diagram_text(text: &str) -> Result<(Option<String>, PlanarDiagram)> {
    let line = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .ok_or_else(|| Error::Parse("no diagram found".into()))?;
    match line.split_once('\t') {
        Some((name, rest)) if !name.starts_with('{') => {
            let pd = rest.split('\t').next().unwrap_or(rest);
            Ok((Some(name.to_string()), parse_named_pd(pd)?.1))
        }
        _ => parse_named_pd(line),
    }
}

impl Input {
    pub fn load(&self) -> Result<PlanarDiagram> {
        let d = match (&self.pd, &self.knot) {
            (Some(pd), _) => parse_named_pd(pd)?.1,
            (None, Some(path)) => read_diagram_text(&std::fs::read_to_string(path)?)?.1,
            (None, None) => return Err(Error::Parse("give a diagram with --pd or --knot".into())),
        };
        Ok(if self.mirror { d.mirror() } else { d })
    }
}

/// Reads `name<TAB>PD[...]` lines.
pub fn read_corpus(path: &Path) -> Result<Vec<(String, PlanarDiagram)>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(n, l)| {
            let (name, d) = read_diagram_text(l).map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))?;
            Ok((name.unwrap_or_else(|| format!("line{}", n + 1)), d))
        })
        .collect()
}

fn with_schema<T: Serialize>(value: &T) -> Result<Value> {
    let mut v = serde_json::to_value(value)?;
    if let Value::Object(map) = &mut v {
        map.insert("schema".into(), json!(SCHEMA));
    }
    Ok(v)
}

fn parse_operation(spec: &str) -> Result<Operation> {
    match spec {
        "sq1" => Ok(Operation::Sq1),
        "zero" => Ok(Operation::Zero),
        path => Ok(Operation::Imported(OperationMatrix::from_json(&std::fs::read_to_string(path)?)?)),
    }
}

fn refine_report(d: &PlanarDiagram, args: &RefineArgs) -> Result<Value> {
    let op = parse_operation(&args.op)?;
    let mirror_op = match &args.mirror_op {
        Some(p) => Some(parse_operation(&p.to_string_lossy())?),
        None => None,
    };
    let r = refined_invariants(d, args.field, &op, mirror_op.as_ref())?;
    let mut v = json!({
        "field": args.field,
        "operation": args.op,
        "s_min": r.s_min,
        "s_max": r.s_max,
        "s": r.s,
        "r_plus": r.r_plus,
        "s_plus": r.s_plus,
        "r_minus": r.r_minus,
        "s_minus": r.s_minus,
    });
    if args.witnesses {
        v["witnesses"] = serde_json::to_value(&r.witnesses)?;
    }
    with_schema(&v)
}

fn batch_item(d: &PlanarDiagram, cmd: BatchCommand, field: Coefficients, m: u64, op: &str) -> Result<Value> {
    match cmd {
        BatchCommand::Kh => with_schema(&khovanov_homology(d, field)?),
        BatchCommand::Bn => with_schema(&bar_natan_homology(d, field)?),
        BatchCommand::S => with_schema(&s_field(d, field)?),
        BatchCommand::Sz => with_schema(&s_integral(d, m)?),
        BatchCommand::Refine => {
            if op != "sq1" && op != "zero" {
                return Err(Error::Parse("batch refine takes --op sq1 or --op zero".into()));
            }
            let args = RefineArgs { field, op: op.to_string(), mirror_op: None, witnesses: false };
            refine_report(d, &args)
        }
    }
}

fn error_value(e: &Error) -> Value {
    json!({ "schema": SCHEMA, "error": { "kind": e.kind(), "message": e.to_string(), "exit_code": e.exit_code() } })
}

/// Runs one parsed invocation and returns its JSON report.
pub fn execute(cli: &Cli) -> Result<Value> {
    match &cli.command {
        Command::Kh { input, ring } => with_schema(&khovanov_homology(&input.load()?, *ring)?),
        Command::Bn { input, ring } => with_schema(&bar_natan_homology(&input.load()?, *ring)?),
        Command::S { input, field } => {
            let s = s_field(&input.load()?, *field)?;
            with_schema(&json!({ "field": field, "s_min": s.s_min, "s_max": s.s_max, "s": s.s }))
        }
        Command::Sz { input, m } => with_schema(&s_integral(&input.load()?, *m)?),
        Command::Refine { input, refine } => refine_report(&input.load()?, refine),
        Command::Basis { input, field } => with_schema(&export_basis(&input.load()?, *field)?),
        Command::Cobordism { input, movie, flavor, field } => {
            let d = input.load()?;
            let moves = parse_movie(&std::fs::read_to_string(movie)?)?;
            let map = compose_movie(&d, &moves, (*flavor).into())?;
            let ranks = map
                .source_complex()
                .groups()
                .iter()
                .map(|g| {
                    let r = crate::with_field!(*field, |f| map.induced_on_homology(f, g.i)?.rank());
                    Ok((g.i.to_string(), json!(r)))
                })
                .collect::<Result<serde_json::Map<String, Value>>>()?;
            with_schema(&json!({
                "source": map.source.to_pd_string(),
                "target": map.target.to_pd_string(),
                "flavor": map.flavor,
                "euler_characteristic": map.euler_characteristic,
                "is_chain_map": map.is_chain_map(),
                "respects_filtered_degree": map.respects_filtered_degree(),
                "field": field,
                "induced_ranks": ranks,
            }))
        }
        Command::Batch { corpus, cmd, field, m, op } => {
            let items = read_corpus(corpus)?;
            let rows: Vec<Value> = items
                .par_iter()
                .map(|(name, d)| match batch_item(d, *cmd, *field, *m, op) {
                    Ok(v) => json!({ "name": name, "result": v }),
                    Err(e) => json!({ "name": name, "error": error_value(&e)["error"] }),
                })
                .collect();
            Ok(json!({ "schema": SCHEMA, "rows": rows }))
        }
    }
}

/// Parses `argv` (including the program name) and runs the job without
/// printing, for embedding.
pub fn run_to_json<I, T>(argv: I) -> Result<Value>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::Parse(e.to_string()))?;
    execute(&cli)
}

/// The structured error report for `e`.
pub fn error_report(e: &Error) -> Value {
    error_value(e)
}

fn emit(cli: &Cli, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v)? + "\n";
    match &cli.output {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Parses `argv`, runs the job and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        // a global pool can only be installed once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let result = execute(&cli).and_then(|v| emit(&cli, &v));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", error_value(&e));
            e.exit_code()
        }
    }
}
