//! Argument parsing, dispatch and rendering for the `grassmann` binary.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use grassmann_core::colorings::{
    hawtin_coloring, johnson_sum_coloring, kneser_point_coloring, moore_coloring, verify_coloring, Coloring,
    HawtinMap,
};
use grassmann_core::gfarith::FieldCtx;
use grassmann_core::graphs::GraphHandle;
use grassmann_core::oracle::{DEFAULT_EXACT_CAP, DEFAULT_NODE_BUDGET};
use grassmann_core::projlinalg::DEFAULT_ENUM_CAP;
use grassmann_core::reports::{bounds, check_params, induced, info, Caps, ReportError};
use serde::Serialize;
use serde_json::Value;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_CAP: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "grassmann", version, about = "Colorings and chromatic bounds for Grassmann graphs J_q(n, m)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form vertex count, valency and chromatic bounds
    Info(Params),
    /// Build a coloring, verify it and classify its color classes
    Color(Params),
    /// Clique, greedy and optionally exact bounds on the chromatic number
    Bounds(Params),
    /// Kneser subgraph induced by the images of lines under the Hawtin map
    Induced(Params),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum MethodArg {
    Moore,
    Hawtin,
    KneserPoint,
    JohnsonSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Args)]
pub struct Params {
    #[arg(long, default_value_t = 2)]
    pub q: u64,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Moore)]
    pub method: MethodArg,
    /// Run the exact chromatic solver
    #[arg(long)]
    pub exact: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_ENUM_CAP)]
    pub enum_cap: u64,
    #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
    pub exact_cap: usize,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub node_budget: u64,
}

impl Params {
    fn caps(&self) -> Caps {
        Caps { enum_cap: self.enum_cap, exact_cap: self.exact_cap, node_budget: self.node_budget }
    }
}

/// A rendered report and whether it describes a valid result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub valid: bool,
}

pub fn exit_code(e: &ReportError) -> u8 {
    match e {
        ReportError::Config(_) => EXIT_CONFIG,
        ReportError::Cap(_) => EXIT_CAP,
    }
}

pub fn run(cli: &Cli) -> Result<Output, ReportError> {
    match &cli.command {
        Command::Info(p) => render_report(&info(p.q, p.n, p.m)?, p.format),
        Command::Color(p) => cmd_color(p),
        Command::Bounds(p) => render_report(&bounds(p.q, p.n, p.m, p.exact, p.caps())?, p.format),
        Command::Induced(p) => render_report(&induced(p.q, p.n, p.caps())?, p.format),
    }
}

/// Runs `cli` and writes the report, returning the process exit code.
pub fn execute(cli: &Cli) -> u8 {
    let out = match &cli.command {
        Command::Info(p) | Command::Color(p) | Command::Bounds(p) | Command::Induced(p) => p.out.clone(),
    };
    let output = match run(cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let written = match out {
        Some(path) => std::fs::write(&path, &output.text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{}", output.text);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_CONFIG;
    }
    if output.valid {
        EXIT_OK
    } else {
        eprintln!("error: coloring is not proper");
        EXIT_INVALID
    }
}

pub fn build_coloring(p: &Params) -> Result<Coloring, ReportError> {
    let cap = p.enum_cap;
    match p.method {
        MethodArg::Moore => {
            let (pr, e) = check_params(p.q, p.n, p.m)?;
            let ctx = FieldCtx::new(pr, e, p.n as u32)?;
            let graph = Arc::new(GraphHandle::grassmann(ctx.base(), p.n, p.m, cap)?);
            Ok(moore_coloring(graph, &ctx)?)
        }
        MethodArg::Hawtin => {
            check_params(p.q, p.n, p.m)?;
            if p.m != 2 {
                return Err(ReportError::Config(format!("hawtin colors lines only, got m = {}", p.m)));
            }
            let map = HawtinMap::new(p.q, p.n)?;
            let graph = Arc::new(GraphHandle::grassmann(map.ctx().base(), p.n, 2, cap)?);
            Ok(hawtin_coloring(graph, &map)?)
        }
        MethodArg::KneserPoint => {
            let (pr, e) = check_params(p.q, p.n, p.m)?;
            let ctx = FieldCtx::new(pr, e, 1)?;
            let graph = Arc::new(GraphHandle::qkneser(ctx.base(), p.n, p.m, cap)?);
            Ok(kneser_point_coloring(graph)?)
        }
        MethodArg::JohnsonSum => {
            let graph = Arc::new(GraphHandle::johnson(p.n, p.m, cap)?);
            Ok(johnson_sum_coloring(graph)?)
        }
    }
}

fn cmd_color(p: &Params) -> Result<Output, ReportError> {
    let coloring = build_coloring(p)?;
    let report = verify_coloring(&coloring);
    let text = match p.format {
        Format::Csv => coloring_csv(&coloring)?,
        f => render_report(&report, f)?.text,
    };
    Ok(Output { text, valid: report.valid })
}

fn coloring_csv(c: &Coloring) -> Result<String, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| ReportError::Config(e.to_string());
    w.write_record(["vertex_index", "vertex_rref", "color_code"]).map_err(io)?;
    for (i, key, color) in c.csv_rows() {
        w.serialize((i, key, color)).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| ReportError::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn render_report<T: Serialize>(report: &T, format: Format) -> Result<Output, ReportError> {
    let value = serde_json::to_value(report).map_err(|e| ReportError::Config(e.to_string()))?;
    let text = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&value).expect("json value serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| ReportError::Config(e.to_string());
            w.write_record(["field", "value"]).map_err(io)?;
            for (k, v) in flatten(&value) {
                w.write_record([k, v]).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| ReportError::Config(e.to_string()))?;
            String::from_utf8(bytes).expect("csv output is utf-8")
        }
        Format::Table => {
            let rows = flatten(&value);
            let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            let mut s = String::new();
            for (k, v) in rows {
                writeln!(s, "{k:<width$}  {v}").expect("string write");
            }
            s
        }
    };
    Ok(Output { text, valid: value.get("valid").and_then(Value::as_bool).unwrap_or(true) })
}

/// Dotted-path leaves of a JSON value in document order.
pub fn flatten(value: &Value) -> Vec<(String, String)> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(map) => map.iter().for_each(|(k, v)| walk(&join(k), v, out)),
            Value::Array(items) => items.iter().enumerate().for_each(|(i, v)| walk(&join(&i.to_string()), v, out)),
            Value::String(s) => out.push((prefix.to_string(), s.clone())),
            Value::Null => out.push((prefix.to_string(), String::new())),
            other => out.push((prefix.to_string(), other.to_string())),
        }
    }
    let mut out = Vec::new();
    walk("", value, &mut out);
    out
}
