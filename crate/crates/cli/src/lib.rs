//! The `netcomp` command line.
//!
//! [`run`] parses the arguments, dispatches to the library and writes the
//! report; it returns the process exit code.
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | verification failure, counterexample, or an infeasible tree rate |
//! | 2 | malformed input |
//! | 3 | refused by a size budget |

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

mod commands;
mod format;
mod input;

pub use input::Source;

/// Output schema version carried by every `--json` report.
pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "NETCOMP_THREADS";

#[derive(Parser, Debug)]
#[command(name = "netcomp", version, about = "Cut-set bounds and function-computing codes on acyclic networks")]
pub struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for the analyses (0 = all available).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// One cut-set bound with its witness.
    Bound(BoundArgs),
    /// Every applicable bound next to the rate of a verified code.
    Compare(CompareArgs),
    /// Equivalence classes for an index set and a context, or for a cut.
    Classes(ClassesArgs),
    /// Exhaustively check a code.
    Verify(CodeArgs),
    /// Run a code on one input block.
    Simulate(SimulateArgs),
    /// Exhaustive search for an (n, k) code.
    Search(SearchArgs),
    /// Optimal code construction on a multi-edge tree.
    Tree(TreeArgs),
    /// Print the network with every source made free of incoming edges.
    SplitSources(SplitArgs),
    /// Print or write a bundled instance.
    Instance(InstanceArgs),
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[command(flatten)]
    pub source: Source,
    /// min-cut, min-cut-a, min-cut-k, prop2 or prop1.
    #[arg(long, default_value = "min-cut")]
    pub kind: String,
    /// Skip reducible cuts.
    #[arg(long)]
    pub irreducible: bool,
    #[arg(long, value_name = "N")]
    pub max_cut_size: Option<usize>,
    /// List every enumerated cut.
    #[arg(long)]
    pub all_cuts: bool,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[command(flatten)]
    pub source: Source,
    /// Code to verify; defaults to the bundled one.
    #[arg(long, value_name = "FILE")]
    pub code: Option<PathBuf>,
    #[arg(long)]
    pub irreducible: bool,
}

#[derive(Args, Debug)]
pub struct ClassesArgs {
    #[command(flatten)]
    pub source: Source,
    /// Index set I, 1-based, comma separated.
    #[arg(long, value_name = "LIST", conflicts_with = "cut")]
    pub index: Option<String>,
    /// Context set J, 1-based, comma separated.
    #[arg(long, value_name = "LIST", conflicts_with = "cut")]
    pub context: Option<String>,
    /// Pinned symbols for J, comma separated.
    #[arg(long, value_name = "LIST", conflicts_with = "cut")]
    pub values: Option<String>,
    /// Cut edges; uses I_C, J_C and the maximizing context.
    #[arg(long, value_name = "EDGES")]
    pub cut: Option<String>,
}

#[derive(Args, Debug)]
pub struct CodeArgs {
    #[command(flatten)]
    pub source: Source,
    /// Code file; defaults to the bundled one.
    #[arg(long, value_name = "FILE")]
    pub code: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// k x s input block, rows separated by `;`.
    #[arg(long, value_name = "MATRIX")]
    pub input: String,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Largest candidate space to attempt.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Enumerate every table instead of one per relabelling.
    #[arg(long)]
    pub no_symmetry: bool,
    /// Do not abandon prefixes at global cuts.
    #[arg(long)]
    pub no_pruning: bool,
    /// Write the code found here.
    #[arg(long, value_name = "FILE")]
    pub emit_code: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TreeArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Write the constructed code here.
    #[arg(long, value_name = "FILE")]
    pub emit_code: Option<PathBuf>,
    /// Capacity, per-node plan and verification.
    #[arg(long)]
    pub report: bool,
}

#[derive(Args, Debug)]
pub struct SplitArgs {
    #[arg(long, value_name = "FILE", conflicts_with = "instance")]
    pub network: Option<PathBuf>,
    #[arg(long, value_name = "NAME")]
    pub instance: Option<String>,
}

#[derive(Args, Debug)]
pub struct InstanceArgs {
    pub name: String,
    /// Write `<name>.network`, `<name>.function` and `<name>.code` here.
    #[arg(long, value_name = "DIR")]
    pub emit: Option<PathBuf>,
}

/// Why a command did not produce a normal report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    Malformed(String),
    Budget(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Malformed(_) => 2,
            Failure::Budget(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Malformed(m) | Failure::Budget(m) => m,
        }
    }
}

impl From<netcomp::Error> for Failure {
    fn from(e: netcomp::Error) -> Self {
        if e.is_budget() {
            Failure::Budget(e.to_string())
        } else {
            Failure::Malformed(e.to_string())
        }
    }
}

macro_rules! via_library_error {
    ($($t:ty),*) => {
        $(impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                netcomp::Error::from(e).into()
            }
        })*
    };
}

via_library_error!(
    netcomp::ParseError,
    netcomp::NetworkError,
    netcomp::FunctionError,
    netcomp::EquivalenceError,
    netcomp::BoundError,
    netcomp::CodeError,
    netcomp::TreeError
);

/// A finished command: text and JSON renderings plus the exit code.
pub struct Report {
    pub text: String,
    pub json: Value,
    pub code: i32,
}

impl Report {
    fn new(command: &str, text: String, mut json: Value) -> Self {
        if let Value::Object(map) = &mut json {
            map.insert("schema".into(), json!(SCHEMA_VERSION));
            map.insert("command".into(), json!(command));
        }
        Self { text, json, code: 0 }
    }

    fn exit(mut self, code: i32) -> Self {
        self.code = code;
        self
    }
}

fn threads(flag: Option<usize>) -> usize {
    flag.or_else(|| std::env::var(THREADS_ENV).ok()?.parse().ok())
        .unwrap_or(0)
}

/// Parses `args` (program name first), runs the command and writes the
/// report to `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads(cli.threads)).build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker threads: {e}");
            return 2;
        }
    };
    let json = cli.json;
    match pool.install(|| commands::dispatch(cli.command)) {
        Ok(report) => {
            let written = if json {
                serde_json::to_string_pretty(&report.json)
                    .map_err(std::io::Error::other)
                    .and_then(|s| writeln!(out, "{s}"))
            } else {
                write!(out, "{}", report.text)
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: {e}");
                return 2;
            }
            report.code
        }
        Err(failure) => {
            if json {
                let body = json!({
                    "schema": SCHEMA_VERSION,
                    "error": {
                        "kind": if failure.exit_code() == 3 { "budget" } else { "malformed" },
                        "message": failure.message(),
                    },
                });
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&body).unwrap_or_default());
            }
            let _ = writeln!(err, "error: {}", failure.message());
            failure.exit_code()
        }
    }
}
