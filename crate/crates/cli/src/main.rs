//! `qsieve`: every library operation as a subcommand writing CSV.

mod commands;
mod config;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{ArgMatches, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde_json::{json, Map, Value};

#[derive(Parser, Debug)]
#[command(name = "qsieve", version, about = "Point counts, sieves, local densities and lattice covers for integral quadrics")]
pub struct Cli {
    /// Write CSV here instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<String>,
    /// Worker threads (default: all logical cores).
    #[arg(long, global = true, value_name = "K")]
    threads: Option<usize>,
    /// `key = value` lines used for flags not given explicitly.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<String>,
    /// Echoed in the manifest.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Zeros of the form in [-B, B]^n, optionally in a residue class.
    Count(commands::CountArgs),
    /// N(B, M): zeros where the polynomial values share a prime above M.
    Sieve(commands::SieveArgs),
    /// Large-prime sieve over an affine box, without a quadric.
    AffineSieve(commands::AffineSieveArgs),
    /// Local density sigma_p, or mu_p for a pair f, g.
    Density(commands::DensityArgs),
    /// Empirical coprime density against the truncated Euler product.
    Coprime(commands::CoprimeArgs),
    /// Lattice cover of the solutions of R = 0 modulo q.
    Cover(commands::CoverArgs),
    /// Lattice cover of x1^2 - d x2^2 = 0 modulo q1 q2.
    CoverLlplus(commands::CoverLlplusArgs),
    /// Successive minima, dual pairing and reduced basis of a lattice.
    Minima(commands::MinimaArgs),
    /// Smallest zero in a residue class with values supported on given primes.
    Strongapprox(commands::StrongApproxArgs),
    /// The rank-4 family x0 x1 = x2 x3 against the sieve.
    Counterexample(commands::CounterexampleArgs),
    /// Point-count estimate of the codimension of Q = F = 0.
    Probe(commands::ProbeArgs),
}

/// CSV body plus command-specific manifest fields.
pub struct Table {
    pub extra: Map<String, Value>,
    pub header: String,
    pub rows: Vec<String>,
}

impl Table {
    pub fn new(header: &str, rows: Vec<String>) -> Self {
        Table { extra: Map::new(), header: header.to_string(), rows }
    }

    pub fn with(mut self, key: &str, value: Value) -> Self {
        self.extra.insert(key.to_string(), value);
        self
    }
}

/// Every resolved argument of the subcommand, defaults included.
fn echo_args(cmd: &clap::Command, m: &ArgMatches) -> Map<String, Value> {
    let mut out = Map::new();
    for arg in cmd.get_arguments() {
        let key = arg.get_id().as_str();
        if let Ok(Some(raw)) = m.try_get_raw(key) {
            let vals: Vec<String> = raw.map(|v| v.to_string_lossy().into_owned()).collect();
            let v = if vals.len() == 1 { json!(vals[0]) } else { json!(vals) };
            out.insert(key.to_string(), v);
        }
    }
    out
}

fn run(args: Vec<OsString>) -> ExitCode {
    let args = match config::merge_config(args) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let matches = match Cli::command().try_get_matches_from(&args) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    if let Some(k) = cli.threads {
        if k == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: cannot start {k} worker threads: {e}");
            return ExitCode::from(1);
        }
    }
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let table = match commands::execute(&cli.command) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: {e}", e.name());
            return ExitCode::from(1);
        }
    };
    let mut manifest = Map::new();
    manifest.insert("command".into(), json!(name));
    let grammar = Cli::command();
    let sub_grammar = grammar.find_subcommand(name).expect("parsed subcommand exists");
    manifest.insert("args".into(), Value::Object(echo_args(sub_grammar, sub)));
    manifest.insert("seed".into(), json!(cli.seed));
    manifest.insert("threads".into(), json!(rayon::current_num_threads()));
    manifest.extend(table.extra);
    let mut text = qsieve_core::experiments::manifest_line(manifest);
    text.push('\n');
    text.push_str(&table.header);
    text.push('\n');
    for r in &table.rows {
        text.push_str(r);
        text.push('\n');
    }
    let written = match &cli.out {
        Some(path) => fs::write(path, text).map_err(|e| format!("cannot write {path}: {e}")),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    run(std::env::args_os().collect())
}
