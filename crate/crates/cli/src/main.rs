// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

//! `colgraph`: load edge lists into stores, run algorithms in any mode, and
//! run the oracle suites.
//!
//! Exit codes: 0 success, 1 check or usage failure, 2 I/O failure.

mod alloc;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use colgraph::analytics::gen_metadata;
use colgraph::run::{run, Algorithm, Mode, RunSpec};
use colgraph::storage::persist::{open_store, save_store, store_dir};
use colgraph::storage::{load_edge_list_with, ColumnTable, LoadOptions, Scalar};
use colgraph::verify::{format_checks, random_suite, small_suite, VerifyOptions};
use colgraph::Error;

#[global_allocator]
static ALLOC: alloc::Counting = alloc::Counting;

#[derive(Parser)]
#[command(
    name = "colgraph",
    version,
    about = "Graph analytics on a columnar relational engine"
)]
struct Cli {
    /// Directory holding named stores.
    #[arg(
        long,
        global = true,
        env = "COLGRAPH_STORE_DIR",
        default_value = "colgraph-stores"
    )]
    store_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load an edge list into a named store.
    #[command(group(ArgGroup::new("direction").required(true).args(["directed", "undirected"])))]
    Load {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        directed: bool,
        #[arg(long)]
        undirected: bool,
        #[arg(long)]
        name: String,
        /// Add generated vertex and edge attributes with this seed.
        #[arg(long)]
        metadata_seed: Option<u64>,
        /// Hash partitions of every projection; defaults to the core count.
        #[arg(long)]
        partitions: Option<usize>,
    },
    /// Run an algorithm on a store and print its per-iteration report.
    Run {
        #[arg(long)]
        name: String,
        #[arg(long, value_enum)]
        algo: AlgoArg,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, default_value_t = 10)]
        iterations: usize,
        #[arg(long)]
        source: Option<i64>,
        #[arg(long, default_value_t = 0)]
        threshold: i64,
        #[arg(long)]
        update_replace_threshold: Option<usize>,
        #[arg(long, value_enum, default_value = "csv")]
        report: ReportArg,
        /// Result table as CSV; defaults to `results/<algo>-<mode>.csv` in the store.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for the shared-memory mode; defaults to the core count.
        #[arg(long)]
        workers: Option<usize>,
        /// Use edge weights for sssp.
        #[arg(long)]
        weighted: bool,
    },
    /// Run the oracle equivalence suites.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 25)]
        graphs: usize,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Pagerank,
    Sssp,
    Cc,
    Overlap,
    Weakties,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Sql,
    Udf,
    Shm,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Small,
    Random,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Pagerank => Algorithm::PageRank,
            AlgoArg::Sssp => Algorithm::Sssp,
            AlgoArg::Cc => Algorithm::Cc,
            AlgoArg::Overlap => Algorithm::Overlap,
            AlgoArg::Weakties => Algorithm::WeakTies,
        }
    }
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Sql => Mode::Sql,
            ModeArg::Udf => Mode::Udf,
            ModeArg::Shm => Mode::Shm,
        }
    }
}

/// A failure and the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io { .. } | Error::Format { .. } | Error::Ingest { .. } | Error::EmptyGraph => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: String) -> Failure {
    Failure { code: 1, message }
}

fn io_failure(context: &str, e: std::io::Error) -> Failure {
    Failure {
        code: 2,
        message: format!("{context}: {e}"),
    }
}

fn load(
    store_root: &Path,
    input: &Path,
    directed: bool,
    name: &str,
    seed: Option<u64>,
    partitions: Option<usize>,
) -> Result<(), Failure> {
    let raw = std::fs::metadata(input)
        .map_err(|e| io_failure(&format!("reading {}", input.display()), e))?
        .len();
    let mut opts = LoadOptions::directed(directed);
    if let Some(p) = partitions {
        opts = opts.with_partitions(p);
    }
    let mut graph = load_edge_list_with(input, &opts)?;
    if let Some(seed) = seed {
        graph = gen_metadata(&graph, seed)?;
    }
    let dir = store_dir(store_root, name);
    let manifest = save_store(&graph, name, &dir)?;
    println!("store {name} at {}", dir.display());
    println!("vertices {}", graph.n());
    println!("edges {}", graph.edge_count());
    println!("input bytes {raw}");
    println!("disk bytes {}", manifest.disk_bytes());
    Ok(())
}

fn cell(s: Scalar) -> String {
    match s {
        Scalar::Null => String::new(),
        Scalar::Str(v) => v.to_string(),
        other => other.to_string(),
    }
}

fn write_table(table: &ColumnTable, path: &Path) -> Result<(), Failure> {
    let context = format!("writing {}", path.display());
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| io_failure(&context, e))?;
    }
    let csv_failure = |e: csv::Error| Failure {
        code: 2,
        message: format!("{context}: {e}"),
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_failure)?;
    w.write_record(table.columns().iter().map(|c| c.name.as_str()))
        .map_err(csv_failure)?;
    for i in 0..table.row_count() {
        w.write_record(table.row(i).into_iter().map(cell))
            .map_err(csv_failure)?;
    }
    w.flush().map_err(|e| io_failure(&context, e))
}

fn run_command(
    store_root: &Path,
    name: &str,
    spec: RunSpec,
    report: ReportArg,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let algo = spec.algorithm;
    if !algo.modes().contains(&spec.mode) {
        let modes: Vec<&str> = algo.modes().iter().map(|m| m.name()).collect();
        return Err(usage(format!(
            "--algo {algo} does not support --mode {}; valid modes: {}",
            spec.mode,
            modes.join(", ")
        )));
    }
    if algo == Algorithm::Sssp && spec.source.is_none() {
        return Err(usage("--algo sssp needs --source".into()));
    }
    let dir = store_dir(store_root, name);
    let (graph, _) = open_store(&dir)?;
    alloc::reset_peak();
    let mut result = run(&graph, name, &spec)?;
    result.report.peak_memory_bytes_estimate = Some(alloc::peak());
    let out = out.unwrap_or_else(|| {
        dir.join("results")
            .join(format!("{algo}-{}.csv", spec.mode))
    });
    write_table(&result.table, &out)?;
    match report {
        ReportArg::Csv => print!("{}", result.report.to_csv()),
        ReportArg::Json => println!("{}", result.report.to_json()),
    }
    eprintln!("result table written to {}", out.display());
    Ok(())
}

fn verify(suite: SuiteArg, seed: u64, graphs: usize, inject_fault: bool) -> Result<(), Failure> {
    let opts = VerifyOptions { inject_fault };
    let checks = match suite {
        SuiteArg::Small => small_suite(&opts)?,
        SuiteArg::Random => random_suite(seed, graphs, &opts)?,
    };
    print!("{}", format_checks(&checks));
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(Failure {
            code: 1,
            message: format!("{failed} checks failed"),
        });
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Load {
            input,
            directed,
            undirected: _,
            name,
            metadata_seed,
            partitions,
        } => load(
            &cli.store_dir,
            &input,
            directed,
            &name,
            metadata_seed,
            partitions,
        ),
        Command::Run {
            name,
            algo,
            mode,
            iterations,
            source,
            threshold,
            update_replace_threshold,
            report,
            out,
            workers,
            weighted,
        } => {
            let mut spec = RunSpec::new(algo.into(), mode.into());
            spec.iterations = iterations;
            spec.source = source;
            spec.threshold = threshold;
            spec.weighted = weighted;
            if let Some(u) = update_replace_threshold {
                spec.config.policy.update_replace_threshold = u;
            }
            if let Some(w) = workers {
                spec.workers = w;
            }
            run_command(&cli.store_dir, &name, spec, report, out)
        }
        Command::Verify {
            suite,
            seed,
            graphs,
            inject_fault,
        } => verify(suite, seed, graphs, inject_fault),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
