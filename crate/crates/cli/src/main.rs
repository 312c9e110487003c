// Copyright 2026 The sgb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! `sgb` command-line tool: run similarity GROUP BY queries over CSV files
//! and drive the benchmark harness.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sgb_core::bench::{self, BenchError, BenchSpec, Generator, Mode};
use sgb_core::query::{self, ExecOptions, OutputFormat, QueryError, Relation};
use sgb_core::{Metric, OverlapPolicy, Strategy};

#[derive(Parser)]
#[command(name = "sgb", version, about = "Similarity group-by over 2-D points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a query against a CSV file.
    Run(RunArgs),
    /// Time the grouping strategies and write bench.csv and speedup.txt.
    Bench(BenchArgs),
}

#[derive(Args)]
struct RunArgs {
    /// CSV file with a header row; the query's FROM name refers to it.
    #[arg(long)]
    input: PathBuf,
    /// Query text, or @path to read it from a file.
    #[arg(long)]
    query: String,
    #[arg(long, default_value = "indexed")]
    strategy: Strategy,
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
    /// Seed for random JOIN-ANY arbitration; without it the oldest
    /// candidate group wins.
    #[arg(long)]
    seed: Option<u64>,
    /// Binds a symbolic threshold, e.g. --param SignalRange=0.5.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    /// Cap on FORM-NEW-GROUP regrouping passes.
    #[arg(long, default_value_t = sgb_core::sgb_all::DEFAULT_MAX_RECURSION_DEPTH)]
    max_depth: usize,
}

#[derive(Args)]
struct BenchArgs {
    /// TOML benchmark spec. Flags below override its fields.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// uniform, gauss:K,SIGMA or csv:PATH
    #[arg(long, value_parser = parse_generator)]
    generator: Option<Generator>,
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated thresholds.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    modes: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    policies: Option<Vec<OverlapPolicy>>,
    #[arg(long, value_delimiter = ',')]
    metrics: Option<Vec<Metric>>,
    #[arg(long, value_delimiter = ',')]
    strategies: Option<Vec<Strategy>>,
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    parallel: bool,
    /// Directory for bench.csv, speedup.txt and plot/*.dat.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got '{s}'"))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| format!("'{v}' is not a number"))?;
    Ok((k.trim().to_string(), v))
}

fn parse_generator(s: &str) -> Result<Generator, String> {
    let lower = s.to_ascii_lowercase();
    if lower == "uniform" {
        return Ok(Generator::Uniform);
    }
    if let Some(rest) = lower.strip_prefix("gauss:") {
        let (k, sigma) = rest.split_once(',').ok_or("expected gauss:K,SIGMA")?;
        return Ok(Generator::GaussClusters {
            k: k.trim()
                .parse()
                .map_err(|_| format!("bad cluster count '{k}'"))?,
            sigma: sigma
                .trim()
                .parse()
                .map_err(|_| format!("bad sigma '{sigma}'"))?,
        });
    }
    if s.len() > 4 && lower.starts_with("csv:") {
        return Ok(Generator::Csv {
            path: PathBuf::from(&s[4..]),
            x: None,
            y: None,
        });
    }
    Err(format!("unknown generator '{s}'"))
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "all" => Ok(Mode::All),
        "any" => Ok(Mode::Any),
        _ => Err(format!("unknown mode '{s}'")),
    }
}

fn run(args: RunArgs) -> Result<(), QueryError> {
    let text = match args.query.strip_prefix('@') {
        Some(path) => {
            std::fs::read_to_string(path).map_err(|e| QueryError::Io(format!("{path}: {e}")))?
        }
        None => args.query.clone(),
    };
    let (plan, notes) = query::parse_with_notes(&text)?;
    for n in notes {
        log::info!("note: {n}");
    }
    let name = args
        .input
        .file_stem()
        .map_or_else(|| plan.source.clone(), |s| s.to_string_lossy().into_owned());
    let rel = Relation::ingest_csv(&args.input, &name)?;
    let opts = ExecOptions {
        strategy: args.strategy,
        join_any_seed: args.seed,
        params: args.params.into_iter().collect::<HashMap<_, _>>(),
        max_recursion_depth: args.max_depth,
    };
    let rs = query::execute(&plan, &rel, &opts)?;
    if rs.rejected_rows > 0 {
        eprintln!(
            "warning: {} row(s) skipped for non-finite grouping values",
            rs.rejected_rows
        );
    }
    if rs.truncated {
        eprintln!("warning: regrouping stopped at the pass limit; leftovers are singletons");
    }
    if !rs.eliminated.is_empty() {
        log::info!("{} row(s) eliminated as overlaps", rs.eliminated.len());
    }
    let out = query::render(&rs, args.format);
    print!("{out}");
    if !out.ends_with('\n') {
        println!();
    }
    Ok(())
}

fn bench_spec(args: &BenchArgs) -> Result<BenchSpec, BenchError> {
    let mut spec = match &args.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))?;
            toml::from_str(&text).map_err(|e| BenchError::InvalidSpec(e.to_string()))?
        }
        None => BenchSpec::new(
            args.generator.clone().unwrap_or(Generator::Uniform),
            args.n.unwrap_or(10_000),
            args.eps.clone().unwrap_or_else(|| vec![0.01]),
        ),
    };
    if let Some(g) = &args.generator {
        spec.generator = g.clone();
    }
    if let Some(n) = args.n {
        spec.n = n;
    }
    if let Some(eps) = &args.eps {
        spec.eps = eps.clone();
    }
    if let Some(modes) = &args.modes {
        spec.modes = modes
            .iter()
            .map(|m| parse_mode(m))
            .collect::<Result<_, _>>()
            .map_err(BenchError::InvalidSpec)?;
    }
    if let Some(p) = &args.policies {
        spec.policies = p.clone();
    }
    if let Some(m) = &args.metrics {
        spec.metrics = m.clone();
    }
    if let Some(s) = &args.strategies {
        spec.strategies = s.clone();
    }
    if let Some(r) = args.repetitions {
        spec.repetitions = r;
    }
    if let Some(s) = args.seed {
        spec.seed = s;
    }
    spec.parallel |= args.parallel;
    spec.validate()?;
    Ok(spec)
}

fn write(path: &Path, body: &str) -> Result<(), BenchError> {
    std::fs::write(path, body).map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))
}

fn bench_cmd(args: BenchArgs) -> Result<(), BenchError> {
    let spec = bench_spec(&args)?;
    let rows = bench::run_matrix(&spec)?;
    let plot_dir = args.out_dir.join("plot");
    std::fs::create_dir_all(&plot_dir)
        .map_err(|e| BenchError::Io(format!("{}: {e}", plot_dir.display())))?;
    write(&args.out_dir.join("bench.csv"), &bench::rows_to_csv(&rows))?;
    let table = bench::report(&rows);
    write(&args.out_dir.join("speedup.txt"), &table)?;
    for (name, body) in bench::gnuplot_series(&rows) {
        write(&plot_dir.join(name), &body)?;
    }
    print!("{table}");
    Ok(())
}

fn bench_exit_code(e: &BenchError) -> u8 {
    match e {
        BenchError::InvalidSpec(_) | BenchError::Engine(_) => 3,
        BenchError::Io(_) => 4,
        BenchError::Validation(_) => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Run(args) => match run(args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
        Command::Bench(args) => match bench_cmd(args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(bench_exit_code(&e))
            }
        },
    }
}
