//! `pwcolor` command-line front end.
//!
//! Exit codes: 0 success (for `solve`: proper coloring found), 1 `solve`
//! budget exhausted, 2 bad arguments or infeasible parameters, 3 runtime
//! failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pwcolor::graph::{Graph, GraphError};
use pwcolor::graphgen;
use pwcolor::harness::{self, Family, GridPoint, SweepConfig};
use pwcolor::kernel;
use pwcolor::oracle::{self, OracleError};
use pwcolor::solvers::{self, Algorithm, SolverParams};

#[derive(Parser)]
#[command(name = "pwcolor", version, about = "Petford-Welsh randomized graph coloring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a planted random graph and write it as an edge list.
    Generate(GenerateArgs),
    /// Run one solver on a graph file.
    Solve(SolveArgs),
    /// Run a sweep over a grid of instances and aggregate step statistics.
    Sweep(SweepArgs),
    /// List the built-in sweep presets.
    PresetList,
    /// Exact colorability check for small graphs.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Partite,
    Regular,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Partite => Family::Partite,
            FamilyArg::Regular => Family::Regular,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Sequential,
    Naive,
    Mppw,
}

impl From<SolverArg> for Algorithm {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Sequential => Algorithm::Sequential,
            SolverArg::Naive => Algorithm::Naive,
            SolverArg::Mppw => Algorithm::Mppw,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// Graph family.
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Number of vertices.
    #[arg(long)]
    n: usize,
    /// Number of planted partitions.
    #[arg(long)]
    k: usize,
    /// Cross-partition edge probability (partite family).
    #[arg(long, conflicts_with = "d")]
    p: Option<f64>,
    /// Vertex degree (regular family).
    #[arg(long)]
    d: Option<usize>,
    /// Generator seed.
    #[arg(long, env = "PWCOLOR_SEED", default_value_t = 0)]
    seed: u64,
    /// Output edge-list file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Edge-list graph file.
    #[arg(long)]
    graph: PathBuf,
    /// Number of colors; defaults to the planted partition count.
    #[arg(long)]
    k: Option<usize>,
    /// Solver variant.
    #[arg(long, value_enum, default_value = "mppw")]
    solver: SolverArg,
    /// Basis b of the weights b^(-S_i).
    #[arg(long, default_value_t = 4.0, conflicts_with = "temperature")]
    b: f64,
    /// Temperature T; sets b = exp(1/T).
    #[arg(long)]
    temperature: Option<f64>,
    /// Step budget: iterations (sequential) or rounds (parallel).
    #[arg(long, default_value_t = 1000)]
    max_steps: u64,
    /// Phase-1 recolor probability for mppw.
    #[arg(long, default_value_t = 0.6)]
    phase1_prob: f64,
    /// Solver seed.
    #[arg(long, env = "PWCOLOR_SEED", default_value_t = 0)]
    seed: u64,
    /// Write a `step,phase,energy,bad_count` trace to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the best coloring found to this file.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Start from a preset grid (see `preset-list`).
    #[arg(long)]
    preset: Option<String>,
    /// Multiply preset sample counts by this factor.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Graph family of the grid points.
    #[arg(long, value_enum, default_value = "partite")]
    family: FamilyArg,
    /// Vertex counts (comma separated).
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Partition counts (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "3")]
    k: Vec<usize>,
    /// Edge probabilities (partite family, comma separated).
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    /// Degrees (regular family, comma separated).
    #[arg(long, value_delimiter = ',')]
    d: Vec<usize>,
    /// Average-degree grid `start:end:step` (partite family).
    #[arg(long)]
    dbar: Option<String>,
    /// Solver variant; mppw unless a preset says otherwise.
    #[arg(long, value_enum)]
    solver: Option<SolverArg>,
    /// Basis values (comma separated).
    #[arg(long, value_delimiter = ',')]
    b: Vec<f64>,
    /// Samples per grid point.
    #[arg(long)]
    samples: Option<usize>,
    /// Step budget; 1000 rounds (parallel) or 200 n iterations (sequential) by default.
    #[arg(long)]
    max_steps: Option<u64>,
    /// Master seed.
    #[arg(long, env = "PWCOLOR_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// CSV output file; stdout when omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// JSON output (rows plus configuration).
    #[arg(long)]
    json: Option<PathBuf>,
    /// Per-row raw step lists.
    #[arg(long)]
    raw: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Edge-list graph file.
    #[arg(long)]
    graph: PathBuf,
    /// Number of colors.
    #[arg(long)]
    k: usize,
    /// Write a proper coloring here when one exists.
    #[arg(long)]
    witness: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::InvalidParameter(_) | GraphError::Infeasible(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn runtime<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Runtime(e.to_string())
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn write_out(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| runtime(format!("{}: {e}", path.display())))
}

fn generate(args: GenerateArgs) -> Result<ExitCode, Failure> {
    let g = match (Family::from(args.family), args.p, args.d) {
        (Family::Partite, Some(p), None) => graphgen::generate_partite(args.n, args.k, p, args.seed)?,
        (Family::Regular, None, Some(d)) => graphgen::generate_regular(args.n, args.k, d, args.seed)?,
        (Family::Partite, _, _) => return Err(usage("partite family needs --p")),
        (Family::Regular, _, _) => return Err(usage("regular family needs --d")),
    };
    let text = g.to_edge_list_string();
    match &args.out {
        Some(path) => write_out(path, &text)?,
        None => print!("{text}"),
    }
    let p = match args.p {
        Some(p) => p,
        None => GridPoint::regular(args.n, args.k, args.d.unwrap_or(0)).edge_probability(),
    };
    let m = harness::critical_metrics(args.n, args.k, p);
    let line = format!(
        "n={} m={} avg_degree={} conj_old={} expected_avg_degree={} conj_new={}",
        g.n(),
        g.m(),
        g.average_degree(),
        m.conjecture_old,
        m.avg_degree,
        m.conjecture_new
    );
    if args.out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(ExitCode::SUCCESS)
}

fn solve(args: SolveArgs) -> Result<ExitCode, Failure> {
    let g = Graph::read_file(&args.graph).map_err(runtime)?;
    let k = match args.k.or(g.k_planted()) {
        Some(k) => k,
        None => return Err(usage("--k is required for graphs without planted labels")),
    };
    let basis = match args.temperature {
        Some(t) => kernel::basis_from_temperature(t).map_err(usage)?,
        None => args.b,
    };
    let params = SolverParams {
        k,
        basis,
        max_steps: args.max_steps,
        phase1_recolor_prob: args.phase1_prob,
        seed: args.seed,
        trace: args.trace.is_some(),
    };
    params.validate().map_err(usage)?;
    let result = solvers::solve(args.solver.into(), &g, &params).map_err(runtime)?;
    if let (Some(path), Some(trace)) = (&args.trace, &result.trace) {
        write_out(path, &solvers::trace_to_csv(trace))?;
    }
    if let Some(path) = &args.dump {
        write_out(path, &result.best_coloring.to_text())?;
    }
    println!("{} {} {}", result.success, result.steps, result.best_energy);
    if matches!(args.solver, SolverArg::Mppw) {
        eprintln!(
            "phase1_steps={} phase1_proper={}",
            result.phase1_steps, result.phase1_proper
        );
    }
    Ok(if result.success {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn parse_range(text: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<f64> = text
        .split(':')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("bad range `{text}`, expected start:end:step")))?;
    match parts[..] {
        [start, end, step] if step > 0.0 && end >= start => {
            Ok(harness::linear_grid(start, end, step))
        }
        _ => Err(usage(format!("bad range `{text}`, expected start:end:step"))),
    }
}

fn sweep_config(args: &SweepArgs) -> Result<SweepConfig, Failure> {
    let mut cfg = if let Some(name) = &args.preset {
        harness::preset(name).map_err(usage)?.scaled(args.scale)
    } else {
        if args.n.is_empty() {
            return Err(usage("--n is required without --preset"));
        }
        let family = Family::from(args.family);
        let mut grid = Vec::new();
        for &n in &args.n {
            for &k in &args.k {
                match family {
                    Family::Partite => {
                        if let Some(range) = &args.dbar {
                            for d in parse_range(range)? {
                                // infeasible degrees become flagged rows
                                let p = d * k as f64 / (n as f64 * (k as f64 - 1.0));
                                grid.push(GridPoint::partite(n, k, p));
                            }
                        }
                        for &p in &args.p {
                            grid.push(GridPoint::partite(n, k, p));
                        }
                    }
                    Family::Regular => {
                        for &d in &args.d {
                            grid.push(GridPoint::regular(n, k, d));
                        }
                    }
                }
            }
        }
        if grid.is_empty() {
            return Err(usage("empty grid: give --dbar or --p (partite) or --d (regular)"));
        }
        let mut c = SweepConfig::new("custom", grid, Algorithm::Mppw);
        c.samples_per_point = ((c.samples_per_point as f64 * args.scale).round() as usize).max(1);
        c
    };
    if let Some(s) = args.solver {
        cfg.solver = s.into();
    }
    if !args.b.is_empty() {
        cfg.b_values = args.b.clone();
    }
    if let Some(s) = args.samples {
        cfg.samples_per_point = s;
        for p in &mut cfg.grid {
            p.samples = None;
        }
    }
    if args.max_steps.is_some() {
        cfg.max_steps = args.max_steps;
    }
    cfg.master_seed = args.seed;
    cfg.workers = args.workers;
    cfg.keep_raw = args.raw.is_some();
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn sweep(args: SweepArgs) -> Result<ExitCode, Failure> {
    let cfg = sweep_config(&args)?;
    let rows = harness::run_sweep(&cfg).map_err(runtime)?;
    let csv = harness::rows_to_csv(&rows);
    match &args.csv {
        Some(path) => write_out(path, &csv)?,
        None => print!("{csv}"),
    }
    if let Some(path) = &args.json {
        write_out(path, &harness::report_json(&cfg, &rows).map_err(runtime)?)?;
    }
    if let Some(path) = &args.raw {
        write_out(path, &harness::raw_steps_csv(&rows))?;
    }
    for (i, r) in rows.iter().enumerate() {
        if let Some(e) = &r.error {
            eprintln!("row {i} (n={} k={} p_or_d={}): {e}", r.n, r.k, r.p_or_d);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn preset_list() -> Result<ExitCode, Failure> {
    for name in harness::PRESETS {
        let cfg = harness::preset(name).map_err(runtime)?;
        println!(
            "{name}\tpoints={} b_values={} samples_per_point={} solver={}",
            cfg.grid.len(),
            cfg.b_values.len(),
            cfg.samples_per_point,
            cfg.solver
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn run_oracle(args: OracleArgs) -> Result<ExitCode, Failure> {
    let g = Graph::read_file(&args.graph).map_err(runtime)?;
    let to_failure = |e: OracleError| usage(e);
    let witness = oracle::brute_force_colorable(&g, args.k).map_err(to_failure)?;
    println!("colorable {}", witness.is_some());
    match oracle::min_energy_exhaustive(&g, args.k) {
        Ok(e) => println!("min_energy {e}"),
        Err(OracleError::TooLarge(why)) => eprintln!("min_energy skipped: {why}"),
        Err(e) => return Err(usage(e)),
    }
    if let (Some(path), Some(w)) = (&args.witness, &witness) {
        write_out(path, &w.to_text())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Solve(a) => solve(a),
        Command::Sweep(a) => sweep(a),
        Command::PresetList => preset_list(),
        Command::Oracle(a) => run_oracle(a),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
