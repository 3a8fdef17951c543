use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use slideplan::bench::{format_summary_table, records_to_csv, run_benchmark, summaries_to_csv, summarize, BenchOptions};
use slideplan::constraint::{format_modes, ContactKind};
use slideplan::planner::{solve, validate_path, PlanResult, PlannerKind};
use slideplan::Scenario;

const EXIT_TIMEOUT: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "slideplan", version, about = "Plan sliding-contact transitions for serial manipulators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one planner once and write the path on success.
    Solve(SolveArgs),
    /// Run planners repeatedly with consecutive seeds and report timings.
    Bench(BenchArgs),
    /// Replay a path file against a scenario.
    Validate(ValidateArgs),
    /// Print scenario statistics.
    Info(SourceArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SourceArgs {
    /// Scenario file (JSON).
    #[arg(long, value_name = "PATH")]
    scenario: Option<PathBuf>,
    /// Built-in scenario name.
    #[arg(long, value_name = "NAME")]
    builtin: Option<String>,
}

impl SourceArgs {
    fn load(&self) -> slideplan::Result<Scenario> {
        match (&self.scenario, &self.builtin) {
            (Some(path), _) => Scenario::load(path),
            (None, Some(name)) => Scenario::builtin(name),
            (None, None) => unreachable!("clap enforces one source"),
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// rrt or prm [default: rrt]
    #[arg(long)]
    planner: Option<PlannerKind>,
    /// Planning budget in seconds [default: the scenario's]
    #[arg(long, value_name = "SECONDS")]
    time: Option<f64>,
    /// RNG seed [default: the scenario's]
    #[arg(long, env = "SLIDEPLAN_SEED")]
    seed: Option<u64>,
    /// Where to write the path file (JSON).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Comma-separated planner list.
    #[arg(long, value_delimiter = ',', default_value = "rrt,prm")]
    planners: Vec<PlannerKind>,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    runs: u32,
    /// Per-run budget in seconds [default: the scenario's]
    #[arg(long, value_name = "SECONDS")]
    time: Option<f64>,
    /// Seed of run 0; run i uses seed + i [default: the scenario's]
    #[arg(long, env = "SLIDEPLAN_SEED")]
    seed: Option<u64>,
    /// Write records here instead of stdout.
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// Also write the summary as CSV.
    #[arg(long, value_name = "PATH")]
    summary_csv: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    parallel: u32,
}

#[derive(Args)]
struct ValidateArgs {
    /// Path file written by `solve`.
    #[arg(long, value_name = "PATH")]
    path: PathBuf,
    #[command(flatten)]
    source: SourceArgs,
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn check_budget(time: Option<f64>) -> Result<(), ExitCode> {
    match time {
        Some(t) if !(t > 0.0 && t.is_finite()) => Err(fail(format!("--time must be positive, got {t}"))),
        _ => Ok(()),
    }
}

fn cmd_solve(args: SolveArgs) -> ExitCode {
    if let Err(code) = check_budget(args.time) {
        return code;
    }
    let scenario = match args.source.load() {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let kind = args.planner.unwrap_or_else(|| {
        println!("planner: rrt (default)");
        PlannerKind::Rrt
    });
    let mut config = scenario.planner_config();
    if let Some(t) = args.time {
        config.time_budget = t;
    }
    let seed = args.seed.unwrap_or(scenario.seed());
    let problem = scenario.problem();
    let result = match solve(&problem, kind, &config, seed) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    println!(
        "{}: {} {} after {:.3} s ({} iterations, {} vertices in graph, seed {seed})",
        scenario.name(),
        kind,
        if result.solved() { "solved" } else { "timed out" },
        result.time_s,
        result.iterations,
        result.graph_size,
    );
    if !result.solved() {
        eprintln!("no path within {} s", config.time_budget);
        return ExitCode::from(EXIT_TIMEOUT);
    }
    let path = result.path.as_ref().expect("solved results carry a path");
    println!("path: {} vertices, {} waypoints", path.vertices.len(), path.waypoints.len());
    if let Some(out) = &args.out {
        let text = serde_json::to_string_pretty(&result).expect("plan results serialize");
        if let Err(e) = fs::write(out, text + "\n") {
            return fail(format!("{}: {e}", out.display()));
        }
        println!("wrote {}", out.display());
    }
    ExitCode::SUCCESS
}

fn cmd_bench(args: BenchArgs) -> ExitCode {
    if let Err(code) = check_budget(args.time) {
        return code;
    }
    let scenario = match args.source.load() {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let options = BenchOptions {
        planners: args.planners.clone(),
        runs: args.runs as usize,
        time_budget: args.time,
        base_seed: args.seed.unwrap_or(scenario.seed()),
        threads: args.parallel as usize,
    };
    let records = match run_benchmark(&scenario, &options) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let summaries = summarize(&records).expect("at least one record");
    let table = format_summary_table(&summaries);
    let csv = records_to_csv(&records);
    match &args.csv {
        Some(path) => {
            if let Err(e) = fs::write(path, &csv) {
                return fail(format!("{}: {e}", path.display()));
            }
            print!("{table}");
        }
        None => {
            print!("{csv}");
            let _ = std::io::stdout().flush();
            eprint!("{table}");
        }
    }
    if let Some(path) = &args.summary_csv {
        if let Err(e) = fs::write(path, summaries_to_csv(&summaries)) {
            return fail(format!("{}: {e}", path.display()));
        }
    }
    ExitCode::SUCCESS
}

fn cmd_validate(args: ValidateArgs) -> ExitCode {
    let scenario = match args.source.load() {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let text = match fs::read_to_string(&args.path) {
        Ok(t) => t,
        Err(e) => return fail(format!("{}: {e}", args.path.display())),
    };
    let result: PlanResult = match serde_json::from_str(&text) {
        Ok(r) => r,
        Err(e) => return fail(format!("malformed path file {}: {e}", args.path.display())),
    };
    let path = result.path.unwrap_or_default();
    let problem = scenario.problem();
    match validate_path(&problem, &path, scenario.planner_config().goal_tolerance) {
        Ok(()) => {
            println!("valid: {} waypoints", path.waypoints.len());
            ExitCode::SUCCESS
        }
        Err(v) => {
            println!("invalid: {v}");
            ExitCode::from(1)
        }
    }
}

fn cmd_info(source: SourceArgs) -> ExitCode {
    let s = match source.load() {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let chain = s.chain();
    println!("scenario     {}", s.name());
    if !s.file().description.is_empty() {
        println!("description  {}", s.file().description);
    }
    println!("dof          {}", chain.dof());
    println!("arm length   {:.3} m", chain.total_length());
    println!("obstacles    {}", s.obstacles().len());
    for m in s.obstacles() {
        println!("  {:<12} {} faces, {} vertices", m.name(), m.faces().len(), m.vertices().len());
    }
    println!("contacts     {}", s.constraints().len());
    for spec in s.constraints().specs() {
        match &spec.kind {
            ContactKind::Sliding { surface } => println!("  {}: sliding on {}", spec.contact, surface.name()),
            ContactKind::Transition { start, goal, .. } => {
                println!("  {}: transition {} -> {}", spec.contact, start.name(), goal.name())
            }
        }
    }
    println!("start modes  {}", format_modes(&s.start().modes));
    println!("goal modes   {}", format_modes(&s.goal().modes));
    let graph = s.constraint_graph();
    println!("graph        {} states, {} edges", graph.states().len(), graph.edges().len());
    let c = s.planner_config();
    println!(
        "planner      budget {} s, goal tolerance {}, edge step {}, goal bias {}, neighbors {}, max extension {}",
        c.time_budget, c.goal_tolerance, c.edge_step, c.goal_bias, c.prm_neighbors, c.max_extension
    );
    println!("seed         {}", s.seed());
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Info(a) => cmd_info(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
