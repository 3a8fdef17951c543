//! Repeated seeded planner runs, CSV records and per-planner summaries.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::planner::{solve, validate_path, PlannerConfig, PlannerKind};
use crate::scenario::Scenario;

/// Extra wall-clock time tolerated past the budget for the iteration in flight.
pub const GRACE_SECONDS: f64 = 0.5;

pub const CSV_HEADER: &str = "scenario,planner,run,seed,success,time_s,path_vertices";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub scenario: String,
    pub planner: String,
    pub run: usize,
    pub seed: u64,
    pub success: bool,
    pub time_s: f64,
    pub path_vertices: usize,
    /// Unix time in seconds when the run finished. Not written to CSV.
    #[serde(skip)]
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOptions {
    pub planners: Vec<PlannerKind>,
    pub runs: usize,
    /// Overrides the scenario's budget when set.
    pub time_budget: Option<f64>,
    pub base_seed: u64,
    /// Worker threads; 1 runs everything on the calling thread.
    pub threads: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            planners: PlannerKind::ALL.to_vec(),
            runs: 10,
            time_budget: None,
            base_seed: 0,
            threads: 1,
        }
    }
}

fn now_unix() -> u64 {
    web_time::SystemTime::now()
        .duration_since(web_time::SystemTime::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

fn run_one(scenario: &Scenario, kind: PlannerKind, run: usize, seed: u64, config: &PlannerConfig) -> Result<BenchRecord> {
    let problem = scenario.problem();
    let result = solve(&problem, kind, config, seed)?;
    if let Some(path) = result.path.as_ref().filter(|_| result.solved()) {
        validate_path(&problem, path, config.goal_tolerance).map_err(|v| {
            Error::Bench(format!("{kind} run {run} (seed {seed}) produced a path that fails replay: {v}"))
        })?;
    }
    Ok(BenchRecord {
        scenario: scenario.name().to_string(),
        planner: kind.name().to_string(),
        run,
        seed,
        success: result.solved(),
        time_s: result.time_s,
        path_vertices: result.path_vertex_count(),
        timestamp: now_unix(),
    })
}

/// Runs every planner `runs` times; run `i` uses seed `base_seed + i`. Records come
/// back ordered by planner (in the given order) and run index regardless of threading.
pub fn run_benchmark(scenario: &Scenario, options: &BenchOptions) -> Result<Vec<BenchRecord>> {
    if options.runs == 0 {
        return Err(Error::Bench("runs must be at least 1".into()));
    }
    if options.planners.is_empty() {
        return Err(Error::Bench("no planners selected".into()));
    }
    let mut config = scenario.planner_config();
    if let Some(budget) = options.time_budget {
        config.time_budget = budget;
    }
    config.check()?;

    let jobs: Vec<(PlannerKind, usize)> = options
        .planners
        .iter()
        .flat_map(|&k| (0..options.runs).map(move |r| (k, r)))
        .collect();
    let seed_of = |run: usize| options.base_seed.wrapping_add(run as u64);

    if options.threads <= 1 {
        return jobs
            .iter()
            .map(|&(k, r)| run_one(scenario, k, r, seed_of(r), &config))
            .collect();
    }

    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<BenchRecord>>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..options.threads.min(jobs.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(k, r)) = jobs.get(i) else { break };
                let rec = run_one(scenario, k, r, seed_of(r), &config);
                slots.lock().expect("no worker panics while holding the lock")[i] = Some(rec);
            });
        }
    });
    slots
        .into_inner()
        .expect("workers joined")
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect()
}

pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    if records.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    w.flush()?;
    Ok(())
}

pub fn records_to_csv(records: &[BenchRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<BenchRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::Parse(format!("expected CSV header `{CSV_HEADER}`, got `{}`", header.join(","))));
    }
    r.deserialize().map(|rec| rec.map_err(Error::from)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub scenario: String,
    pub planner: String,
    pub runs: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Statistics over successful runs only; `None` when nothing succeeded.
    pub mean_time: Option<f64>,
    pub std_time: Option<f64>,
    pub median_time: Option<f64>,
}

fn median(sorted: &[f64]) -> Option<f64> {
    let n = sorted.len();
    match n {
        0 => None,
        _ if n % 2 == 1 => Some(sorted[n / 2]),
        _ => Some(0.5 * (sorted[n / 2 - 1] + sorted[n / 2])),
    }
}

/// Per (scenario, planner) statistics, sorted by key. Timeouts count against the
/// success rate but are left out of the time statistics.
pub fn summarize(records: &[BenchRecord]) -> Result<Vec<Summary>> {
    if records.is_empty() {
        return Err(Error::Bench("nothing to summarize".into()));
    }
    let mut groups: BTreeMap<(&str, &str), (usize, Vec<f64>)> = BTreeMap::new();
    for r in records {
        let g = groups.entry((&r.scenario, &r.planner)).or_default();
        g.0 += 1;
        if r.success {
            g.1.push(r.time_s);
        }
    }
    Ok(groups
        .into_iter()
        .map(|((scenario, planner), (runs, mut times))| {
            // sorting first makes the float sums independent of record order
            times.sort_by(f64::total_cmp);
            let n = times.len();
            let mean = (n > 0).then(|| times.iter().sum::<f64>() / n as f64);
            let std = mean.map(|m| {
                if n < 2 {
                    0.0
                } else {
                    (times.iter().map(|t| (t - m) * (t - m)).sum::<f64>() / (n - 1) as f64).sqrt()
                }
            });
            Summary {
                scenario: scenario.to_string(),
                planner: planner.to_string(),
                runs,
                successes: n,
                success_rate: n as f64 / runs as f64,
                mean_time: mean,
                std_time: std,
                median_time: median(&times),
            }
        })
        .collect())
}

pub fn format_summary_table(summaries: &[Summary]) -> String {
    let cell = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.3}"));
    let rows: Vec<[String; 7]> = summaries
        .iter()
        .map(|s| {
            [
                s.scenario.clone(),
                s.planner.clone(),
                format!("{}/{}", s.successes, s.runs),
                format!("{:.2}", s.success_rate),
                cell(s.mean_time),
                cell(s.std_time),
                cell(s.median_time),
            ]
        })
        .collect();
    let header = ["scenario", "planner", "solved", "rate", "mean_s", "std_s", "median_s"];
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells
            .iter()
            .zip(widths)
            .enumerate()
            .map(|(i, (c, w))| if i < 2 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(header.to_vec());
    for row in &rows {
        line(row.iter().map(String::as_str).collect());
    }
    out
}

pub fn summaries_to_csv(summaries: &[Summary]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for s in summaries {
        w.serialize(s).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv output is utf-8")
}
