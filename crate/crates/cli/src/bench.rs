use std::path::Path;

use log::warn;
use nsmop::problems::{table1_suite, CatalogEntry};
use nsmop::{CounterSnapshot, SolverConfig, SolverRun, StopReason};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{BenchArgs, BenchMode};
use crate::error::{CliError, CliResult};
use crate::output::{ensure_dir, fmt_f64, numbered, out_file, push_floats, write_csv};
use crate::solve::run_solver;

pub const SUMMARY_HEADER: [&str; 5] = ["problem", "fi_evals", "subgrad_evals", "iterations", "mode"];
pub const DEFAULT_SCHEDULE: [f64; 3] = [1e-1, 1e-2, 1e-3];

/// Reference totals `(f_i evals, subgradient evals, iterations)` over the
/// 100 grid starts of each suite problem, for the single-radius and the
/// radius-decreasing method. Used only for the order-of-magnitude band check.
pub const REFERENCE_TOTALS: [[(u64, u64, u64); 2]; 18] = [
    [(6924, 1102, 492), (7801, 1751, 695)],
    [(14688, 1906, 842), (12263, 2351, 914)],
    [(5625, 921, 448), (6447, 1534, 662)],
    [(103826, 11774, 4644), (17664, 3415, 1242)],
    [(30457, 3479, 1616), (16877, 3037, 1161)],
    [(8357, 1209, 552), (8684, 1802, 736)],
    [(8736, 1307, 595), (8483, 1832, 739)],
    [(8283, 1318, 582), (8620, 1914, 759)],
    [(8201, 1194, 536), (8794, 1805, 732)],
    [(6799, 1101, 543), (7201, 1722, 733)],
    [(52096, 6311, 2442), (17594, 3189, 1206)],
    [(15146, 1992, 967), (12446, 2401, 1010)],
    [(36570, 4958, 1692), (9513, 2247, 787)],
    [(95303, 9524, 4379), (12227, 2571, 921)],
    [(85936, 9329, 3963), (15669, 3124, 1125)],
    [(20372, 2596, 1194), (11094, 2400, 947)],
    [(7920, 1272, 626), (5852, 1556, 706)],
    [(166707, 16676, 8291), (31528, 6902, 2412)],
];

/// Accepted ratio band of iteration totals against the reference.
pub const BAND: (f64, f64) = (0.1, 10.0);

#[derive(Debug, Clone, Serialize)]
pub struct ProblemTotals {
    pub number: usize,
    pub name: String,
    pub counters: CounterSnapshot,
    pub runs: usize,
    pub critical_runs: usize,
    pub reference_iterations: u64,
    pub ratio: f64,
    pub within_band: bool,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub mode: BenchMode,
    pub totals: Vec<ProblemTotals>,
}

impl BenchReport {
    pub fn all_critical(&self) -> bool {
        self.totals.iter().all(|t| t.critical_runs == t.runs)
    }

    pub fn outside_band(&self) -> Vec<&ProblemTotals> {
        self.totals.iter().filter(|t| !t.within_band).collect()
    }
}

pub fn bench_config(flags_config: &SolverConfig, mode: BenchMode) -> SolverConfig {
    let mut config = flags_config.clone();
    match mode {
        BenchMode::SingleEps => config.epsilon_schedule = None,
        BenchMode::EpsDecreasing => {
            if config.epsilon_schedule.is_none() {
                config.epsilon_schedule = Some(DEFAULT_SCHEDULE.to_vec());
            }
        }
    }
    config
}

pub fn select_entries(selector: &str) -> CliResult<Vec<CatalogEntry>> {
    let suite = table1_suite();
    if selector.trim().eq_ignore_ascii_case("all") {
        return Ok(suite);
    }
    let mut wanted = Vec::new();
    for part in selector.split(',') {
        let n: usize = part
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bench takes `all` or suite numbers, got `{part}`")))?;
        if !(1..=suite.len()).contains(&n) {
            return Err(CliError::Usage(format!("suite number {n} out of range 1..=18")));
        }
        wanted.push(n);
    }
    Ok(suite.into_iter().filter(|e| wanted.contains(&e.number)).collect())
}

type RunOutcome = (usize, usize, Vec<f64>, nsmop::Result<SolverRun>);

/// Solves every grid start of every entry; each run gets its own copy of the
/// problem so counters are per run. Results come back in (entry, row-major
/// start) order regardless of scheduling.
pub fn run_all(entries: &[CatalogEntry], config: &SolverConfig) -> Vec<RunOutcome> {
    let jobs: Vec<(usize, usize, Vec<f64>)> = entries
        .iter()
        .enumerate()
        .flat_map(|(e, entry)| entry.starts().into_iter().enumerate().map(move |(s, x)| (e, s, x)))
        .collect();
    jobs.into_par_iter()
        .map(|(e, s, x)| {
            let problem = entries[e].problem.fresh();
            let run = run_solver(&problem, &x, config);
            (e, s, x, run)
        })
        .collect()
}

fn stop_label(reason: StopReason) -> &'static str {
    match reason {
        StopReason::Critical => "critical",
        StopReason::MaxIterations => "max_iterations",
        StopReason::UnboundedSuspected => "unbounded_suspected",
    }
}

pub fn run_bench(entries: &[CatalogEntry], config: &SolverConfig, mode: BenchMode, out: &Path) -> CliResult<BenchReport> {
    config.validate()?;
    ensure_dir(out)?;
    let outcomes = run_all(entries, config);

    let mut run_header = vec!["problem".to_string(), "start_index".to_string()];
    run_header.extend(numbered("x0_", 2));
    run_header.extend(["stop_reason", "fi_evals", "subgrad_evals", "iterations"].map(String::from));
    run_header.extend(numbered("x", 2));
    run_header.extend(numbered("f", 2));

    let mut run_rows = Vec::with_capacity(outcomes.len());
    let mut totals: Vec<ProblemTotals> = entries
        .iter()
        .map(|e| ProblemTotals {
            number: e.number,
            name: e.problem.name().to_string(),
            counters: CounterSnapshot::default(),
            runs: 0,
            critical_runs: 0,
            reference_iterations: REFERENCE_TOTALS[e.number - 1][mode_index(mode)].2,
            ratio: 0.0,
            within_band: false,
        })
        .collect();
    let mut failures = Vec::new();
    for (e, s, x, run) in &outcomes {
        let mut row = vec![entries[*e].number.to_string(), s.to_string()];
        push_floats(&mut row, x);
        match run {
            Ok(run) => {
                let c = run.counters;
                row.push(stop_label(run.stop_reason).to_string());
                row.extend([c.value_evals, c.subgrad_evals, c.outer_iterations].map(|v| v.to_string()));
                push_floats(&mut row, run.final_iterate());
                push_floats(&mut row, run.final_values());
                let t = &mut totals[*e];
                t.counters = t.counters + c;
                t.runs += 1;
                if run.stop_reason == StopReason::Critical {
                    t.critical_runs += 1;
                }
            }
            Err(err) => {
                row.push(format!("error: {err}"));
                row.extend(std::iter::repeat_n(String::new(), 7));
                failures.push(format!("problem {} start {s}: {err}", entries[*e].number));
            }
        }
        run_rows.push(row);
    }
    write_csv(&out_file(out, "bench_runs.csv"), &run_header, &run_rows)?;

    for t in &mut totals {
        t.ratio = t.counters.outer_iterations as f64 / t.reference_iterations as f64;
        t.within_band = t.ratio >= BAND.0 && t.ratio <= BAND.1;
        if !t.within_band {
            warn!(
                "problem {} ({}): {} iterations vs reference {} (ratio {:.3}) is outside the band",
                t.number, t.name, t.counters.outer_iterations, t.reference_iterations, t.ratio
            );
        }
    }

    let complete: Vec<&ProblemTotals> = totals
        .iter()
        .filter(|t| t.runs == entries.iter().find(|e| e.number == t.number).map_or(0, |e| e.starts().len()))
        .collect();
    let summary_rows: Vec<Vec<String>> = complete
        .iter()
        .map(|t| {
            vec![
                t.number.to_string(),
                t.counters.value_evals.to_string(),
                t.counters.subgrad_evals.to_string(),
                t.counters.outer_iterations.to_string(),
                mode.label().to_string(),
            ]
        })
        .collect();
    let header: Vec<String> = SUMMARY_HEADER.iter().map(|s| s.to_string()).collect();
    if !failures.is_empty() {
        write_csv(&out_file(out, "bench_summary.partial.csv"), &header, &summary_rows)?;
        return Err(CliError::Failed(format!(
            "{} of {} runs failed; partial results written. First failure: {}",
            failures.len(),
            outcomes.len(),
            failures[0]
        )));
    }
    write_csv(&out_file(out, "bench_summary.csv"), &header, &summary_rows)?;

    let band_header: Vec<String> = [
        "problem",
        "name",
        "mode",
        "iterations",
        "reference_iterations",
        "ratio",
        "within_band",
        "critical_runs",
        "runs",
    ]
    .map(String::from)
    .to_vec();
    let band_rows: Vec<Vec<String>> = totals
        .iter()
        .map(|t| {
            vec![
                t.number.to_string(),
                t.name.clone(),
                mode.label().to_string(),
                t.counters.outer_iterations.to_string(),
                t.reference_iterations.to_string(),
                fmt_f64(t.ratio),
                t.within_band.to_string(),
                t.critical_runs.to_string(),
                t.runs.to_string(),
            ]
        })
        .collect();
    write_csv(&out_file(out, "bench_band.csv"), &band_header, &band_rows)?;
    Ok(BenchReport { mode, totals })
}

fn mode_index(mode: BenchMode) -> usize {
    match mode {
        BenchMode::SingleEps => 0,
        BenchMode::EpsDecreasing => 1,
    }
}

pub fn cmd_bench(args: &BenchArgs) -> CliResult<u8> {
    let entries = select_entries(&args.problem)?;
    let config = bench_config(&args.flags.config(), args.mode);
    let report = run_bench(&entries, &config, args.mode, &args.out)?;
    for t in &report.totals {
        println!(
            "{:>2} {:<22} f_i {:>7}  subgrad {:>6}  iter {:>5}  critical {}/{}  ratio {:.2}{}",
            t.number,
            t.name,
            t.counters.value_evals,
            t.counters.subgrad_evals,
            t.counters.outer_iterations,
            t.critical_runs,
            t.runs,
            t.ratio,
            if t.within_band { "" } else { "  [outside band]" }
        );
    }
    Ok(if report.all_critical() { 0 } else { 1 })
}
