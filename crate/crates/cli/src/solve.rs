use std::path::Path;

use nsmop::problems::lookup;
use nsmop::{solve, solve_eps_decreasing, CounterSnapshot, Problem, SolverConfig, SolverRun, StopReason};
use serde::Serialize;

use crate::args::SolveArgs;
use crate::error::{CliError, CliResult};
use crate::output::{digest, ensure_dir, fmt_f64, numbered, out_file, push_floats, write_csv, write_json};

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub problem: String,
    pub start: Vec<f64>,
    pub config_digest: String,
    pub config: SolverConfig,
    pub stop_reason: StopReason,
    pub final_iterate: Vec<f64>,
    pub final_values: Vec<f64>,
    pub counters: CounterSnapshot,
}

impl RunRecord {
    pub fn new(problem: &Problem, start: &[f64], config: &SolverConfig, run: &SolverRun) -> CliResult<Self> {
        Ok(Self {
            problem: problem.name().to_string(),
            start: start.to_vec(),
            config_digest: digest(config)?,
            config: config.clone(),
            stop_reason: run.stop_reason,
            final_iterate: run.final_iterate().to_vec(),
            final_values: run.final_values().to_vec(),
            counters: run.counters,
        })
    }
}

pub fn check_start(problem: &Problem, start: &[f64]) -> CliResult<()> {
    if start.len() != problem.dim() {
        return Err(CliError::Usage(format!(
            "problem `{}` has dimension {}, start has {} entries",
            problem.name(),
            problem.dim(),
            start.len()
        )));
    }
    Ok(())
}

/// Single-radius solve, or the epsilon-decreasing driver when the config
/// carries a schedule.
pub fn run_solver(problem: &Problem, start: &[f64], config: &SolverConfig) -> nsmop::Result<SolverRun> {
    if config.epsilon_schedule.is_some() {
        solve_eps_decreasing(problem, start, config)
    } else {
        solve(problem, start, config)
    }
}

/// One row per stored iterate: `j, x.., f.., norm_v, step, epsilon`.
pub fn trace_rows(run: &SolverRun, dim: usize, k: usize) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header = vec!["j".to_string()];
    header.extend(numbered("x", dim));
    header.extend(numbered("f", k));
    header.extend(["norm_v", "step", "epsilon"].map(String::from));
    let rows = run
        .trace()
        .iter()
        .enumerate()
        .map(|(j, r)| {
            let mut row = vec![(j + 1).to_string()];
            push_floats(&mut row, &r.x);
            push_floats(&mut row, &r.values);
            row.push(r.direction_norm.map(fmt_f64).unwrap_or_default());
            row.push(r.step.map(fmt_f64).unwrap_or_default());
            row.push(fmt_f64(r.epsilon));
            row
        })
        .collect();
    (header, rows)
}

pub fn write_solve_outputs(dir: &Path, problem: &Problem, run: &SolverRun, record: &RunRecord) -> CliResult<()> {
    ensure_dir(dir)?;
    let (header, rows) = trace_rows(run, problem.dim(), problem.num_objectives());
    write_csv(&out_file(dir, "trace.csv"), &header, &rows)?;
    write_json(&out_file(dir, "run.json"), record)
}

pub fn cmd_solve(args: &SolveArgs) -> CliResult<u8> {
    let problem = lookup(&args.problem)?;
    check_start(&problem, &args.start)?;
    let config = args.flags.config();
    config.validate()?;
    let run = run_solver(&problem, &args.start, &config)?;
    let record = RunRecord::new(&problem, &args.start, &config, &run)?;
    write_solve_outputs(&args.out, &problem, &run, &record)?;
    println!(
        "{}: {:?} after {} iterations at {:?}",
        problem.name(),
        run.stop_reason,
        run.counters.outer_iterations,
        run.final_iterate()
    );
    Ok(if run.stop_reason == StopReason::Critical { 0 } else { 1 })
}
