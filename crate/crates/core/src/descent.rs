//! Outer descent loops.
//!
//! Each iteration computes a direction with [`crate::direction`], stops if
//! it certifies (eps, delta)-criticality, and otherwise takes an Armijo step
//! floored at `eps / ||v||`. Every accepted step decreases all objectives by
//! at least `c * t * ||v||^2`.

use serde::{Deserialize, Serialize};

use crate::config::{History, SolverConfig};
use crate::direction::{descent_direction_from, DirectionStatus};
use crate::error::{Error, Result};
use crate::linalg::{add_scaled, distance, norm, norm_sq};
use crate::problem::{CounterSnapshot, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Critical,
    MaxIterations,
    /// Iteration guard hit after a very large decrease.
    UnboundedSuspected,
}

/// Per-iteration summary of the direction computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionSummary {
    /// `||v_l||` for each pass of the enrichment loop.
    pub norms: Vec<f64>,
    pub bundle_size: usize,
    /// Largest distance from the iterate to a point where a bundle member
    /// was evaluated.
    pub max_sample_distance: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverRun {
    pub iterates: Vec<Vec<f64>>,
    /// `f` at each stored iterate.
    pub values: Vec<Vec<f64>>,
    /// One per iteration, including the final certifying direction if any.
    pub directions: Vec<Vec<f64>>,
    pub direction_summaries: Vec<DirectionSummary>,
    pub step_lengths: Vec<f64>,
    pub stop_reason: StopReason,
    pub counters: CounterSnapshot,
    /// One entry per radius; a single-radius run has one stage.
    pub stages: Vec<Stage>,
    /// Number of accepted descent steps.
    pub steps: usize,
}

impl SolverRun {
    pub fn final_iterate(&self) -> &[f64] {
        self.iterates.last().expect("a run always stores its final iterate")
    }

    pub fn final_values(&self) -> &[f64] {
        self.values.last().expect("a run always stores its final values")
    }
}

/// Offsets of one radius stage into the history vectors of a [`SolverRun`].
///
/// The final iterate of a stage is repeated as the first iterate of the
/// next one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub epsilon: f64,
    pub first_iterate: usize,
    pub first_direction: usize,
    pub first_step: usize,
    pub stop_reason: StopReason,
}

/// One row of the iteration history.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub x: Vec<f64>,
    pub values: Vec<f64>,
    /// `||v||` at `x`; absent on a final point reached by the iteration guard.
    pub direction_norm: Option<f64>,
    /// Step taken from `x`; absent on the last point of a stage.
    pub step: Option<f64>,
    pub epsilon: f64,
}

impl SolverRun {
    /// Row view of the stored history, aligned per stage.
    pub fn trace(&self) -> Vec<TraceRow> {
        let mut rows = Vec::with_capacity(self.iterates.len());
        for (s, stage) in self.stages.iter().enumerate() {
            let next = self.stages.get(s + 1);
            let end_iterate = next.map_or(self.iterates.len(), |n| n.first_iterate);
            let end_direction = next.map_or(self.directions.len(), |n| n.first_direction);
            let end_step = next.map_or(self.step_lengths.len(), |n| n.first_step);
            for (r, j) in (stage.first_iterate..end_iterate).enumerate() {
                let d = stage.first_direction + r;
                let t = stage.first_step + r;
                rows.push(TraceRow {
                    x: self.iterates[j].clone(),
                    values: self.values[j].clone(),
                    direction_norm: (d < end_direction).then(|| norm(&self.directions[d])),
                    step: (t < end_step).then(|| self.step_lengths[t]),
                    epsilon: stage.epsilon,
                });
            }
        }
        rows
    }
}

/// Accepted Armijo step.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmijoStep {
    pub step: f64,
    /// Number of halvings of `t0` tried before acceptance or fallback.
    pub halvings: usize,
    /// `f(x + step * v)`.
    pub values: Vec<f64>,
}

/// Armijo backtracking floored at `eps / ||v||`:
/// `t = max(2^-s t0, eps / ||v||)` with `s` the first exponent giving
/// `f_i(x + 2^-s t0 v) <= f_i(x) - 2^-s t0 c ||v||^2` for all `i`.
///
/// Once `2^-s t0` falls below the floor the floor step is taken; it is
/// re-verified against the same inequality.
#[allow(clippy::too_many_arguments)]
pub fn armijo_step(
    problem: &Problem,
    x: &[f64],
    v: &[f64],
    epsilon: f64,
    c: f64,
    t0: f64,
    max_armijo_halvings: usize,
) -> Result<ArmijoStep> {
    problem.check_point(x)?;
    problem.check_point(v)?;
    let fx = problem.evaluate(x)?;
    armijo_step_with(problem, x, &fx, v, epsilon, c, t0, max_armijo_halvings, None)
}

#[allow(clippy::too_many_arguments)]
fn armijo_step_with(
    problem: &Problem,
    x: &[f64],
    fx: &[f64],
    v: &[f64],
    epsilon: f64,
    c: f64,
    t0: f64,
    max_armijo_halvings: usize,
    floor_values: Option<&[f64]>,
) -> Result<ArmijoStep> {
    let v_sq = norm_sq(v);
    let v_norm = v_sq.sqrt();
    if v_norm == 0.0 {
        return Err(Error::InvalidConfig("line search needs a nonzero direction".into()));
    }
    let floor = epsilon / v_norm;
    let k = problem.num_objectives();

    let mut t = t0;
    for s in 0..=max_armijo_halvings {
        if t <= floor {
            break;
        }
        let y = add_scaled(x, t, v);
        let required = t * c * v_sq;
        let mut values = Vec::with_capacity(k);
        let mut ok = true;
        for (i, fxi) in fx.iter().enumerate() {
            let fy = problem.value(i, &y)?;
            if fy > fxi - required {
                ok = false;
                break;
            }
            values.push(fy);
        }
        if ok {
            return Ok(ArmijoStep { step: t, halvings: s, values });
        }
        t *= 0.5;
    }

    let halvings = ((t0 / t).log2().round() as usize).min(max_armijo_halvings);
    let values = match floor_values {
        Some(vals) => vals.to_vec(),
        None => problem.evaluate(&add_scaled(x, floor, v))?,
    };
    // same expression as the acceptance test of the direction search
    let required = c * epsilon * v_norm;
    if let Some(i) = (0..k).find(|&i| values[i] > fx[i] - required) {
        return Err(Error::ArmijoContract { objective: i, step: floor });
    }
    Ok(ArmijoStep {
        step: floor,
        halvings,
        values,
    })
}

/// Single-radius descent from `x1` to an (eps, delta)-critical point.
pub fn solve(problem: &Problem, x1: &[f64], config: &SolverConfig) -> Result<SolverRun> {
    config.validate()?;
    if config.epsilon_schedule.is_some() {
        return Err(Error::InvalidConfig(
            "solve runs a single radius; use solve_eps_decreasing for a schedule".into(),
        ));
    }
    problem.check_point(x1)?;
    let start = problem.snapshot_counters();
    let mut run = run_stage(problem, x1.to_vec(), None, config.epsilon, config)?;
    run.counters = problem.snapshot_counters() - start;
    Ok(run)
}

/// Runs [`solve`] for each radius of `config.epsilon_schedule`, each stage
/// starting from the previous stage's final iterate.
pub fn solve_eps_decreasing(problem: &Problem, x1: &[f64], config: &SolverConfig) -> Result<SolverRun> {
    config.validate()?;
    let schedule = config
        .epsilon_schedule
        .clone()
        .ok_or_else(|| Error::InvalidConfig("epsilon schedule required".into()))?;
    problem.check_point(x1)?;
    let start = problem.snapshot_counters();

    let mut combined: Option<SolverRun> = None;
    for &eps in &schedule {
        let (x, fx) = match &combined {
            Some(run) => (run.final_iterate().to_vec(), Some(run.final_values().to_vec())),
            None => (x1.to_vec(), None),
        };
        let stage = run_stage(problem, x, fx, eps, config)?;
        combined = Some(match combined {
            None => stage,
            Some(mut acc) => {
                acc.stages.push(Stage {
                    first_iterate: acc.iterates.len(),
                    first_direction: acc.directions.len(),
                    first_step: acc.step_lengths.len(),
                    ..stage.stages[0].clone()
                });
                match config.history {
                    History::Full => {
                        acc.iterates.extend(stage.iterates);
                        acc.values.extend(stage.values);
                    }
                    History::FinalOnly => {
                        acc.iterates = stage.iterates;
                        acc.values = stage.values;
                    }
                }
                acc.directions.extend(stage.directions);
                acc.direction_summaries.extend(stage.direction_summaries);
                acc.step_lengths.extend(stage.step_lengths);
                acc.steps += stage.steps;
                acc.stop_reason = stage.stop_reason;
                acc
            }
        });
    }
    let mut run = combined.expect("schedule is nonempty");
    run.counters = problem.snapshot_counters() - start;
    Ok(run)
}

fn run_stage(
    problem: &Problem,
    x1: Vec<f64>,
    f1: Option<Vec<f64>>,
    epsilon: f64,
    config: &SolverConfig,
) -> Result<SolverRun> {
    let full = config.history == History::Full;
    let mut x = x1;
    let mut fx = f1;
    let mut first_values: Option<Vec<f64>> = None;
    let mut run = SolverRun {
        iterates: Vec::new(),
        values: Vec::new(),
        directions: Vec::new(),
        direction_summaries: Vec::new(),
        step_lengths: Vec::new(),
        stop_reason: StopReason::MaxIterations,
        counters: CounterSnapshot::default(),
        stages: vec![Stage {
            epsilon,
            first_iterate: 0,
            first_direction: 0,
            first_step: 0,
            stop_reason: StopReason::MaxIterations,
        }],
        steps: 0,
    };

    let mut stop = None;
    for _ in 0..config.max_outer_iterations {
        let outcome = descent_direction_from(problem, &x, fx.take(), epsilon, config)?;
        problem.record_outer_iteration();
        let current = outcome.base_values.clone();
        if first_values.is_none() {
            first_values = Some(current.clone());
        }
        if full {
            run.iterates.push(x.clone());
            run.values.push(current.clone());
            run.directions.push(outcome.v.clone());
            run.direction_summaries.push(DirectionSummary {
                norms: outcome.trace.iter().map(|e| e.norm).collect(),
                bundle_size: outcome.bundle.len(),
                max_sample_distance: outcome
                    .sample_points
                    .iter()
                    .map(|p| distance(p, &x))
                    .fold(0.0, f64::max),
                epsilon,
            });
        }
        if outcome.status == DirectionStatus::Critical {
            if !full {
                run.iterates = vec![x.clone()];
                run.values = vec![current];
            }
            stop = Some(StopReason::Critical);
            break;
        }

        let t0 = config.initial_step.resolve(norm(&outcome.v));
        let step = armijo_step_with(
            problem,
            &x,
            &current,
            &outcome.v,
            epsilon,
            config.armijo_c,
            t0,
            config.max_armijo_halvings,
            outcome.trial_values.as_deref(),
        )?;
        x = add_scaled(&x, step.step, &outcome.v);
        fx = Some(step.values);
        if full {
            run.step_lengths.push(step.step);
        }
        run.steps += 1;
    }

    match stop {
        Some(reason) => {
            run.stop_reason = reason;
            run.stages[0].stop_reason = reason;
        }
        None => {
            // guard fired: store the last point reached
            let last = match fx {
                Some(v) => v,
                None => problem.evaluate(&x)?,
            };
            let decrease = first_values
                .as_ref()
                .map(|f0| {
                    f0.iter()
                        .zip(&last)
                        .map(|(a, b)| a - b)
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .unwrap_or(0.0);
            if full {
                run.iterates.push(x);
                run.values.push(last);
            } else {
                run.iterates = vec![x];
                run.values = vec![last];
            }
            run.stop_reason = if decrease > config.unbounded_threshold {
                StopReason::UnboundedSuspected
            } else {
                StopReason::MaxIterations
            };
            run.stages[0].stop_reason = run.stop_reason;
        }
    }
    Ok(run)
}

/// One-sided criticality check: `true` means a bundle inside `F_eps(x)` with
/// min-norm `<= delta` was found. `false` does not certify the opposite.
pub fn is_eps_delta_critical(problem: &Problem, x: &[f64], epsilon: f64, delta: f64, config: &SolverConfig) -> Result<bool> {
    let cfg = SolverConfig {
        epsilon,
        delta,
        epsilon_schedule: None,
        ..config.clone()
    };
    cfg.validate()?;
    let outcome = descent_direction_from(problem, x, None, epsilon, &cfg)?;
    Ok(outcome.status == DirectionStatus::Critical)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::InitialStep;
    use crate::problem::ObjectiveOracle;

    fn half_norm_sq(label: &str) -> ObjectiveOracle {
        ObjectiveOracle::new(label, |x: &[f64]| 0.5 * norm_sq(x), |x: &[f64]| x.to_vec())
    }

    #[test]
    fn armijo_accepts_full_step() {
        let p = Problem::new("q", 2, vec![half_norm_sq("a"), half_norm_sq("b")]).unwrap();
        let step = armijo_step(&p, &[1.0, 0.0], &[-1.0, 0.0], 1e-3, 0.25, 1.0, 30).unwrap();
        assert_eq!(step.step, 1.0);
        assert_eq!(step.halvings, 0);
        assert_eq!(step.values, vec![0.0, 0.0]);
    }

    #[test]
    fn armijo_floor_dominates_tiny_t0() {
        let p = Problem::new("q", 2, vec![half_norm_sq("a"), half_norm_sq("b")]).unwrap();
        let step = armijo_step(&p, &[1.0, 0.0], &[-1.0, 0.0], 0.1, 0.25, 1e-6, 30).unwrap();
        assert_eq!(step.step, 0.1);
    }

    #[test]
    fn armijo_contract_violation() {
        // v points uphill: nothing decreases, not even at the floor.
        let p = Problem::new("q", 1, vec![half_norm_sq("a")]).unwrap();
        let err = armijo_step(&p, &[1.0], &[1.0], 0.1, 0.25, 1.0, 30).unwrap_err();
        assert!(matches!(err, Error::ArmijoContract { objective: 0, .. }));
    }

    #[test]
    fn steepest_descent_degenerate_case() {
        let p = Problem::new("q", 2, vec![half_norm_sq("a")]).unwrap();
        let cfg = SolverConfig::default().with_initial_step(InitialStep::Fixed(1.0));
        let run = solve(&p, &[1.0, 1.0], &cfg).unwrap();
        assert_eq!(run.stop_reason, StopReason::Critical);
        assert!(norm(run.final_iterate()) <= 1e-3);
        // the certifying pass counts as an outer iteration
        assert_eq!(run.counters.outer_iterations as usize, run.steps + 1);
    }

    #[test]
    fn schedule_is_rejected_by_single_radius_solve() {
        let p = Problem::new("q", 1, vec![half_norm_sq("a")]).unwrap();
        let cfg = SolverConfig::default().with_schedule(vec![0.1, 0.01]);
        assert!(matches!(solve(&p, &[1.0], &cfg), Err(Error::InvalidConfig(_))));
        assert!(solve_eps_decreasing(&p, &[1.0], &SolverConfig::default()).is_err());
    }

    #[test]
    fn final_only_history_keeps_last_point() {
        let p = Problem::new("q", 2, vec![half_norm_sq("a")]).unwrap();
        let cfg = SolverConfig {
            history: History::FinalOnly,
            ..SolverConfig::default()
        };
        let run = solve(&p, &[2.0, -1.0], &cfg).unwrap();
        assert_eq!(run.iterates.len(), 1);
        assert!(run.directions.is_empty());
        assert!(run.steps > 0);
    }
}
