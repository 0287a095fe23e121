//! Descent directions from an incrementally enriched subgradient bundle.
//!
//! The bundle starts with one subgradient per objective at `x`. Each pass
//! takes the min-norm element `v` of `-conv(W)` and tests sufficient decrease
//! of every objective at the step `eps / ||v||`. Objectives failing the test
//! contribute a new subgradient from inside the epsilon-ball, found by
//! bisection on
//!
//! ```text
//! h_i(t) = f_i(x + t v) - f_i(x) + c t ||v||^2
//! ```
//!
//! The loop ends when `||v|| <= delta` (the point is (eps, delta)-critical)
//! or when every objective passes.

use serde::{Deserialize, Serialize};

use crate::config::{Enrichment, SolverConfig};
use crate::error::{Error, Result};
use crate::linalg::{add_scaled, dot, norm, norm_sq};
use crate::minnorm::{min_norm_point, Bundle};
use crate::problem::Problem;

/// Slack accepted on the separation test when bisection runs out of probes.
const STALL_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionStatus {
    /// `||v|| <= delta`
    Critical,
    /// `v` gives sufficient decrease at step `eps / ||v||` for every objective.
    Acceptable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionTraceEntry {
    pub norm: f64,
    /// Objectives failing the acceptance test in this pass.
    pub violated: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct DirectionOutcome {
    pub status: DirectionStatus,
    pub v: Vec<f64>,
    pub bundle: Bundle,
    /// Point at which each bundle member was computed, in bundle order.
    pub sample_points: Vec<Vec<f64>>,
    pub iterations: usize,
    pub trace: Vec<DirectionTraceEntry>,
    /// `f(x)`
    pub base_values: Vec<f64>,
    /// `f(x + eps / ||v|| * v)` for an acceptable direction.
    pub trial_values: Option<Vec<f64>>,
}

impl DirectionOutcome {
    pub fn norm(&self) -> f64 {
        norm(&self.v)
    }
}

/// `h_i(t) = f_i(x + t v) - f_i(x) + c t ||v||^2`.
pub struct HFunction<'a> {
    problem: &'a Problem,
    objective: usize,
    x: &'a [f64],
    v: &'a [f64],
    c: f64,
    base_value: f64,
    v_norm_sq: f64,
}

impl<'a> HFunction<'a> {
    /// Evaluates `f_i(x)` once to fix the base value.
    pub fn new(problem: &'a Problem, objective: usize, x: &'a [f64], v: &'a [f64], c: f64) -> Result<Self> {
        let base_value = problem.value(objective, x)?;
        Ok(Self::with_base_value(problem, objective, x, v, c, base_value))
    }

    pub fn with_base_value(
        problem: &'a Problem,
        objective: usize,
        x: &'a [f64],
        v: &'a [f64],
        c: f64,
        base_value: f64,
    ) -> Self {
        Self {
            problem,
            objective,
            x,
            v,
            c,
            base_value,
            v_norm_sq: norm_sq(v),
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        let y = add_scaled(self.x, t, self.v);
        let fy = self.problem.value(self.objective, &y)?;
        Ok(self.h_from_value(t, fy))
    }

    fn h_from_value(&self, t: f64, fy: f64) -> f64 {
        fy - self.base_value + self.c * t * self.v_norm_sq
    }

    /// Bisection for `t in (0, eps/||v||]` and `xi in df_i(x + t v)` with
    /// `<v, xi> > -c ||v||^2`.
    ///
    /// `h_end` is `h_i(eps / ||v||)` if already known.
    pub fn find_new_subgradient(
        &self,
        epsilon: f64,
        max_bisection_iterations: usize,
        h_end: Option<f64>,
    ) -> Result<NewSubgradient> {
        let v_norm = self.v_norm_sq.sqrt();
        let threshold = -self.c * self.v_norm_sq;
        let mut a = 0.0;
        let mut b = epsilon / v_norm;
        let mut h_b = match h_end {
            Some(h) => h,
            None => self.eval(b)?,
        };
        let mut t = 0.5 * (a + b);
        let mut last = None;
        for probe in 1..=max_bisection_iterations {
            let point = add_scaled(self.x, t, self.v);
            let xi = self.problem.subgradient(self.objective, &point)?;
            let separation = dot(self.v, &xi);
            if separation > threshold {
                return Ok(NewSubgradient { xi, t, point, probes: probe });
            }
            last = Some((xi, point, separation));
            if probe == max_bisection_iterations {
                break;
            }
            let h_t = self.eval(t)?;
            if h_b > h_t {
                a = t;
            } else {
                b = t;
                h_b = h_t;
            }
            t = 0.5 * (a + b);
        }
        let (xi, point, separation) = last.expect("at least one probe");
        if separation > threshold - STALL_SLACK {
            return Ok(NewSubgradient {
                xi,
                t,
                point,
                probes: max_bisection_iterations,
            });
        }
        Err(Error::BisectionStall {
            objective: self.objective,
            t,
            last_subgradient: xi,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewSubgradient {
    pub xi: Vec<f64>,
    pub t: f64,
    /// `x + t v`, where `xi` was evaluated.
    pub point: Vec<f64>,
    pub probes: usize,
}

/// Finds a subgradient of objective `i` near `x` that is not yet captured by
/// the bundle that produced `v`.
///
/// Requires `||v|| > 0` and objective `i` violating the acceptance test at
/// `x` for `v`.
pub fn find_new_subgradient(
    problem: &Problem,
    i: usize,
    x: &[f64],
    v: &[f64],
    epsilon: f64,
    c: f64,
    max_bisection_iterations: usize,
) -> Result<NewSubgradient> {
    problem.check_point(x)?;
    problem.check_point(v)?;
    if i >= problem.num_objectives() {
        return Err(Error::InvalidProblem(format!("objective index {i} out of range")));
    }
    if norm_sq(v) == 0.0 {
        return Err(Error::InvalidConfig("direction must be nonzero".into()));
    }
    let h = HFunction::new(problem, i, x, v, c)?;
    h.find_new_subgradient(epsilon, max_bisection_iterations, None)
}

/// Computes an acceptable descent direction at `x` or certifies
/// (eps, delta)-criticality.
pub fn compute_descent_direction(problem: &Problem, x: &[f64], config: &SolverConfig) -> Result<DirectionOutcome> {
    config.validate()?;
    descent_direction_from(problem, x, None, config.epsilon, config)
}

/// As [`compute_descent_direction`], with `f(x)` optionally supplied and the
/// radius taken from `epsilon` rather than the config.
pub(crate) fn descent_direction_from(
    problem: &Problem,
    x: &[f64],
    base_values: Option<Vec<f64>>,
    epsilon: f64,
    config: &SolverConfig,
) -> Result<DirectionOutcome> {
    problem.check_point(x)?;
    let k = problem.num_objectives();
    let c = config.armijo_c;

    let mut members = Vec::with_capacity(k);
    for i in 0..k {
        members.push(problem.subgradient(i, x)?);
    }
    let mut bundle = Bundle::new(members)?;
    let mut sample_points = vec![x.to_vec(); k];
    let mut base_values = base_values;
    let mut trace = Vec::new();

    for pass in 1..=config.max_direction_iterations {
        let solution = min_norm_point(&bundle, config.qp_tolerance)?;
        let v = solution.v;
        let v_norm = norm(&v);
        let fx = match &base_values {
            Some(fx) => fx.clone(),
            None => {
                let fx = problem.evaluate(x)?;
                base_values = Some(fx.clone());
                fx
            }
        };
        if v_norm <= config.delta {
            trace.push(DirectionTraceEntry {
                norm: v_norm,
                violated: Vec::new(),
            });
            return Ok(DirectionOutcome {
                status: DirectionStatus::Critical,
                v,
                bundle,
                sample_points,
                iterations: pass,
                trace,
                base_values: fx,
                trial_values: None,
            });
        }

        let step = epsilon / v_norm;
        let y = add_scaled(x, step, &v);
        let required = c * epsilon * v_norm;
        let trial = problem.evaluate(&y)?;
        let violated: Vec<usize> = (0..k).filter(|&i| trial[i] > fx[i] - required).collect();
        trace.push(DirectionTraceEntry {
            norm: v_norm,
            violated: violated.clone(),
        });
        if violated.is_empty() {
            return Ok(DirectionOutcome {
                status: DirectionStatus::Acceptable,
                v,
                bundle,
                sample_points,
                iterations: pass,
                trace,
                base_values: fx,
                trial_values: Some(trial),
            });
        }

        let targets: &[usize] = match config.enrichment {
            Enrichment::AllViolating => &violated,
            Enrichment::FirstViolating => &violated[..1],
        };
        for &i in targets {
            let h = HFunction::with_base_value(problem, i, x, &v, c, fx[i]);
            let h_end = h.h_from_value(step, trial[i]);
            let found = h.find_new_subgradient(epsilon, config.max_bisection_iterations, Some(h_end))?;
            bundle.push(found.xi)?;
            sample_points.push(found.point);
        }
    }
    Err(Error::DirectionNontermination {
        iterations: config.max_direction_iterations,
        trace,
    })
}
