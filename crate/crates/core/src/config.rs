use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Initial trial step of the Armijo search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialStep {
    Fixed(f64),
    /// `t0 = max(1 / ||v||, 1)`
    Adaptive,
}

impl InitialStep {
    pub fn resolve(&self, direction_norm: f64) -> f64 {
        match *self {
            InitialStep::Fixed(t0) => t0,
            InitialStep::Adaptive => (1.0 / direction_norm).max(1.0),
        }
    }
}

/// Which violating objectives receive a new subgradient per enrichment pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Enrichment {
    /// One new subgradient for every objective failing the acceptance test.
    #[default]
    AllViolating,
    /// Only the lowest-indexed violating objective.
    FirstViolating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum History {
    #[default]
    Full,
    /// Keep only the last iterate (used by the subdivision map).
    FinalOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Radius of the Goldstein epsilon-ball.
    pub epsilon: f64,
    /// Criticality threshold on `||v||`.
    pub delta: f64,
    /// Sufficient-decrease constant, in (0, 1).
    pub armijo_c: f64,
    pub initial_step: InitialStep,
    pub max_outer_iterations: usize,
    pub max_direction_iterations: usize,
    pub max_bisection_iterations: usize,
    pub max_armijo_halvings: usize,
    /// Strictly decreasing radii for the epsilon-decreasing driver.
    pub epsilon_schedule: Option<Vec<f64>>,
    pub qp_tolerance: f64,
    pub enrichment: Enrichment,
    pub history: History,
    /// Decrease (in any objective) past which a run that hits the iteration
    /// guard is reported as probably unbounded.
    pub unbounded_threshold: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            delta: 1e-3,
            armijo_c: 0.25,
            initial_step: InitialStep::Adaptive,
            max_outer_iterations: 10_000,
            max_direction_iterations: 200,
            max_bisection_iterations: 64,
            max_armijo_halvings: 30,
            epsilon_schedule: None,
            qp_tolerance: 1e-12,
            enrichment: Enrichment::AllViolating,
            history: History::Full,
            unbounded_threshold: 1e8,
        }
    }
}

impl SolverConfig {
    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_initial_step(mut self, initial_step: InitialStep) -> Self {
        self.initial_step = initial_step;
        self
    }

    pub fn with_schedule(mut self, schedule: Vec<f64>) -> Self {
        self.epsilon_schedule = Some(schedule);
        self
    }

    pub fn with_max_outer_iterations(mut self, n: usize) -> Self {
        self.max_outer_iterations = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return bad(format!("delta must be positive, got {}", self.delta));
        }
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return bad(format!("armijo_c must lie in (0, 1), got {}", self.armijo_c));
        }
        if let InitialStep::Fixed(t0) = self.initial_step {
            if !(t0 > 0.0 && t0.is_finite()) {
                return bad(format!("t0 must be positive, got {t0}"));
            }
        }
        if self.max_outer_iterations == 0
            || self.max_direction_iterations == 0
            || self.max_bisection_iterations == 0
            || self.max_armijo_halvings == 0
        {
            return bad("iteration guards must be positive".into());
        }
        if self.qp_tolerance.is_nan() || self.qp_tolerance <= 0.0 {
            return bad("qp_tolerance must be positive".into());
        }
        if let Some(schedule) = &self.epsilon_schedule {
            if schedule.is_empty() {
                return bad("epsilon schedule is empty".into());
            }
            if schedule.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
                return bad(format!("epsilon schedule must be positive, got {schedule:?}"));
            }
            if schedule.windows(2).any(|w| w[1] >= w[0]) {
                return bad(format!("epsilon schedule must strictly decrease, got {schedule:?}"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        SolverConfig::default().validate().unwrap();
    }

    #[test]
    fn adaptive_initial_step() {
        assert_eq!(InitialStep::Adaptive.resolve(0.5), 2.0);
        assert_eq!(InitialStep::Adaptive.resolve(4.0), 1.0);
        assert_eq!(InitialStep::Fixed(0.3).resolve(0.5), 0.3);
    }

    #[test]
    fn rejects_bad_values() {
        let base = SolverConfig::default();
        let mut c = base.clone();
        c.armijo_c = 1.0;
        assert!(c.validate().is_err());
        assert!(base.clone().with_epsilon(0.0).validate().is_err());
        assert!(base.clone().with_delta(-1.0).validate().is_err());
        assert!(base.clone().with_schedule(vec![1e-2, 1e-1]).validate().is_err());
        assert!(base.clone().with_schedule(vec![1e-1, 1e-1]).validate().is_err());
        assert!(base.clone().with_schedule(vec![1e-1, 1e-2, 1e-3]).validate().is_ok());
        assert!(base.with_initial_step(InitialStep::Fixed(0.0)).validate().is_err());
    }
}
