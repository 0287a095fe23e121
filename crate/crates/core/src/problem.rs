//! Objective oracles, problems and evaluation counters.

use std::fmt;
use std::ops::{Add, Sub};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::all_finite;

pub type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
pub type SubgradientFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// Value and single-subgradient access to one objective `f_i`.
///
/// Every call goes through the counters; there is no uncounted path to the
/// underlying functions. Non-finite outputs are rejected with
/// [`Error::NonFiniteOracle`].
pub struct ObjectiveOracle {
    label: String,
    value_fn: Arc<ValueFn>,
    subgradient_fn: Arc<SubgradientFn>,
    value_count: AtomicU64,
    subgradient_count: AtomicU64,
}

impl ObjectiveOracle {
    pub fn new<F, G>(label: impl Into<String>, value: F, subgradient: G) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self::from_arcs(label.into(), Arc::new(value), Arc::new(subgradient))
    }

    fn from_arcs(label: String, value_fn: Arc<ValueFn>, subgradient_fn: Arc<SubgradientFn>) -> Self {
        Self {
            label,
            value_fn,
            subgradient_fn,
            value_count: AtomicU64::new(0),
            subgradient_count: AtomicU64::new(0),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.value_count.fetch_add(1, Ordering::Relaxed);
        let v = (self.value_fn)(x);
        if !v.is_finite() {
            return Err(Error::NonFiniteOracle {
                objective: self.label.clone(),
                what: "value",
                point: x.to_vec(),
            });
        }
        Ok(v)
    }

    pub fn subgradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.subgradient_count.fetch_add(1, Ordering::Relaxed);
        let g = (self.subgradient_fn)(x);
        if g.len() != x.len() {
            return Err(Error::Dimension {
                context: "subgradient oracle output",
                expected: x.len(),
                got: g.len(),
            });
        }
        if !all_finite(&g) {
            return Err(Error::NonFiniteOracle {
                objective: self.label.clone(),
                what: "subgradient",
                point: x.to_vec(),
            });
        }
        Ok(g)
    }

    pub fn value_count(&self) -> u64 {
        self.value_count.load(Ordering::Relaxed)
    }

    pub fn subgradient_count(&self) -> u64 {
        self.subgradient_count.load(Ordering::Relaxed)
    }

    /// Same functions, zeroed counters.
    pub fn fresh(&self) -> Self {
        Self::from_arcs(
            self.label.clone(),
            Arc::clone(&self.value_fn),
            Arc::clone(&self.subgradient_fn),
        )
    }
}

impl fmt::Debug for ObjectiveOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObjectiveOracle")
            .field("label", &self.label)
            .field("value_count", &self.value_count())
            .field("subgradient_count", &self.subgradient_count())
            .finish()
    }
}

/// Axis-aligned box `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoundingBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::Dimension {
                context: "bounding box corners",
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::InvalidProblem("empty bounding box".into()));
        }
        if !all_finite(&lower) || !all_finite(&upper) {
            return Err(Error::NonFiniteInput("bounding box"));
        }
        if lower.iter().zip(&upper).any(|(l, u)| l >= u) {
            return Err(Error::InvalidProblem(format!(
                "bounding box needs lower < upper componentwise, got {lower:?} / {upper:?}"
            )));
        }
        Ok(Self { lower, upper })
    }

    /// The square box `[lo, hi]^dim`.
    pub fn cube(lo: f64, hi: f64, dim: usize) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(xi, (l, u))| *l <= *xi && *xi <= *u)
    }

    /// Inclusive uniform lattice with `per_axis` points along every axis
    /// (corners included), in row-major order: the last coordinate varies
    /// fastest.
    pub fn grid(&self, per_axis: usize) -> Vec<Vec<f64>> {
        let n = self.dim();
        let axis: Vec<Vec<f64>> = (0..n)
            .map(|d| {
                let (l, u) = (self.lower[d], self.upper[d]);
                if per_axis == 1 {
                    vec![0.5 * (l + u)]
                } else {
                    (0..per_axis)
                        .map(|j| {
                            if j + 1 == per_axis {
                                u
                            } else {
                                l + (u - l) * j as f64 / (per_axis - 1) as f64
                            }
                        })
                        .collect()
                }
            })
            .collect();
        let total = per_axis.pow(n as u32);
        (0..total)
            .map(|mut flat| {
                let mut point = vec![0.0; n];
                for d in (0..n).rev() {
                    point[d] = axis[d][flat % per_axis];
                    flat /= per_axis;
                }
                point
            })
            .collect()
    }
}

/// Description of where a problem fails to be differentiable, with a
/// distance-like function to it.
#[derive(Clone)]
pub struct NonsmoothSet {
    pub description: String,
    distance: Arc<ValueFn>,
}

impl NonsmoothSet {
    pub fn new<D>(description: impl Into<String>, distance: D) -> Self
    where
        D: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            description: description.into(),
            distance: Arc::new(distance),
        }
    }

    pub fn distance(&self, x: &[f64]) -> f64 {
        (self.distance)(x)
    }
}

impl fmt::Debug for NonsmoothSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NonsmoothSet")
            .field("description", &self.description)
            .finish()
    }
}

/// Totals over all objectives of a problem. One evaluation of the full
/// vector `f(x)` counts `k` value evaluations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterSnapshot {
    pub value_evals: u64,
    pub subgrad_evals: u64,
    /// Passes of the outer loop, including the final one that certifies
    /// criticality. Accepted steps are [`crate::SolverRun::steps`].
    pub outer_iterations: u64,
}

impl Add for CounterSnapshot {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            value_evals: self.value_evals + rhs.value_evals,
            subgrad_evals: self.subgrad_evals + rhs.subgrad_evals,
            outer_iterations: self.outer_iterations + rhs.outer_iterations,
        }
    }
}

impl Sub for CounterSnapshot {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            value_evals: self.value_evals - rhs.value_evals,
            subgrad_evals: self.subgrad_evals - rhs.subgrad_evals,
            outer_iterations: self.outer_iterations - rhs.outer_iterations,
        }
    }
}

/// A multiobjective problem `min f(x)`, `f: R^n -> R^k`.
///
/// Dimensions are validated once here. A problem may be shared by reference
/// across threads (counters are atomic); use [`Problem::fresh`] for an
/// independent copy with zeroed counters.
#[derive(Debug)]
pub struct Problem {
    name: String,
    dim: usize,
    objectives: Vec<ObjectiveOracle>,
    benchmark_box: Option<BoundingBox>,
    nonsmooth_set: Option<NonsmoothSet>,
    outer_iterations: AtomicU64,
}

impl Problem {
    pub fn new(name: impl Into<String>, dim: usize, objectives: Vec<ObjectiveOracle>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidProblem("dimension must be positive".into()));
        }
        if objectives.is_empty() {
            return Err(Error::InvalidProblem("at least one objective is required".into()));
        }
        Ok(Self {
            name: name.into(),
            dim,
            objectives,
            benchmark_box: None,
            nonsmooth_set: None,
            outer_iterations: AtomicU64::new(0),
        })
    }

    pub fn with_benchmark_box(mut self, bounds: BoundingBox) -> Result<Self> {
        if bounds.dim() != self.dim {
            return Err(Error::Dimension {
                context: "benchmark box",
                expected: self.dim,
                got: bounds.dim(),
            });
        }
        self.benchmark_box = Some(bounds);
        Ok(self)
    }

    pub fn with_nonsmooth_set(mut self, set: NonsmoothSet) -> Self {
        self.nonsmooth_set = Some(set);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_objectives(&self) -> usize {
        self.objectives.len()
    }

    pub fn objectives(&self) -> &[ObjectiveOracle] {
        &self.objectives
    }

    pub fn objective(&self, i: usize) -> &ObjectiveOracle {
        &self.objectives[i]
    }

    pub fn benchmark_box(&self) -> Option<&BoundingBox> {
        self.benchmark_box.as_ref()
    }

    pub fn nonsmooth_set(&self) -> Option<&NonsmoothSet> {
        self.nonsmooth_set.as_ref()
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Dimension {
                context: "point",
                expected: self.dim,
                got: x.len(),
            });
        }
        if !all_finite(x) {
            return Err(Error::NonFiniteInput("point"));
        }
        Ok(())
    }

    /// Evaluates all objectives at `x` (counts `k` value evaluations).
    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        self.objectives.iter().map(|o| o.value(x)).collect()
    }

    pub fn value(&self, i: usize, x: &[f64]) -> Result<f64> {
        self.objectives[i].value(x)
    }

    pub fn subgradient(&self, i: usize, x: &[f64]) -> Result<Vec<f64>> {
        self.objectives[i].subgradient(x)
    }

    pub fn record_outer_iteration(&self) {
        self.outer_iterations.fetch_add(1, Ordering::Relaxed);
    }

    /// Current counter totals, summed over objectives. Does not reset.
    pub fn snapshot_counters(&self) -> CounterSnapshot {
        CounterSnapshot {
            value_evals: self.objectives.iter().map(|o| o.value_count()).sum(),
            subgrad_evals: self.objectives.iter().map(|o| o.subgradient_count()).sum(),
            outer_iterations: self.outer_iterations.load(Ordering::Relaxed),
        }
    }

    /// Copy sharing the objective functions but with zeroed counters.
    pub fn fresh(&self) -> Self {
        Self {
            name: self.name.clone(),
            dim: self.dim,
            objectives: self.objectives.iter().map(|o| o.fresh()).collect(),
            benchmark_box: self.benchmark_box.clone(),
            nonsmooth_set: self.nonsmooth_set.clone(),
            outer_iterations: AtomicU64::new(0),
        }
    }
}

/// Pareto dominance of objective vectors: `a` is no worse than `b` in every
/// component and strictly better in at least one.
pub fn dominates(a: &[f64], b: &[f64]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            context: "dominates",
            expected: a.len(),
            got: b.len(),
        });
    }
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return Ok(false);
        }
        strict |= x < y;
    }
    Ok(strict)
}

/// Flags the members of `values` not dominated by any other member.
pub fn nondominated_mask(values: &[Vec<f64>]) -> Vec<bool> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    // Lexicographic sort: a point can only be dominated by one sorting before it.
    order.sort_by(|&a, &b| {
        values[a]
            .iter()
            .zip(&values[b])
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut front: Vec<usize> = Vec::new();
    let mut mask = vec![false; values.len()];
    for &i in &order {
        let dominated = front
            .iter()
            .any(|&j| dominates(&values[j], &values[i]).unwrap_or(false));
        if !dominated {
            front.push(i);
            mask[i] = true;
        }
    }
    mask
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic_problem() -> Problem {
        let f1 = ObjectiveOracle::new(
            "f1",
            |x: &[f64]| (x[0] - 1.0).powi(2) + x[1] * x[1],
            |x: &[f64]| vec![2.0 * (x[0] - 1.0), 2.0 * x[1]],
        );
        let f2 = ObjectiveOracle::new(
            "f2",
            |x: &[f64]| (x[0] + 1.0).powi(2) + x[1] * x[1],
            |x: &[f64]| vec![2.0 * (x[0] + 1.0), 2.0 * x[1]],
        );
        Problem::new("pair", 2, vec![f1, f2]).unwrap()
    }

    #[test]
    fn dominance_examples() {
        assert!(!dominates(&[1.0, 1.0], &[1.0, 1.0]).unwrap());
        assert!(dominates(&[0.0, 1.0], &[1.0, 1.0]).unwrap());
        assert!(!dominates(&[0.0, 2.0], &[1.0, 1.0]).unwrap());
        assert!(matches!(
            dominates(&[0.0], &[1.0, 1.0]),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn counters_start_at_zero_and_count_per_objective() {
        let p = quadratic_problem();
        assert_eq!(p.snapshot_counters(), CounterSnapshot::default());
        p.evaluate(&[0.0, 0.0]).unwrap();
        let snap = p.snapshot_counters();
        assert_eq!(snap.value_evals, 2);
        assert_eq!(snap.subgrad_evals, 0);
        p.subgradient(1, &[0.0, 0.0]).unwrap();
        assert_eq!(p.snapshot_counters().subgrad_evals, 1);
        // snapshots do not reset
        assert_eq!(p.snapshot_counters().value_evals, 2);
    }

    #[test]
    fn fresh_copy_has_zero_counters() {
        let p = quadratic_problem();
        p.evaluate(&[0.0, 0.0]).unwrap();
        let q = p.fresh();
        assert_eq!(q.snapshot_counters(), CounterSnapshot::default());
        assert_eq!(q.evaluate(&[1.0, 0.0]).unwrap(), p.evaluate(&[1.0, 0.0]).unwrap());
    }

    #[test]
    fn nan_from_oracle_is_rejected() {
        let f = ObjectiveOracle::new("bad", |_: &[f64]| f64::NAN, |x: &[f64]| vec![0.0; x.len()]);
        let p = Problem::new("bad", 1, vec![f]).unwrap();
        assert!(matches!(p.evaluate(&[0.0]), Err(Error::NonFiniteOracle { .. })));
    }

    #[test]
    fn wrong_subgradient_length_is_rejected() {
        let f = ObjectiveOracle::new("short", |_: &[f64]| 0.0, |_: &[f64]| vec![0.0]);
        let p = Problem::new("short", 2, vec![f]).unwrap();
        assert!(matches!(p.subgradient(0, &[0.0, 0.0]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn construction_validates() {
        assert!(Problem::new("empty", 2, vec![]).is_err());
        assert!(BoundingBox::new(vec![1.0, 0.0], vec![0.0, 1.0]).is_err());
        let p = quadratic_problem();
        assert!(p.with_benchmark_box(BoundingBox::cube(0.0, 1.0, 3).unwrap()).is_err());
    }

    #[test]
    fn grid_is_inclusive_and_row_major() {
        let b = BoundingBox::cube(-3.0, 3.0, 2).unwrap();
        let g = b.grid(10);
        assert_eq!(g.len(), 100);
        assert_eq!(g[0], vec![-3.0, -3.0]);
        assert_eq!(g[1][0], -3.0);
        assert!(g[1][1] > -3.0);
        assert_eq!(g[9], vec![-3.0, 3.0]);
        assert_eq!(g[99], vec![3.0, 3.0]);
        assert!(g.iter().all(|p| b.contains(p)));
    }

    #[test]
    fn nondominated_mask_filters() {
        let values = vec![
            vec![1.0, 3.0],
            vec![2.0, 2.0],
            vec![2.5, 2.5],
            vec![3.0, 1.0],
            vec![1.0, 3.0],
        ];
        let mask = nondominated_mask(&values);
        assert_eq!(mask, vec![true, true, false, true, true]);
    }
}
