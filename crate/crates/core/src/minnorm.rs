//! Minimum-norm point of the convex hull of a finite point set.
//!
//! The solver is Wolfe's minimum-norm-point method: it keeps a "corral" of
//! affinely independent points whose affine minimizer lies in their relative
//! interior, adds the point most violating the optimality test, and drops
//! points whose weights leave the simplex. For bundles of a few dozen vectors
//! in low dimension it converges in a handful of major cycles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{all_finite, dot, norm_sq, solve_dense};

/// Finite set of subgradients `W = {xi_1, ..., xi_m}`, all of one dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bundle {
    members: Vec<Vec<f64>>,
}

impl Bundle {
    pub fn new(members: Vec<Vec<f64>>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::InvalidProblem("bundle needs at least one member".into()))?;
        let n = first.len();
        if n == 0 {
            return Err(Error::InvalidProblem("bundle members must be nonempty".into()));
        }
        for m in &members {
            if m.len() != n {
                return Err(Error::Dimension {
                    context: "bundle member",
                    expected: n,
                    got: m.len(),
                });
            }
            if !all_finite(m) {
                return Err(Error::NonFiniteInput("bundle member"));
            }
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[Vec<f64>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members[0].len()
    }

    pub fn push(&mut self, xi: Vec<f64>) -> Result<()> {
        if xi.len() != self.dim() {
            return Err(Error::Dimension {
                context: "bundle member",
                expected: self.dim(),
                got: xi.len(),
            });
        }
        if !all_finite(&xi) {
            return Err(Error::NonFiniteInput("bundle member"));
        }
        self.members.push(xi);
        Ok(())
    }
}

/// `v = argmin { ||v||^2 : v in -conv(W) }` with convex weights `lambda`
/// such that `-v = sum lambda_i xi_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinNormSolution {
    pub v: Vec<f64>,
    pub coefficients: Vec<f64>,
    pub norm_sq: f64,
}

impl MinNormSolution {
    pub fn norm(&self) -> f64 {
        self.norm_sq.sqrt()
    }
}

const WEIGHT_TOL: f64 = 1e-12;
const PIVOT_TOL: f64 = 1e-13;

/// Solves the min-norm problem over `-conv(W)`.
///
/// `qp_tolerance` bounds the optimality gap
/// `||v||^2 + max_i <v, xi_i>` relative to `max(1, max_i ||xi_i||^2)`. When
/// `||v||` drops below `qp_tolerance * max(1, max_i ||xi_i||)` the hull is
/// taken to contain the origin and `v` is returned as exactly zero.
pub fn min_norm_point(bundle: &Bundle, qp_tolerance: f64) -> Result<MinNormSolution> {
    if qp_tolerance.is_nan() || qp_tolerance <= 0.0 {
        return Err(Error::InvalidConfig("qp_tolerance must be positive".into()));
    }
    let points = bundle.members();
    let m = points.len();
    let n = bundle.dim();
    let max_sq = points.iter().map(|p| norm_sq(p)).fold(0.0_f64, f64::max);
    let scale_sq = max_sq.max(1.0);
    let gap_tol = qp_tolerance * scale_sq;
    let zero_tol = qp_tolerance * scale_sq.sqrt();

    let start = (0..m)
        .min_by(|&a, &b| norm_sq(&points[a]).total_cmp(&norm_sq(&points[b])))
        .unwrap();
    let mut corral = vec![start];
    let mut weights = vec![1.0];
    let mut z = points[start].clone();

    let max_major = 50 + 20 * m;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_major {
        iterations += 1;
        let z_sq = norm_sq(&z);
        if z_sq.sqrt() <= zero_tol {
            converged = true;
            break;
        }
        let (j, zp) = (0..m)
            .map(|j| (j, dot(&z, &points[j])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        // A violator already in the corral means rounding has stalled the
        // method; the final gap check decides whether that is acceptable.
        if zp >= z_sq - gap_tol || corral.contains(&j) {
            converged = true;
            break;
        }
        corral.push(j);
        weights.push(0.0);

        // Minor cycles: move toward the affine minimizer of the corral,
        // dropping points whose weights leave the simplex.
        let mut dependent = false;
        loop {
            let Some(u) = affine_minimizer(points, &corral, n) else {
                corral.pop();
                weights.pop();
                dependent = true;
                break;
            };
            if u.iter().all(|&ui| ui > WEIGHT_TOL) {
                weights = u;
                break;
            }
            let theta = weights
                .iter()
                .zip(&u)
                .filter(|(_, &ui)| ui <= WEIGHT_TOL)
                .map(|(&wi, &ui)| if wi - ui > 0.0 { wi / (wi - ui) } else { 0.0 })
                .fold(1.0_f64, f64::min)
                .clamp(0.0, 1.0);
            for (wi, ui) in weights.iter_mut().zip(&u) {
                *wi = theta * ui + (1.0 - theta) * *wi;
            }
            let before = corral.len();
            let mut k = 0;
            while k < corral.len() {
                if weights[k] <= WEIGHT_TOL && corral.len() > 1 {
                    corral.remove(k);
                    weights.remove(k);
                } else {
                    k += 1;
                }
            }
            if corral.len() == before {
                // rounding kept every weight above the threshold
                let (idx, _) = weights
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(b.1))
                    .unwrap();
                corral.remove(idx);
                weights.remove(idx);
            }
            renormalize(&mut weights);
            if corral.len() == 1 {
                break;
            }
        }
        renormalize(&mut weights);
        z = combine(points, &corral, &weights, n);
        if dependent {
            converged = true;
            break;
        }
    }

    let mut coefficients = vec![0.0; m];
    for (&idx, &w) in corral.iter().zip(&weights) {
        coefficients[idx] += w;
    }
    let mut v: Vec<f64> = z.iter().map(|zi| -zi).collect();
    if norm_sq(&v).sqrt() <= zero_tol {
        v.iter_mut().for_each(|vi| *vi = 0.0);
    }
    let solution = MinNormSolution {
        norm_sq: norm_sq(&v),
        v,
        coefficients,
    };

    // Optimality check independent of the loop: the half-space property.
    let gap = points
        .iter()
        .map(|p| dot(&solution.v, p) + solution.norm_sq)
        .fold(f64::NEG_INFINITY, f64::max);
    if converged && (gap <= gap_tol || solution.norm_sq == 0.0) {
        Ok(solution)
    } else {
        Err(Error::MinNormConvergence {
            iterations,
            gap,
            best: Box::new(solution),
        })
    }
}

fn renormalize(w: &mut [f64]) {
    let s: f64 = w.iter().sum();
    if s > 0.0 {
        w.iter_mut().for_each(|wi| *wi /= s);
    }
}

fn combine(points: &[Vec<f64>], corral: &[usize], weights: &[f64], n: usize) -> Vec<f64> {
    let mut z = vec![0.0; n];
    for (&idx, &w) in corral.iter().zip(weights) {
        for (zi, pi) in z.iter_mut().zip(&points[idx]) {
            *zi += w * pi;
        }
    }
    z
}

/// Weights (summing to one) of the point of smallest norm in the affine hull
/// of the corral. `None` if the corral is numerically affinely dependent.
fn affine_minimizer(points: &[Vec<f64>], corral: &[usize], n: usize) -> Option<Vec<f64>> {
    let q0 = &points[corral[0]];
    let r = corral.len() - 1;
    if r == 0 {
        return Some(vec![1.0]);
    }
    // y = q0 + D a, minimize ||y||^2  =>  (D^T D) a = -D^T q0
    let diffs: Vec<Vec<f64>> = corral[1..]
        .iter()
        .map(|&i| (0..n).map(|d| points[i][d] - q0[d]).collect())
        .collect();
    let mut gram = vec![0.0; r * r];
    let mut rhs = vec![0.0; r];
    for a in 0..r {
        for b in a..r {
            let g = dot(&diffs[a], &diffs[b]);
            gram[a * r + b] = g;
            gram[b * r + a] = g;
        }
        rhs[a] = -dot(&diffs[a], q0);
    }
    solve_dense(&mut gram, &mut rhs, PIVOT_TOL)?;
    let mut u = Vec::with_capacity(r + 1);
    u.push(1.0 - rhs.iter().sum::<f64>());
    u.extend_from_slice(&rhs);
    Some(u)
}
