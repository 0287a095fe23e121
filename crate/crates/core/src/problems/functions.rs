//! Scalar nonsmooth test functions on R^2 with explicit subgradients.
//!
//! Kink selections are deterministic: for a max of smooth branches the
//! gradient of the first active branch (lowest index among ties) is
//! returned; `|s|` contributes `sign(s)` with `sign(0) = 0`.
//!
//! Formulas:
//!
//! | name      | f(x)                                                                          |
//! |-----------|-------------------------------------------------------------------------------|
//! | CB3       | max{x1^4 + x2^2, (2-x1)^2 + (2-x2)^2, 2 e^(x2-x1)}                             |
//! | DEM       | max{5x1 + x2, -5x1 + x2, x1^2 + x2^2 + 4x2}                                    |
//! | QL        | max{x1^2+x2^2, x1^2+x2^2 + 10(-4x1-x2+4), x1^2+x2^2 + 10(-x1-2x2+6)}           |
//! | LQ        | max{-x1 - x2, -x1 - x2 + x1^2 + x2^2 - 1}                                      |
//! | Mifflin 1 | -x1 + 20 max{x1^2 + x2^2 - 1, 0}                                               |
//! | Mifflin 2 | -x1 + 2(x1^2 + x2^2 - 1) + 1.75 abs(x1^2 + x2^2 - 1)                           |
//! | Wolfe     | piecewise, see [`TestFunction::Wolfe`]                                         |
//! | Crescent  | max{x1^2 + (x2-1)^2 + x2 - 1, -x1^2 - (x2-1)^2 + x2 + 1}                        |
//! | WF        | max over sign pairs of (s1 x1 + s2 10x1/(x1+0.1) + 2x2^2)/2                    |
//! | SPIRAL    | max{(x1 - r cos r)^2 + 0.005 r^2, (x2 - r sin r)^2 + 0.005 r^2}, r = abs(x)    |

use serde::Serialize;

use crate::problem::ObjectiveOracle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TestFunction {
    Cb3,
    Dem,
    Ql,
    Lq,
    Mifflin1,
    Mifflin2,
    /// `5 sqrt(9x1^2 + 16x2^2)` if `x1 >= |x2|`; `9x1 + 16|x2|` if
    /// `0 < x1 < |x2|`; `9x1 + 16|x2| - x1^9` if `x1 <= 0`.
    Wolfe,
    Crescent,
    Wf,
    Spiral,
}

fn sign(s: f64) -> f64 {
    if s > 0.0 {
        1.0
    } else if s < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Index of the first maximal entry.
fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

fn gap_to_runner_up(values: &[f64]) -> f64 {
    let top = argmax_first(values);
    values
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != top)
        .map(|(_, v)| values[top] - v)
        .fold(f64::INFINITY, f64::min)
}

impl TestFunction {
    pub const ALL: [TestFunction; 10] = [
        TestFunction::Cb3,
        TestFunction::Dem,
        TestFunction::Ql,
        TestFunction::Lq,
        TestFunction::Mifflin1,
        TestFunction::Mifflin2,
        TestFunction::Wolfe,
        TestFunction::Crescent,
        TestFunction::Wf,
        TestFunction::Spiral,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TestFunction::Cb3 => "CB3",
            TestFunction::Dem => "DEM",
            TestFunction::Ql => "QL",
            TestFunction::Lq => "LQ",
            TestFunction::Mifflin1 => "Mifflin 1",
            TestFunction::Mifflin2 => "Mifflin 2",
            TestFunction::Wolfe => "Wolfe",
            TestFunction::Crescent => "Crescent",
            TestFunction::Wf => "WF",
            TestFunction::Spiral => "SPIRAL",
        }
    }

    /// Values of the smooth branches for max-type functions.
    fn branches(&self, x: &[f64]) -> Vec<f64> {
        let (x1, x2) = (x[0], x[1]);
        let r2 = x1 * x1 + x2 * x2;
        match self {
            TestFunction::Cb3 => vec![
                x1.powi(4) + x2 * x2,
                (2.0 - x1).powi(2) + (2.0 - x2).powi(2),
                2.0 * (x2 - x1).exp(),
            ],
            TestFunction::Dem => vec![5.0 * x1 + x2, -5.0 * x1 + x2, r2 + 4.0 * x2],
            TestFunction::Ql => vec![
                r2,
                r2 + 10.0 * (-4.0 * x1 - x2 + 4.0),
                r2 + 10.0 * (-x1 - 2.0 * x2 + 6.0),
            ],
            TestFunction::Lq => vec![-x1 - x2, -x1 - x2 + r2 - 1.0],
            TestFunction::Crescent => vec![
                x1 * x1 + (x2 - 1.0).powi(2) + x2 - 1.0,
                -x1 * x1 - (x2 - 1.0).powi(2) + x2 + 1.0,
            ],
            TestFunction::Wf => {
                let q = 10.0 * x1 / (x1 + 0.1);
                let s = 2.0 * x2 * x2;
                vec![
                    0.5 * (x1 + q + s),
                    0.5 * (-x1 + q + s),
                    0.5 * (x1 - q + s),
                    0.5 * (-x1 - q + s),
                ]
            }
            TestFunction::Spiral => {
                let r = r2.sqrt();
                vec![
                    (x1 - r * r.cos()).powi(2) + 0.005 * r2,
                    (x2 - r * r.sin()).powi(2) + 0.005 * r2,
                ]
            }
            TestFunction::Mifflin1 | TestFunction::Mifflin2 | TestFunction::Wolfe => {
                unreachable!("not a max of smooth branches")
            }
        }
    }

    fn branch_gradient(&self, branch: usize, x: &[f64]) -> Vec<f64> {
        let (x1, x2) = (x[0], x[1]);
        match (self, branch) {
            (TestFunction::Cb3, 0) => vec![4.0 * x1.powi(3), 2.0 * x2],
            (TestFunction::Cb3, 1) => vec![-2.0 * (2.0 - x1), -2.0 * (2.0 - x2)],
            (TestFunction::Cb3, _) => {
                let e = 2.0 * (x2 - x1).exp();
                vec![-e, e]
            }
            (TestFunction::Dem, 0) => vec![5.0, 1.0],
            (TestFunction::Dem, 1) => vec![-5.0, 1.0],
            (TestFunction::Dem, _) => vec![2.0 * x1, 2.0 * x2 + 4.0],
            (TestFunction::Ql, 0) => vec![2.0 * x1, 2.0 * x2],
            (TestFunction::Ql, 1) => vec![2.0 * x1 - 40.0, 2.0 * x2 - 10.0],
            (TestFunction::Ql, _) => vec![2.0 * x1 - 10.0, 2.0 * x2 - 20.0],
            (TestFunction::Lq, 0) => vec![-1.0, -1.0],
            (TestFunction::Lq, _) => vec![-1.0 + 2.0 * x1, -1.0 + 2.0 * x2],
            (TestFunction::Crescent, 0) => vec![2.0 * x1, 2.0 * (x2 - 1.0) + 1.0],
            (TestFunction::Crescent, _) => vec![-2.0 * x1, -2.0 * (x2 - 1.0) + 1.0],
            (TestFunction::Wf, b) => {
                let dq = 1.0 / ((x1 + 0.1) * (x1 + 0.1));
                let (s1, s2) = [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)][b];
                vec![0.5 * (s1 + s2 * dq), 2.0 * x2]
            }
            (TestFunction::Spiral, b) => {
                let r = (x1 * x1 + x2 * x2).sqrt();
                if r == 0.0 {
                    return vec![0.0, 0.0];
                }
                let (ux, uy) = (x1 / r, x2 / r);
                if b == 0 {
                    // d(r cos r) = (cos r - r sin r) x / r
                    let g = r.cos() - r * r.sin();
                    let res = x1 - r * r.cos();
                    vec![
                        2.0 * res * (1.0 - g * ux) + 0.01 * x1,
                        2.0 * res * (-g * uy) + 0.01 * x2,
                    ]
                } else {
                    // d(r sin r) = (sin r + r cos r) x / r
                    let g = r.sin() + r * r.cos();
                    let res = x2 - r * r.sin();
                    vec![
                        2.0 * res * (-g * ux) + 0.01 * x1,
                        2.0 * res * (1.0 - g * uy) + 0.01 * x2,
                    ]
                }
            }
            _ => unreachable!("not a max of smooth branches"),
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let (x1, x2) = (x[0], x[1]);
        match self {
            TestFunction::Mifflin1 => -x1 + 20.0 * (x1 * x1 + x2 * x2 - 1.0).max(0.0),
            TestFunction::Mifflin2 => {
                let s = x1 * x1 + x2 * x2 - 1.0;
                -x1 + 2.0 * s + 1.75 * s.abs()
            }
            TestFunction::Wolfe => {
                if x1 >= x2.abs() {
                    5.0 * (9.0 * x1 * x1 + 16.0 * x2 * x2).sqrt()
                } else if x1 > 0.0 {
                    9.0 * x1 + 16.0 * x2.abs()
                } else {
                    9.0 * x1 + 16.0 * x2.abs() - x1.powi(9)
                }
            }
            _ => self
                .branches(x)
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        let (x1, x2) = (x[0], x[1]);
        match self {
            TestFunction::Mifflin1 => {
                // max{s, 0}: first branch (s) active on ties
                if x1 * x1 + x2 * x2 - 1.0 >= 0.0 {
                    vec![-1.0 + 40.0 * x1, 40.0 * x2]
                } else {
                    vec![-1.0, 0.0]
                }
            }
            TestFunction::Mifflin2 => {
                let s = x1 * x1 + x2 * x2 - 1.0;
                let w = 2.0 + 1.75 * sign(s);
                vec![-1.0 + 2.0 * w * x1, 2.0 * w * x2]
            }
            TestFunction::Wolfe => {
                if x1 >= x2.abs() {
                    let root = (9.0 * x1 * x1 + 16.0 * x2 * x2).sqrt();
                    if root == 0.0 {
                        // origin: (9, 0) is a convex combination of (9, +-16)
                        vec![9.0, 0.0]
                    } else {
                        vec![45.0 * x1 / root, 80.0 * x2 / root]
                    }
                } else if x1 > 0.0 {
                    vec![9.0, 16.0 * sign(x2)]
                } else {
                    vec![9.0 - 9.0 * x1.powi(8), 16.0 * sign(x2)]
                }
            }
            _ => {
                let b = argmax_first(&self.branches(x));
                self.branch_gradient(b, x)
            }
        }
    }

    /// Smallest switching quantity at `x`: the gap between the active branch
    /// and the runner-up for max-type functions, or the magnitude of the
    /// argument of `|.|` / `max{., 0}`. Zero on the kink set; used to keep
    /// finite-difference checks away from kinks.
    pub fn switching_margin(&self, x: &[f64]) -> f64 {
        let (x1, x2) = (x[0], x[1]);
        match self {
            TestFunction::Mifflin1 | TestFunction::Mifflin2 => (x1 * x1 + x2 * x2 - 1.0).abs(),
            TestFunction::Wolfe => (x1 - x2.abs()).abs().min(x1.abs()).min(x2.abs()),
            TestFunction::Spiral => gap_to_runner_up(&self.branches(x)).min((x1 * x1 + x2 * x2).sqrt()),
            TestFunction::Wf => {
                let b = self.branches(x);
                gap_to_runner_up(&b).min((x1 + 0.1).abs())
            }
            _ => gap_to_runner_up(&self.branches(x)),
        }
    }

    pub fn oracle(self) -> ObjectiveOracle {
        ObjectiveOracle::new(self.name(), move |x: &[f64]| self.value(x), move |x: &[f64]| self.subgradient(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn known_minima() {
        let cases: [(TestFunction, [f64; 2], f64); 9] = [
            (TestFunction::Cb3, [1.0, 1.0], 2.0),
            (TestFunction::Dem, [0.0, -3.0], -3.0),
            (TestFunction::Ql, [1.2, 2.4], 7.2),
            (TestFunction::Lq, [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2], -std::f64::consts::SQRT_2),
            (TestFunction::Mifflin1, [1.0, 0.0], -1.0),
            (TestFunction::Mifflin2, [1.0, 0.0], -1.0),
            (TestFunction::Wolfe, [-1.0, 0.0], -8.0),
            (TestFunction::Crescent, [0.0, 0.0], 0.0),
            (TestFunction::Spiral, [0.0, 0.0], 0.0),
        ];
        for (f, x, v) in cases {
            assert_abs_diff_eq!(f.value(&x), v, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(TestFunction::Wf.value(&[0.0, 0.0]), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn wolfe_origin_selection() {
        assert_eq!(TestFunction::Wolfe.subgradient(&[0.0, 0.0]), vec![9.0, 0.0]);
    }

    #[test]
    fn crescent_tie_takes_first_branch() {
        // (0, 0) lies on the circle x1^2 + (x2-1)^2 = 1 where both branches agree
        let g = TestFunction::Crescent.subgradient(&[0.0, 0.0]);
        assert_eq!(g, vec![0.0, -1.0]);
    }
}
