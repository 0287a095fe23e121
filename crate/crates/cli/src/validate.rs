use nsmop::minnorm::{min_norm_point, Bundle};
use nsmop::problems::{crescent_mifflin2, table1_suite};
use nsmop::validation::{example_2_5_subdifferentials, exact_min_norm_over_hull, finite_difference_gradient, simplex_grid_min_norm};
use serde::Serialize;

use crate::args::ValidateArgs;
use crate::error::CliResult;

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    value: f64,
    expected: f64,
    tolerance: f64,
    pass: bool,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected,
            tolerance,
            pass: (value - expected).abs() <= tolerance,
        }
    }
}

/// Largest finite-difference mismatch of the oracle at the grid points of
/// the benchmark box that stay clear of the kinks.
fn worst_gradient_mismatch(problem: &nsmop::Problem, points: &[Vec<f64>]) -> CliResult<f64> {
    let mut worst: f64 = 0.0;
    for oracle in problem.objectives() {
        for x in points {
            let fd = finite_difference_gradient(|y| oracle.value(y).unwrap_or(f64::NAN), x, 1e-6);
            let g = oracle.subgradient(x)?;
            for (a, b) in fd.iter().zip(&g) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    Ok(worst)
}

pub fn cmd_validate(args: &ValidateArgs) -> CliResult<u8> {
    let mut checks = Vec::new();
    let hull = |x: [f64; 2], eps: f64| exact_min_norm_over_hull(&example_2_5_subdifferentials(x, eps), args.disk_facets);
    checks.push(Check::new("clarke min-norm^2 at (1.5,0)", hull([1.5, 0.0], 0.0)?.norm_sq(), 49.0 / 13.0, 1e-9));
    let eps_case = hull([1.5, 0.0], 0.2)?;
    checks.push(Check::new("eps=0.2 min-norm^2 at (1.5,0)", eps_case.norm_sq(), 2.4433, 1e-2));
    checks.push(Check::new("eps=0.2 bracket width", eps_case.width(), 0.0, 1e-3));
    checks.push(Check::new("eps=0.2 min-norm at (0.5,0)", hull([0.5, 0.0], 0.2)?.norm(), 0.0, 1e-6));

    let seed = Bundle::new(vec![vec![-0.12, -2.04], vec![1.88, -1.0]])?;
    let qp = min_norm_point(&seed, 1e-12)?.norm();
    checks.push(Check::new("seed bundle grid vs qp", simplex_grid_min_norm(&seed, 1e-3), qp, 1e-3));

    for entry in table1_suite() {
        let problem = &entry.problem;
        let clear: Vec<Vec<f64>> = entry
            .starts()
            .into_iter()
            .filter(|x| entry.functions.iter().all(|f| f.switching_margin(x) > 1e-3))
            .collect();
        let worst = worst_gradient_mismatch(problem, &clear)?;
        checks.push(Check::new(format!("suite {} gradient check", entry.number), worst, 0.0, 1e-4));
    }
    let p = crescent_mifflin2();
    let worst = worst_gradient_mismatch(&p, &[vec![2.0, 2.0]])?;
    checks.push(Check::new("crescent-mifflin2 gradient at (2,2)", worst, 0.0, 1e-4));

    println!("{}", serde_json::to_string_pretty(&checks)?);
    Ok(if checks.iter().all(|c| c.pass) { 0 } else { 1 })
}
