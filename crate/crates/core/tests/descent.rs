use nsmop::config::SolverConfig;
use nsmop::problems::{example_3_8, suite_entry};
use nsmop::{
    compute_descent_direction, is_eps_delta_critical, solve, solve_eps_decreasing, DirectionStatus, ObjectiveOracle,
    Problem, StopReason,
};
use proptest::prelude::*;

fn check_monotone_and_armijo(problem: &Problem, run: &nsmop::SolverRun, c: f64) -> Result<(), TestCaseError> {
    let rows = run.trace();
    for pair in rows.windows(2) {
        let (row, next) = (&pair[0], &pair[1]);
        let (Some(norm), Some(step)) = (row.direction_norm, row.step) else { continue };
        for i in 0..problem.num_objectives() {
            let required = row.values[i] - step * c * norm * norm;
            let slack = 1e-9 * (1.0 + row.values[i].abs());
            prop_assert!(
                next.values[i] <= required + slack,
                "objective {i}: {} > {} at {:?}",
                next.values[i],
                required,
                row.x
            );
        }
    }
    for pair in run.values.windows(2) {
        for (a, b) in pair[0].iter().zip(&pair[1]) {
            prop_assert!(b <= a);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn runs_decrease_every_objective(number in 1usize..=18, u in 0.0..1.0f64, w in 0.0..1.0f64) {
        let entry = suite_entry(number).unwrap();
        let b = entry.benchmark_box();
        let x = vec![b.lower[0] + u * (b.upper[0] - b.lower[0]), b.lower[1] + w * (b.upper[1] - b.lower[1])];
        let config = SolverConfig::default();
        let run = solve(&entry.problem, &x, &config).unwrap();
        prop_assert_eq!(run.stop_reason, StopReason::Critical);
        prop_assert_eq!(run.counters.outer_iterations as usize, run.steps + 1);
        check_monotone_and_armijo(&entry.problem, &run, config.armijo_c)?;
        prop_assert!(is_eps_delta_critical(&entry.problem, run.final_iterate(), config.epsilon, config.delta, &config).unwrap());
    }

    #[test]
    fn schedule_runs_decrease_every_objective(number in 1usize..=18, u in 0.0..1.0f64, w in 0.0..1.0f64) {
        let entry = suite_entry(number).unwrap();
        let b = entry.benchmark_box();
        let x = vec![b.lower[0] + u * (b.upper[0] - b.lower[0]), b.lower[1] + w * (b.upper[1] - b.lower[1])];
        let config = SolverConfig::default().with_schedule(vec![0.1, 0.01, 0.001]);
        let run = solve_eps_decreasing(&entry.problem, &x, &config).unwrap();
        prop_assert_eq!(run.stop_reason, StopReason::Critical);
        prop_assert_eq!(run.stages.len(), 3);
        check_monotone_and_armijo(&entry.problem, &run, config.armijo_c)?;
    }

    #[test]
    fn acceptable_directions_pass_the_acceptance_test(number in 1usize..=18, u in 0.0..1.0f64, w in 0.0..1.0f64) {
        let entry = suite_entry(number).unwrap();
        let b = entry.benchmark_box();
        let x = vec![b.lower[0] + u * (b.upper[0] - b.lower[0]), b.lower[1] + w * (b.upper[1] - b.lower[1])];
        let config = SolverConfig::default().with_epsilon(0.1);
        let out = compute_descent_direction(&entry.problem, &x, &config).unwrap();
        let norm = out.norm();
        match out.status {
            DirectionStatus::Critical => prop_assert!(norm <= config.delta),
            DirectionStatus::Acceptable => {
                let t = config.epsilon / norm;
                let y: Vec<f64> = x.iter().zip(&out.v).map(|(a, d)| a + t * d).collect();
                let fx = entry.problem.evaluate(&x).unwrap();
                let fy = entry.problem.evaluate(&y).unwrap();
                for (a, b) in fx.iter().zip(&fy) {
                    prop_assert!(*b <= a - config.armijo_c * config.epsilon * norm + 1e-12 * (1.0 + a.abs()));
                }
            }
        }
        for p in &out.sample_points {
            let d: f64 = p.iter().zip(&x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            prop_assert!(d <= config.epsilon * (1.0 + 1e-12));
        }
    }
}

#[test]
fn unbounded_objective_hits_the_guard() {
    let p = Problem::new(
        "linear",
        2,
        vec![ObjectiveOracle::new("x1", |x: &[f64]| x[0], |_: &[f64]| vec![1.0, 0.0])],
    )
    .unwrap();
    let config = SolverConfig::default().with_max_outer_iterations(50);
    let run = solve(&p, &[0.0, 0.0], &config).unwrap();
    assert_ne!(run.stop_reason, StopReason::Critical);
    assert_eq!(run.steps, 50);
    assert!(run.final_values()[0] <= -50.0);
}

#[test]
fn example_3_8_start_on_the_kink_stops_quickly() {
    let p = example_3_8(10.0, 0.5).unwrap();
    let run = solve(&p, &[0.0, 0.0], &SolverConfig::default()).unwrap();
    assert_eq!(run.stop_reason, StopReason::Critical);
    assert!(run.counters.outer_iterations <= 2);
}

#[test]
fn solve_rejects_a_schedule_and_the_schedule_driver_needs_one() {
    let entry = suite_entry(1).unwrap();
    let with = SolverConfig::default().with_schedule(vec![0.1, 0.01]);
    assert!(solve(&entry.problem, &[0.0, 0.0], &with).is_err());
    assert!(solve_eps_decreasing(&entry.problem, &[0.0, 0.0], &SolverConfig::default()).is_err());
    let increasing = SolverConfig::default().with_schedule(vec![0.01, 0.1]);
    assert!(solve_eps_decreasing(&entry.problem, &[0.0, 0.0], &increasing).is_err());
}

#[test]
fn wrong_dimension_is_an_error() {
    let entry = suite_entry(2).unwrap();
    assert!(solve(&entry.problem, &[0.0], &SolverConfig::default()).is_err());
}
