//! Small harness for the acceptance suite: each criterion is a function
//! returning a detail string on success or a reason on failure, run under a
//! wall-clock budget and reported on one line.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

pub type Check = Result<String, String>;

pub struct Criterion {
    pub number: u32,
    pub name: &'static str,
    pub check: fn() -> Check,
    pub budget: Duration,
}

/// Outcome of one criterion after applying its time budget.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub passed: bool,
    pub line: String,
}

pub fn close(label: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{label}: got {got:.6}, want {want} +- {tol}"))
    }
}

/// Proptest runner with a fixed ChaCha seed, so sampled inputs are
/// identical on every run.
pub fn deterministic_runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(Config::with_cases(cases), TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

pub fn sample<S: Strategy>(runner: &mut TestRunner, strategy: &S) -> S::Value {
    strategy.new_tree(runner).expect("strategy does not reject").current()
}

pub fn judge(criterion: &Criterion, result: Check, elapsed: Duration) -> Verdict {
    let Criterion { number, name, budget, .. } = criterion;
    let result = match result {
        Ok(detail) if elapsed > *budget => Err(format!("{detail}; took {elapsed:.2?}, budget {budget:?}")),
        other => other,
    };
    match result {
        Ok(detail) => Verdict {
            passed: true,
            line: format!("PASS criterion {number} ({name}) [{elapsed:.2?}]: {detail}"),
        },
        Err(why) => Verdict {
            passed: false,
            line: format!("FAIL criterion {number} ({name}) [{elapsed:.2?}]: {why}"),
        },
    }
}

/// Runs every criterion in order, prints its line and a summary, and
/// returns failure if any criterion failed.
pub fn run_all(criteria: &[Criterion]) -> ExitCode {
    let mut failed = 0;
    for c in criteria {
        let start = Instant::now();
        let result = (c.check)();
        let verdict = judge(c, result, start.elapsed());
        failed += usize::from(!verdict.passed);
        println!("{}", verdict.line);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok() -> Check {
        Ok("fine".into())
    }

    #[test]
    fn over_budget_fails() {
        let c = Criterion {
            number: 1,
            name: "x",
            check: ok,
            budget: Duration::from_millis(10),
        };
        assert!(judge(&c, ok(), Duration::from_millis(5)).passed);
        let late = judge(&c, ok(), Duration::from_millis(50));
        assert!(!late.passed);
        assert!(late.line.starts_with("FAIL criterion 1 (x)"));
        assert!(!judge(&c, Err("no".into()), Duration::ZERO).passed);
    }

    #[test]
    fn close_reports_the_gap() {
        assert!(close("a", 1.0, 1.05, 0.1).is_ok());
        assert!(close("a", 1.0, 1.2, 0.1).unwrap_err().contains("want 1.2"));
    }

    #[test]
    fn runner_is_reproducible() {
        let draw = || sample(&mut deterministic_runner(1), &(0.0..1.0f64));
        assert_eq!(draw(), draw());
    }
}
