"""Smoke test for the pynsmop extension module.

Build and install first:  pip install --no-build-isolation -e crates/python
Then run:                 python3 python/smoke_test.py
"""

import math

import pynsmop


def check(cond, msg):
    if not cond:
        raise AssertionError(msg)
    print("ok:", msg)


def main():
    sol = pynsmop.min_norm_point([[-0.12, -2.04], [1.88, -1.0]])
    check(abs(sol.norm**2 - 3.078480604534) < 1e-9, f"min-norm of the seed bundle ({sol.norm**2:.9f})")
    check(abs(sum(sol.coefficients) - 1.0) < 1e-12, "coefficients sum to one")

    check(pynsmop.dominates([0.0, 1.0], [1.0, 1.0]), "dominance")
    check(not pynsmop.dominates([1.0, 1.0], [1.0, 1.0]), "dominance is irreflexive")

    p = pynsmop.Problem.catalog("table1-1")
    run = pynsmop.solve(p, [2.0, -1.5])
    check(run.critical, f"suite problem 1 reaches a critical point after {run.steps} steps")
    check(run.outer_iterations == run.steps + 1, "outer passes include the certifying pass")
    sched = pynsmop.solve_eps_decreasing(p, [2.0, -1.5])
    check(sched.stage_epsilons == [0.1, 0.01, 0.001], "default radius schedule")

    d = pynsmop.compute_descent_direction(p, [2.0, -1.5], pynsmop.SolverConfig(epsilon=0.1))
    check(d.status == "acceptable" and d.norm > 0, f"descent direction with norm {d.norm:.4f}")

    # Example with a kink along x2 = 0, supplied as Python callables.
    f1 = (lambda x: (x[0] - 1) ** 2 + (x[1] - 1) ** 2, lambda x: [2 * (x[0] - 1), 2 * (x[1] - 1)])
    f2 = (
        lambda x: x[0] ** 2 + abs(x[1]),
        lambda x: [2 * x[0], math.copysign(1.0, x[1]) if x[1] != 0 else 0.0],
    )
    custom = pynsmop.Problem("custom", 2, [f1, f2])
    run = pynsmop.solve(custom, [-1.0, -1.0])
    check(run.critical, f"custom problem stops at {run.final_iterate}")
    counters = custom.counters()
    check(counters["value_evals"] > 0 and counters["subgrad_evals"] > 0, f"counters {counters}")

    def broken(x):
        raise ZeroDivisionError("boom")

    bad = pynsmop.Problem("bad", 2, [(broken, f1[1])])
    try:
        pynsmop.solve(bad, [0.0, 0.0])
    except ZeroDivisionError:
        check(True, "exceptions from objectives propagate")
    else:
        raise AssertionError("expected ZeroDivisionError")

    try:
        pynsmop.SolverConfig(armijo_c=1.5)
    except ValueError:
        check(True, "invalid configuration raises ValueError")

    cover = pynsmop.pareto_cover(
        pynsmop.Problem.catalog("crescent-mifflin2"), [-3.1, -3.1], [3.0, 3.0], iterations=4, m=10, samples_per_axis=3
    )
    front = [v for v, nd in zip(cover.image_values, cover.nondominated) if nd]
    check(len(cover.centers) > 0 and front, f"pareto cover with {len(cover.centers)} boxes")
    check(
        not any(pynsmop.dominates(a, b) for a in front for b in front),
        "flagged front is mutually non-dominated",
    )
    print("smoke test passed")


if __name__ == "__main__":
    main()
