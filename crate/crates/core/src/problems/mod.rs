//! Catalog of bi-objective test problems with hand-derived subgradients.

mod functions;

pub use functions::TestFunction;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::{BoundingBox, NonsmoothSet, ObjectiveOracle, Problem};

/// Points per axis of the benchmark start grid.
pub const GRID_PER_AXIS: usize = 10;

/// Demo starting points for [`crescent_mifflin2`].
pub const CRESCENT_MIFFLIN2_STARTS: [[f64; 2]; 3] = [[0.0, -0.3], [0.6, 1.0], [-1.0, -0.2]];

fn sign(s: f64) -> f64 {
    if s > 0.0 {
        1.0
    } else if s < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn shifted_paraboloid() -> ObjectiveOracle {
    ObjectiveOracle::new(
        "(x1-1)^2 + (x2-1)^2",
        |x: &[f64]| (x[0] - 1.0).powi(2) + (x[1] - 1.0).powi(2),
        |x: &[f64]| vec![2.0 * (x[0] - 1.0), 2.0 * (x[1] - 1.0)],
    )
}

/// `f(x) = ((x1-1)^2 + (x2-1)^2, x1^2 + |x2|)`.
///
/// On `x2 = 0` the second oracle returns `(2 x1, 0)`, the midpoint of the
/// Clarke subdifferential `{2 x1} x [-1, 1]`.
pub fn example_2_5() -> Problem {
    let f2 = ObjectiveOracle::new(
        "x1^2 + |x2|",
        |x: &[f64]| x[0] * x[0] + x[1].abs(),
        |x: &[f64]| vec![2.0 * x[0], sign(x[1])],
    );
    Problem::new("example-2-5", 2, vec![shifted_paraboloid(), f2])
        .expect("static problem")
        .with_nonsmooth_set(NonsmoothSet::new("x2 = 0", |x: &[f64]| x[1].abs()))
}

/// Distance from `p` to the ray `{s d : s >= 0}` for unit `d`.
fn ray_distance(p: &[f64], d: [f64; 2]) -> f64 {
    let s = (p[0] * d[0] + p[1] * d[1]).max(0.0);
    ((p[0] - s * d[0]).powi(2) + (p[1] - s * d[1]).powi(2)).sqrt()
}

/// `f(x) = ((x1-1)^2 + (x2-1)^2, |x2 - a|x1|| + b x2)` for nonzero `a`, `b`.
///
/// Kinks lie on the axis `x1 = 0` and on the graph `x2 = a|x1|`; both `|.|`
/// selections use `sign(0) = 0`. Away from the kinks the gradient of the
/// second objective is `(-a s sign(x1), s + b)` with `s = sign(x2 - a|x1|)`.
pub fn example_3_8(a: f64, b: f64) -> Result<Problem> {
    if !(a.is_finite() && b.is_finite()) || a == 0.0 || b == 0.0 {
        return Err(Error::InvalidProblem(format!(
            "example-3-8 needs finite nonzero a and b, got a={a}, b={b}"
        )));
    }
    let f2 = ObjectiveOracle::new(
        format!("|x2 - {a}|x1|| + {b} x2"),
        move |x: &[f64]| (x[1] - a * x[0].abs()).abs() + b * x[1],
        move |x: &[f64]| {
            let s = sign(x[1] - a * x[0].abs());
            vec![-a * s * sign(x[0]), s + b]
        },
    );
    let norm = (1.0 + a * a).sqrt();
    let right = [1.0 / norm, a / norm];
    let left = [-1.0 / norm, a / norm];
    let kinks = NonsmoothSet::new("x1 = 0 or x2 = a|x1|", move |x: &[f64]| {
        x[0].abs().min(ray_distance(x, right)).min(ray_distance(x, left))
    });
    Ok(Problem::new("example-3-8", 2, vec![shifted_paraboloid(), f2])?.with_nonsmooth_set(kinks))
}

fn crescent_mifflin2_kinks() -> NonsmoothSet {
    NonsmoothSet::new("unit circles around (0,0) and (0,1)", |x: &[f64]| {
        let lower = ((x[0] * x[0] + x[1] * x[1]).sqrt() - 1.0).abs();
        let upper = ((x[0] * x[0] + (x[1] - 1.0).powi(2)).sqrt() - 1.0).abs();
        lower.min(upper)
    })
}

/// Crescent paired with Mifflin 2. The Pareto critical set is bounded by
/// the unit circles around the origin and around `(0, 1)`.
pub fn crescent_mifflin2() -> Problem {
    Problem::new(
        "crescent-mifflin2",
        2,
        vec![TestFunction::Crescent.oracle(), TestFunction::Mifflin2.oracle()],
    )
    .expect("static problem")
    .with_nonsmooth_set(crescent_mifflin2_kinks())
}

/// One row of the benchmark suite.
#[derive(Debug)]
pub struct CatalogEntry {
    pub number: usize,
    pub functions: [TestFunction; 2],
    pub problem: Problem,
    /// Source of the component formulas.
    pub tag: &'static str,
}

impl CatalogEntry {
    pub fn benchmark_box(&self) -> &BoundingBox {
        self.problem.benchmark_box().expect("suite entries carry a box")
    }

    /// Inclusive 10 x 10 grid of starting points, row-major.
    pub fn starts(&self) -> Vec<Vec<f64>> {
        self.benchmark_box().grid(GRID_PER_AXIS)
    }
}

const LITERATURE_TAG: &str = "Makela & Neittaanmaki (1992); Makela, Karmitsa & Wilppu (2016)";

fn suite_rows() -> [(TestFunction, TestFunction, [f64; 4]); 18] {
    use TestFunction::*;
    let wide = [-3.0, 3.0, -3.0, 3.0];
    [
        (Cb3, Dem, wide),
        (Cb3, Ql, wide),
        (Cb3, Lq, [0.5, 1.5, 0.5, 1.5]),
        (Cb3, Mifflin1, wide),
        (Cb3, Wolfe, wide),
        (Dem, Ql, wide),
        (Dem, Lq, wide),
        (Dem, Mifflin1, wide),
        (Dem, Wolfe, wide),
        (Ql, Lq, wide),
        (Ql, Mifflin1, wide),
        (Ql, Wolfe, wide),
        (Lq, Mifflin1, [0.5, 1.5, -0.5, 1.0]),
        (Lq, Wolfe, wide),
        (Mifflin1, Wolfe, wide),
        (Crescent, Mifflin2, [-0.5, 1.5, -0.5, 1.5]),
        (Mifflin2, Wf, wide),
        (Mifflin2, Spiral, wide),
    ]
}

/// The 18 benchmark problems, numbered from 1.
pub fn table1_suite() -> Vec<CatalogEntry> {
    suite_rows()
        .into_iter()
        .enumerate()
        .map(|(i, (f1, f2, b))| {
            let number = i + 1;
            let bounds = BoundingBox::new(vec![b[0], b[2]], vec![b[1], b[3]]).expect("static box");
            let mut problem = Problem::new(format!("{}, {}", f1.name(), f2.name()), 2, vec![f1.oracle(), f2.oracle()])
                .and_then(|p| p.with_benchmark_box(bounds))
                .expect("static problem");
            if number == 16 {
                problem = problem.with_nonsmooth_set(crescent_mifflin2_kinks());
            }
            CatalogEntry {
                number,
                functions: [f1, f2],
                problem,
                tag: LITERATURE_TAG,
            }
        })
        .collect()
}

pub fn suite_entry(number: usize) -> Result<CatalogEntry> {
    table1_suite()
        .into_iter()
        .find(|e| e.number == number)
        .ok_or_else(|| Error::UnknownProblem(format!("suite entry {number} (valid: 1..=18)")))
}

/// Resolve a problem by name.
///
/// Accepted selectors: `example-2-5`, `example-3-8` (a = 10, b = 0.5),
/// `crescent-mifflin2`, and suite entries as `1`..`18` or `table1-<n>`.
pub fn lookup(selector: &str) -> Result<Problem> {
    let key = selector.trim().to_ascii_lowercase();
    match key.as_str() {
        "example-2-5" => return Ok(example_2_5()),
        "example-3-8" => return example_3_8(10.0, 0.5),
        "crescent-mifflin2" => return Ok(crescent_mifflin2()),
        _ => {}
    }
    let number = key.strip_prefix("table1-").unwrap_or(&key);
    match number.parse::<usize>() {
        Ok(n) => suite_entry(n).map(|e| e.problem),
        Err(_) => Err(Error::UnknownProblem(selector.to_string())),
    }
}

/// Machine-readable description of one catalog problem.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogInfo {
    pub selector: String,
    pub name: String,
    pub k: usize,
    pub n: usize,
    #[serde(rename = "box")]
    pub bounds: Option<BoundingBox>,
}

pub fn catalog_listing() -> Vec<CatalogInfo> {
    let mut out: Vec<CatalogInfo> = ["example-2-5", "example-3-8", "crescent-mifflin2"]
        .iter()
        .map(|s| {
            let p = lookup(s).expect("static selector");
            CatalogInfo {
                selector: s.to_string(),
                name: p.name().to_string(),
                k: p.num_objectives(),
                n: p.dim(),
                bounds: p.benchmark_box().cloned(),
            }
        })
        .collect();
    out.extend(table1_suite().into_iter().map(|e| CatalogInfo {
        selector: format!("table1-{}", e.number),
        name: e.problem.name().to_string(),
        k: e.problem.num_objectives(),
        n: e.problem.dim(),
        bounds: e.problem.benchmark_box().cloned(),
    }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_2_5_values() {
        let p = example_2_5();
        assert_eq!(p.evaluate(&[0.0, 0.0]).unwrap(), vec![2.0, 0.0]);
        assert_eq!(p.subgradient(0, &[1.5, 0.0]).unwrap(), vec![1.0, -2.0]);
        assert_eq!(p.subgradient(1, &[1.5, 0.0]).unwrap(), vec![3.0, 0.0]);
    }

    #[test]
    fn example_3_8_regions() {
        let p = example_3_8(10.0, 0.5).unwrap();
        assert_eq!(p.subgradient(1, &[1e-4, 1e-4]).unwrap(), vec![10.0, -0.5]);
        assert_eq!(p.subgradient(1, &[0.038e-3, 0.596e-3]).unwrap(), vec![-10.0, 1.5]);
        assert_eq!(p.value(1, &[0.0, 0.0]).unwrap(), 0.0);
        assert!(example_3_8(0.0, 0.5).is_err());
        assert!(example_3_8(10.0, 0.0).is_err());
        let kinks = p.nonsmooth_set().unwrap();
        assert_eq!(kinks.distance(&[0.0, 5.0]), 0.0);
        assert!(kinks.distance(&[1.0, 10.0]) < 1e-12);
        assert!(kinks.distance(&[-1.0, 10.0]) < 1e-12);
    }

    #[test]
    fn crescent_mifflin2_at_origin() {
        let v = crescent_mifflin2().evaluate(&[0.0, 0.0]).unwrap();
        assert_eq!(v, vec![0.0, -0.25]);
    }

    #[test]
    fn suite_shape() {
        let suite = table1_suite();
        assert_eq!(suite.len(), 18);
        let e13 = &suite[12];
        assert_eq!(e13.benchmark_box().lower, vec![0.5, -0.5]);
        assert_eq!(e13.benchmark_box().upper, vec![1.5, 1.0]);
        let e16 = &suite[15];
        assert_eq!(e16.functions, [TestFunction::Crescent, TestFunction::Mifflin2]);
        let reference = crescent_mifflin2();
        for x in [[0.3, -0.2], [1.1, 0.9], [-0.4, 1.4]] {
            assert_eq!(e16.problem.evaluate(&x).unwrap(), reference.evaluate(&x).unwrap());
        }
        let starts = suite[0].starts();
        assert_eq!(starts.len(), 100);
        assert!(starts.contains(&vec![-3.0, -3.0]));
        assert!(starts.contains(&vec![3.0, 3.0]));
    }

    #[test]
    fn lookup_selectors() {
        assert_eq!(lookup("crescent-mifflin2").unwrap().name(), "crescent-mifflin2");
        assert_eq!(lookup("7").unwrap().name(), "DEM, LQ");
        assert_eq!(lookup("table1-18").unwrap().name(), "Mifflin 2, SPIRAL");
        assert!(lookup("19").is_err());
        assert!(lookup("rosenbrock").is_err());
        assert_eq!(catalog_listing().len(), 21);
    }
}
