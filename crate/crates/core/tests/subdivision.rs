use nsmop::config::SolverConfig;
use nsmop::subdivision::{pareto_cover, select, subdivide, BoxCollection, DyadicBox};
use nsmop::{ObjectiveOracle, Problem};
use proptest::collection::vec;
use proptest::prelude::*;

fn square(lo: f64, hi: f64) -> DyadicBox {
    let c = 0.5 * (lo + hi);
    let r = 0.5 * (hi - lo);
    DyadicBox::new(vec![c, c], vec![r, r]).unwrap()
}

fn refine(root: DyadicBox, depth: u32) -> BoxCollection {
    let mut c = BoxCollection::from_root(root);
    for _ in 0..depth {
        c = subdivide(&c);
    }
    c
}

/// Two strictly convex quadratics centred at (-1, 0) and (1, 0); the Pareto
/// set is the segment between the centres.
fn two_paraboloids() -> Problem {
    let bowl = |a: f64| {
        ObjectiveOracle::new(
            format!("(x1-{a})^2 + x2^2"),
            move |x: &[f64]| (x[0] - a).powi(2) + x[1] * x[1],
            move |x: &[f64]| vec![2.0 * (x[0] - a), 2.0 * x[1]],
        )
    };
    Problem::new("paraboloids", 2, vec![bowl(-1.0), bowl(1.0)]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn subdivision_preserves_volume_and_points(depth in 0u32..4, p in vec(-2.0..2.0f64, 2)) {
        let c = refine(square(-2.0, 2.0), depth);
        let s = subdivide(&c);
        prop_assert_eq!(s.len(), 4 * c.len());
        let volume: f64 = s.boxes().iter().map(|b| b.volume()).sum();
        prop_assert!((volume - 16.0).abs() < 1e-9);
        prop_assert!(s.contains_point(&p));
        let hits = s.boxes().iter().filter(|b| b.contains(&p)).count();
        prop_assert!((1..=4).contains(&hits));
    }

    #[test]
    fn selection_keeps_exactly_the_hit_boxes(depth in 1u32..4, shift in vec(-0.5..0.5f64, 2)) {
        let c = refine(square(-2.0, 2.0), depth);
        let g = |x: &[f64]| Ok(vec![0.5 * x[0] + shift[0], 0.5 * x[1] + shift[1]]);
        let sel = select(&c, g, 3).unwrap();
        for b in c.boxes() {
            let hit = sel.images.iter().any(|y| b.contains(y));
            let kept = sel.collection.boxes().contains(&b);
            prop_assert_eq!(hit, kept, "box {:?}", b.center);
        }
        prop_assert!(sel.images.iter().all(|y| sel.collection.contains_point(y)));
    }
}

#[test]
fn point_on_a_shared_corner_keeps_all_incident_boxes() {
    let c = refine(square(-1.0, 1.0), 1);
    let sel = select(&c, |_: &[f64]| Ok(vec![0.0, 0.0]), 1).unwrap();
    assert_eq!(sel.collection.len(), 4);
    let sel = select(&c, |_: &[f64]| Ok(vec![0.0, 0.5]), 1).unwrap();
    assert_eq!(sel.collection.len(), 2);
}

#[test]
fn escaped_images_are_counted_not_kept() {
    let c = refine(square(-1.0, 1.0), 1);
    let sel = select(&c, |x: &[f64]| Ok(vec![x[0] + 5.0, x[1]]), 1).unwrap();
    assert_eq!(sel.escaped, 4);
    assert!(sel.collection.is_empty());
}

#[test]
fn cover_of_convex_quadratics_hugs_the_segment() {
    let p = two_paraboloids();
    let config = SolverConfig::default();
    let coarse = pareto_cover(&p, &config, square(-2.0, 2.0), 2, 10, 3).unwrap();
    let fine = pareto_cover(&p, &config, square(-2.0, 2.0), 5, 10, 3).unwrap();
    let area = |c: &BoxCollection| c.boxes().iter().map(|b| b.volume()).sum::<f64>();
    assert!(area(&fine.collection) < area(&coarse.collection));
    for b in fine.collection.boxes() {
        // every kept box lies within a cell width of the segment [-1, 1] x {0}
        assert!(b.lower()[1] <= 0.25 && b.upper()[1] >= -0.25, "box {:?}", b.center);
        assert!(b.lower()[0] <= 1.25 && b.upper()[0] >= -1.25, "box {:?}", b.center);
    }
    for x in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        assert!(fine.collection.contains_point(&[x, 0.0]), "segment point ({x}, 0) not covered");
    }
    assert!(fine.nondominated.iter().any(|&m| m));
}

#[test]
fn zero_iterations_return_the_root() {
    let p = two_paraboloids();
    let cover = pareto_cover(&p, &SolverConfig::default(), square(-2.0, 2.0), 0, 10, 3).unwrap();
    assert_eq!(cover.collection.len(), 1);
    assert_eq!(cover.collection.depth(), 0);
}

#[test]
fn invalid_arguments() {
    let p = two_paraboloids();
    let cfg = SolverConfig::default();
    assert!(pareto_cover(&p, &cfg, square(-2.0, 2.0), 1, 0, 3).is_err());
    assert!(pareto_cover(&p, &cfg, square(-2.0, 2.0), 1, 10, 0).is_err());
    let cube = DyadicBox::new(vec![0.0; 3], vec![1.0; 3]).unwrap();
    assert!(pareto_cover(&p, &cfg, cube, 1, 10, 3).is_err());
    assert!(DyadicBox::new(vec![0.0], vec![0.0]).is_err());
}
