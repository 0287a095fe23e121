use approx::assert_abs_diff_eq;
use nsmop::validation::simplex_grid_min_norm;
use nsmop::{dominates, min_norm_point, nondominated_mask, Bundle};
use proptest::collection::vec;
use proptest::prelude::*;

fn bundle_strategy(max_m: usize, max_n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..=max_n, 1..=max_m).prop_flat_map(|(n, m)| vec(vec(-5.0..5.0f64, n), m))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn solution_is_a_convex_combination(members in bundle_strategy(8, 5)) {
        let sol = min_norm_point(&Bundle::new(members.clone()).unwrap(), 1e-12).unwrap();
        let sum: f64 = sol.coefficients.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-9);
        prop_assert!(sol.coefficients.iter().all(|&l| l >= 0.0));
        for k in 0..sol.v.len() {
            let combo: f64 = members.iter().zip(&sol.coefficients).map(|(xi, l)| l * xi[k]).sum();
            prop_assert!((combo + sol.v[k]).abs() < 1e-8, "component {k}: {combo} vs {}", -sol.v[k]);
        }
    }

    #[test]
    fn every_member_lies_beyond_the_supporting_half_space(members in bundle_strategy(8, 5)) {
        // w = -v minimizes ||w|| over conv W iff <w, xi> >= ||w||^2 for all xi
        let sol = min_norm_point(&Bundle::new(members.clone()).unwrap(), 1e-12).unwrap();
        let w: Vec<f64> = sol.v.iter().map(|x| -x).collect();
        let scale = members.iter().map(|xi| dot(xi, xi)).fold(1.0, f64::max);
        for xi in &members {
            prop_assert!(dot(&w, xi) >= sol.norm_sq - 1e-9 * scale);
        }
    }

    #[test]
    fn duplicates_and_order_do_not_matter(members in bundle_strategy(6, 4), k in 0usize..6) {
        let base = min_norm_point(&Bundle::new(members.clone()).unwrap(), 1e-12).unwrap().norm();
        let mut more = members.clone();
        more.push(members[k % members.len()].clone());
        more.reverse();
        let other = min_norm_point(&Bundle::new(more).unwrap(), 1e-12).unwrap().norm();
        prop_assert!((base - other).abs() < 1e-8);
    }

    #[test]
    fn norm_scales_linearly(members in bundle_strategy(6, 4), alpha in 0.01..100.0f64) {
        let base = min_norm_point(&Bundle::new(members.clone()).unwrap(), 1e-12).unwrap().norm();
        let scaled: Vec<Vec<f64>> = members.iter().map(|xi| xi.iter().map(|x| alpha * x).collect()).collect();
        let other = min_norm_point(&Bundle::new(scaled).unwrap(), 1e-12).unwrap().norm();
        prop_assert!((alpha * base - other).abs() < 1e-7 * (1.0 + alpha * base));
    }

    #[test]
    fn matches_lattice_search(members in (1..=3usize, 2..=3usize).prop_flat_map(|(n, m)| vec(vec(-1.0..1.0f64, n), m))) {
        let bundle = Bundle::new(members).unwrap();
        let qp = min_norm_point(&bundle, 1e-12).unwrap().norm();
        let grid = simplex_grid_min_norm(&bundle, 1e-3);
        prop_assert!(grid >= qp - 1e-9);
        prop_assert!(grid - qp <= 1e-3);
    }

    #[test]
    fn dominance_is_a_strict_partial_order(
        a in vec(-2i32..2, 3), b in vec(-2i32..2, 3), c in vec(-2i32..2, 3),
    ) {
        let f = |v: &Vec<i32>| v.iter().map(|&x| x as f64).collect::<Vec<f64>>();
        let (a, b, c) = (f(&a), f(&b), f(&c));
        prop_assert!(!dominates(&a, &a).unwrap());
        if dominates(&a, &b).unwrap() {
            prop_assert!(!dominates(&b, &a).unwrap());
            if dominates(&b, &c).unwrap() {
                prop_assert!(dominates(&a, &c).unwrap());
            }
        }
    }

    #[test]
    fn nondominated_mask_agrees_with_pairwise_check(points in vec(vec(-3i32..3, 2), 1..40)) {
        let values: Vec<Vec<f64>> = points.iter().map(|p| p.iter().map(|&x| x as f64).collect()).collect();
        let mask = nondominated_mask(&values);
        for (i, vi) in values.iter().enumerate() {
            let dominated = values.iter().any(|vj| dominates(vj, vi).unwrap());
            prop_assert_eq!(mask[i], !dominated);
        }
    }
}

#[test]
fn origin_inside_hull_gives_zero() {
    let b = Bundle::new(vec![vec![1.0, 0.0], vec![-1.0, 1.0], vec![-1.0, -1.0]]).unwrap();
    let sol = min_norm_point(&b, 1e-12).unwrap();
    assert_eq!(sol.norm(), 0.0);
}

#[test]
fn segment_projection() {
    let b = Bundle::new(vec![vec![2.0, -1.0], vec![2.0, 1.0]]).unwrap();
    let sol = min_norm_point(&b, 1e-12).unwrap();
    assert_abs_diff_eq!(sol.v[0], -2.0, epsilon = 1e-12);
    assert_abs_diff_eq!(sol.v[1], 0.0, epsilon = 1e-12);
}

#[test]
fn rejects_ragged_and_empty_bundles() {
    assert!(Bundle::new(vec![]).is_err());
    assert!(Bundle::new(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
    assert!(dominates(&[1.0], &[1.0, 2.0]).is_err());
}
