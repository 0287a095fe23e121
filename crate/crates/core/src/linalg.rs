//! Dense helpers on `f64` slices. Dimensions here are tiny (n <= 3 in
//! practice), so plain loops beat pulling in a matrix crate.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

/// `x + t * v`
pub fn add_scaled(x: &[f64], t: f64, v: &[f64]) -> Vec<f64> {
    debug_assert_eq!(x.len(), v.len());
    x.iter().zip(v).map(|(xi, vi)| xi + t * vi).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|v| v.is_finite())
}

/// Solves `m * x = rhs` in place by Gaussian elimination with partial
/// pivoting. `m` is row-major `n x n`. Returns `None` when a pivot falls
/// below `rel_tol` times the largest diagonal magnitude.
pub fn solve_dense(m: &mut [f64], rhs: &mut [f64], rel_tol: f64) -> Option<()> {
    let n = rhs.len();
    debug_assert_eq!(m.len(), n * n);
    let scale = (0..n).map(|i| m[i * n + i].abs()).fold(0.0_f64, f64::max);
    let threshold = rel_tol * scale.max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&a, &b| m[a * n + col].abs().total_cmp(&m[b * n + col].abs()))
            .unwrap();
        if m[pivot_row * n + col].abs() <= threshold {
            return None;
        }
        if pivot_row != col {
            for k in 0..n {
                m.swap(col * n + k, pivot_row * n + k);
            }
            rhs.swap(col, pivot_row);
        }
        let pivot = m[col * n + col];
        for row in col + 1..n {
            let factor = m[row * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                m[row * n + k] -= factor * m[col * n + k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = rhs[col];
        for k in col + 1..n {
            acc -= m[col * n + k] * rhs[k];
        }
        rhs[col] = acc / m[col * n + col];
    }
    Some(())
}
