//! Independent reference oracles for testing: exact minimum-norm values over
//! planar convex bodies, a brute-force lattice search over the coefficient
//! simplex, and central finite differences.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, norm_sq, sub};
use crate::minnorm::{min_norm_point, Bundle};

pub const DEFAULT_DISK_FACETS: usize = 512;
const QP_TOLERANCE: f64 = 1e-14;

/// Compact convex set in the plane.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexBody {
    /// Convex hull of the given vertices.
    Polytope(Vec<[f64; 2]>),
    Disk { center: [f64; 2], radius: f64 },
}

impl ConvexBody {
    fn validate(&self) -> Result<()> {
        match self {
            ConvexBody::Polytope(v) if v.is_empty() => Err(Error::InvalidProblem("polytope without vertices".into())),
            ConvexBody::Disk { radius, .. } if radius.is_nan() || *radius <= 0.0 => {
                Err(Error::InvalidProblem(format!("disk radius must be positive, got {radius}")))
            }
            _ => Ok(()),
        }
    }

    /// Vertices of an inner (`scale = 1`) or outer (`scale = 1/cos(pi/N)`)
    /// regular polygon approximation.
    fn vertices(&self, facets: usize, scale: f64) -> Vec<Vec<f64>> {
        match self {
            ConvexBody::Polytope(v) => v.iter().map(|p| p.to_vec()).collect(),
            ConvexBody::Disk { center, radius } => (0..facets)
                .map(|k| {
                    let theta = 2.0 * PI * k as f64 / facets as f64;
                    let r = radius * scale;
                    vec![center[0] + r * theta.cos(), center[1] + r * theta.sin()]
                })
                .collect(),
        }
    }
}

/// Bracket `[outer, inner]` on the minimum norm over the hull of a union of
/// planar bodies. `inner` comes from inscribed polygons and is an upper
/// bound; `outer` from circumscribed polygons and is a lower bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HullMinNorm {
    pub inner: f64,
    pub outer: f64,
}

impl HullMinNorm {
    pub fn norm(&self) -> f64 {
        0.5 * (self.inner + self.outer)
    }

    pub fn norm_sq(&self) -> f64 {
        0.5 * (self.inner * self.inner + self.outer * self.outer)
    }

    pub fn width(&self) -> f64 {
        self.inner - self.outer
    }
}

pub fn exact_min_norm_over_hull(bodies: &[ConvexBody], disk_facets: usize) -> Result<HullMinNorm> {
    if bodies.is_empty() {
        return Err(Error::InvalidProblem("no convex bodies".into()));
    }
    if disk_facets < 64 {
        return Err(Error::InvalidConfig(format!("disk_facets must be at least 64, got {disk_facets}")));
    }
    for b in bodies {
        b.validate()?;
    }
    let solve = |scale: f64| -> Result<f64> {
        let members: Vec<Vec<f64>> = bodies.iter().flat_map(|b| b.vertices(disk_facets, scale)).collect();
        Ok(min_norm_point(&Bundle::new(members)?, QP_TOLERANCE)?.norm())
    };
    let inner = solve(1.0)?;
    let outer = solve(1.0 / (PI / disk_facets as f64).cos())?;
    Ok(HullMinNorm { inner, outer })
}

/// Doubles the facet count from [`DEFAULT_DISK_FACETS`] until the bracket is
/// narrower than `tolerance`.
pub fn min_norm_over_hull_within(bodies: &[ConvexBody], tolerance: f64) -> Result<HullMinNorm> {
    let mut facets = DEFAULT_DISK_FACETS;
    loop {
        let bracket = exact_min_norm_over_hull(bodies, facets)?;
        if bracket.width() <= tolerance {
            return Ok(bracket);
        }
        if facets >= 1 << 16 {
            return Err(Error::InvalidConfig(format!(
                "bracket width {} still above {tolerance} at {facets} facets",
                bracket.width()
            )));
        }
        facets *= 2;
    }
}

/// Goldstein epsilon-subdifferentials of both objectives of
/// `((x1-1)^2 + (x2-1)^2, x1^2 + |x2|)` at `x`. With `epsilon = 0` these
/// are the Clarke subdifferentials.
pub fn example_2_5_subdifferentials(x: [f64; 2], epsilon: f64) -> Vec<ConvexBody> {
    let [x1, x2] = x;
    let f1 = if epsilon > 0.0 {
        ConvexBody::Disk {
            center: [2.0 * x1 - 2.0, 2.0 * x2 - 2.0],
            radius: 2.0 * epsilon,
        }
    } else {
        ConvexBody::Polytope(vec![[2.0 * x1 - 2.0, 2.0 * x2 - 2.0]])
    };
    // Gradients of x1^2 + |x2| are (2 y1, sign y2); over the ball the reachable
    // y1 range shrinks with the distance of the slice y2 = const from x2.
    let half_width = |y2: f64| (epsilon * epsilon - (y2 - x2).powi(2)).max(0.0).sqrt();
    let mut vertices = Vec::new();
    let mut add = |w: f64, s: f64| {
        vertices.push([2.0 * (x1 - w), s]);
        vertices.push([2.0 * (x1 + w), s]);
    };
    if x2 + epsilon > 0.0 {
        add(if x2 >= 0.0 { epsilon } else { half_width(0.0) }, 1.0);
    }
    if x2 - epsilon < 0.0 {
        add(if x2 <= 0.0 { epsilon } else { half_width(0.0) }, -1.0);
    }
    if x2.abs() <= epsilon {
        let w = half_width(0.0);
        add(w, 1.0);
        add(w, -1.0);
    }
    vec![f1, ConvexBody::Polytope(vertices)]
}

/// Smallest `||sum lambda_i xi_i||` over the simplex lattice with spacing
/// `pitch`. The last two coefficients are optimized exactly along their
/// edge, so the result is the norm of a feasible point and never below the
/// true minimum. Cost grows like `pitch^-(m-2)`.
pub fn simplex_grid_min_norm(bundle: &Bundle, pitch: f64) -> f64 {
    assert!(pitch > 0.0 && pitch <= 1.0, "pitch must lie in (0, 1]");
    let members = bundle.members();
    let m = members.len();
    if m == 1 {
        return norm(&members[0]);
    }
    let n = bundle.dim();
    let steps = (1.0 / pitch).ceil() as usize;
    let (a, b) = (&members[m - 2], &members[m - 1]);
    let ab = sub(a, b);
    let ab_sq = norm_sq(&ab);
    let mut best = f64::INFINITY;
    let mut counts = vec![0usize; m - 2];
    let mut used = 0usize;
    let mut partial = vec![0.0; n];
    let mut base = vec![0.0; n];
    loop {
        let s = 1.0 - used as f64 / steps as f64;
        // minimize ||p + s (b + mu (a - b))|| over mu in [0, 1]
        for ((q, p), bi) in base.iter_mut().zip(&partial).zip(b) {
            *q = p + s * bi;
        }
        let mu = if ab_sq > 0.0 && s > 0.0 {
            (-dot(&base, &ab) / (s * ab_sq)).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let value: f64 = base.iter().zip(&ab).map(|(q, d)| (q + s * mu * d).powi(2)).sum();
        best = best.min(value);

        // odometer over compositions of the first m - 2 coefficients
        let mut axis = 0;
        loop {
            if axis == m - 2 {
                return best.sqrt();
            }
            if used < steps {
                counts[axis] += 1;
                used += 1;
                break;
            }
            used -= counts[axis];
            counts[axis] = 0;
            axis += 1;
        }
        partial.iter_mut().for_each(|p| *p = 0.0);
        for (c, xi) in counts.iter().zip(members) {
            let w = *c as f64 / steps as f64;
            partial.iter_mut().zip(xi).for_each(|(p, v)| *p += w * v);
        }
    }
}

/// Central differences with the given step.
pub fn finite_difference_gradient<F>(f: F, x: &[f64], step: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + step;
            let up = f(&probe);
            probe[i] = x[i] - step;
            let down = f(&probe);
            probe[i] = x[i];
            (up - down) / (2.0 * step)
        })
        .collect()
}
