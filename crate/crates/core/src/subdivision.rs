//! Box subdivision for covering Pareto sets.
//!
//! The descent method run for `m` outer iterations is viewed as a map `g`.
//! Starting from a root box, each step halves every box along every axis and
//! keeps only the boxes hit by the image under `g` of sample points drawn
//! from all current boxes.

use std::collections::BTreeSet;

use log::warn;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{History, SolverConfig};
use crate::descent::solve;
use crate::error::{Error, Result};
use crate::problem::{nondominated_mask, BoundingBox, Problem};

/// Closed axis-aligned box given by center and half-widths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DyadicBox {
    pub center: Vec<f64>,
    pub radii: Vec<f64>,
    pub depth: u32,
}

impl DyadicBox {
    pub fn new(center: Vec<f64>, radii: Vec<f64>) -> Result<Self> {
        if center.len() != radii.len() {
            return Err(Error::Dimension {
                context: "box radii",
                expected: center.len(),
                got: radii.len(),
            });
        }
        if center.is_empty() {
            return Err(Error::InvalidProblem("box must have positive dimension".into()));
        }
        if center.iter().chain(&radii).any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput("box"));
        }
        if radii.iter().any(|r| *r <= 0.0) {
            return Err(Error::InvalidProblem(format!("box radii must be positive, got {radii:?}")));
        }
        Ok(Self { center, radii, depth: 0 })
    }

    pub fn from_bounds(bounds: &BoundingBox) -> Result<Self> {
        let center = bounds.lower.iter().zip(&bounds.upper).map(|(l, u)| 0.5 * (l + u)).collect();
        let radii = bounds.lower.iter().zip(&bounds.upper).map(|(l, u)| 0.5 * (u - l)).collect();
        Self::new(center, radii)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn lower(&self) -> Vec<f64> {
        self.center.iter().zip(&self.radii).map(|(c, r)| c - r).collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        self.center.iter().zip(&self.radii).map(|(c, r)| c + r).collect()
    }

    pub fn volume(&self) -> f64 {
        self.radii.iter().map(|r| 2.0 * r).product()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.center.iter().zip(&self.radii))
                .all(|(x, (c, r))| (x - c).abs() <= *r)
    }

    /// `per_axis^n` points at the centers of a uniform lattice of sub-cells.
    pub fn samples(&self, per_axis: usize) -> Vec<Vec<f64>> {
        let n = self.dim();
        let total = per_axis.pow(n as u32);
        (0..total)
            .map(|flat| {
                let mut rest = flat;
                let mut p = vec![0.0; n];
                for axis in (0..n).rev() {
                    let j = rest % per_axis;
                    rest /= per_axis;
                    let r = self.radii[axis];
                    p[axis] = self.center[axis] - r + (2 * j + 1) as f64 * r / per_axis as f64;
                }
                p
            })
            .collect()
    }
}

/// Equal-depth cells of the dyadic subdivision of a root box, identified by
/// their integer coordinates in the `2^depth`-per-axis lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxCollection {
    root: DyadicBox,
    depth: u32,
    cells: BTreeSet<Vec<u64>>,
}

impl BoxCollection {
    pub fn from_root(root: DyadicBox) -> Self {
        let n = root.dim();
        let mut cells = BTreeSet::new();
        cells.insert(vec![0; n]);
        Self {
            root: DyadicBox { depth: 0, ..root },
            depth: 0,
            cells,
        }
    }

    pub fn root(&self) -> &DyadicBox {
        &self.root
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    fn cell_radii(&self) -> Vec<f64> {
        let scale = 0.5f64.powi(self.depth as i32);
        self.root.radii.iter().map(|r| r * scale).collect()
    }

    fn cell_box(&self, index: &[u64], radii: &[f64]) -> DyadicBox {
        let center = self
            .root
            .center
            .iter()
            .zip(&self.root.radii)
            .zip(index.iter().zip(radii))
            .map(|((c, rr), (i, r))| c - rr + (2 * i + 1) as f64 * r)
            .collect();
        DyadicBox {
            center,
            radii: radii.to_vec(),
            depth: self.depth,
        }
    }

    /// Boxes in lexicographic order of their lattice coordinates.
    pub fn boxes(&self) -> Vec<DyadicBox> {
        let radii = self.cell_radii();
        self.cells.iter().map(|idx| self.cell_box(idx, &radii)).collect()
    }

    pub fn contains_point(&self, p: &[f64]) -> bool {
        !self.incident_cells(p).is_empty()
    }

    /// Lattice coordinates of every cell in the collection whose closed box
    /// contains `p`. A point on a shared face belongs to all incident cells.
    fn incident_cells(&self, p: &[f64]) -> Vec<Vec<u64>> {
        let n = self.root.dim();
        if p.len() != n || !self.root.contains(p) {
            return Vec::new();
        }
        let radii = self.cell_radii();
        let per_axis = 1u64 << self.depth;
        let mut candidates: Vec<Vec<u64>> = vec![Vec::with_capacity(n)];
        for axis in 0..n {
            let lower = self.root.center[axis] - self.root.radii[axis];
            let width = 2.0 * radii[axis];
            let guess = ((p[axis] - lower) / width).floor() as i64;
            let mut hits = Vec::with_capacity(2);
            for i in (guess - 1)..=(guess + 1) {
                if i < 0 || i as u64 >= per_axis {
                    continue;
                }
                let c = lower + (2 * i + 1) as f64 * radii[axis];
                if (p[axis] - c).abs() <= radii[axis] {
                    hits.push(i as u64);
                }
            }
            candidates = candidates
                .into_iter()
                .flat_map(|prefix| {
                    hits.iter().map(move |h| {
                        let mut next = prefix.clone();
                        next.push(*h);
                        next
                    })
                })
                .collect();
        }
        candidates.retain(|c| self.cells.contains(c));
        candidates
    }
}

/// Replace every box by its `2^n` dyadic children.
pub fn subdivide(collection: &BoxCollection) -> BoxCollection {
    let n = collection.root.dim();
    let mut cells = BTreeSet::new();
    for idx in &collection.cells {
        for corner in 0..(1u64 << n) {
            let child = idx
                .iter()
                .enumerate()
                .map(|(axis, i)| 2 * i + ((corner >> axis) & 1))
                .collect();
            cells.insert(child);
        }
    }
    BoxCollection {
        root: collection.root.clone(),
        depth: collection.depth + 1,
        cells,
    }
}

/// Result of one selection step.
#[derive(Debug, Clone)]
pub struct Selection {
    pub collection: BoxCollection,
    /// Images of all samples, in box order then sample order.
    pub images: Vec<Vec<f64>>,
    /// Images that fell outside the root box.
    pub escaped: usize,
}

/// Keep exactly the boxes that contain the image of at least one sample
/// taken from any box of the collection.
pub fn select<G>(collection: &BoxCollection, g: G, samples_per_axis: usize) -> Result<Selection>
where
    G: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    if samples_per_axis == 0 {
        return Err(Error::InvalidConfig("samples_per_axis must be positive".into()));
    }
    let samples: Vec<Vec<f64>> = collection
        .boxes()
        .iter()
        .flat_map(|b| b.samples(samples_per_axis))
        .collect();
    let images = samples.par_iter().map(|x| g(x)).collect::<Result<Vec<_>>>()?;

    let mut kept = BTreeSet::new();
    let mut escaped = 0;
    for p in &images {
        if !collection.root.contains(p) {
            escaped += 1;
            continue;
        }
        kept.extend(collection.incident_cells(p));
    }
    if escaped > 0 {
        warn!("{escaped} of {} sample images left the root box", images.len());
    }
    Ok(Selection {
        collection: BoxCollection {
            root: collection.root.clone(),
            depth: collection.depth,
            cells: kept,
        },
        images,
        escaped,
    })
}

/// `g(x)`: at most `m` outer iterations of the descent method from `x`.
pub struct DescentMap<'a> {
    problem: &'a Problem,
    config: SolverConfig,
}

impl<'a> DescentMap<'a> {
    pub fn new(problem: &'a Problem, config: &SolverConfig, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidConfig("inner iteration count m must be positive".into()));
        }
        let mut config = config.clone();
        config.max_outer_iterations = m;
        config.history = History::FinalOnly;
        config.epsilon_schedule = None;
        config.validate()?;
        Ok(Self { problem, config })
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(solve(self.problem, x, &self.config)?.final_iterate().to_vec())
    }
}

/// Output of [`pareto_cover`].
#[derive(Debug, Clone)]
pub struct ParetoCover {
    pub collection: BoxCollection,
    /// Images of the last selection step.
    pub images: Vec<Vec<f64>>,
    pub image_values: Vec<Vec<f64>>,
    /// Marks the mutually non-dominated subset of `image_values`.
    pub nondominated: Vec<bool>,
    pub escaped: usize,
}

/// Alternate [`subdivide`] and [`select`] `iterations` times from `root`,
/// using the `m`-step descent map.
pub fn pareto_cover(
    problem: &Problem,
    config: &SolverConfig,
    root: DyadicBox,
    iterations: usize,
    m: usize,
    samples_per_axis: usize,
) -> Result<ParetoCover> {
    if root.dim() != problem.dim() {
        return Err(Error::Dimension {
            context: "root box",
            expected: problem.dim(),
            got: root.dim(),
        });
    }
    let g = DescentMap::new(problem, config, m)?;
    let mut collection = BoxCollection::from_root(root);
    let mut images = Vec::new();
    let mut escaped = 0;
    for step in 0..iterations {
        let refined = subdivide(&collection);
        let selection = select(&refined, |x| g.apply(x), samples_per_axis)?;
        if selection.collection.is_empty() {
            return Err(Error::EmptyCover);
        }
        log::info!(
            "subdivision step {}: {} of {} boxes kept",
            step + 1,
            selection.collection.len(),
            refined.len()
        );
        collection = selection.collection;
        images = selection.images;
        escaped = selection.escaped;
    }
    let image_values = images.iter().map(|p| problem.evaluate(p)).collect::<Result<Vec<_>>>()?;
    let nondominated = nondominated_mask(&image_values);
    Ok(ParetoCover {
        collection,
        images,
        image_values,
        nondominated,
        escaped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_root() -> DyadicBox {
        DyadicBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap()
    }

    #[test]
    fn subdivide_produces_children() {
        let c = BoxCollection::from_root(unit_root());
        let s = subdivide(&c);
        assert_eq!(s.len(), 4);
        assert_eq!(s.depth(), 1);
        let total: f64 = s.boxes().iter().map(|b| b.volume()).sum();
        assert_eq!(total, unit_root().volume());
        for b in s.boxes() {
            assert_eq!(b.radii, vec![0.5, 0.5]);
            assert!(b.center.iter().all(|c| c.abs() == 0.5));
        }
    }

    #[test]
    fn asymmetric_root_radii() {
        let root = DyadicBox::from_bounds(&BoundingBox::cube(-3.1, 3.0, 2).unwrap()).unwrap();
        let s = subdivide(&BoxCollection::from_root(root));
        for b in s.boxes() {
            assert!((b.radii[0] - 1.525).abs() < 1e-15);
            assert!((b.radii[1] - 1.525).abs() < 1e-15);
        }
    }

    #[test]
    fn samples_are_cell_centered() {
        let b = unit_root();
        assert_eq!(b.samples(1), vec![vec![0.0, 0.0]]);
        let s = b.samples(2);
        assert_eq!(s, vec![vec![-0.5, -0.5], vec![-0.5, 0.5], vec![0.5, -0.5], vec![0.5, 0.5]]);
    }

    #[test]
    fn identity_keeps_everything() {
        let c = subdivide(&subdivide(&BoxCollection::from_root(unit_root())));
        let sel = select(&c, |x| Ok(x.to_vec()), 3).unwrap();
        assert_eq!(sel.collection, c);
        assert_eq!(sel.escaped, 0);
    }

    #[test]
    fn constant_map_keeps_incident_boxes() {
        let c = subdivide(&subdivide(&BoxCollection::from_root(unit_root())));
        // interior point of one cell
        let sel = select(&c, |_| Ok(vec![0.3, -0.6]), 2).unwrap();
        assert_eq!(sel.collection.len(), 1);
        assert!(sel.collection.boxes()[0].contains(&[0.3, -0.6]));
        // root center is a corner shared by four cells
        let sel = select(&c, |_| Ok(vec![0.0, 0.0]), 2).unwrap();
        assert_eq!(sel.collection.len(), 4);
    }

    #[test]
    fn escaping_images_are_counted() {
        let c = subdivide(&BoxCollection::from_root(unit_root()));
        let sel = select(&c, |x| Ok(vec![x[0] * 4.0, x[1]]), 1).unwrap();
        assert_eq!(sel.escaped, 4);
        assert!(sel.collection.is_empty());
    }

    #[test]
    fn zero_iterations_return_root() {
        let p = crate::problems::crescent_mifflin2();
        let cover = pareto_cover(&p, &SolverConfig::default(), unit_root(), 0, 15, 5).unwrap();
        assert_eq!(cover.collection, BoxCollection::from_root(unit_root()));
        assert!(cover.images.is_empty());
    }

    #[test]
    fn rejects_bad_boxes() {
        assert!(DyadicBox::new(vec![0.0], vec![0.0]).is_err());
        assert!(DyadicBox::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(DescentMap::new(&crate::problems::example_2_5(), &SolverConfig::default(), 0).is_err());
    }
}
