//! Dyadic Whitney-type decomposition of the reference plane relative to `D`.

use nalgebra::DVector;
use serde::Serialize;

use super::{big_d_from, Label, StoppingState};
use crate::measure::KdTree;

/// Half-width of the root cube `[-16, 16]^n`.
pub const ROOT_HALF_WIDTH: f64 = 16.0;
/// Admissibility: `diam(Q) <= inf_Q D / ADMISSIBLE_RATIO`.
pub const ADMISSIBLE_RATIO: f64 = 20.0;

/// Region of the reference plane that gets decomposed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum WhitneyDomain {
    /// Cubes meeting `B(π(x), t_min / 2)` for some atom `x` outside `Z`.
    #[default]
    Support,
    /// Cubes meeting the ball of radius 12 about the origin.
    Ball12,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct WhitneyOptions {
    pub domain: WhitneyDomain,
}

/// A closed dyadic cube in reference-plane coordinates.
#[derive(Clone, Debug, Serialize)]
pub struct WhitneyCube {
    pub level: u32,
    pub lower: Vec<f64>,
    pub side: f64,
    /// Emitted because subdivision reached the resolution floor, not
    /// because it was admissible.
    pub floor_limited: bool,
}

impl WhitneyCube {
    fn root(n: usize) -> Self {
        Self { level: 0, lower: vec![-ROOT_HALF_WIDTH; n], side: 2.0 * ROOT_HALF_WIDTH, floor_limited: false }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn center(&self) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.lower.iter().map(|l| l + 0.5 * self.side))
    }

    pub fn diam(&self) -> f64 {
        self.side * (self.dim() as f64).sqrt()
    }

    /// Euclidean distance from `y` to the cube `factor · Q` (same center).
    pub fn dist_scaled(&self, y: &DVector<f64>, factor: f64) -> f64 {
        let half = 0.5 * factor * self.side;
        self.center()
            .iter()
            .zip(y.iter())
            .map(|(c, v)| ((v - c).abs() - half).max(0.0).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Sup-norm distance from the center, relative to the side length.
    pub fn relative_sup_dist(&self, y: &DVector<f64>) -> f64 {
        (y - self.center()).amax() / self.side
    }

    /// Whether `factor · Q` contains `y`.
    pub fn scaled_contains(&self, y: &DVector<f64>, factor: f64) -> bool {
        self.relative_sup_dist(y) <= 0.5 * factor
    }

    fn children(&self) -> impl Iterator<Item = WhitneyCube> + '_ {
        let n = self.dim();
        let side = 0.5 * self.side;
        (0..1usize << n).map(move |mask| WhitneyCube {
            level: self.level + 1,
            lower: (0..n).map(|k| self.lower[k] + if mask >> k & 1 == 1 { side } else { 0.0 }).collect(),
            side,
            floor_limited: false,
        })
    }
}

/// `inf_{y ∈ Q} D(y)`, exact for the cone-shaped `D`.
fn inf_d(entries: &[(DVector<f64>, f64)], q: &WhitneyCube) -> f64 {
    entries.iter().map(|(c, t)| q.dist_scaled(c, 1.0) + t).fold(f64::INFINITY, f64::min)
}

/// Maximal admissible dyadic subcubes of the root meeting the domain.
/// Subdivision stops at diameter `t_min / 20`; cubes reaching that floor
/// without becoming admissible are emitted with `floor_limited` set.
pub fn whitney_decompose(state: &StoppingState, opts: &WhitneyOptions) -> Vec<WhitneyCube> {
    let n = state.reference.dim();
    let entries = state.d_entries();
    let floor_diam = state.finest_scale() / ADMISSIBLE_RATIO;
    let centers: Vec<f64> = (0..state.measure.len())
        .filter(|&i| state.labels[i] != Label::Z)
        .flat_map(|i| state.plane_coords(state.measure.point(i)).iter().copied().collect::<Vec<_>>())
        .collect();
    let tree = KdTree::build(n, centers);
    let reach = 0.5 * state.finest_scale();
    let meets_domain = |q: &WhitneyCube| match opts.domain {
        WhitneyDomain::Ball12 => q.dist_scaled(&DVector::zeros(n), 1.0) <= 12.0,
        WhitneyDomain::Support => {
            let c = q.center();
            tree.ball(c.as_slice(), reach + 0.5 * q.diam()).into_iter().next().is_some()
        }
    };

    let mut out = Vec::new();
    let mut stack = vec![WhitneyCube::root(n)];
    while let Some(q) = stack.pop() {
        if !meets_domain(&q) {
            continue;
        }
        if q.diam() <= inf_d(&entries, &q) / ADMISSIBLE_RATIO {
            out.push(q);
        } else if 0.5 * q.diam() < floor_diam {
            out.push(WhitneyCube { floor_limited: true, ..q });
        } else {
            stack.extend(q.children());
        }
    }
    out.sort_by(|a, b| a.level.cmp(&b.level).then_with(|| a.lower.partial_cmp(&b.lower).expect("finite")));
    out
}

/// Counts of violated Whitney properties.
#[derive(Clone, Debug, Default, Serialize)]
pub struct WhitneyCheck {
    pub cubes: usize,
    pub floor_limited: usize,
    /// Sample points of `10 R_i` with `D` outside `[10, 50] · diam(R_i)`.
    pub size_violations: usize,
    /// Pairs with overlapping `10 R_i, 10 R_j` whose diameters differ by
    /// more than a factor 5.
    pub comparability_violations: usize,
    /// Cubes with more than `180^n` such neighbors.
    pub neighbor_violations: usize,
    pub max_neighbors: usize,
    pub sampled_points: usize,
}

impl WhitneyCheck {
    pub fn violations(&self) -> usize {
        self.size_violations + self.comparability_violations + self.neighbor_violations
    }
}

/// Checks the size, comparability and bounded-overlap properties. Cubes
/// emitted at the resolution floor are exempt from the size check.
pub fn verify_whitney(state: &StoppingState, cubes: &[WhitneyCube]) -> WhitneyCheck {
    let mut check = WhitneyCheck { cubes: cubes.len(), ..Default::default() };
    if cubes.is_empty() {
        return check;
    }
    let n = cubes[0].dim();
    let entries = state.d_entries();
    let per_axis: usize = if n <= 2 { 5 } else { 3 };
    let tol = 1e-12;
    for q in cubes {
        if q.floor_limited {
            check.floor_limited += 1;
            continue;
        }
        let c = q.center();
        let diam = q.diam();
        for k in 0..per_axis.pow(n as u32) {
            let mut y = c.clone();
            let mut rest = k;
            for a in 0..n {
                let j = rest % per_axis;
                rest /= per_axis;
                y[a] += 5.0 * q.side * (2.0 * j as f64 / (per_axis - 1) as f64 - 1.0);
            }
            let d = big_d_from(&entries, &y);
            check.sampled_points += 1;
            if !(d >= 10.0 * diam * (1.0 - tol) && d <= 50.0 * diam * (1.0 + tol)) {
                check.size_violations += 1;
            }
        }
    }

    let coords: Vec<f64> = cubes.iter().flat_map(|q| q.center().iter().copied().collect::<Vec<_>>()).collect();
    let tree = KdTree::build(n, coords);
    let max_side = cubes.iter().map(|q| q.side).fold(0.0, f64::max);
    let cap = 180f64.powi(n as i32);
    for (i, q) in cubes.iter().enumerate() {
        let c = q.center();
        let radius = 5.0 * (q.side + max_side) * (n as f64).sqrt();
        let mut neighbors = 0usize;
        for j in tree.ball(c.as_slice(), radius) {
            let r = &cubes[j];
            let sup = (r.center() - &c).amax();
            if sup <= 5.0 * (q.side + r.side) * (1.0 + tol) {
                neighbors += 1;
                if j > i && (q.side > 5.0 * r.side || r.side > 5.0 * q.side) {
                    check.comparability_violations += 1;
                }
            }
        }
        check.max_neighbors = check.max_neighbors.max(neighbors);
        if neighbors as f64 > cap {
            check.neighbor_violations += 1;
        }
    }
    check
}
