//! Weighted point clouds standing in for compactly supported measures, with
//! closed-ball queries, density quotients and dataset generators.

mod generate;
mod index;
mod io;

pub use generate::{
    add_noise, cantor_product, four_corner_cantor, lipschitz_graph, lipschitz_graph_slope_bound,
    plane_patch, segment, sphere, GraphSpec,
};
pub use index::KdTree;
pub use io::{read_csv, read_csv_from, write_csv, write_csv_to};

use crate::error::{Error, Result};
use crate::geometry::Point;

/// A closed ball `{y : |y - center| <= radius}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    /// # Panics
    /// If `radius` is not a positive finite number.
    pub fn new(center: Point, radius: f64) -> Self {
        assert!(radius > 0.0 && radius.is_finite(), "ball radius must be positive, got {radius}");
        Self { center, radius }
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }
}

/// Finitely many weighted atoms in `R^N` with a declared intrinsic
/// dimension `n < N`.
#[derive(Clone, Debug)]
pub struct DiscreteMeasure {
    points: Vec<Point>,
    weights: Vec<f64>,
    intrinsic_dim: usize,
    index: KdTree,
}

impl DiscreteMeasure {
    pub fn new(points: Vec<Point>, weights: Vec<f64>, intrinsic_dim: usize) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::BadParams(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        let ambient = points.first().map_or(intrinsic_dim + 1, |p| p.len());
        if let Some(p) = points.iter().find(|p| p.len() != ambient) {
            return Err(Error::DimMismatch { expected: ambient, actual: p.len() });
        }
        if intrinsic_dim == 0 || intrinsic_dim >= ambient {
            return Err(Error::BadParams(format!(
                "intrinsic dimension {intrinsic_dim} must satisfy 1 <= n < N = {ambient}"
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::BadParams(format!("weights must be positive and finite, got {w}")));
        }
        if points.iter().any(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(Error::BadParams("coordinates must be finite".into()));
        }
        let coords: Vec<f64> = points.iter().flat_map(|p| p.iter().copied()).collect();
        let index = KdTree::build(ambient, coords);
        Ok(Self { points, weights, intrinsic_dim, index })
    }

    /// Equal weights summing to one.
    pub fn uniform(points: Vec<Point>, intrinsic_dim: usize) -> Result<Self> {
        let w = 1.0 / points.len().max(1) as f64;
        let weights = vec![w; points.len()];
        Self::new(points, weights, intrinsic_dim)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.points.first().map_or(self.intrinsic_dim + 1, |p| p.len())
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.intrinsic_dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Indices of atoms in the closed ball, ascending.
    pub fn ball_indices(&self, center: &Point, radius: f64) -> Vec<usize> {
        self.index.ball(center.as_slice(), radius)
    }

    /// `μ(B)`, summed in ascending index order.
    pub fn ball_mass(&self, b: &Ball) -> f64 {
        self.ball_indices(&b.center, b.radius).iter().map(|&i| self.weights[i]).sum()
    }

    /// `μ(B ∩ Υ) / r^n` with `Υ` given by an optional index predicate.
    pub fn delta(&self, b: &Ball, subset: Option<&dyn Fn(usize) -> bool>) -> f64 {
        let mass: f64 = self
            .ball_indices(&b.center, b.radius)
            .into_iter()
            .filter(|&i| subset.is_none_or(|f| f(i)))
            .map(|i| self.weights[i])
            .sum();
        mass / b.radius.powi(self.intrinsic_dim as i32)
    }

    /// `sup δ(B(y, r))` over `y ∈ B(center, k0·r)`, approximated from below
    /// by taking `y` among the center itself and the atoms in that ball.
    pub fn delta_tilde(&self, b: &Ball, k0: f64) -> f64 {
        let own = self.delta(b, None);
        self.ball_indices(&b.center, k0 * b.radius)
            .into_iter()
            .map(|i| self.delta(&Ball { center: self.points[i].clone(), radius: b.radius }, None))
            .fold(own, f64::max)
    }

    /// Smallest positive distance between two atoms; `None` when all atoms
    /// coincide.
    pub fn resolution(&self) -> Option<f64> {
        self.points
            .iter()
            .filter_map(|p| self.index.nearest_nonzero(p.as_slice()))
            .min_by(f64::total_cmp)
    }

    /// Diagonal of the bounding box, an upper bound for the support diameter.
    pub fn bounding_diameter(&self) -> f64 {
        let Some(first) = self.points.first() else { return 0.0 };
        let mut lo = first.clone();
        let mut hi = first.clone();
        for p in &self.points {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        (hi - lo).norm()
    }

    /// `max μ(B)/(diam B)^n` over balls centered at atoms with radii doubling
    /// from the resolution up to the support diameter. Infinite for a single
    /// location, where no positive minimum scale exists.
    pub fn upper_regularity_constant(&self) -> f64 {
        let Some(res) = self.resolution() else {
            return if self.is_empty() { 0.0 } else { f64::INFINITY };
        };
        let diam = self.bounding_diameter();
        let mut radii = vec![res];
        while *radii.last().unwrap() < diam {
            let next = radii.last().unwrap() * 2.0;
            radii.push(next);
        }
        let n = self.intrinsic_dim as i32;
        let mut best: f64 = 0.0;
        for p in &self.points {
            for &r in &radii {
                let b = Ball { center: p.clone(), radius: r };
                best = best.max(self.ball_mass(&b) / (2.0 * r).powi(n));
            }
        }
        best
    }

    /// Weighted centroid.
    pub fn centroid(&self) -> Point {
        let mut c = Point::zeros(self.ambient_dim());
        for (p, w) in self.points.iter().zip(&self.weights) {
            c.axpy(*w, p, 1.0);
        }
        c / self.total_mass()
    }

    /// Image under `x ↦ s·x` with masses multiplied by `mass_factor`.
    pub fn scaled(&self, s: f64, mass_factor: f64) -> Result<Self> {
        Self::new(
            self.points.iter().map(|p| p * s).collect(),
            self.weights.iter().map(|w| w * mass_factor).collect(),
            self.intrinsic_dim,
        )
    }

    /// Image under `x ↦ s·x` with masses multiplied by `s^n`, which leaves
    /// every density quotient unchanged.
    pub fn dilated(&self, s: f64) -> Result<Self> {
        self.scaled(s, s.powi(self.intrinsic_dim as i32))
    }

    pub fn translated(&self, b: &Point) -> Result<Self> {
        Self::new(self.points.iter().map(|p| p + b).collect(), self.weights.clone(), self.intrinsic_dim)
    }

    /// The sub-measure on the given atoms.
    pub fn restricted(&self, indices: &[usize]) -> Result<Self> {
        Self::new(
            indices.iter().map(|&i| self.points[i].clone()).collect(),
            indices.iter().map(|&i| self.weights[i]).collect(),
            self.intrinsic_dim,
        )
    }

    /// The same atoms with a different declared intrinsic dimension.
    pub fn with_intrinsic_dim(&self, n: usize) -> Result<Self> {
        Self::new(self.points.clone(), self.weights.clone(), n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn p(v: &[f64]) -> Point {
        Point::from_column_slice(v)
    }

    #[test]
    fn closed_ball_mass_and_delta() {
        let pts = vec![p(&[0.0, 0.0]), p(&[2.0, 0.0]), p(&[0.5, 0.5]), p(&[-1.0, 0.0]), p(&[0.0, 1.9]), p(&[9.0, 9.0])];
        let mu = DiscreteMeasure::new(pts, vec![1.0; 6], 1).unwrap();
        let b = Ball::new(p(&[0.0, 0.0]), 2.0);
        assert_eq!(mu.ball_mass(&b), 5.0);
        assert_eq!(mu.delta(&b, None), 2.5);
        assert_eq!(mu.delta(&b, Some(&|_| false)), 0.0);
        let odd = |i: usize| i % 2 == 1;
        assert!(mu.delta(&b, Some(&odd)) <= mu.delta(&b, None));
        assert_eq!(mu.ball_mass(&Ball::new(p(&[50.0, 0.0]), 1.0)), 0.0);
    }

    #[test]
    fn delta_tilde_dominates_delta() {
        let mu = DiscreteMeasure::new(vec![p(&[0.0, 0.0])], vec![0.3], 1).unwrap();
        let b = Ball::new(p(&[0.0, 0.0]), 0.5);
        assert!(mu.delta_tilde(&b, 1.0) >= 0.3 / 0.5);

        // A cluster offset from the query center.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let pts: Vec<Point> = (0..200)
            .map(|_| p(&[1.5 + rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3)]))
            .collect();
        let mu = DiscreteMeasure::uniform(pts, 1).unwrap();
        let b = Ball::new(p(&[0.0, 0.0]), 0.4);
        let approx = mu.delta_tilde(&b, 4.0);
        assert!(approx >= mu.delta(&b, None));
        let mut dense: f64 = 0.0;
        for i in 0..=160 {
            for j in 0..=160 {
                let c = p(&[-1.6 + 0.02 * i as f64, -1.6 + 0.02 * j as f64]);
                if c.norm() <= 1.6 {
                    dense = dense.max(mu.delta(&Ball::new(c, 0.4), None));
                }
            }
        }
        assert!(approx >= 0.95 * dense, "{approx} vs {dense}");
    }

    #[test]
    fn regularity_constant_of_uniform_segment() {
        let mu = segment(200, 2).unwrap();
        let c0 = mu.upper_regularity_constant();
        // The continuum density gives sup μ(B)/diam(B) = 1 at interior points.
        assert!((0.5..=2.0).contains(&c0), "{c0}");
        let atom = DiscreteMeasure::new(vec![p(&[0.0, 0.0])], vec![1.0], 1).unwrap();
        assert!(atom.upper_regularity_constant().is_infinite());
        let a = plane_patch(2, 3, 10).unwrap().upper_regularity_constant();
        let b = plane_patch(2, 3, 30).unwrap().upper_regularity_constant();
        assert!(b < 2.0 * a && a < 2.0 * b);
    }

    proptest! {
        #[test]
        fn delta_is_invariant_under_dilation(seed in any::<u64>(), s in 0.1f64..10.0) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let pts: Vec<Point> = (0..50).map(|_| p(&[rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])).collect();
            let mu = DiscreteMeasure::uniform(pts, 2).unwrap();
            let scaled = mu.dilated(s).unwrap();
            let c = p(&[rng.random_range(-1.0..1.0), 0.0, 0.2]);
            let r = rng.random_range(0.1..1.5);
            let d1 = mu.delta(&Ball::new(c.clone(), r), None);
            let d2 = scaled.delta(&Ball::new(c * s, r * s), None);
            prop_assert!((d1 - d2).abs() <= 1e-12 * d1.max(1.0));
        }
    }
}
