//! Deterministic dataset generators. Every generated measure has total mass 1.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use super::DiscreteMeasure;
use crate::error::{Error, Result};
use crate::geometry::Point;

fn check_ambient(n: usize, ambient: usize) -> Result<()> {
    if n == 0 || ambient <= n {
        return Err(Error::BadParams(format!("need 1 <= n < N, got n = {n}, N = {ambient}")));
    }
    Ok(())
}

/// `n_points` evenly spaced atoms on the unit segment along the first axis.
pub fn segment(n_points: usize, ambient: usize) -> Result<DiscreteMeasure> {
    check_ambient(1, ambient)?;
    if n_points == 0 {
        return Err(Error::BadParams("segment needs at least one point".into()));
    }
    let denom = (n_points.max(2) - 1) as f64;
    let pts = (0..n_points)
        .map(|i| {
            let mut p = Point::zeros(ambient);
            p[0] = i as f64 / denom;
            p
        })
        .collect();
    DiscreteMeasure::uniform(pts, 1)
}

/// A regular grid with `per_side` atoms per axis on the unit cube of the
/// first `n` coordinates.
pub fn plane_patch(n: usize, ambient: usize, per_side: usize) -> Result<DiscreteMeasure> {
    check_ambient(n, ambient)?;
    if per_side == 0 {
        return Err(Error::BadParams("plane patch needs at least one point per side".into()));
    }
    let total = per_side.checked_pow(n as u32).filter(|&t| t <= 10_000_000).ok_or_else(|| {
        Error::BadParams(format!("{per_side}^{n} grid points is too many"))
    })?;
    let denom = (per_side.max(2) - 1) as f64;
    let pts = (0..total)
        .map(|mut k| {
            let mut p = Point::zeros(ambient);
            for d in 0..n {
                p[d] = (k % per_side) as f64 / denom;
                k /= per_side;
            }
            p
        })
        .collect();
    DiscreteMeasure::uniform(pts, n)
}

/// A graph `u ↦ (u, g(u))` over `[-half_width, half_width]^n` with
/// `g(u) = Σ_j c_j sin((j+1)π s) / ((j+1)π)`, `s = (u_1 + … + u_n)/√n`,
/// placed in coordinate `n` of `R^ambient`.
#[derive(Clone, Debug)]
pub struct GraphSpec {
    pub coeffs: Vec<f64>,
    pub n: usize,
    pub ambient: usize,
    pub half_width: f64,
    pub n_points: usize,
}

impl GraphSpec {
    /// Height of the graph over the domain point with coordinates `u`.
    pub fn height(&self, u: &[f64]) -> f64 {
        let s = u.iter().sum::<f64>() / (self.n as f64).sqrt();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let f = (j + 1) as f64 * std::f64::consts::PI;
                c * (f * s).sin() / f
            })
            .sum()
    }
}

/// Upper bound `Σ|c_j|` for the Lipschitz constant of the graph function.
pub fn lipschitz_graph_slope_bound(coeffs: &[f64]) -> f64 {
    coeffs.iter().map(|c| c.abs()).sum()
}

/// Samples the domain uniformly and lifts onto the graph.
pub fn lipschitz_graph(spec: &GraphSpec, seed: u64) -> Result<DiscreteMeasure> {
    check_ambient(spec.n, spec.ambient)?;
    if spec.n_points == 0 || !(spec.half_width > 0.0) {
        return Err(Error::BadParams("graph needs points and a positive half width".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = (0..spec.n_points)
        .map(|_| {
            let u: Vec<f64> =
                (0..spec.n).map(|_| rng.random_range(-spec.half_width..=spec.half_width)).collect();
            let mut p = Point::zeros(spec.ambient);
            for (d, &c) in u.iter().enumerate() {
                p[d] = c;
            }
            p[spec.n] = spec.height(&u);
            p
        })
        .collect();
    DiscreteMeasure::uniform(pts, spec.n)
}

/// Uniform samples on the unit `n`-sphere in `R^{n+1}`.
pub fn sphere(n: usize, n_points: usize, seed: u64) -> Result<DiscreteMeasure> {
    if n == 0 || n_points == 0 {
        return Err(Error::BadParams("sphere needs n >= 1 and at least one point".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = (0..n_points)
        .map(|_| loop {
            let g = Point::from_fn(n + 1, |_, _| StandardNormal.sample(&mut rng));
            let norm = g.norm();
            if norm > 1e-12 {
                break g / norm;
            }
        })
        .collect();
    DiscreteMeasure::uniform(pts, n)
}

/// Centers of the `2^depth` intervals of the middle-half Cantor set in `[0, 1]`.
fn quarter_cantor(depth: u32) -> Vec<f64> {
    let count = 1usize << depth;
    let half_cell = 0.5 * 0.25f64.powi(depth as i32);
    (0..count)
        .map(|code| {
            (0..depth)
                .filter(|k| code >> (depth - 1 - k) & 1 == 1)
                .map(|k| 0.75 * 0.25f64.powi(k as i32))
                .sum::<f64>()
                + half_cell
        })
        .collect()
}

/// Centers of the `4^depth` squares of the four-corner Cantor construction
/// in the unit square, each with weight `4^-depth`.
pub fn four_corner_cantor(depth: u32) -> Result<DiscreteMeasure> {
    cantor_product(1, depth)
}

/// Product of `2n` copies of the middle-half Cantor set, an `n`-dimensional
/// purely unrectifiable set in `R^{2n}`, sampled at depth `depth`.
pub fn cantor_product(n: usize, depth: u32) -> Result<DiscreteMeasure> {
    let factors = 2 * n;
    let per_axis = 1usize << depth;
    let total = (per_axis as u128).checked_pow(factors as u32).filter(|&t| t <= 10_000_000);
    let Some(total) = total.filter(|_| n >= 1) else {
        return Err(Error::BadParams(format!("cantor product n = {n}, depth = {depth} is too large")));
    };
    let line = quarter_cantor(depth);
    let pts = (0..total as usize)
        .map(|mut k| {
            // The first axis varies slowest, so the order is lexicographic.
            let mut p = Point::zeros(factors);
            for d in (0..factors).rev() {
                p[d] = line[k % per_axis];
                k /= per_axis;
            }
            p
        })
        .collect();
    DiscreteMeasure::uniform(pts, n)
}

/// Adds independent `N(0, sigma²)` noise to every coordinate.
pub fn add_noise(mu: &DiscreteMeasure, sigma: f64, seed: u64) -> Result<DiscreteMeasure> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::BadParams(format!("noise level must be nonnegative, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(mu.clone());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::BadParams(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = mu
        .points()
        .iter()
        .map(|p| p.map(|c| c + normal.sample(&mut rng)))
        .collect();
    DiscreteMeasure::new(pts, mu.weights().to_vec(), mu.intrinsic_dim())
}
