//! Ball selection per Whitney cube and the blended graph map `A`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{whitney::WhitneyCube, Label, StoppingState};
use crate::error::{Error, Result};
use crate::geometry::{plane_as_graph, AffineMap, AffineSubspace, Point};
use crate::measure::KdTree;

/// Tolerance for matching a plane point against projections of `Z`.
pub const Z_MATCH_TOL: f64 = 1e-9;

/// The ball assigned to a Whitney cube.
#[derive(Clone, Debug, Serialize)]
pub struct BallSelection {
    /// Atom index of the ball center.
    pub atom: usize,
    pub radius: f64,
    /// Grid scale of the stopping-set pair realizing the selection.
    pub scale: f64,
    /// Grid scale whose witness plane is used.
    pub plane_scale: f64,
    #[serde(skip)]
    pub plane: AffineSubspace,
}

/// A cube with its selected ball and the plane written as a graph.
#[derive(Clone, Debug)]
pub struct CubePatch {
    pub cube: WhitneyCube,
    pub ball: BallSelection,
    pub map: AffineMap,
}

/// Picks the stopping-set pair `(X, t)` minimizing `d(π(X), x) + t` at the
/// cube center `x` and requires the minimum to be at most `2 D(x)`. The
/// radius is `max(t, diam(R)/2)`; the plane is the witness at the smallest
/// member scale not below the radius. Cubes emitted at the resolution
/// floor skip the `2 D(x)` requirement.
pub fn select_ball(state: &StoppingState, cube: &WhitneyCube, cube_index: usize) -> Result<BallSelection> {
    let x = cube.center();
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..state.measure.len() {
        let Some(e) = state.min_s_scale(i) else { continue };
        let cost = (state.plane_coords(state.measure.point(i)) - &x).norm() + state.scales[e];
        if best.is_none_or(|(c, _, _)| cost < c) {
            best = Some((cost, i, e));
        }
    }
    let (cost, atom, e) = best.ok_or(Error::NoGoodBall(cube_index))?;
    let d_at = state.big_d(&x);
    if !cube.floor_limited && cost > 2.0 * d_at * (1.0 + 1e-12) {
        return Err(Error::NoGoodBall(cube_index));
    }
    let t = state.scales[e];
    let radius = t.max(0.5 * cube.diam());
    if !cube.floor_limited {
        debug_assert!(radius <= 2.0 * d_at * (1.0 + 1e-9) || radius == 0.5 * cube.diam());
    }
    let row = &state.cells[atom];
    let members: Vec<usize> = (0..state.scales.len()).filter(|&f| row[f].member).collect();
    let plane_e = members
        .iter()
        .copied()
        .filter(|&f| state.scales[f] >= radius)
        .max()
        .or_else(|| members.first().copied())
        .ok_or(Error::NoGoodBall(cube_index))?;
    let cell = &row[plane_e];
    let plane = cell.candidates[cell.witness.expect("members carry a witness")].plane.clone();
    Ok(BallSelection { atom, radius, scale: t, plane_scale: state.scales[plane_e], plane })
}

/// The graph map `A` over the reference plane, valued in its orthogonal
/// complement.
#[derive(Clone, Debug)]
pub struct GraphFunction {
    reference: AffineSubspace,
    complement: DMatrix<f64>,
    z_tree: KdTree,
    z_values: Vec<DVector<f64>>,
    patches: Vec<CubePatch>,
    patch_tree: KdTree,
    max_side: f64,
}

/// Builds `A` from the stopping state and its Whitney cubes.
pub fn build_graph(state: &StoppingState, cubes: &[WhitneyCube]) -> Result<GraphFunction> {
    let patches = cubes
        .iter()
        .enumerate()
        .map(|(i, cube)| {
            let ball = select_ball(state, cube, i)?;
            let map = plane_as_graph(&ball.plane, &state.reference)?;
            Ok(CubePatch { cube: cube.clone(), ball, map })
        })
        .collect::<Result<Vec<_>>>()?;
    let z: Vec<Point> = (0..state.measure.len())
        .filter(|&i| state.labels[i] == Label::Z)
        .map(|i| state.measure.point(i).clone())
        .collect();
    build_graph_from(&state.reference, &z, patches)
}

/// Builds `A` from explicit parts: exact values on the projections of
/// `z_points` and blended patch maps elsewhere.
pub fn build_graph_from(reference: &AffineSubspace, z_points: &[Point], patches: Vec<CubePatch>) -> Result<GraphFunction> {
    let reference = reference.linear_part();
    let n = reference.dim();
    let complement = reference.complement_basis();
    let coords: Vec<DVector<f64>> = z_points.iter().map(|x| reference.coordinates(x)).collect();
    let z_values: Vec<DVector<f64>> = z_points.iter().map(|x| complement.tr_mul(x)).collect();
    let z_tree = KdTree::build(n, coords.iter().flat_map(|c| c.iter().copied().collect::<Vec<_>>()).collect());
    for (i, c) in coords.iter().enumerate() {
        for j in z_tree.ball(c.as_slice(), Z_MATCH_TOL) {
            if (&z_values[i] - &z_values[j]).norm() > Z_MATCH_TOL {
                return Err(Error::ProjectionNotInjective(c.iter().copied().collect()));
            }
        }
    }
    let patch_tree =
        KdTree::build(n, patches.iter().flat_map(|p| p.cube.center().iter().copied().collect::<Vec<_>>()).collect());
    let max_side = patches.iter().map(|p| p.cube.side).fold(0.0, f64::max);
    Ok(GraphFunction { reference, complement, z_tree, z_values, patches, patch_tree, max_side })
}

impl GraphFunction {
    pub fn reference(&self) -> &AffineSubspace {
        &self.reference
    }

    pub fn patches(&self) -> &[CubePatch] {
        &self.patches
    }

    /// Whether `a` matches the projection of a point of `Z`.
    pub fn on_z(&self, a: &DVector<f64>) -> bool {
        self.z_index(a).is_some()
    }

    fn z_index(&self, a: &DVector<f64>) -> Option<usize> {
        self.z_tree.ball(a.as_slice(), Z_MATCH_TOL).into_iter().next()
    }

    /// Indices of patches whose enlarged cube `3R_i` contains `a`.
    pub fn patches_containing(&self, a: &DVector<f64>) -> Vec<usize> {
        if self.patches.is_empty() {
            return Vec::new();
        }
        let radius = 1.5 * self.max_side * (a.len() as f64).sqrt();
        self.patch_tree
            .ball(a.as_slice(), radius)
            .into_iter()
            .filter(|&i| self.patches[i].cube.scaled_contains(a, 3.0))
            .collect()
    }

    /// Normalized bump weights `ψ_i(a) / Σ ψ_j(a)` with
    /// `ψ = (1 - s²)³`, `s` the sup-distance to the center over `1.5 side`.
    pub fn partition_weights(&self, a: &DVector<f64>) -> Vec<(usize, f64)> {
        let raw: Vec<(usize, f64)> = self
            .patches_containing(a)
            .into_iter()
            .map(|i| {
                let s = self.patches[i].cube.relative_sup_dist(a) / 1.5;
                (i, (1.0 - s * s).max(0.0).powi(3))
            })
            .filter(|&(_, w)| w > 0.0)
            .collect();
        let total: f64 = raw.iter().map(|(_, w)| w).sum();
        raw.into_iter().map(|(i, w)| (i, w / total)).collect()
    }

    /// `A(a)` in complement coordinates.
    pub fn value_coords(&self, a: &DVector<f64>) -> Result<DVector<f64>> {
        if let Some(i) = self.z_index(a) {
            return Ok(self.z_values[i].clone());
        }
        let weights = self.partition_weights(a);
        if weights.is_empty() {
            return Err(Error::OutOfDomain);
        }
        let mut out = DVector::zeros(self.complement.ncols());
        for (i, w) in weights {
            out += self.patches[i].map.eval_coords(a) * w;
        }
        Ok(out)
    }

    /// `A(a)` as an ambient vector orthogonal to the reference plane.
    pub fn eval(&self, a: &DVector<f64>) -> Result<Point> {
        Ok(&self.complement * self.value_coords(a)?)
    }

    /// The graph point over the projection of `x`.
    pub fn graph_point(&self, x: &Point) -> Result<Point> {
        let a = self.reference.coordinates(x);
        Ok(self.reference.at(&a) + self.eval(&a)?)
    }

    /// Distance from `x` to the graph point over its projection.
    pub fn vertical_distance(&self, x: &Point) -> Result<f64> {
        Ok((x - self.graph_point(x)?).norm())
    }
}

/// Largest difference quotient of `A` over random pairs drawn from
/// `samples` that are at least `min_gap` apart; points where `A` is
/// undefined are skipped.
pub fn measure_lipschitz(graph: &GraphFunction, samples: &[DVector<f64>], min_gap: f64, pairs: usize, seed: u64) -> f64 {
    let values: Vec<Option<DVector<f64>>> = samples.iter().map(|a| graph.value_coords(a).ok()).collect();
    let defined: Vec<usize> = (0..samples.len()).filter(|&i| values[i].is_some()).collect();
    if defined.len() < 2 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    for _ in 0..pairs {
        let i = defined[rng.random_range(0..defined.len())];
        let j = defined[rng.random_range(0..defined.len())];
        let gap = (&samples[i] - &samples[j]).norm();
        if gap <= 1e-12 || gap < min_gap {
            continue;
        }
        let rise = (values[i].as_ref().unwrap() - values[j].as_ref().unwrap()).norm();
        best = best.max(rise / gap);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> Point {
        DVector::from_column_slice(v)
    }

    #[test]
    fn stacked_z_points_are_rejected() {
        let reference = AffineSubspace::coordinate(2, 1);
        let err = build_graph_from(&reference, &[p(&[0.0, 0.0]), p(&[0.0, 1.0])], Vec::new()).unwrap_err();
        assert!(matches!(err, Error::ProjectionNotInjective(_)));
        assert!(build_graph_from(&reference, &[p(&[0.0, 0.5]), p(&[0.0, 0.5])], Vec::new()).is_ok());
    }

    #[test]
    fn exact_on_z_and_undefined_elsewhere() {
        let reference = AffineSubspace::coordinate(2, 1);
        let g = build_graph_from(&reference, &[p(&[1.0, 0.25]), p(&[2.0, -0.5])], Vec::new()).unwrap();
        let v = g.eval(&DVector::from_element(1, 2.0)).unwrap();
        assert_eq!(v, p(&[0.0, -0.5]));
        assert!(matches!(g.eval(&DVector::from_element(1, 1.5)), Err(Error::OutOfDomain)));
        assert_eq!(measure_lipschitz(&g, &[DVector::from_element(1, 1.0), DVector::from_element(1, 2.0)], 0.0, 50, 1), 0.75);
    }

    #[test]
    fn partition_of_unity_blends_patch_maps() {
        let reference = AffineSubspace::coordinate(2, 1);
        let mk = |lower: f64, slope: f64| {
            let plane = AffineSubspace::spanned_by(p(&[0.0, 0.0]), &[p(&[1.0, slope])]).unwrap();
            let map = plane_as_graph(&plane, &reference).unwrap();
            CubePatch {
                cube: WhitneyCube { level: 5, lower: vec![lower], side: 1.0, floor_limited: false },
                ball: BallSelection { atom: 0, radius: 1.0, scale: 1.0, plane_scale: 1.0, plane },
                map,
            }
        };
        let g = build_graph_from(&reference, &[], vec![mk(0.0, 0.1), mk(1.0, 0.2)]).unwrap();
        let a = DVector::from_element(1, 1.0);
        let w = g.partition_weights(&a);
        let total: f64 = w.iter().map(|(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-15);
        assert_eq!(w.len(), 2);
        let v = g.value_coords(&a).unwrap()[0];
        assert!((v - 0.15).abs() < 1e-12, "{v}");
        assert!(g.value_coords(&DVector::from_element(1, 3.5)).is_err());
    }
}
