//! Stopping-time construction of a Lipschitz graph over a reference plane:
//! per-(point, scale) membership in the stopping set, the stopping height
//! `h`, the distance functions `d` and `D`, the partition of the support,
//! a Whitney decomposition of the reference plane, the blended graph map
//! `A`, γ-functions and coverage diagnostics.

mod coverage;
mod gamma;
mod graph;
mod whitney;

pub use coverage::{coverage_report, CoverageReport};
pub use gamma::{gamma, gamma_tilde, GammaOptions, GammaResult};
pub use graph::{build_graph, build_graph_from, measure_lipschitz, select_ball, BallSelection, CubePatch, GraphFunction};
pub use whitney::{verify_whitney, whitney_decompose, WhitneyCheck, WhitneyCube, WhitneyDomain, WhitneyOptions};

use std::sync::OnceLock;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::beta::{fit_plane_weighted, irls_plane_fit, IrlsOptions};
use crate::error::{Error, Result};
use crate::geometry::{angle, AffineSubspace, Point};
use crate::measure::{Ball, DiscreteMeasure};
use crate::simplex::dist;

/// Largest radius of the normalized support.
pub const SUPPORT_RADIUS: f64 = 4.9;
/// Upper end (exclusive) of the scale range.
pub const MAX_SCALE: f64 = 50.0;
/// Scales per octave of the construction grid.
pub const STEPS_PER_OCTAVE: u32 = 3;
/// Default number of grid levels below [`MAX_SCALE`].
pub const DEFAULT_LEVELS: usize = 24;
/// Enlargement of a selected ball used to define the set `G`.
pub const G_FACTOR: f64 = 12908.0;

/// Besicovitch covering constant used in the default density threshold:
/// exact values for `N = 1, 2`, the crude bound `5^N` otherwise.
pub fn besicovitch_constant(ambient: usize) -> f64 {
    match ambient {
        1 => 2.0,
        2 => 19.0,
        n => 5f64.powi(n as i32),
    }
}

/// `min{1e-10 / (600^n N0), 2 / 50^n}`.
pub fn default_lambda_delta(n: usize, ambient: usize) -> f64 {
    let n = n as i32;
    (1e-10 / (600f64.powi(n) * besicovitch_constant(ambient))).min(2.0 / 50f64.powi(n))
}

/// Parameters of the stopping-time construction.
#[derive(Clone, Debug, Serialize)]
pub struct StoppingParams {
    pub epsilon: f64,
    pub alpha: f64,
    pub k: f64,
    /// Density threshold; `None` selects [`default_lambda_delta`].
    pub lambda_delta: Option<f64>,
    pub levels: usize,
    /// Reference plane direction; `None` uses the least-squares plane of
    /// the normalized data.
    #[serde(skip)]
    pub reference: Option<AffineSubspace>,
    #[serde(skip)]
    pub irls: IrlsOptions,
}

impl StoppingParams {
    pub fn new(epsilon: f64, alpha: f64, k: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::BadParams(format!("epsilon must be nonnegative, got {epsilon}")));
        }
        if !(alpha > 0.0 && alpha <= 0.25) {
            return Err(Error::BadParams(format!("alpha must lie in (0, 1/4], got {alpha}")));
        }
        if !(k > 2.0 && k.is_finite()) {
            return Err(Error::BadParams(format!("k must exceed 2, got {k}")));
        }
        Ok(Self {
            epsilon,
            alpha,
            k,
            lambda_delta: None,
            levels: DEFAULT_LEVELS,
            reference: None,
            irls: IrlsOptions::default(),
        })
    }
}

/// Partition label of a support point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Label {
    /// Stopping height zero: the point is flat at every grid scale nearby.
    Z,
    /// A nearby ball at the stopping scale has too little mass.
    F1,
    /// A nearby ball at the stopping scale is not flat.
    F2,
    /// A nearby ball at the stopping scale is flat only along tilted planes.
    F3,
    /// No window on the discrete grid matched any clause.
    Unresolved,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Z => "Z",
            Label::F1 => "F1",
            Label::F2 => "F2",
            Label::F3 => "F3",
            Label::Unresolved => "unresolved",
        }
    }
}

/// A plane tested at one (point, scale) pair.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub plane: AffineSubspace,
    pub beta: f64,
    pub angle: f64,
}

/// Measurements at one (point, scale) pair.
#[derive(Clone, Debug)]
pub struct ScaleCell {
    pub delta: f64,
    /// Smallest β₁ over the candidate planes.
    pub beta: f64,
    /// Candidates in preference order: the fitted plane, then the
    /// reference plane.
    pub candidates: Vec<Candidate>,
    /// Index into `candidates` of the witness plane, when one exists.
    pub witness: Option<usize>,
    pub member: bool,
}

/// The affine change of coordinates applied before the construction:
/// `normalized = (x - shift) * scale`, masses multiplied by `mass_scale`.
#[derive(Clone, Debug, Serialize)]
pub struct Normalization {
    pub shift: Vec<f64>,
    pub scale: f64,
    pub mass_scale: f64,
}

/// Result of the stopping-time pass.
#[derive(Clone, Debug)]
pub struct StoppingState {
    pub epsilon: f64,
    pub alpha: f64,
    pub k: f64,
    pub lambda_delta: f64,
    /// The normalized measure the construction works on.
    pub measure: DiscreteMeasure,
    pub normalization: Normalization,
    /// Reference plane through the origin.
    pub reference: AffineSubspace,
    /// Grid scales, descending.
    pub scales: Vec<f64>,
    /// `cells[i][e]` describes atom `i` at scale `scales[e]`.
    pub cells: Vec<Vec<ScaleCell>>,
    pub h: Vec<f64>,
    pub d: Vec<f64>,
    pub labels: Vec<Label>,
}

impl StoppingState {
    /// Whether `(x_i, scales[e])` belongs to the stopping set `S`.
    pub fn in_s(&self, i: usize, e: usize) -> bool {
        // `h` is four times a grid scale, which is itself a grid scale up to
        // rounding.
        self.cells[i][e].member && self.scales[e] >= self.h[i] * (1.0 - 1e-12)
    }

    /// Smallest grid scale of `S` at atom `i`.
    pub fn min_s_scale(&self, i: usize) -> Option<usize> {
        (0..self.scales.len()).rev().find(|&e| self.in_s(i, e))
    }

    /// Finest grid scale.
    pub fn finest_scale(&self) -> f64 {
        *self.scales.last().expect("grid is nonempty")
    }

    /// Coordinates of the projection onto the reference plane.
    pub fn plane_coords(&self, x: &Point) -> DVector<f64> {
        self.reference.coordinates(x)
    }

    /// Pairs `(π(X), t)` realizing `D`: `t = 0` for atoms of `Z`, otherwise
    /// the smallest scale of `S` at the atom.
    pub fn d_entries(&self) -> Vec<(DVector<f64>, f64)> {
        (0..self.measure.len())
            .filter_map(|i| {
                let t = if self.labels[i] == Label::Z {
                    0.0
                } else {
                    self.scales[self.min_s_scale(i)?]
                };
                Some((self.plane_coords(self.measure.point(i)), t))
            })
            .collect()
    }

    /// `D(y) = inf (d(π(X), y) + t)` for `y` given in plane coordinates.
    pub fn big_d(&self, y: &DVector<f64>) -> f64 {
        big_d_from(&self.d_entries(), y)
    }

    pub fn label_of(&self, i: usize) -> Label {
        self.labels[i]
    }

    /// Mass of each label, in the normalized measure.
    pub fn label_masses(&self) -> Vec<(Label, f64)> {
        [Label::Z, Label::F1, Label::F2, Label::F3, Label::Unresolved]
            .into_iter()
            .map(|l| {
                let m = (0..self.measure.len())
                    .filter(|&i| self.labels[i] == l)
                    .map(|i| self.measure.weight(i))
                    .fold(0.0, |a, b| a + b);
                (l, m)
            })
            .collect()
    }
}

pub(crate) fn big_d_from(entries: &[(DVector<f64>, f64)], y: &DVector<f64>) -> f64 {
    entries
        .iter()
        .map(|(c, t)| (c - y).norm() + t)
        .fold(f64::INFINITY, f64::min)
}

/// Translates to the weighted centroid and shrinks into `B(0, 4.9)` when
/// needed; raises the total mass to 1 if it is smaller.
fn normalize(mu: &DiscreteMeasure) -> Result<(DiscreteMeasure, Normalization)> {
    let shift = mu.centroid();
    let radius = mu.points().iter().map(|p| (p - &shift).norm()).fold(0.0, f64::max);
    let scale = if radius > SUPPORT_RADIUS { SUPPORT_RADIUS / radius } else { 1.0 };
    let total = mu.total_mass();
    let mass_scale = if total < 1.0 { 1.0 / total } else { 1.0 };
    let points = mu.points().iter().map(|p| (p - &shift) * scale).collect();
    let weights = mu.weights().iter().map(|w| w * mass_scale).collect();
    let normalized = DiscreteMeasure::new(points, weights, mu.intrinsic_dim())?;
    Ok((normalized, Normalization { shift: shift.iter().copied().collect(), scale, mass_scale }))
}

/// Construction grid `50 · 2^{-e/3}`, `e = 1..=levels`, cut below `floor`.
pub fn construction_scales(levels: usize, floor: f64) -> Vec<f64> {
    (1..=levels)
        .map(|e| MAX_SCALE * 2f64.powf(-(e as f64) / STEPS_PER_OCTAVE as f64))
        .filter(|&t| t >= floor)
        .collect()
}

struct CellContext<'a> {
    mu: &'a DiscreteMeasure,
    reference: &'a AffineSubspace,
    params: &'a StoppingParams,
    lambda_delta: f64,
}

impl CellContext<'_> {
    fn fitted(&self, idx: &[usize], t: f64) -> (AffineSubspace, f64) {
        let pts: Vec<&Point> = idx.iter().map(|&i| self.mu.point(i)).collect();
        let w: Vec<f64> = idx.iter().map(|&i| self.mu.weight(i)).collect();
        let n = self.mu.intrinsic_dim();
        if self.params.irls.max_iters == 0 {
            let plane = fit_plane_weighted(&pts, &w, n);
            let sum = pts.iter().zip(&w).map(|(y, w)| w * plane.dist(y)).sum();
            return (plane, sum);
        }
        irls_plane_fit(&pts, &w, n, 1.0, self.params.irls.tol * t, self.params.irls.max_iters)
    }

    fn cell(&self, x: &Point, t: f64, shared: &OnceLock<(AffineSubspace, f64)>) -> ScaleCell {
        let mu = self.mu;
        let n = mu.intrinsic_dim();
        let delta = mu.delta(&Ball { center: x.clone(), radius: t }, None);
        let idx = mu.ball_indices(x, self.params.k * t);
        let norm = t.powi(n as i32 + 1);
        let (fit_plane, fit_sum) = if idx.len() == mu.len() {
            shared.get_or_init(|| self.fitted(&idx, t)).clone()
        } else {
            self.fitted(&idx, t)
        };
        let ref_sum: f64 = idx.iter().map(|&i| mu.weight(i) * self.reference.dist(mu.point(i))).sum();
        let candidates: Vec<Candidate> = [(fit_plane, fit_sum), (self.reference.clone(), ref_sum)]
            .into_iter()
            .map(|(plane, sum)| {
                let angle = angle(&plane, self.reference).expect("planes share dimensions");
                Candidate { plane, beta: sum / norm, angle }
            })
            .collect();
        let beta = candidates.iter().map(|c| c.beta).fold(f64::INFINITY, f64::min);
        let eps = self.params.epsilon;
        let witness = candidates.iter().position(|c| c.beta <= 2.0 * eps && c.angle <= self.params.alpha);
        let member = delta >= 0.5 * self.lambda_delta && beta < 2.0 * eps && witness.is_some();
        ScaleCell { delta, beta, candidates, witness, member }
    }
}

/// Runs the stopping-time pass on a normalized copy of `mu`.
pub fn build_stopping_state(mu: &DiscreteMeasure, params: &StoppingParams) -> Result<StoppingState> {
    if mu.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    let (measure, normalization) = normalize(mu)?;
    let n = measure.intrinsic_dim();
    let ambient = measure.ambient_dim();
    let reference = match &params.reference {
        Some(p) => {
            if p.dim() != n || p.ambient_dim() != ambient {
                return Err(Error::DimMismatch { expected: n, actual: p.dim() });
            }
            p.linear_part()
        }
        None => {
            let pts: Vec<&Point> = measure.points().iter().collect();
            fit_plane_weighted(&pts, measure.weights(), n).linear_part()
        }
    };
    let lambda_delta = params.lambda_delta.unwrap_or_else(|| default_lambda_delta(n, ambient));
    let floor = measure.resolution().map_or(0.0, |r| 4.0 * r);
    let scales = construction_scales(params.levels, floor);
    if scales.is_empty() {
        return Err(Error::BadParams(format!(
            "no construction scale lies above four times the resolution ({floor})"
        )));
    }

    let ctx = CellContext { mu: &measure, reference: &reference, params, lambda_delta };
    let shared: Vec<OnceLock<(AffineSubspace, f64)>> = scales.iter().map(|_| OnceLock::new()).collect();
    let cells: Vec<Vec<ScaleCell>> = measure
        .points()
        .par_iter()
        .map(|x| scales.iter().zip(&shared).map(|(&t, s)| ctx.cell(x, t, s)).collect())
        .collect();

    let h = stopping_heights(&measure, &scales, &cells);
    let mut state = StoppingState {
        epsilon: params.epsilon,
        alpha: params.alpha,
        k: params.k,
        lambda_delta,
        measure,
        normalization,
        reference,
        scales,
        cells,
        h,
        d: Vec::new(),
        labels: Vec::new(),
    };
    state.labels = (0..state.measure.len()).into_par_iter().map(|i| classify(&state, i)).collect();
    state.d = distance_to_stopping_set(&state);
    Ok(state)
}

/// `h(x)`: the supremum of scales `t < 50` admitting a non-member `(y, τ)`
/// with `t/4 <= τ <= t/3` and `d(x, y) < τ/3`. Each such grid pair
/// contributes the interval `[3τ, 4τ] ∩ (0, 50)`.
fn stopping_heights(mu: &DiscreteMeasure, scales: &[f64], cells: &[Vec<ScaleCell>]) -> Vec<f64> {
    let mut h = vec![0.0f64; mu.len()];
    for (e, &tau) in scales.iter().enumerate() {
        if 3.0 * tau >= MAX_SCALE {
            continue;
        }
        let reach = (4.0 * tau).min(MAX_SCALE);
        for (y, row) in cells.iter().enumerate() {
            if row[e].member {
                continue;
            }
            for x in mu.ball_indices(mu.point(y), tau / 3.0) {
                if dist(mu.point(x).as_slice(), mu.point(y).as_slice()) < tau / 3.0 {
                    h[x] = h[x].max(reach);
                }
            }
        }
    }
    h
}

/// Label by the first matching clause over windows `τ ∈ [h/5, h/2]`,
/// `d(x, y) <= τ/2`.
fn classify(state: &StoppingState, i: usize) -> Label {
    let h = state.h[i];
    if h == 0.0 {
        return Label::Z;
    }
    let mu = &state.measure;
    let x = mu.point(i);
    let windows: Vec<(usize, usize)> = state
        .scales
        .iter()
        .enumerate()
        .filter(|&(_, &tau)| tau >= h / 5.0 * (1.0 - 1e-12) && tau <= h / 2.0 * (1.0 + 1e-12))
        .flat_map(|(e, &tau)| mu.ball_indices(x, tau / 2.0).into_iter().map(move |y| (y, e)))
        .collect();
    let eps = state.epsilon;
    if windows.iter().any(|&(y, e)| state.cells[y][e].delta <= state.lambda_delta) {
        return Label::F1;
    }
    if windows.iter().any(|&(y, e)| state.cells[y][e].beta >= eps) {
        return Label::F2;
    }
    let tilted = |cell: &ScaleCell| {
        cell.candidates.iter().filter(|c| c.beta <= eps).all(|c| c.angle >= 0.75 * state.alpha)
    };
    if windows.iter().any(|&(y, e)| tilted(&state.cells[y][e])) {
        return Label::F3;
    }
    Label::Unresolved
}

/// `d(x) = inf_{(X,t) ∈ S} (d(X, x) + t)` at every atom, with atoms of `Z`
/// contributing `t = 0`.
fn distance_to_stopping_set(state: &StoppingState) -> Vec<f64> {
    let entries: Vec<(usize, f64)> = (0..state.measure.len())
        .filter_map(|i| {
            if state.labels[i] == Label::Z {
                Some((i, 0.0))
            } else {
                state.min_s_scale(i).map(|e| (i, state.scales[e]))
            }
        })
        .collect();
    let mu = &state.measure;
    (0..mu.len())
        .into_par_iter()
        .map(|x| {
            entries
                .iter()
                .map(|&(j, t)| dist(mu.point(j).as_slice(), mu.point(x).as_slice()) + t)
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}
