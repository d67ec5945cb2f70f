//! Experiment drivers that evaluate both sides of the curvature-controls-
//! flatness inequalities and emit JSON-ready reports.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::beta::{beta2, beta_p, multiscale_beta, IrlsOptions, MultiscaleParams, ScaleGrid};
use crate::curvature::{curvature_exact, curvature_local, curvature_mc, CurvatureEstimate, LocalRegion};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::integrands::{Integrand, IntegrandKind};
use crate::measure::{lipschitz_graph, Ball, DiscreteMeasure, GraphSpec};
use crate::simplex::{max_volume_simplex, SearchMode};

/// Default enlargement of the local curvature region.
pub const DEFAULT_K1: f64 = 8.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Evaluated,
    /// The density hypothesis failed; both sides are still reported.
    SkippedHypothesis,
}

/// Both sides of an inequality `lhs <= C · rhs` and the ratio they imply.
#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub experiment: String,
    pub config: Value,
    pub outcome: Outcome,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; zero when both vanish, `None` when only `rhs` does.
    #[serde(rename = "empirical_C")]
    pub empirical_c: Option<f64>,
    pub empirical_c_infinite: bool,
    pub tables: Vec<Value>,
}

impl InequalityReport {
    fn new(experiment: &str, config: Value, outcome: Outcome, lhs: f64, rhs: f64, tables: Vec<Value>) -> Self {
        let (empirical_c, empirical_c_infinite) = match (lhs, rhs) {
            (_, r) if r > 0.0 => (Some(lhs / r), false),
            (l, _) if l > 0.0 => (None, true),
            _ => (Some(0.0), false),
        };
        Self { experiment: experiment.into(), config, outcome, lhs, rhs, empirical_c, empirical_c_infinite, tables }
    }
}

/// `β_{p;k}(x,t)^p` against `M_{K^p;k1}(x,t) / t^n`, the curvature
/// restricted to `O_{k1}(x,t)`. The β side is exact for `p = 2` and an
/// upper bound otherwise.
#[allow(clippy::too_many_arguments)]
pub fn verify_pointwise_bound(
    mu: &DiscreteMeasure,
    f: &Integrand,
    x: &Point,
    t: f64,
    k: f64,
    k1: f64,
    lambda: f64,
    cap: f64,
) -> Result<InequalityReport> {
    let n = mu.intrinsic_dim();
    let delta = mu.delta(&Ball { center: x.clone(), radius: t }, None);
    let beta = if f.p == 2.0 { beta2(mu, x, t, k) } else { beta_p(mu, x, t, k, f.p, IrlsOptions::default()) };
    let (beta_value, exactness) = match beta {
        Ok(b) => (b.value, format!("{:?}", b.exactness)),
        Err(Error::EmptyBall) => (0.0, "EmptyBall".to_string()),
        Err(e) => return Err(e),
    };
    let lhs = beta_value.powf(f.p);
    let local = curvature_local(mu, f, &LocalRegion::new(x.clone(), t, k1)?, cap)?;
    let rhs = local.value / t.powi(n as i32);
    let outcome = if delta >= lambda { Outcome::Evaluated } else { Outcome::SkippedHypothesis };
    let config = json!({
        "integrand": f.kind, "p": f.p, "x": x.as_slice(), "t": t, "k": k, "k1": k1, "lambda": lambda,
    });
    let table = json!([{ "t": t, "delta": delta, "beta": beta_value, "exactness": exactness,
        "local_curvature": local.value, "tuples": local.tuples }]);
    Ok(InequalityReport::new("pointwise", config, outcome, lhs, rhs, vec![table]))
}

/// Per-atom multiscale β-integrals `∫ β_{p;k}(x,t)^p 1{δ̃ ≥ λ} dt/t`.
pub fn beta_integrals(mu: &DiscreteMeasure, grid: &ScaleGrid, params: MultiscaleParams) -> Result<Vec<f64>> {
    mu.points().par_iter().map(|x| multiscale_beta(mu, x, grid, params)).collect()
}

/// `Σ_x w_x ∫ β^p 1{δ̃ ≥ λ} dt/t` against the full curvature sum.
pub fn verify_global_bound(
    mu: &DiscreteMeasure,
    f: &Integrand,
    params: MultiscaleParams,
    grid: &ScaleGrid,
    cap: f64,
) -> Result<InequalityReport> {
    let rhs = curvature_exact(mu, f, cap)?.value;
    let per_point = beta_integrals(mu, grid, MultiscaleParams { p: f.p, ..params })?;
    let lhs = per_point.iter().zip(mu.weights()).map(|(b, w)| w * b).sum();
    let config = json!({
        "integrand": f.kind, "p": f.p, "k": params.k, "k0": params.k0, "lambda": params.lambda, "grid": grid,
    });
    let table: Vec<Value> = per_point
        .iter()
        .enumerate()
        .map(|(i, b)| json!({ "point_id": i, "weight": mu.weight(i), "beta_integral": b }))
        .collect();
    Ok(InequalityReport::new("global", config, Outcome::Evaluated, lhs, rhs, vec![Value::Array(table)]))
}

/// Settings shared by the contrast experiments.
#[derive(Clone, Debug, Serialize)]
pub struct ContrastConfig {
    pub integrand: Integrand,
    pub k: f64,
    pub k0: f64,
    pub lambda: f64,
    pub grid: ScaleGrid,
    /// Exact sums are used up to this many tuples, Monte-Carlo beyond.
    pub cap: f64,
    pub mc_samples: usize,
    pub seed: u64,
}

impl ContrastConfig {
    fn params(&self) -> MultiscaleParams {
        MultiscaleParams { k: self.k, p: self.integrand.p, lambda: self.lambda, k0: self.k0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ContrastEntry {
    pub name: String,
    pub points: usize,
    pub curvature: CurvatureEstimate,
    /// Mass-weighted multiscale β-integral.
    pub beta_integral: f64,
}

/// Curvature and mass-weighted β-integral for each named measure.
pub fn contrast_experiment(measures: &[(String, DiscreteMeasure)], config: &ContrastConfig) -> Result<Vec<ContrastEntry>> {
    measures
        .iter()
        .map(|(name, mu)| {
            let arity = mu.intrinsic_dim() as i32 + 2;
            let curvature = if (mu.len() as f64).powi(arity) <= config.cap {
                curvature_exact(mu, &config.integrand, config.cap)?
            } else {
                curvature_mc(mu, &config.integrand, config.mc_samples, config.seed)?
            };
            let per_point = beta_integrals(mu, &config.grid, config.params())?;
            let beta_integral = per_point.iter().zip(mu.weights()).map(|(b, w)| w * b).sum();
            Ok(ContrastEntry { name: name.clone(), points: mu.len(), curvature, beta_integral })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderRow {
    pub seed: u64,
    pub slope: f64,
    pub curvature: f64,
    pub beta_integral: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderReport {
    pub slopes: Vec<f64>,
    pub n_points: usize,
    pub rows: Vec<LadderRow>,
    pub curvature_monotone_fraction: f64,
    pub beta_monotone_fraction: f64,
    /// Seeds for which either quantity decreased somewhere along the ladder.
    pub failures: Vec<Value>,
}

/// The Lipschitz-graph ladder: one-mode graphs of amplitude `L` over
/// `[-1, 1]` in the plane, with the same sample positions per seed.
pub fn lipschitz_ladder(slopes: &[f64], n_points: usize, seeds: &[u64], config: &ContrastConfig) -> Result<LadderReport> {
    let per_seed: Vec<Vec<LadderRow>> = seeds
        .par_iter()
        .map(|&seed| {
            slopes
                .iter()
                .map(|&slope| {
                    let spec = GraphSpec { coeffs: vec![slope], n: 1, ambient: 2, half_width: 1.0, n_points };
                    let mu = lipschitz_graph(&spec, seed)?;
                    let curvature = curvature_exact(&mu, &config.integrand, config.cap)?.value;
                    let per_point = beta_integrals(&mu, &config.grid, config.params())?;
                    let beta_integral = per_point.iter().zip(mu.weights()).map(|(b, w)| w * b).sum();
                    Ok(LadderRow { seed, slope, curvature, beta_integral })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let monotone = |rows: &[LadderRow], key: fn(&LadderRow) -> f64| rows.windows(2).all(|w| key(&w[1]) >= key(&w[0]));
    let mut failures = Vec::new();
    let (mut curv_ok, mut beta_ok) = (0usize, 0usize);
    for rows in &per_seed {
        let c = monotone(rows, |r| r.curvature);
        let b = monotone(rows, |r| r.beta_integral);
        curv_ok += c as usize;
        beta_ok += b as usize;
        if !(c && b) {
            failures.push(json!({ "seed": rows[0].seed, "n_points": n_points, "slopes": slopes,
                "curvature": rows.iter().map(|r| r.curvature).collect::<Vec<_>>(),
                "beta_integral": rows.iter().map(|r| r.beta_integral).collect::<Vec<_>>() }));
        }
    }
    let total = seeds.len().max(1) as f64;
    Ok(LadderReport {
        slopes: slopes.to_vec(),
        n_points,
        rows: per_seed.into_iter().flatten().collect(),
        curvature_monotone_fraction: curv_ok as f64 / total,
        beta_monotone_fraction: beta_ok as f64 / total,
        failures,
    })
}

/// Default ladder settings: `K₁²`, `k = 4`, no density cut-off.
pub fn default_ladder_config() -> ContrastConfig {
    ContrastConfig {
        integrand: Integrand::with_default_exponent(IntegrandKind::K1, 1),
        k: crate::beta::DEFAULT_K,
        k0: 2.0,
        lambda: 0.0,
        grid: ScaleGrid::geometric(0.05, 2.0, 16).expect("valid grid"),
        cap: crate::curvature::DEFAULT_TUPLE_CAP,
        mc_samples: 100_000,
        seed: 0,
    }
}

/// Outcome of searching a ball for a well-separated simplex of heavy atoms.
#[derive(Clone, Debug, Serialize)]
pub struct SimplexSearchReport {
    pub delta: f64,
    pub hypothesis_holds: bool,
    pub found: bool,
    /// Atom indices of the vertices.
    pub vertices: Vec<usize>,
    /// Smallest height of the simplex.
    pub sigma: f64,
    /// `μ(B(v, σ/2))` per vertex.
    pub vertex_masses: Vec<f64>,
    /// `10 n t / σ`.
    pub c1_empirical: Option<f64>,
    /// `t^n / min vertex mass`.
    pub c2_empirical: Option<f64>,
}

/// Searches `ball` for an `n`-simplex with vertices among heavy atoms,
/// those `y` with `μ(B(y, t/16)) >= λ (t/16)^n`, by farthest-point seeding
/// and single-vertex swaps.
pub fn simplex_search_check(mu: &DiscreteMeasure, ball: &Ball, lambda: f64) -> Result<SimplexSearchReport> {
    let n = mu.intrinsic_dim();
    let t = ball.radius;
    let delta = mu.delta(ball, None);
    let rho = t / 16.0;
    let heavy: Vec<usize> = mu
        .ball_indices(&ball.center, t)
        .into_iter()
        .filter(|&i| mu.ball_mass(&Ball { center: mu.point(i).clone(), radius: rho }) >= lambda * rho.powi(n as i32))
        .collect();
    let mut report = SimplexSearchReport {
        delta,
        hypothesis_holds: delta >= lambda,
        found: false,
        vertices: Vec::new(),
        sigma: 0.0,
        vertex_masses: Vec::new(),
        c1_empirical: None,
        c2_empirical: None,
    };
    if heavy.len() < n + 1 {
        return Ok(report);
    }
    let pts: Vec<Point> = heavy.iter().map(|&i| mu.point(i).clone()).collect();
    let search = max_volume_simplex(&pts, n, SearchMode::Greedy)?;
    if search.degenerate {
        return Ok(report);
    }
    let sigma = search.simplex.heights()?.into_iter().fold(f64::INFINITY, f64::min);
    let vertices: Vec<usize> = search.indices.iter().map(|&i| heavy[i]).collect();
    let vertex_masses: Vec<f64> = vertices
        .iter()
        .map(|&v| mu.ball_mass(&Ball { center: mu.point(v).clone(), radius: 0.5 * sigma }))
        .collect();
    let min_mass = vertex_masses.iter().copied().fold(f64::INFINITY, f64::min);
    report.found = true;
    report.sigma = sigma;
    report.c1_empirical = Some(10.0 * n as f64 * t / sigma);
    report.c2_empirical = Some(t.powi(n as i32) / min_mass);
    report.vertices = vertices;
    report.vertex_masses = vertex_masses;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{four_corner_cantor, plane_patch, segment};
    use nalgebra::DVector;

    fn k1() -> Integrand {
        Integrand::new(IntegrandKind::K1, 2.0).unwrap()
    }

    #[test]
    fn flat_data_gives_zero_on_both_sides() {
        let mu = plane_patch(1, 2, 30).unwrap();
        let x = mu.point(15).clone();
        let r = verify_pointwise_bound(&mu, &k1(), &x, 0.3, 4.0, DEFAULT_K1, 0.01, 1e8).unwrap();
        assert!(r.lhs < 1e-20 && r.rhs == 0.0);
        assert!(!r.empirical_c_infinite);
        let grid = ScaleGrid::geometric(0.05, 1.0, 8).unwrap();
        let params = MultiscaleParams { k: 4.0, p: 2.0, lambda: 0.01, k0: 2.0 };
        let g = verify_global_bound(&segment(30, 2).unwrap(), &k1(), params, &grid, 1e8).unwrap();
        assert_eq!(g.rhs, 0.0);
        assert!(g.lhs < 1e-20);
    }

    #[test]
    fn equilateral_triple_sides_recompute() {
        let s3 = 3f64.sqrt() / 2.0;
        let pts = vec![DVector::from_vec(vec![0.0, 0.0]), DVector::from_vec(vec![1.0, 0.0]), DVector::from_vec(vec![0.5, s3])];
        let mu = DiscreteMeasure::new(pts, vec![1.0; 3], 1).unwrap();
        let x = DVector::from_vec(vec![0.5, s3 / 3.0]);
        let r = verify_pointwise_bound(&mu, &k1(), &x, 1.0, 4.0, DEFAULT_K1, 0.0, 1e8).unwrap();
        // Every pair is at least 1/8 apart, so the local sum is the full one.
        assert!((r.rhs - 1.125).abs() < 1e-12);
        let b = beta2(&mu, &x, 1.0, 4.0).unwrap().value;
        assert_eq!(r.lhs, b * b);
        assert!(r.empirical_c.unwrap() > 0.0);
    }

    #[test]
    fn pointwise_ratio_is_scale_invariant() {
        let mu = four_corner_cantor(2).unwrap();
        let x = mu.point(3).clone();
        let base = verify_pointwise_bound(&mu, &k1(), &x, 0.4, 4.0, DEFAULT_K1, 0.0, 1e8).unwrap();
        for s in [0.1, 3.0] {
            let scaled = mu.dilated(s).unwrap();
            let r = verify_pointwise_bound(&scaled, &k1(), &(&x * s), 0.4 * s, 4.0, DEFAULT_K1, 0.0, 1e8).unwrap();
            let (a, b) = (base.empirical_c.unwrap(), r.empirical_c.unwrap());
            assert!((a - b).abs() <= 1e-9 * a, "{a} vs {b}");
        }
    }

    #[test]
    fn hypothesis_failure_is_reported() {
        let mu = segment(10, 2).unwrap();
        let r = verify_pointwise_bound(&mu, &k1(), &DVector::from_vec(vec![9.0, 9.0]), 0.1, 4.0, DEFAULT_K1, 0.5, 1e8)
            .unwrap();
        assert_eq!(r.outcome, Outcome::SkippedHypothesis);
    }

    #[test]
    fn simplex_search_examples() {
        let two = DiscreteMeasure::uniform(vec![DVector::from_vec(vec![0.0, 0.0]), DVector::from_vec(vec![0.6, 0.0])], 1)
            .unwrap();
        let ball = Ball { center: DVector::from_vec(vec![0.3, 0.0]), radius: 1.0 };
        let r = simplex_search_check(&two, &ball, 0.1).unwrap();
        assert!(r.found);
        assert!((r.sigma - 0.6).abs() < 1e-12);

        let one = DiscreteMeasure::uniform(vec![DVector::from_vec(vec![0.0, 0.0])], 1).unwrap();
        assert!(!simplex_search_check(&one, &ball, 0.1).unwrap().found);

        let patch = plane_patch(2, 3, 12).unwrap();
        let b = Ball { center: patch.centroid(), radius: 0.5 };
        let r = simplex_search_check(&patch, &b, 0.01).unwrap();
        assert!(r.found && r.sigma > 0.2 && r.sigma <= 1.0);
    }

    #[test]
    fn contrast_separates_segment_and_cantor() {
        let mut cfg = default_ladder_config();
        cfg.lambda = 0.01;
        let measures = vec![
            ("segment".to_string(), segment(64, 2).unwrap()),
            ("cantor".to_string(), four_corner_cantor(3).unwrap()),
        ];
        let out = contrast_experiment(&measures, &cfg).unwrap();
        assert_eq!(out[0].curvature.value, 0.0);
        assert!(out[1].curvature.value > 0.0);
        assert!(out[1].beta_integral > 0.0);
    }
}
