//! Integral Menger curvature of a discrete measure: exact ordered-tuple sums,
//! a reproducible Monte-Carlo estimator, and the localized sum over
//! well-separated tuples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::integrands::TupleIntegrand;
use crate::measure::DiscreteMeasure;
use crate::simplex::dist;

/// Default cap on tuple evaluations for exact sums.
pub const DEFAULT_TUPLE_CAP: f64 = 1e8;

/// Tuples per Monte-Carlo block; each block draws from its own RNG stream.
pub const MC_BLOCK: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Mc,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurvatureEstimate {
    pub value: f64,
    /// Standard error; `None` for exact sums.
    pub stderr: Option<f64>,
    pub tuples: u64,
    pub method: Method,
}

fn check_cap(count: usize, arity: usize, cap: f64) -> Result<()> {
    let needed = (count as f64).powi(arity as i32);
    if needed > cap {
        return Err(Error::TooLarge { needed, cap });
    }
    Ok(())
}

/// Sum of `K^p · ∏ w` over ordered tuples drawn from `members` with the
/// first index fixed to `first`, skipping tuples that repeat an index.
/// Tuples for which `admit` returns false are skipped as well.
fn sum_with_first<F, A>(
    f: &F,
    slices: &[&[f64]],
    weights: &[f64],
    members: &[usize],
    arity: usize,
    first: usize,
    admit: &A,
) -> (f64, u64)
where
    F: TupleIntegrand + ?Sized,
    A: Fn(&[usize]) -> bool,
{
    let m = members.len();
    let mut pos = vec![0usize; arity - 1];
    let mut idx = vec![0usize; arity];
    let mut tuple: Vec<&[f64]> = vec![slices[first]; arity];
    idx[0] = first;
    let mut total = 0.0;
    let mut evaluated = 0u64;
    'outer: loop {
        for (slot, &pi) in pos.iter().enumerate() {
            idx[slot + 1] = members[pi];
        }
        let distinct = (0..arity).all(|a| (a + 1..arity).all(|b| idx[a] != idx[b]));
        if distinct && admit(&idx) {
            let mut w = 1.0;
            for (slot, &i) in idx.iter().enumerate() {
                tuple[slot] = slices[i];
                w *= weights[i];
            }
            total += f.value_pow(&tuple) * w;
            evaluated += 1;
        }
        // Odometer increment, last position fastest.
        for slot in (0..pos.len()).rev() {
            pos[slot] += 1;
            if pos[slot] < m {
                continue 'outer;
            }
            pos[slot] = 0;
        }
        break;
    }
    (total, evaluated)
}

fn exact_over<F, A>(
    mu: &DiscreteMeasure,
    f: &F,
    members: &[usize],
    arity: usize,
    admit: A,
) -> (f64, u64)
where
    F: TupleIntegrand + ?Sized,
    A: Fn(&[usize]) -> bool + Sync,
{
    let slices: Vec<&[f64]> = mu.points().iter().map(|p| p.as_slice()).collect();
    let weights = mu.weights();
    // Partial sums per first index, reduced in ascending order so the result
    // does not depend on the thread count.
    let partials: Vec<(f64, u64)> = members
        .par_iter()
        .map(|&first| sum_with_first(f, &slices, weights, members, arity, first, &admit))
        .collect();
    partials.iter().fold((0.0, 0), |(s, c), &(ps, pc)| (s + ps, c + pc))
}

/// `Σ K^p(x_{i_0}, …, x_{i_{n+1}}) ∏ w_{i_j}` over all ordered tuples of
/// distinct indices (tuples with a repeated index are degenerate and
/// contribute zero).
pub fn curvature_exact<F: TupleIntegrand + ?Sized>(
    mu: &DiscreteMeasure,
    f: &F,
    cap: f64,
) -> Result<CurvatureEstimate> {
    let arity = mu.intrinsic_dim() + 2;
    check_cap(mu.len(), arity, cap)?;
    let members: Vec<usize> = (0..mu.len()).collect();
    let (value, tuples) = exact_over(mu, f, &members, arity, |_| true);
    Ok(CurvatureEstimate { value, stderr: None, tuples, method: Method::Exact })
}

/// Monte-Carlo estimate drawing each tuple coordinate independently with
/// probability proportional to weight. Reproducible for a fixed seed
/// regardless of the thread count.
pub fn curvature_mc<F: TupleIntegrand + ?Sized>(
    mu: &DiscreteMeasure,
    f: &F,
    samples: usize,
    seed: u64,
) -> Result<CurvatureEstimate> {
    if samples < 100 {
        return Err(Error::BadParams(format!("Monte-Carlo needs at least 100 samples, got {samples}")));
    }
    if mu.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    let arity = mu.intrinsic_dim() + 2;
    let slices: Vec<&[f64]> = mu.points().iter().map(|p| p.as_slice()).collect();
    let mut cumulative = Vec::with_capacity(mu.len());
    let mut acc = 0.0;
    for &w in mu.weights() {
        acc += w;
        cumulative.push(acc);
    }
    let total = acc;
    let draw = |rng: &mut ChaCha8Rng| -> usize {
        let u = rng.random::<f64>() * total;
        cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1)
    };
    let blocks = samples.div_ceil(MC_BLOCK);
    let partials: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = MC_BLOCK.min(samples - b * MC_BLOCK);
            let mut tuple: Vec<&[f64]> = vec![slices[0]; arity];
            let (mut s, mut sq) = (0.0, 0.0);
            for _ in 0..count {
                for slot in tuple.iter_mut() {
                    *slot = slices[draw(&mut rng)];
                }
                let v = f.value_pow(&tuple);
                s += v;
                sq += v * v;
            }
            (s, sq)
        })
        .collect();
    let (sum, sumsq) = partials.iter().fold((0.0, 0.0), |(a, b), &(s, q)| (a + s, b + q));
    let m = samples as f64;
    let mean = sum / m;
    let var = ((sumsq / m - mean * mean) * m / (m - 1.0)).max(0.0);
    let scale = total.powi(arity as i32);
    Ok(CurvatureEstimate {
        value: scale * mean,
        stderr: Some(scale * (var / m).sqrt()),
        tuples: samples as u64,
        method: Method::Mc,
    })
}

/// The region `O_κ(x, t)`: tuples inside `B(x, κt)` whose distinct points
/// are pairwise at least `t/κ` apart.
#[derive(Clone, Debug)]
pub struct LocalRegion {
    pub x: Point,
    pub t: f64,
    pub kappa: f64,
}

impl LocalRegion {
    pub fn new(x: Point, t: f64, kappa: f64) -> Result<Self> {
        if !(t > 0.0 && kappa > 1.0) {
            return Err(Error::BadParams(format!("local region needs t > 0 and kappa > 1, got t = {t}, kappa = {kappa}")));
        }
        Ok(Self { x, t, kappa })
    }
}

/// The curvature sum restricted to [`LocalRegion`].
pub fn curvature_local<F: TupleIntegrand + ?Sized>(
    mu: &DiscreteMeasure,
    f: &F,
    region: &LocalRegion,
    cap: f64,
) -> Result<CurvatureEstimate> {
    let arity = mu.intrinsic_dim() + 2;
    let members = mu.ball_indices(&region.x, region.kappa * region.t);
    check_cap(members.len(), arity, cap)?;
    let sep = region.t / region.kappa;
    let pts = mu.points();
    let admit = |idx: &[usize]| {
        (0..idx.len()).all(|a| {
            (a + 1..idx.len()).all(|b| dist(pts[idx[a]].as_slice(), pts[idx[b]].as_slice()) >= sep)
        })
    };
    let (value, tuples) = exact_over(mu, f, &members, arity, admit);
    Ok(CurvatureEstimate { value, stderr: None, tuples, method: Method::Exact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrands::{symmetrize, Integrand, IntegrandKind};
    use approx::assert_relative_eq;

    fn p(v: &[f64]) -> Point {
        Point::from_column_slice(v)
    }

    fn equilateral() -> DiscreteMeasure {
        let pts = vec![p(&[0.0, 0.0]), p(&[1.0, 0.0]), p(&[0.5, 3f64.sqrt() / 2.0])];
        DiscreteMeasure::new(pts, vec![1.0; 3], 1).unwrap()
    }

    fn k1() -> Integrand {
        Integrand::new(IntegrandKind::K1, 2.0).unwrap()
    }

    fn random_measure(seed: u64, count: usize, ambient: usize, n: usize) -> DiscreteMeasure {
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = (0..count).map(|_| Point::from_fn(ambient, |_, _| StandardNormal.sample(&mut rng))).collect();
        let w = (0..count).map(|_| rng.random_range(0.5..1.5)).collect();
        DiscreteMeasure::new(pts, w, n).unwrap()
    }

    #[test]
    fn equilateral_triple_by_hand() {
        let e = curvature_exact(&equilateral(), &k1(), DEFAULT_TUPLE_CAP).unwrap();
        assert_relative_eq!(e.value, 1.125, max_relative = 1e-14);
        assert_eq!(e.tuples, 6);
        let region = LocalRegion::new(p(&[0.5, 3f64.sqrt() / 6.0]), 0.5, 4.0).unwrap();
        let l = curvature_local(&equilateral(), &k1(), &region, DEFAULT_TUPLE_CAP).unwrap();
        assert_relative_eq!(l.value, 1.125, max_relative = 1e-14);
        let far = LocalRegion::new(p(&[0.5, 0.3]), 8.0, 2.0).unwrap();
        assert_eq!(curvature_local(&equilateral(), &k1(), &far, DEFAULT_TUPLE_CAP).unwrap().value, 0.0);
    }

    #[test]
    fn collinear_measure_has_no_curvature() {
        let seg = crate::measure::segment(20, 2).unwrap();
        for kind in IntegrandKind::ALL {
            let f = Integrand::with_default_exponent(kind, 1);
            assert_eq!(curvature_exact(&seg, &f, DEFAULT_TUPLE_CAP).unwrap().value, 0.0);
        }
        let mc = curvature_mc(&seg, &k1(), 1000, 1).unwrap();
        assert_eq!((mc.value, mc.stderr), (0.0, Some(0.0)));
    }

    #[test]
    fn cap_is_enforced() {
        let mu = random_measure(1, 40, 2, 1);
        assert!(matches!(curvature_exact(&mu, &k1(), 1000.0), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn exact_sum_is_homogeneous_and_translation_invariant() {
        let mu = random_measure(3, 12, 3, 1);
        let base = curvature_exact(&mu, &k1(), DEFAULT_TUPLE_CAP).unwrap().value;
        let s = 3.7;
        let scaled = curvature_exact(&mu.dilated(s).unwrap(), &k1(), DEFAULT_TUPLE_CAP).unwrap().value;
        assert_relative_eq!(scaled, base * s, max_relative = 1e-10);
        let moved = mu.translated(&p(&[1.0, -2.0, 0.5])).unwrap();
        assert_relative_eq!(curvature_exact(&moved, &k1(), DEFAULT_TUPLE_CAP).unwrap().value, base, max_relative = 1e-10);
    }

    #[test]
    fn symmetrization_preserves_the_integral() {
        for (n, count) in [(1usize, 10usize), (2, 7)] {
            let mu = random_measure(5, count, n + 1, n);
            for kind in [IntegrandKind::K6, IntegrandKind::K1] {
                let f = Integrand::with_default_exponent(kind, n);
                let sym = symmetrize(f, n).unwrap();
                let a = curvature_exact(&mu, &f, DEFAULT_TUPLE_CAP).unwrap().value;
                let b = curvature_exact(&mu, &sym, DEFAULT_TUPLE_CAP).unwrap().value;
                assert_relative_eq!(a, b, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn local_sum_is_bounded_by_restricted_exact_sum() {
        let mu = random_measure(9, 30, 2, 1);
        let region = LocalRegion::new(p(&[0.0, 0.0]), 0.4, 3.0).unwrap();
        let local = curvature_local(&mu, &k1(), &region, DEFAULT_TUPLE_CAP).unwrap().value;
        let inside = mu.restricted(&mu.ball_indices(&region.x, 1.2)).unwrap();
        let restricted = curvature_exact(&inside, &k1(), DEFAULT_TUPLE_CAP).unwrap().value;
        assert!(local <= restricted * (1.0 + 1e-12));
        assert!(local > 0.0);
    }

    #[test]
    fn mc_is_thread_count_independent_and_shrinks_like_root_m() {
        let mu = random_measure(11, 25, 2, 1);
        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = pool1.install(|| curvature_mc(&mu, &k1(), 20_000, 42).unwrap());
        let b = pool4.install(|| curvature_mc(&mu, &k1(), 20_000, 42).unwrap());
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.stderr.unwrap().to_bits(), b.stderr.unwrap().to_bits());

        let errs: Vec<f64> = [1_000, 10_000, 100_000]
            .iter()
            .map(|&m| curvature_mc(&mu, &k1(), m, 7).unwrap().stderr.unwrap())
            .collect();
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio / 10f64.sqrt() - 1.0).abs() < 0.2, "ratio {ratio}");
        }
    }
}
