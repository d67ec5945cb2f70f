//! The curvature integrands `K1`–`K6` on `(n+2)`-tuples, their symmetrized
//! versions, and empirical propriety diagnostics.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::simplex::{dist, dist_to_hull, is_degenerate_raw, raw_diameter, raw_volume, Simplex};

/// Which integrand to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegrandKind {
    K1,
    K2,
    K3,
    K4,
    K5,
    K6,
}

impl IntegrandKind {
    pub const ALL: [IntegrandKind; 6] = [Self::K1, Self::K2, Self::K3, Self::K4, Self::K5, Self::K6];

    /// The exponent under which the integrand scales correctly for
    /// intrinsic dimension `n`.
    pub fn default_exponent(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            Self::K1 | Self::K2 | Self::K3 => 2.0,
            Self::K4 | Self::K5 => n * (n + 1.0),
            Self::K6 => n + 1.0,
        }
    }

    /// Whether the value is invariant under permutations of the tuple.
    pub fn is_symmetric(self) -> bool {
        !matches!(self, Self::K6)
    }

    /// Value of the integrand (not raised to any power) on a tuple of
    /// `n + 2` points. Degenerate tuples evaluate to `0`.
    pub fn evaluate(self, tuple: &[&[f64]]) -> f64 {
        assert!(tuple.len() >= 3, "integrands take at least three points");
        let n = tuple.len() - 2;
        let vol = raw_volume(tuple);
        let diam = raw_diameter(tuple);
        if is_degenerate_raw(vol, diam, n + 1) {
            return 0.0;
        }
        let h = vol / factorial(n + 1);
        match self {
            Self::K1 => {
                let mut prod = 1.0;
                for i in 0..tuple.len() {
                    for j in i + 1..tuple.len() {
                        prod *= dist(tuple[i], tuple[j]);
                    }
                }
                h / prod
            }
            Self::K2 => {
                let sum: f64 = (0..tuple.len())
                    .map(|i| {
                        let prod: f64 = (0..tuple.len())
                            .filter(|&j| j != i)
                            .map(|j| {
                                let d = dist(tuple[i], tuple[j]);
                                d * d
                            })
                            .product();
                        1.0 / prod
                    })
                    .sum();
                let sq = vol * vol / diam.powi((n * (n + 1)) as i32) * sum / (n + 2) as f64;
                sq.sqrt()
            }
            Self::K3 => h / diam.powi(((n + 1) * (n + 2) / 2) as i32),
            Self::K4 => {
                let facet_norm = factorial(n);
                let area: f64 = (0..tuple.len())
                    .map(|i| {
                        let facet: Vec<&[f64]> = tuple
                            .iter()
                            .enumerate()
                            .filter(|&(j, _)| j != i)
                            .map(|(_, v)| *v)
                            .collect();
                        raw_volume(&facet) / facet_norm
                    })
                    .sum();
                h / (area * diam * diam)
            }
            Self::K5 => h / diam.powi((n + 2) as i32),
            Self::K6 => {
                let last = tuple[n + 1];
                let Some(height) = dist_to_hull(last, &tuple[..=n]) else {
                    return 0.0;
                };
                let prod: f64 = tuple[..=n].iter().map(|v| dist(last, v)).product();
                height / prod
            }
        }
    }

    /// Convenience wrapper taking owned points.
    pub fn evaluate_points(self, tuple: &[Point]) -> f64 {
        let s: Vec<&[f64]> = tuple.iter().map(|p| p.as_slice()).collect();
        self.evaluate(&s)
    }
}

impl fmt::Display for IntegrandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::K1 => "k1",
            Self::K2 => "k2",
            Self::K3 => "k3",
            Self::K4 => "k4",
            Self::K5 => "k5",
            Self::K6 => "k6",
        };
        f.write_str(s)
    }
}

impl FromStr for IntegrandKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::BadParams(format!("unknown integrand '{s}' (expected k1..k6)")))
    }
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

/// Whether the tuple spans at most an `n`-dimensional affine subspace.
pub fn is_degenerate(tuple: &[Point]) -> bool {
    let s: Vec<&[f64]> = tuple.iter().map(|p| p.as_slice()).collect();
    is_degenerate_raw(raw_volume(&s), raw_diameter(&s), s.len().saturating_sub(1))
}

/// `v^p` using repeated multiplication for integral exponents.
pub(crate) fn pow(v: f64, p: f64) -> f64 {
    if p == p.trunc() && p.abs() <= 64.0 {
        v.powi(p as i32)
    } else {
        v.powf(p)
    }
}

/// Something that can be integrated over tuples: a nonnegative function
/// together with the exponent it is raised to.
pub trait TupleIntegrand: Sync {
    fn exponent(&self) -> f64;
    fn value(&self, tuple: &[&[f64]]) -> f64;
    /// `value^exponent`.
    fn value_pow(&self, tuple: &[&[f64]]) -> f64 {
        pow(self.value(tuple), self.exponent())
    }
}

/// An integrand kind paired with an exponent `p > 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Integrand {
    pub kind: IntegrandKind,
    pub p: f64,
}

impl Integrand {
    pub fn new(kind: IntegrandKind, p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::BadParams(format!("integrand exponent must be > 1, got {p}")));
        }
        Ok(Self { kind, p })
    }

    /// The kind with its default exponent for intrinsic dimension `n`.
    pub fn with_default_exponent(kind: IntegrandKind, n: usize) -> Self {
        Self { kind, p: kind.default_exponent(n.max(1)) }
    }
}

impl TupleIntegrand for Integrand {
    fn exponent(&self) -> f64 {
        self.p
    }

    fn value(&self, tuple: &[&[f64]]) -> f64 {
        self.kind.evaluate(tuple)
    }
}

/// The permutation average `(1/(n+2)!) Σ_φ K^p ∘ φ`, which integrates to the
/// same curvature and is symmetric in all arguments.
#[derive(Clone, Debug)]
pub struct Symmetrized {
    inner: Integrand,
    perms: Vec<Vec<usize>>,
}

/// Largest intrinsic dimension for which symmetrization enumerates all
/// permutations.
pub const MAX_SYMMETRIZE_N: usize = 6;

pub fn symmetrize(inner: Integrand, n: usize) -> Result<Symmetrized> {
    if n > MAX_SYMMETRIZE_N {
        return Err(Error::TooLargeN { tuple_len: n + 2 });
    }
    let perms = (0..n + 2).permutations(n + 2).collect();
    Ok(Symmetrized { inner, perms })
}

impl Symmetrized {
    pub fn tuple_len(&self) -> usize {
        self.perms[0].len()
    }
}

impl TupleIntegrand for Symmetrized {
    fn exponent(&self) -> f64 {
        self.inner.p
    }

    fn value_pow(&self, tuple: &[&[f64]]) -> f64 {
        assert_eq!(tuple.len(), self.tuple_len(), "tuple length differs from symmetrization arity");
        if self.inner.kind.is_symmetric() {
            return self.inner.value_pow(tuple);
        }
        let mut buf: Vec<&[f64]> = tuple.to_vec();
        let total: f64 = self
            .perms
            .iter()
            .map(|perm| {
                for (slot, &src) in buf.iter_mut().zip(perm) {
                    *slot = tuple[src];
                }
                self.inner.value_pow(&buf)
            })
            .sum();
        total / self.perms.len() as f64
    }

    fn value(&self, tuple: &[&[f64]]) -> f64 {
        self.value_pow(tuple).powf(1.0 / self.inner.p)
    }
}

/// Measured behaviour of an integrand against the propriety laws.
#[derive(Clone, Debug, Serialize)]
pub struct ProprietyReport {
    pub kind: IntegrandKind,
    pub p: f64,
    pub n: usize,
    /// Max relative violation of `t^{n(n+1)} K^p(t·) = K^p(·)`.
    pub scaling_violation: f64,
    /// Max relative violation of translation invariance.
    pub translation_violation: f64,
    /// For each tested `C`, the largest observed ratio
    /// `(d(w, aff)/t)^p / (t^{n(n+1)} K^p)` over random `(n, t/C)`-simplices.
    pub simplex_bound: Vec<(f64, f64)>,
    /// Least-squares fit of the observed ratios to `c · C^l`.
    pub fitted_c: f64,
    pub fitted_l: f64,
    /// Whether the scaling and translation laws hold to `1e-9` and the
    /// simplex ratios stayed finite.
    pub proper: bool,
}

/// Samples random tuples and reports how well `kind` with exponent `p`
/// satisfies the propriety laws in intrinsic dimension `n` (ambient `n+1`).
pub fn check_propriety(
    kind: IntegrandKind,
    p: f64,
    n: usize,
    sample_count: usize,
    seed: u64,
) -> ProprietyReport {
    let ambient = n + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gaussian = |rng: &mut ChaCha8Rng| -> Point {
        Point::from_fn(ambient, |_, _| StandardNormal.sample(rng))
    };
    let hom = (n * (n + 1)) as f64;
    let mut scaling_violation: f64 = 0.0;
    let mut translation_violation: f64 = 0.0;
    for _ in 0..sample_count {
        let tuple: Vec<Point> = (0..n + 2).map(|_| gaussian(&mut rng)).collect();
        let base = pow(kind.evaluate_points(&tuple), p);
        if base == 0.0 {
            continue;
        }
        let t = 10f64.powf(rng.random_range(-1.0..1.0));
        let scaled: Vec<Point> = tuple.iter().map(|v| v * t).collect();
        let sv = t.powf(hom) * pow(kind.evaluate_points(&scaled), p);
        scaling_violation = scaling_violation.max((sv - base).abs() / base);

        let b = gaussian(&mut rng) * 3.0;
        let shifted: Vec<Point> = tuple.iter().map(|v| v + &b).collect();
        let tv = pow(kind.evaluate_points(&shifted), p);
        translation_violation = translation_violation.max((tv - base).abs() / base);
    }

    let cs = [1.5, 2.0, 4.0, 8.0];
    let per_c = (sample_count / cs.len()).max(10);
    let mut simplex_bound = Vec::new();
    for &c in &cs {
        let mut worst: f64 = 0.0;
        let mut accepted = 0;
        let mut attempts = 0;
        while accepted < per_c && attempts < per_c * 1000 {
            attempts += 1;
            let verts: Vec<Point> = (0..=n).map(|_| uniform_in_ball(&mut rng, ambient, c)).collect();
            let simplex = Simplex::new(verts.clone()).expect("valid vertex count");
            if !simplex.is_sigma_simplex(1.0 / c) {
                continue;
            }
            accepted += 1;
            let w = uniform_in_ball(&mut rng, ambient, c);
            let slices: Vec<&[f64]> = verts.iter().map(|v| v.as_slice()).collect();
            let d = dist_to_hull(w.as_slice(), &slices).unwrap_or(0.0);
            let mut tuple = verts;
            tuple.push(w);
            let k = pow(kind.evaluate_points(&tuple), p);
            let lhs = pow(d, p);
            if lhs == 0.0 {
                continue;
            }
            worst = worst.max(if k > 0.0 { lhs / k } else { f64::INFINITY });
        }
        simplex_bound.push((c, worst));
    }
    let (fitted_c, fitted_l) = fit_power_law(&simplex_bound);
    let proper = scaling_violation <= 1e-9
        && translation_violation <= 1e-9
        && simplex_bound.iter().all(|(_, r)| r.is_finite());
    ProprietyReport {
        kind,
        p,
        n,
        scaling_violation,
        translation_violation,
        simplex_bound,
        fitted_c,
        fitted_l,
        proper,
    }
}

fn uniform_in_ball(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> Point {
    let dir = Point::from_fn(dim, |_, _| StandardNormal.sample(rng));
    let r = radius * rng.random::<f64>().powf(1.0 / dim as f64);
    dir.normalize() * r
}

/// Fits `ratio = c · C^l` by least squares in log-log coordinates, clamping
/// both constants to at least 1.
fn fit_power_law(samples: &[(f64, f64)]) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(_, r)| r.is_finite() && *r > 0.0)
        .map(|&(c, r)| (c.ln(), r.ln()))
        .collect();
    if samples.iter().any(|(_, r)| !r.is_finite()) {
        return (f64::INFINITY, f64::INFINITY);
    }
    if pts.len() < 2 {
        return (1.0, 1.0);
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let l = (sxy / sxx).max(1.0);
    // Smallest c that makes the fitted curve dominate every sample.
    let c = pts.iter().map(|&(x, y)| (y - l * x).exp()).fold(1.0, f64::max);
    (c, l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn p(v: &[f64]) -> Point {
        Point::from_column_slice(v)
    }

    fn equilateral() -> Vec<Point> {
        vec![p(&[0.0, 0.0]), p(&[1.0, 0.0]), p(&[0.5, 3f64.sqrt() / 2.0])]
    }

    #[test]
    fn k1_on_equilateral_triangle() {
        assert_abs_diff_eq!(IntegrandKind::K1.evaluate_points(&equilateral()), 3f64.sqrt() / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_tuples_vanish() {
        let collinear = vec![p(&[0.0, 0.0]), p(&[1.0, 1.0]), p(&[3.0, 3.0])];
        let repeated = vec![p(&[0.0, 0.0]), p(&[1.0, 0.0]), p(&[1.0, 0.0])];
        assert!(is_degenerate(&collinear) && is_degenerate(&repeated));
        assert!(!is_degenerate(&equilateral()));
        for k in IntegrandKind::ALL {
            assert_eq!(k.evaluate_points(&collinear), 0.0);
            assert_eq!(k.evaluate_points(&repeated), 0.0);
        }
    }

    #[test]
    fn k5_on_regular_tetrahedron() {
        let s = 1.0 / 8f64.sqrt();
        let tet: Vec<Point> = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
            .iter()
            .map(|v| p(v) * s)
            .collect();
        assert_abs_diff_eq!(IntegrandKind::K5.evaluate_points(&tet), 2f64.sqrt() / 12.0, epsilon = 1e-12);
    }

    #[test]
    fn k2_and_k6_by_hand() {
        // Right isosceles triangle with legs 1: area 1/2, Vol = 1, diam √2.
        let t = vec![p(&[0.0, 0.0]), p(&[1.0, 0.0]), p(&[0.0, 1.0])];
        // Σ_i 1/∏_{j≠i} d² = 1/(1·1) + 1/(1·2) + 1/(1·2) = 2
        let k2_sq = 1.0 / 3.0 * 1.0 / 2.0 * 2.0;
        assert_abs_diff_eq!(IntegrandKind::K2.evaluate_points(&t), f64::sqrt(k2_sq), epsilon = 1e-15);
        // Last point (0,1) sits at height 1 over the x-axis, distances 1 and √2.
        assert_abs_diff_eq!(IntegrandKind::K6.evaluate_points(&t), 1.0 / 2f64.sqrt(), epsilon = 1e-15);
        // K4: H = 1/2, perimeter 2 + √2, diam² = 2.
        assert_abs_diff_eq!(IntegrandKind::K4.evaluate_points(&t), 0.5 / ((2.0 + 2f64.sqrt()) * 2.0), epsilon = 1e-15);
    }

    #[test]
    fn symmetrized_k6_is_mean_over_orderings() {
        let t = [p(&[0.0, 0.0]), p(&[2.0, 0.1]), p(&[0.4, 1.3])];
        let sym = symmetrize(Integrand::new(IntegrandKind::K6, 2.0).unwrap(), 1).unwrap();
        let s: Vec<&[f64]> = t.iter().map(|v| v.as_slice()).collect();
        let direct: f64 = (0..3)
            .permutations(3)
            .map(|perm| {
                let q: Vec<Point> = perm.iter().map(|&i| t[i].clone()).collect();
                IntegrandKind::K6.evaluate_points(&q).powi(2)
            })
            .sum::<f64>()
            / 6.0;
        assert_abs_diff_eq!(sym.value_pow(&s), direct, epsilon = 1e-15);
        assert_abs_diff_eq!(sym.value(&s), direct.sqrt(), epsilon = 1e-15);

        let k1 = symmetrize(Integrand::new(IntegrandKind::K1, 2.0).unwrap(), 1).unwrap();
        assert_abs_diff_eq!(k1.value(&s), IntegrandKind::K1.evaluate(&s), epsilon = 1e-12);
        assert!(matches!(symmetrize(Integrand::new(IntegrandKind::K1, 2.0).unwrap(), 7), Err(Error::TooLargeN { .. })));
    }

    #[test]
    fn propriety_flags_wrong_exponent() {
        let good = check_propriety(IntegrandKind::K1, 2.0, 1, 200, 3);
        assert!(good.scaling_violation <= 1e-9 && good.proper);
        let good = check_propriety(IntegrandKind::K5, 6.0, 2, 200, 3);
        assert!(good.scaling_violation <= 1e-9);
        let bad = check_propriety(IntegrandKind::K1, 3.0, 1, 200, 3);
        assert!(bad.scaling_violation > 1e-3 && !bad.proper);
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("K4".parse::<IntegrandKind>().unwrap(), IntegrandKind::K4);
        assert_eq!(IntegrandKind::K6.to_string(), "k6");
        assert!("k7".parse::<IntegrandKind>().is_err());
        assert!(Integrand::new(IntegrandKind::K1, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn symmetrized_is_permutation_invariant(seed in any::<u64>(), n in 1usize..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tuple: Vec<Point> = (0..n + 2)
                .map(|_| Point::from_fn(n + 1, |_, _| StandardNormal.sample(&mut rng)))
                .collect();
            let sym = symmetrize(Integrand::new(IntegrandKind::K6, (n + 1) as f64 + 0.5).unwrap(), n).unwrap();
            let s: Vec<&[f64]> = tuple.iter().map(|v| v.as_slice()).collect();
            let reference = sym.value_pow(&s);
            for perm in (0..n + 2).permutations(n + 2) {
                let q: Vec<&[f64]> = perm.iter().map(|&i| s[i]).collect();
                prop_assert!((sym.value_pow(&q) - reference).abs() <= 1e-12 * reference.max(1e-300));
            }
        }

        #[test]
        fn values_are_nonnegative_and_translation_invariant(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tuple: Vec<Point> = (0..4)
                .map(|_| Point::from_fn(3, |_, _| StandardNormal.sample(&mut rng)))
                .collect();
            let b = Point::from_fn(3, |_, _| StandardNormal.sample(&mut rng));
            let shifted: Vec<Point> = tuple.iter().map(|v| v + &b).collect();
            for k in IntegrandKind::ALL {
                let v = k.evaluate_points(&tuple);
                prop_assert!(v >= 0.0);
                prop_assert!((k.evaluate_points(&shifted) - v).abs() <= 1e-10 * v);
            }
        }
    }
}
