//! Simplex volumes via Gram determinants, faces, heights, `(m, σ)`-simplex
//! predicates, maximal-volume simplex search and slab covers.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::geometry::{AffineSubspace, Point};

/// Relative volume threshold below which a simplex is degenerate:
/// `Vol(T) <= DEGENERACY_REL · diam(T)^m`, i.e. the Gram determinant is below
/// `1e-12 · diam^{2m}`.
pub const DEGENERACY_REL: f64 = 1e-6;

/// Largest number of vertex subsets the exact maximal-volume search visits.
pub const EXACT_SEARCH_CAP: u128 = 2_000_000;

/// An ordered list of `m + 1` vertices in `R^N`, `0 <= m <= N`.
#[derive(Clone, Debug, PartialEq)]
pub struct Simplex {
    vertices: Vec<Point>,
}

/// Raw normalized volume `sqrt(Gram(x1 - x0, ..., xm - x0))` computed with
/// modified Gram–Schmidt; `1` for a single vertex.
pub(crate) fn raw_volume(vertices: &[&[f64]]) -> f64 {
    let Some((first, rest)) = vertices.split_first() else {
        return 0.0;
    };
    let dim = first.len();
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(rest.len());
    let mut vol = 1.0;
    for v in rest {
        let mut r: Vec<f64> = v.iter().zip(first.iter()).map(|(a, b)| a - b).collect();
        for _ in 0..2 {
            for o in &q {
                let c: f64 = o.iter().zip(&r).map(|(a, b)| a * b).sum();
                for k in 0..dim {
                    r[k] -= c * o[k];
                }
            }
        }
        let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        vol *= norm;
        r.iter_mut().for_each(|x| *x /= norm);
        q.push(r);
    }
    vol
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub(crate) fn raw_diameter(vertices: &[&[f64]]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            d = d.max(dist(vertices[i], vertices[j]));
        }
    }
    d
}

/// Degeneracy test shared by simplices and integrand tuples.
pub(crate) fn is_degenerate_raw(vol: f64, diam: f64, m: usize) -> bool {
    m > 0 && vol <= DEGENERACY_REL * diam.powi(m as i32)
}

/// Normalized volume with the degeneracy threshold applied.
pub(crate) fn volume_thresholded(vertices: &[&[f64]]) -> f64 {
    let vol = raw_volume(vertices);
    if is_degenerate_raw(vol, raw_diameter(vertices), vertices.len().saturating_sub(1)) {
        0.0
    } else {
        vol
    }
}

/// Distance from `x` to the affine hull of `pts`, or `None` when `pts` is
/// degenerate.
pub(crate) fn dist_to_hull(x: &[f64], pts: &[&[f64]]) -> Option<f64> {
    let (first, rest) = pts.split_first()?;
    if is_degenerate_raw(raw_volume(pts), raw_diameter(pts), rest.len()) {
        return None;
    }
    let dim = first.len();
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(rest.len());
    for v in rest {
        let mut r: Vec<f64> = v.iter().zip(first.iter()).map(|(a, b)| a - b).collect();
        for _ in 0..2 {
            for o in &q {
                let c: f64 = o.iter().zip(&r).map(|(a, b)| a * b).sum();
                for k in 0..dim {
                    r[k] -= c * o[k];
                }
            }
        }
        let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        r.iter_mut().for_each(|x| *x /= norm);
        q.push(r);
    }
    let mut r: Vec<f64> = x.iter().zip(first.iter()).map(|(a, b)| a - b).collect();
    for _ in 0..2 {
        for o in &q {
            let c: f64 = o.iter().zip(&r).map(|(a, b)| a * b).sum();
            for k in 0..dim {
                r[k] -= c * o[k];
            }
        }
    }
    Some(r.iter().map(|x| x * x).sum::<f64>().sqrt())
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

impl Simplex {
    /// Builds a simplex from `1..=N+1` vertices of a common dimension.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let first = vertices.first().ok_or(Error::TooFewPoints { needed: 1, got: 0 })?;
        let ambient = first.len();
        if let Some(v) = vertices.iter().find(|v| v.len() != ambient) {
            return Err(Error::DimMismatch { expected: ambient, actual: v.len() });
        }
        if vertices.len() > ambient + 1 {
            return Err(Error::BadParams(format!(
                "{} vertices do not form a simplex in R^{ambient}",
                vertices.len()
            )));
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// The simplex dimension `m` (vertex count minus one).
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    fn slices(&self) -> Vec<&[f64]> {
        self.vertices.iter().map(|v| v.as_slice()).collect()
    }

    pub fn diameter(&self) -> f64 {
        raw_diameter(&self.slices())
    }

    /// Whether the vertices are affinely dependent at the relative threshold.
    pub fn is_degenerate(&self) -> bool {
        let s = self.slices();
        is_degenerate_raw(raw_volume(&s), raw_diameter(&s), self.dim())
    }

    /// `Vol(T) = sqrt(Gram(x1 - x0, ..., xm - x0))`, zero when degenerate.
    pub fn normalized_volume(&self) -> f64 {
        volume_thresholded(&self.slices())
    }

    /// `m`-dimensional Hausdorff measure, `Vol(T) / m!`.
    pub fn hausdorff_volume(&self) -> f64 {
        self.normalized_volume() / factorial(self.dim())
    }

    /// The face opposite vertex `i`, with the remaining order preserved.
    pub fn face(&self, i: usize) -> Result<Simplex> {
        if i >= self.vertices.len() || self.dim() == 0 {
            return Err(Error::IndexOutOfRange { index: i, len: self.vertices.len() });
        }
        let mut vertices = self.vertices.clone();
        vertices.remove(i);
        Ok(Simplex { vertices })
    }

    /// Distance from vertex `i` to the affine hull of the opposite face.
    pub fn height(&self, i: usize) -> Result<f64> {
        if i >= self.vertices.len() || self.dim() == 0 {
            return Err(Error::IndexOutOfRange { index: i, len: self.vertices.len() });
        }
        let s = self.slices();
        let face: Vec<&[f64]> =
            s.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| *v).collect();
        dist_to_hull(s[i], &face).ok_or(Error::DegenerateFace(i))
    }

    pub fn heights(&self) -> Result<Vec<f64>> {
        (0..self.vertices.len()).map(|i| self.height(i)).collect()
    }

    /// True iff every face is non-degenerate and every height is at least
    /// `sigma`.
    pub fn is_sigma_simplex(&self, sigma: f64) -> bool {
        if self.dim() == 0 {
            return true;
        }
        match self.heights() {
            Ok(h) => h.iter().all(|&x| x >= sigma),
            Err(_) => false,
        }
    }

    /// Affine hull of the vertices. The result has dimension `m` unless the
    /// simplex is degenerate.
    pub fn affine_hull(&self) -> Result<AffineSubspace> {
        let tol = crate::geometry::default_rank_tol(&self.vertices);
        crate::geometry::affine_hull(&self.vertices, tol)
    }
}

/// Search strategy for [`max_volume_simplex`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Enumerate all vertex subsets (falls back to greedy above the cap).
    Exact,
    /// Farthest-point seeding followed by single-vertex swaps.
    Greedy,
}

/// Result of a maximal-volume search.
#[derive(Clone, Debug)]
pub struct VolumeSearch {
    pub simplex: Simplex,
    /// Indices of the chosen vertices, ascending.
    pub indices: Vec<usize>,
    pub volume: f64,
    pub degenerate: bool,
    /// Which strategy actually produced the result.
    pub mode: SearchMode,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return acc;
        }
    }
    acc
}

fn subset_volume(pts: &[&[f64]], idx: &[usize]) -> f64 {
    let v: Vec<&[f64]> = idx.iter().map(|&i| pts[i]).collect();
    volume_thresholded(&v)
}

fn exact_search(pts: &[&[f64]], m: usize) -> (Vec<usize>, f64) {
    let mut best: (Vec<usize>, f64) = ((0..=m).collect(), -1.0);
    for combo in (0..pts.len()).combinations(m + 1) {
        let v = subset_volume(pts, &combo);
        if v > best.1 {
            best = (combo, v);
        }
    }
    best
}

fn greedy_search(pts: &[&[f64]], m: usize) -> (Vec<usize>, f64) {
    let n = pts.len();
    // Seed with the point farthest from the first point, then repeatedly add
    // the point farthest from the current hull.
    let far = (0..n).fold(0, |best, i| {
        if dist(pts[i], pts[0]) > dist(pts[best], pts[0]) {
            i
        } else {
            best
        }
    });
    let mut chosen = vec![far];
    while chosen.len() < m + 1 {
        let hull: Vec<&[f64]> = chosen.iter().map(|&i| pts[i]).collect();
        let mut best: Option<(usize, f64)> = None;
        for i in (0..n).filter(|i| !chosen.contains(i)) {
            let d = dist_to_hull_raw(pts[i], &hull);
            if best.is_none_or(|(_, bd)| d > bd) {
                best = Some((i, d));
            }
        }
        chosen.push(best.expect("enough points").0);
    }
    chosen.sort_unstable();
    let mut vol = subset_volume(pts, &chosen);
    let mut rounds = 0;
    loop {
        let mut improved = false;
        for pos in 0..=m {
            for cand in 0..n {
                if chosen.contains(&cand) {
                    continue;
                }
                let mut trial = chosen.clone();
                trial[pos] = cand;
                trial.sort_unstable();
                let v = subset_volume(pts, &trial);
                if v > vol * (1.0 + 1e-12) && v > vol {
                    chosen = trial;
                    vol = v;
                    improved = true;
                    break;
                }
            }
        }
        rounds += 1;
        if !improved || rounds >= 1000 {
            break;
        }
    }
    (chosen, vol)
}

/// Distance to the hull without the degeneracy guard (a degenerate partial
/// hull just means its span is smaller; use the numerically spanned part).
fn dist_to_hull_raw(x: &[f64], hull: &[&[f64]]) -> f64 {
    let Some((first, rest)) = hull.split_first() else {
        return 0.0;
    };
    let dim = first.len();
    let scale = raw_diameter(hull).max(1e-300);
    let mut q: Vec<Vec<f64>> = Vec::new();
    for v in rest {
        let mut r: Vec<f64> = v.iter().zip(first.iter()).map(|(a, b)| a - b).collect();
        for _ in 0..2 {
            for o in &q {
                let c: f64 = o.iter().zip(&r).map(|(a, b)| a * b).sum();
                for k in 0..dim {
                    r[k] -= c * o[k];
                }
            }
        }
        let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 * scale {
            r.iter_mut().for_each(|x| *x /= norm);
            q.push(r);
        }
    }
    let mut r: Vec<f64> = x.iter().zip(first.iter()).map(|(a, b)| a - b).collect();
    for _ in 0..2 {
        for o in &q {
            let c: f64 = o.iter().zip(&r).map(|(a, b)| a * b).sum();
            for k in 0..dim {
                r[k] -= c * o[k];
            }
        }
    }
    r.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Finds an `m`-simplex of maximal volume with vertices among `points`.
///
/// Exact mode enumerates all `(m+1)`-subsets in lexicographic order and keeps
/// the first maximizer; above [`EXACT_SEARCH_CAP`] subsets it falls back to
/// the greedy strategy, which is reported in [`VolumeSearch::mode`].
pub fn max_volume_simplex(points: &[Point], m: usize, mode: SearchMode) -> Result<VolumeSearch> {
    if points.len() < m + 1 {
        return Err(Error::TooFewPoints { needed: m + 1, got: points.len() });
    }
    let ambient = points[0].len();
    if let Some(p) = points.iter().find(|p| p.len() != ambient) {
        return Err(Error::DimMismatch { expected: ambient, actual: p.len() });
    }
    if m > ambient {
        return Err(Error::BadParams(format!("no {m}-simplex in R^{ambient}")));
    }
    let pts: Vec<&[f64]> = points.iter().map(|p| p.as_slice()).collect();
    let used = if mode == SearchMode::Exact && binomial(pts.len(), m + 1) <= EXACT_SEARCH_CAP {
        SearchMode::Exact
    } else {
        SearchMode::Greedy
    };
    let (indices, volume) = match used {
        SearchMode::Exact => exact_search(&pts, m),
        SearchMode::Greedy => greedy_search(&pts, m),
    };
    let simplex = Simplex { vertices: indices.iter().map(|&i| points[i].clone()).collect() };
    Ok(VolumeSearch { simplex, indices, volume, degenerate: volume == 0.0, mode: used })
}

/// Whether some `m`-simplex with all heights `>= h` has its vertices among
/// the points: exhaustive below the search cap, otherwise only the greedy
/// maximal-volume candidate is tested.
pub fn has_sigma_simplex(points: &[Point], m: usize, h: f64) -> bool {
    if points.len() < m + 1 {
        return false;
    }
    if m == 0 {
        return true;
    }
    if binomial(points.len(), m + 1) <= EXACT_SEARCH_CAP {
        return (0..points.len()).combinations(m + 1).any(|c| {
            let s = Simplex { vertices: c.iter().map(|&i| points[i].clone()).collect() };
            s.is_sigma_simplex(h)
        });
    }
    max_volume_simplex(points, m, SearchMode::Greedy)
        .map(|r| r.simplex.is_sigma_simplex(h))
        .unwrap_or(false)
}

/// A flat of dimension `l` containing all points up to distance `H`.
#[derive(Clone, Debug)]
pub struct SlabCover {
    pub flat: AffineSubspace,
    pub l: usize,
}

/// If the points contain no `(m, H)`-simplex, returns an `l <= m - 1` and an
/// `l`-flat with every point within `H` of it. Returns `None` when an
/// `(m, H)`-simplex exists or, for large inputs, when the greedy search
/// cannot certify the cover.
pub fn slab_cover(points: &[Point], m: usize, h: f64) -> Option<SlabCover> {
    if points.is_empty() || m == 0 || has_sigma_simplex(points, m, h) {
        return None;
    }
    let l = (0..m).rev().find(|&l| has_sigma_simplex(points, l, h))?;
    let flat = if l == 0 {
        AffineSubspace::point(points[0].clone())
    } else {
        let best = max_volume_simplex(points, l, SearchMode::Exact).ok()?;
        let verts = best.simplex.vertices();
        let dirs: Vec<Point> = verts[1..].iter().map(|v| v - &verts[0]).collect();
        AffineSubspace::spanned_by(verts[0].clone(), &dirs).ok()?
    };
    points.iter().all(|p| flat.dist(p) <= h).then_some(SlabCover { flat, l })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn p(v: &[f64]) -> Point {
        Point::from_column_slice(v)
    }

    fn simplex(vs: &[&[f64]]) -> Simplex {
        Simplex::new(vs.iter().map(|v| p(v)).collect()).unwrap()
    }

    fn random_simplex(seed: u64, ambient: usize, m: usize) -> Simplex {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let vs = (0..=m)
            .map(|_| Point::from_fn(ambient, |_, _| StandardNormal.sample(&mut rng)))
            .collect();
        Simplex::new(vs).unwrap()
    }

    #[test]
    fn closed_form_volumes_and_heights() {
        let right = simplex(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        assert_abs_diff_eq!(right.normalized_volume(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(right.hausdorff_volume(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(right.height(0).unwrap(), 0.5f64.sqrt(), epsilon = 1e-12);

        let collinear = simplex(&[&[0.0, 0.0], &[1.0, 0.0], &[2.0, 0.0]]);
        assert_eq!(collinear.normalized_volume(), 0.0);
        assert!(collinear.is_degenerate());

        let tet = simplex(&[
            &[1.0, 1.0, 1.0],
            &[1.0, -1.0, -1.0],
            &[-1.0, 1.0, -1.0],
            &[-1.0, -1.0, 1.0],
        ]);
        // Edge length 2√2; rescale to unit edge.
        let s = 1.0 / 8f64.sqrt();
        let unit = Simplex::new(tet.vertices().iter().map(|v| v * s).collect()).unwrap();
        assert_abs_diff_eq!(unit.normalized_volume(), 2f64.sqrt() / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(unit.hausdorff_volume(), 2f64.sqrt() / 12.0, epsilon = 1e-12);

        let seg = simplex(&[&[0.0, 0.0], &[1.0, 0.0]]);
        assert_eq!(seg.height(1).unwrap(), 1.0);
    }

    #[test]
    fn equilateral_sigma_predicate() {
        let eq = simplex(&[&[0.0, 0.0], &[1.0, 0.0], &[0.5, 3f64.sqrt() / 2.0]]);
        for h in eq.heights().unwrap() {
            assert_abs_diff_eq!(h, 3f64.sqrt() / 2.0, epsilon = 1e-12);
        }
        assert!(eq.is_sigma_simplex(0.8));
        assert!(!eq.is_sigma_simplex(0.9));
        let degenerate = simplex(&[&[0.0, 0.0], &[0.0, 0.0], &[1.0, 0.0]]);
        assert!(!degenerate.is_sigma_simplex(0.0));
    }

    #[test]
    fn faces_drop_one_vertex() {
        let t = simplex(&[&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 2.0, 0.0], &[0.0, 0.0, 3.0]]);
        let f = t.face(1).unwrap();
        assert_eq!(f.vertices(), &[p(&[0.0, 0.0, 0.0]), p(&[0.0, 2.0, 0.0]), p(&[0.0, 0.0, 3.0])]);
        assert_eq!(t.face(3).unwrap().vertices()[2], p(&[0.0, 2.0, 0.0]));
        assert!(matches!(t.face(4), Err(Error::IndexOutOfRange { .. })));
        let deg = simplex(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 0.0]]);
        assert!(matches!(deg.height(0), Err(Error::DegenerateFace(0))));
    }

    #[test]
    fn max_volume_matches_brute_force() {
        let pts = vec![p(&[0.0, 0.0]), p(&[2.0, 0.1]), p(&[0.3, 1.5]), p(&[1.0, 1.0])];
        let best = max_volume_simplex(&pts, 2, SearchMode::Exact).unwrap();
        let brute = (0..4)
            .combinations(3)
            .map(|c| Simplex::new(c.iter().map(|&i| pts[i].clone()).collect()).unwrap().normalized_volume())
            .fold(0.0, f64::max);
        assert_eq!(best.volume, brute);

        let square = vec![p(&[0.0, 0.0]), p(&[1.0, 0.0]), p(&[0.0, 1.0]), p(&[1.0, 1.0])];
        let best = max_volume_simplex(&square, 2, SearchMode::Exact).unwrap();
        assert_eq!(best.indices, vec![0, 1, 2]);
        assert_abs_diff_eq!(best.simplex.hausdorff_volume(), 0.5, epsilon = 1e-15);

        let line: Vec<Point> = (0..5).map(|i| p(&[i as f64, 0.0])).collect();
        assert!(max_volume_simplex(&line, 2, SearchMode::Exact).unwrap().degenerate);
        assert!(matches!(max_volume_simplex(&line[..2], 2, SearchMode::Exact), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn greedy_is_swap_local_maximum() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<Point> = (0..30)
            .map(|_| Point::from_fn(3, |_, _| StandardNormal.sample(&mut rng)))
            .collect();
        let g = max_volume_simplex(&pts, 2, SearchMode::Greedy).unwrap();
        for pos in 0..3 {
            for cand in (0..30).filter(|c| !g.indices.contains(c)) {
                let mut trial = g.indices.clone();
                trial[pos] = cand;
                let s = Simplex::new(trial.iter().map(|&i| pts[i].clone()).collect()).unwrap();
                assert!(s.normalized_volume() <= g.volume * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn slab_cover_examples() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let near_line: Vec<Point> = (0..20)
            .map(|i| {
                let off: f64 = rand::Rng::random_range(&mut rng, -0.01..0.01);
                p(&[i as f64 * 0.05, 0.5 * i as f64 * 0.05 + off])
            })
            .collect();
        let cover = slab_cover(&near_line, 2, 0.05).unwrap();
        assert_eq!(cover.l, 1);
        assert!(near_line.iter().all(|x| cover.flat.dist(x) <= 0.05));

        let eq = vec![p(&[0.0, 0.0]), p(&[1.0, 0.0]), p(&[0.5, 3f64.sqrt() / 2.0])];
        assert!(slab_cover(&eq, 2, 0.1).is_none());

        let single = vec![p(&[0.2, 0.3])];
        let cover = slab_cover(&single, 2, 0.1).unwrap();
        assert_eq!(cover.l, 0);
        assert_eq!(cover.flat.dim(), 0);
    }

    proptest! {
        #[test]
        fn volume_factorizes_through_heights(seed in any::<u64>(), m in 1usize..4) {
            let t = random_simplex(seed, 4, m);
            prop_assume!(t.normalized_volume() > 1e-3 * t.diameter().powi(m as i32));
            let vol = t.normalized_volume();
            for i in 0..=m {
                let prod = t.height(i).unwrap() * t.face(i).unwrap().normalized_volume();
                prop_assert!((prod - vol).abs() <= 1e-9 * vol);
            }
        }

        #[test]
        fn height_ratio_identity(seed in any::<u64>(), m in 2usize..4) {
            let t = random_simplex(seed, 4, m);
            prop_assume!(t.normalized_volume() > 1e-3 * t.diameter().powi(m as i32));
            for i in 0..=m {
                for j in (0..=m).filter(|&j| j != i) {
                    // h_i(fc_j T): vertex i sits at position i or i-1 in the face.
                    let fj = t.face(j).unwrap();
                    let fi = t.face(i).unwrap();
                    let hi_fj = fj.height(if i < j { i } else { i - 1 }).unwrap();
                    let hj_fi = fi.height(if j < i { j } else { j - 1 }).unwrap();
                    let lhs = t.height(i).unwrap() / hi_fj;
                    let rhs = t.height(j).unwrap() / hj_fi;
                    prop_assert!((lhs - rhs).abs() <= 1e-8 * lhs.abs().max(rhs.abs()));
                }
            }
        }

        #[test]
        fn perturbed_sigma_simplex(seed in any::<u64>()) {
            let t = random_simplex(seed, 3, 2);
            let hs = match t.heights() { Ok(h) => h, Err(_) => return Ok(()) };
            let big_h = hs.iter().cloned().fold(f64::INFINITY, f64::min);
            prop_assume!(big_h > 1e-3);
            let small_h = big_h * 0.4;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
            let mut dir = Point::from_fn(3, |_, _| StandardNormal.sample(&mut rng));
            dir /= dir.norm();
            let mut vs = t.vertices().to_vec();
            vs[0] += dir * small_h;
            let moved = Simplex::new(vs).unwrap();
            prop_assert!(moved.is_sigma_simplex(big_h - small_h - 1e-12));
        }

        #[test]
        fn hull_distance_dominates_height(seed in any::<u64>()) {
            let t = random_simplex(seed, 4, 3);
            prop_assume!(!t.is_degenerate());
            let vs = t.vertices();
            let s: Vec<&[f64]> = vs.iter().map(|v| v.as_slice()).collect();
            for i in 0..4 {
                let h = t.height(i).unwrap();
                let others: Vec<usize> = (0..4).filter(|&j| j != i).collect();
                for k in 1..=3 {
                    for sub in others.iter().combinations(k) {
                        let pts: Vec<&[f64]> = sub.iter().map(|&&j| s[j]).collect();
                        if let Some(d) = dist_to_hull(s[i], &pts) {
                            prop_assert!(d >= h * (1.0 - 1e-10));
                        }
                    }
                }
            }
        }
    }
}
