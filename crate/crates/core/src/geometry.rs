//! Affine subspaces of `R^N`, orthogonal projections, the operator-norm angle
//! between subspaces, and Gram–Schmidt with coefficient tracking.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// A point (or vector) in the ambient space `R^N`.
pub type Point = DVector<f64>;

/// Tolerance for orthonormality of stored bases and for linear independence
/// in [`gram_schmidt_tracked`].
pub const ORTHO_TOL: f64 = 1e-10;

/// Angles at or above `1 - STEEP_TOL` cannot be written as graphs.
pub const STEEP_TOL: f64 = 1e-9;

/// An affine subspace `base + span(basis)` with an orthonormal basis stored
/// column-wise in an `N × m` matrix. `m = 0` is a single point.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineSubspace {
    base: Point,
    basis: DMatrix<f64>,
}

impl AffineSubspace {
    /// Builds a subspace from a base point and an already orthonormal basis
    /// (columns of `basis`).
    pub fn from_orthonormal(base: Point, basis: DMatrix<f64>) -> Result<Self> {
        if basis.nrows() != base.len() {
            return Err(Error::DimMismatch { expected: base.len(), actual: basis.nrows() });
        }
        let gram = basis.transpose() * &basis;
        let dev = (gram - DMatrix::identity(basis.ncols(), basis.ncols())).amax();
        if dev > ORTHO_TOL {
            return Err(Error::DegenerateInput(format!(
                "basis is not orthonormal (deviation {dev:e})"
            )));
        }
        Ok(Self { base, basis })
    }

    /// The subspace through `base` spanned by `directions`, which are
    /// orthonormalized first.
    pub fn spanned_by(base: Point, directions: &[Point]) -> Result<Self> {
        for d in directions {
            check_dim(base.len(), d.len())?;
        }
        let gs = gram_schmidt_tracked(directions)?;
        Ok(Self { basis: columns(base.len(), &gs.basis), base })
    }

    /// The point subspace `{x}`.
    pub fn point(x: Point) -> Self {
        let n = x.len();
        Self { base: x, basis: DMatrix::zeros(n, 0) }
    }

    /// The linear subspace spanned by the first `m` coordinate axes.
    pub fn coordinate(ambient: usize, m: usize) -> Self {
        assert!(m <= ambient, "coordinate subspace larger than ambient space");
        let mut basis = DMatrix::zeros(ambient, m);
        for i in 0..m {
            basis[(i, i)] = 1.0;
        }
        Self { base: Point::zeros(ambient), basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.len()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    /// Orthonormal basis vectors as columns.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Whether the subspace is all of `R^N`.
    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim()
    }

    /// Coordinates of the projection of `x` in the stored basis.
    pub fn coordinates(&self, x: &Point) -> DVector<f64> {
        self.basis.tr_mul(&(x - &self.base))
    }

    /// The point with the given coordinates.
    pub fn at(&self, coords: &DVector<f64>) -> Point {
        &self.base + &self.basis * coords
    }

    /// Orthogonal projection onto the subspace.
    pub fn project(&self, x: &Point) -> Point {
        self.at(&self.coordinates(x))
    }

    /// `x - project(x)`, computed from the offset to the base point.
    pub fn residual(&self, x: &Point) -> Point {
        let v = x - &self.base;
        let c = self.basis.tr_mul(&v);
        v - &self.basis * c
    }

    /// Euclidean distance from `x` to the subspace.
    pub fn dist(&self, x: &Point) -> f64 {
        self.residual(x).norm()
    }

    pub fn contains(&self, x: &Point, tol: f64) -> bool {
        self.dist(x) <= tol
    }

    /// The parallel linear subspace, i.e. the subspace translated to pass
    /// through the origin.
    pub fn linear_part(&self) -> Self {
        Self { base: Point::zeros(self.ambient_dim()), basis: self.basis.clone() }
    }

    /// The parallel subspace through `base`.
    pub fn through(&self, base: Point) -> Self {
        Self { base, basis: self.basis.clone() }
    }

    pub fn translated(&self, b: &Point) -> Self {
        Self { base: &self.base + b, basis: self.basis.clone() }
    }

    /// Image under `x ↦ s·x`.
    pub fn scaled(&self, s: f64) -> Self {
        Self { base: &self.base * s, basis: self.basis.clone() }
    }

    /// Matrix of the orthogonal projection onto the parallel linear subspace.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    /// Orthonormal basis of the orthogonal complement of the parallel linear
    /// subspace, as columns of an `N × (N - m)` matrix.
    pub fn complement_basis(&self) -> DMatrix<f64> {
        orthonormal_complement(&self.basis)
    }

    /// A point of the subspace closest to the origin.
    pub fn foot_of_origin(&self) -> Point {
        self.project(&Point::zeros(self.ambient_dim()))
    }
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimMismatch { expected, actual })
    }
}

fn columns(rows: usize, vs: &[Point]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(rows, vs.len());
    for (j, v) in vs.iter().enumerate() {
        m.set_column(j, v);
    }
    m
}

/// Orthogonal projection of `x` onto `plane`.
pub fn project(plane: &AffineSubspace, x: &Point) -> Point {
    plane.project(x)
}

/// Distance from `x` to `plane`.
pub fn dist_to_subspace(x: &Point, plane: &AffineSubspace) -> f64 {
    plane.dist(x)
}

/// Removes from `v` its components along the orthonormal `basis`, twice for
/// numerical stability. Returns the accumulated coefficients.
fn orthogonalize(v: &mut Point, basis: &[Point]) -> Vec<f64> {
    let mut coeffs = vec![0.0; basis.len()];
    for _ in 0..2 {
        for (c, o) in coeffs.iter_mut().zip(basis) {
            let proj = o.dot(v);
            v.axpy(-proj, o, 1.0);
            *c += proj;
        }
    }
    coeffs
}

/// Smallest affine subspace containing `points` up to `rank_tol`.
///
/// Directions are added greedily: the point farthest from the current flat
/// (lowest index on ties) extends it until every point lies within
/// `rank_tol`. Returns a full-dimensional subspace when the points span `R^N`.
pub fn affine_hull(points: &[Point], rank_tol: f64) -> Result<AffineSubspace> {
    let first = points.first().ok_or(Error::TooFewPoints { needed: 1, got: 0 })?;
    let ambient = first.len();
    for p in points {
        check_dim(ambient, p.len())?;
    }
    let mut basis: Vec<Point> = Vec::new();
    while basis.len() < ambient {
        let mut best: Option<(f64, Point)> = None;
        for p in points {
            let mut r = p - first;
            orthogonalize(&mut r, &basis);
            let d = r.norm();
            if best.as_ref().is_none_or(|(bd, _)| d > *bd) {
                best = Some((d, r));
            }
        }
        let Some((d, mut r)) = best else { break };
        if d <= rank_tol {
            break;
        }
        orthogonalize(&mut r, &basis);
        let norm = r.norm();
        basis.push(r / norm);
    }
    Ok(AffineSubspace { basis: columns(ambient, &basis), base: first.clone() })
}

/// Default rank tolerance for [`affine_hull`]: `1e-8` times the largest
/// point norm.
pub fn default_rank_tol(points: &[Point]) -> f64 {
    let scale = points.iter().map(|p| p.norm()).fold(0.0, f64::max);
    if scale > 0.0 {
        1e-8 * scale
    } else {
        1e-8
    }
}

/// Orthonormal basis produced by Gram–Schmidt together with the
/// lower-triangular coefficients `coeffs[l][r]` satisfying
/// `basis[l] = Σ_{r ≤ l} coeffs[l][r] · input[r]`.
#[derive(Clone, Debug)]
pub struct TrackedBasis {
    pub basis: Vec<Point>,
    pub coeffs: Vec<Vec<f64>>,
}

/// Gram–Schmidt orthonormalization (with one reorthogonalization pass) that
/// tracks how each output vector is combined from the inputs.
pub fn gram_schmidt_tracked(vectors: &[Point]) -> Result<TrackedBasis> {
    let mut basis: Vec<Point> = Vec::with_capacity(vectors.len());
    let mut coeffs: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for (l, v) in vectors.iter().enumerate() {
        if l > 0 {
            check_dim(vectors[0].len(), v.len())?;
        }
        let mut w = v.clone();
        let c = orthogonalize(&mut w, &basis);
        let norm = w.norm();
        let scale = v.norm();
        if scale == 0.0 || norm <= ORTHO_TOL * scale {
            return Err(Error::DegenerateInput(format!(
                "vector {l} lies in the span of the previous ones"
            )));
        }
        let diag = 1.0 / norm;
        let mut row = vec![0.0; l + 1];
        row[l] = diag;
        for r in 0..l {
            let s: f64 = (r..l).map(|i| c[i] * coeffs[i][r]).sum();
            row[r] = -diag * s;
        }
        basis.push(w * diag);
        coeffs.push(row);
    }
    Ok(TrackedBasis { basis, coeffs })
}

/// Orthonormal basis of the orthogonal complement of the column span of the
/// orthonormal matrix `basis`.
pub fn orthonormal_complement(basis: &DMatrix<f64>) -> DMatrix<f64> {
    let n = basis.nrows();
    let mut current: Vec<Point> = basis.column_iter().map(|c| c.into_owned()).collect();
    let mut out = Vec::new();
    while current.len() < n {
        // Pick the coordinate axis with the largest residual; its squared
        // norm is at least (remaining dims)/N, so this never stalls.
        let mut best: Option<(f64, Point)> = None;
        for k in 0..n {
            let mut e = Point::zeros(n);
            e[k] = 1.0;
            orthogonalize(&mut e, &current);
            let d = e.norm();
            if best.as_ref().is_none_or(|(bd, _)| d > *bd) {
                best = Some((d, e));
            }
        }
        let (d, e) = best.expect("ambient dimension is positive");
        let o = e / d;
        current.push(o.clone());
        out.push(o);
    }
    columns(n, &out)
}

/// Operator-norm angle `‖π_{G1} − π_{G2}‖` between the linear parts of two
/// subspaces of equal dimension. Lies in `[0, 1]`.
pub fn angle(p1: &AffineSubspace, p2: &AffineSubspace) -> Result<f64> {
    check_dim(p1.ambient_dim(), p2.ambient_dim())?;
    check_dim(p1.dim(), p2.dim())?;
    Ok(angle_unchecked(p1.basis(), p2.basis()))
}

pub(crate) fn angle_unchecked(b1: &DMatrix<f64>, b2: &DMatrix<f64>) -> f64 {
    let diff = b1 * b1.transpose() - b2 * b2.transpose();
    let eig = SymmetricEigen::new(diff);
    eig.eigenvalues.amax().clamp(0.0, 1.0)
}

/// An affine map from a subspace `G` into its orthogonal complement,
/// `a(u) = C (offset + L c(u))` where `c(u)` are the coordinates of `u` in
/// the basis of `G` and `C` is an orthonormal basis of `G^⊥`.
#[derive(Clone, Debug)]
pub struct AffineMap {
    domain: AffineSubspace,
    complement: DMatrix<f64>,
    linear: DMatrix<f64>,
    offset: DVector<f64>,
}

impl AffineMap {
    /// The zero map over `domain`.
    pub fn zero(domain: AffineSubspace) -> Self {
        let complement = domain.complement_basis();
        let linear = DMatrix::zeros(complement.ncols(), domain.dim());
        let offset = DVector::zeros(complement.ncols());
        Self { domain, complement, linear, offset }
    }

    pub fn domain(&self) -> &AffineSubspace {
        &self.domain
    }

    /// Orthonormal basis of `G^⊥` used for the values.
    pub fn complement(&self) -> &DMatrix<f64> {
        &self.complement
    }

    /// Linear block, `(N - m) × m`.
    pub fn linear(&self) -> &DMatrix<f64> {
        &self.linear
    }

    /// Value at the origin of the domain, in complement coordinates.
    pub fn offset(&self) -> &DVector<f64> {
        &self.offset
    }

    /// Value in complement coordinates at domain coordinates `c`.
    pub fn eval_coords(&self, c: &DVector<f64>) -> DVector<f64> {
        &self.offset + &self.linear * c
    }

    /// Value (a vector in `G^⊥`) at the projection of `u` onto the domain.
    pub fn eval(&self, u: &Point) -> Point {
        &self.complement * self.eval_coords(&self.domain.coordinates(u))
    }

    /// The graph point `π_G(u) + a(u)`.
    pub fn graph_point(&self, u: &Point) -> Point {
        let c = self.domain.coordinates(u);
        self.domain.at(&c) + &self.complement * self.eval_coords(&c)
    }

    /// Lipschitz constant, the spectral norm of the linear block.
    pub fn lipschitz(&self) -> f64 {
        spectral_norm(&self.linear)
    }
}

pub(crate) fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

/// Writes `plane` as the graph of an affine map over `domain`.
pub fn plane_as_graph(plane: &AffineSubspace, domain: &AffineSubspace) -> Result<AffineMap> {
    check_dim(domain.ambient_dim(), plane.ambient_dim())?;
    check_dim(domain.dim(), plane.dim())?;
    let ang = angle(plane, domain)?;
    if ang >= 1.0 - STEEP_TOL {
        return Err(Error::TooSteep { angle: ang });
    }
    let b = domain.basis();
    let q = plane.basis();
    let complement = domain.complement_basis();
    // A direction q_j of the plane splits as B(Bᵀq_j) + C(Cᵀq_j); the map
    // sends the domain component to the complement component.
    let btq = b.tr_mul(q);
    let ctq = complement.tr_mul(q);
    let inv = btq.try_inverse().ok_or(Error::TooSteep { angle: ang })?;
    let linear = ctq * inv;
    let v = plane.base() - domain.base();
    let offset = complement.tr_mul(&v) - &linear * b.tr_mul(&v);
    Ok(AffineMap { domain: domain.clone(), complement, linear, offset })
}
