//! L¹ affine-approximation numbers of a vector-valued function on balls.

use nalgebra::{DMatrix, DVector};

use crate::beta::irls_plane_fit;
use crate::error::{Error, Result};
use crate::geometry::Point;

/// Quadrature and fitting settings.
#[derive(Clone, Copy, Debug)]
pub struct GammaOptions {
    /// Cells per axis of the quadrature grid; `None` picks by dimension.
    pub cells_per_axis: Option<usize>,
    pub max_iters: usize,
    /// Residuals are smoothed by `tol · t` in the reweighting.
    pub tol: f64,
}

impl Default for GammaOptions {
    fn default() -> Self {
        Self { cells_per_axis: None, max_iters: 200, tol: 1e-7 }
    }
}

impl GammaOptions {
    fn cells(&self, n: usize) -> usize {
        self.cells_per_axis.unwrap_or(match n {
            1 => 512,
            2 => 64,
            _ => 12,
        })
    }
}

#[derive(Clone, Debug)]
pub struct GammaResult {
    pub value: f64,
    /// Fitted affine map `u ↦ offset + linear (u - q)`.
    pub offset: DVector<f64>,
    pub linear: DMatrix<f64>,
}

/// Cell-centered quadrature nodes and weights on the ball `B(q, t)`.
fn quadrature(q: &DVector<f64>, t: f64, cells: usize) -> Vec<(DVector<f64>, f64)> {
    let n = q.len();
    let h = 2.0 * t / cells as f64;
    let w = h.powi(n as i32);
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let off = DVector::from_iterator(n, idx.iter().map(|&j| -t + (j as f64 + 0.5) * h));
        if off.norm() <= t {
            out.push((q + off, w));
        }
        let mut k = 0;
        while k < n {
            idx[k] += 1;
            if idx[k] < cells {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
    }
    out
}

/// Quadrature node, function value and weight.
type Sample = (DVector<f64>, DVector<f64>, f64);

fn sample<F>(g: &F, q: &DVector<f64>, t: f64, opts: &GammaOptions) -> Result<Vec<Sample>>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>>,
{
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::BadParams(format!("radius must be positive, got {t}")));
    }
    quadrature(q, t, opts.cells(q.len()))
        .into_iter()
        .map(|(u, w)| Ok((g(&u)?, u, w)))
        .map(|r: Result<_>| r.map(|(v, u, w)| (u, v, w)))
        .collect()
}

fn weighted_affine_fit(
    rows: &[Sample],
    q: &DVector<f64>,
    weights: &[f64],
) -> (DVector<f64>, DMatrix<f64>) {
    let n = q.len();
    let m = rows[0].1.len();
    let mut ata = DMatrix::<f64>::zeros(n + 1, n + 1);
    let mut atb = DMatrix::<f64>::zeros(n + 1, m);
    for ((u, v, _), &w) in rows.iter().zip(weights) {
        let mut x = DVector::zeros(n + 1);
        x[0] = 1.0;
        x.rows_mut(1, n).copy_from(&(u - q));
        ata += &x * x.transpose() * w;
        atb += &x * v.transpose() * w;
    }
    let coef = ata.clone().cholesky().map(|c| c.solve(&atb)).unwrap_or_else(|| {
        ata.pseudo_inverse(1e-14).expect("pseudo-inverse of a symmetric matrix") * &atb
    });
    let offset = coef.row(0).transpose();
    let linear = coef.rows(1, n).transpose();
    (offset, linear)
}

/// `γ(q, t) = inf_a t^{-n-1} ∫_{B(q,t)} |g(u) - a(u)| du` over affine `a`,
/// approximated on a quadrature grid by reweighted least squares.
/// Fails with `OutOfDomain` when `g` is undefined somewhere in the ball.
pub fn gamma<F>(g: F, q: &DVector<f64>, t: f64, opts: &GammaOptions) -> Result<GammaResult>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>>,
{
    let rows = sample(&g, q, t, opts)?;
    let n = q.len();
    let norm = t.powi(n as i32 + 1);
    let objective = |offset: &DVector<f64>, linear: &DMatrix<f64>| -> f64 {
        rows.iter().map(|(u, v, w)| w * (v - offset - linear * (u - q)).norm()).sum()
    };
    let base: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let (mut offset, mut linear) = weighted_affine_fit(&rows, q, &base);
    let mut current = objective(&offset, &linear);
    let mut best = (current, offset.clone(), linear.clone());
    for _ in 0..opts.max_iters {
        if current == 0.0 {
            break;
        }
        let w: Vec<f64> = rows
            .iter()
            .map(|(u, v, w)| w / ((v - &offset - &linear * (u - q)).norm() + opts.tol * t))
            .collect();
        (offset, linear) = weighted_affine_fit(&rows, q, &w);
        let next = objective(&offset, &linear);
        if next < best.0 {
            best = (next, offset.clone(), linear.clone());
        }
        let converged = (current - next).abs() <= 1e-12 * current;
        current = next;
        if converged {
            break;
        }
    }
    Ok(GammaResult { value: best.0 / norm, offset: best.1, linear: best.2 })
}

/// The plane variant: `t^{-n-1}` times the smallest L¹ distance from the
/// lifted points `(u, g(u))` to an `n`-plane in the product space.
pub fn gamma_tilde<F>(g: F, q: &DVector<f64>, t: f64, opts: &GammaOptions) -> Result<f64>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>>,
{
    let rows = sample(&g, q, t, opts)?;
    let n = q.len();
    let lifted: Vec<Point> = rows
        .iter()
        .map(|(u, v, _)| DVector::from_iterator(n + v.len(), u.iter().chain(v.iter()).copied()))
        .collect();
    let refs: Vec<&Point> = lifted.iter().collect();
    let weights: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let (_, sum) = irls_plane_fit(&refs, &weights, n, 1.0, opts.tol * t, opts.max_iters);
    Ok(sum / t.powi(n as i32 + 1))
}
