//! Discrete differential operators and quadrature norms.
//!
//! The velocity gradient uses central differences in the interior and the
//! one-sided difference obtained from a ghost node `v₋₁ = 2v₀ − v₁` (odd
//! reflection about the boundary value) at boundary nodes. The scalar gradient
//! and the tensor divergence are *defined* as the negative adjoints of the
//! vector divergence and the velocity gradient in the weighted `L²` products;
//! working the adjoint out by hand gives plain central differences at interior
//! nodes (zero on the boundary), which is how they are evaluated. Hence
//! `⟨grad q, v⟩ = −⟨q, div v⟩` and `⟨div T, v⟩ = −⟨T, ∇v⟩` hold to round-off
//! for every `v` vanishing on the boundary.

use super::{Grid, ScalarField, TensorField, VectorField};
use crate::error::{Error, Result};
use crate::nfunction::Matrix2;

/// Derivative along x at node `(i, j)` with one-sided boundary closure.
#[inline]
fn dx_closed(f: &[f64], grid: &Grid, i: usize, j: usize) -> f64 {
    let n = grid.n();
    let inv_h = grid.n() as f64;
    let k = grid.index(i, j);
    if i == 0 {
        (f[k + 1] - f[k]) * inv_h
    } else if i == n {
        (f[k] - f[k - 1]) * inv_h
    } else {
        0.5 * (f[k + 1] - f[k - 1]) * inv_h
    }
}

#[inline]
fn dy_closed(f: &[f64], grid: &Grid, i: usize, j: usize) -> f64 {
    let n = grid.n();
    let s = grid.side();
    let inv_h = grid.n() as f64;
    let k = grid.index(i, j);
    if j == 0 {
        (f[k + s] - f[k]) * inv_h
    } else if j == n {
        (f[k] - f[k - s]) * inv_h
    } else {
        0.5 * (f[k + s] - f[k - s]) * inv_h
    }
}

/// Central x-difference at an interior node.
#[inline]
fn dx_central(f: &[f64], grid: &Grid, k: usize) -> f64 {
    0.5 * (f[k + 1] - f[k - 1]) * grid.n() as f64
}

#[inline]
fn dy_central(f: &[f64], grid: &Grid, k: usize) -> f64 {
    let s = grid.side();
    0.5 * (f[k + s] - f[k - s]) * grid.n() as f64
}

/// Full velocity gradient `(∇v)_{ab} = ∂_b v_a` at every node.
pub fn grad_vec(v: &VectorField) -> TensorField {
    let grid = v.grid();
    let (vx, vy) = (v.x(), v.y());
    let mut data = Vec::with_capacity(grid.len());
    for j in 0..grid.side() {
        for i in 0..grid.side() {
            data.push(Matrix2([
                [dx_closed(vx, &grid, i, j), dy_closed(vx, &grid, i, j)],
                [dx_closed(vy, &grid, i, j), dy_closed(vy, &grid, i, j)],
            ]));
        }
    }
    TensorField::from_values(grid, data).expect("sizes match by construction")
}

/// Symmetric gradient `εv = (∇v + ∇vᵀ)/2`.
pub fn sym_grad(v: &VectorField) -> TensorField {
    grad_vec(v).map(Matrix2::sym)
}

/// Divergence `∂_x v_x + ∂_y v_y` at every node (the trace of [`grad_vec`]).
pub fn div_vec(v: &VectorField) -> ScalarField {
    let grid = v.grid();
    let (vx, vy) = (v.x(), v.y());
    let mut out = ScalarField::zeros(grid);
    let vals = out.values_mut();
    for j in 0..grid.side() {
        for i in 0..grid.side() {
            vals[grid.index(i, j)] = dx_closed(vx, &grid, i, j) + dy_closed(vy, &grid, i, j);
        }
    }
    out
}

/// Scalar gradient, the negative adjoint of [`div_vec`]; zero on the boundary.
pub fn grad_scalar(q: &ScalarField) -> VectorField {
    let grid = q.grid();
    let f = q.values();
    let mut out = VectorField::zeros(grid);
    let (ox, oy) = out.components_mut();
    for k in grid.interior_indices() {
        ox[k] = dx_central(f, &grid, k);
        oy[k] = dy_central(f, &grid, k);
    }
    out
}

/// Row-wise tensor divergence, the negative adjoint of [`grad_vec`]; zero on
/// the boundary.
pub fn div_tensor(t: &TensorField) -> VectorField {
    let grid = t.grid();
    let len = grid.len();
    let mut comps = [vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len]];
    for (k, m) in t.iter().enumerate() {
        comps[0][k] = m.0[0][0];
        comps[1][k] = m.0[0][1];
        comps[2][k] = m.0[1][0];
        comps[3][k] = m.0[1][1];
    }
    let mut out = VectorField::zeros(grid);
    let (ox, oy) = out.components_mut();
    for k in grid.interior_indices() {
        ox[k] = dx_central(&comps[0], &grid, k) + dy_central(&comps[1], &grid, k);
        oy[k] = dx_central(&comps[2], &grid, k) + dy_central(&comps[3], &grid, k);
    }
    out
}

/// Fields with a pointwise magnitude and inner product.
pub trait NodalField {
    fn grid(&self) -> Grid;
    /// Pointwise magnitude (absolute value, Euclidean or Frobenius norm).
    fn magnitude_at(&self, k: usize) -> f64;
    /// Pointwise inner product with another field of the same kind.
    fn dot_at(&self, other: &Self, k: usize) -> f64;
}

impl NodalField for ScalarField {
    fn grid(&self) -> Grid {
        ScalarField::grid(self)
    }
    fn magnitude_at(&self, k: usize) -> f64 {
        self.values()[k].abs()
    }
    fn dot_at(&self, other: &Self, k: usize) -> f64 {
        self.values()[k] * other.values()[k]
    }
}

impl NodalField for VectorField {
    fn grid(&self) -> Grid {
        VectorField::grid(self)
    }
    fn magnitude_at(&self, k: usize) -> f64 {
        self.magnitude(k)
    }
    fn dot_at(&self, other: &Self, k: usize) -> f64 {
        self.x()[k] * other.x()[k] + self.y()[k] * other.y()[k]
    }
}

impl NodalField for TensorField {
    fn grid(&self) -> Grid {
        TensorField::grid(self)
    }
    fn magnitude_at(&self, k: usize) -> f64 {
        self.at(k).norm()
    }
    fn dot_at(&self, other: &Self, k: usize) -> f64 {
        self.at(k).dot(&other.at(k))
    }
}

/// Weighted `L²` inner product `Σ w_k a_k · b_k`.
pub fn l2_inner<F: NodalField>(a: &F, b: &F) -> Result<f64> {
    let grid = a.grid();
    grid.ensure_same(&b.grid())?;
    Ok(dot(a, b))
}

/// Weighted inner product without the grid check.
pub(crate) fn dot<F: NodalField>(a: &F, b: &F) -> f64 {
    let grid = a.grid();
    (0..grid.len()).map(|k| grid.weight_at(k) * a.dot_at(b, k)).sum()
}

pub(crate) fn norm<F: NodalField>(a: &F) -> f64 {
    dot(a, a).sqrt()
}

/// Quadrature norm `(Σ w_k |f_k|^r)^{1/r}`, or the maximum for `r = ∞`.
/// `(‖q‖² + ‖∇q‖²)^{1/2}` with the interior central gradient.
pub fn w12_norm(q: &ScalarField) -> f64 {
    let g = grad_scalar(q);
    (dot(q, q) + dot(&g, &g)).sqrt()
}

pub fn lp_norm<F: NodalField>(f: &F, r: f64) -> Result<f64> {
    if r.is_nan() || r < 1.0 {
        return Err(Error::InvalidArgument(format!("norm exponent must lie in [1, inf], got {r}")));
    }
    let grid = f.grid();
    if r.is_infinite() {
        return Ok((0..grid.len()).map(|k| f.magnitude_at(k)).fold(0.0, f64::max));
    }
    let scale = (0..grid.len()).map(|k| f.magnitude_at(k)).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = (0..grid.len())
        .map(|k| grid.weight_at(k) * (f.magnitude_at(k) / scale).powf(r))
        .sum();
    Ok(scale * sum.powf(1.0 / r))
}
