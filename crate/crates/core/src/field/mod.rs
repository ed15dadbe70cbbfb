//! Uniform collocated grid on the unit square and nodal fields.
//!
//! Nodes are `(i, j)` with `0 ≤ i, j ≤ n`, `x = i·h`, `y = j·h`, `h = 1/n`,
//! stored row-major (`k = j·(n+1) + i`). Discrete integrals use the
//! trapezoidal weights `h² ω_i ω_j` with `ω = 1/2` on the boundary, so the
//! weights sum to the area of the square exactly.

mod io;
mod ops;

pub use io::{read_csv, write_csv, CsvField};
pub use ops::{div_tensor, div_vec, grad_scalar, grad_vec, l2_inner, lp_norm, sym_grad, w12_norm, NodalField};
pub(crate) use ops::{dot, norm};

use crate::error::{Error, Result};
use crate::nfunction::Matrix2;

/// `n` cells per side of the unit square; `n ≥ 4` and a power of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "cells per side must be a power of two >= 4, got {n}"
            )));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Spacing, always derived as `1/n`.
    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Nodes per side, `n + 1`.
    pub fn side(&self) -> usize {
        self.n + 1
    }

    /// Total number of nodes.
    pub fn len(&self) -> usize {
        self.side() * self.side()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.side() + i
    }

    #[inline]
    pub fn coords(&self, k: usize) -> (usize, usize) {
        (k % self.side(), k / self.side())
    }

    #[inline]
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.n || j == self.n
    }

    /// Position of node `(i, j)`.
    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        (i as f64 * self.h(), j as f64 * self.h())
    }

    #[inline]
    fn edge_factor(&self, i: usize) -> f64 {
        if i == 0 || i == self.n {
            0.5
        } else {
            1.0
        }
    }

    /// Quadrature weight of node `(i, j)`.
    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let h = self.h();
        h * h * self.edge_factor(i) * self.edge_factor(j)
    }

    #[inline]
    pub fn weight_at(&self, k: usize) -> f64 {
        let (i, j) = self.coords(k);
        self.weight(i, j)
    }

    /// Number of interior nodes, `(n−1)²`.
    pub fn interior_len(&self) -> usize {
        (self.n - 1) * (self.n - 1)
    }

    /// Node indices of the interior in row-major order.
    pub fn interior_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (1..self.n).flat_map(move |j| (1..self.n).map(move |i| self.index(i, j)))
    }

    /// Quadrature weights of all nodes.
    pub fn weights(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.weight_at(k)).collect()
    }

    pub(crate) fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }
}

/// One real value per node.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    data: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            data: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Self {
            grid,
            data: vec![value; grid.len()],
        }
    }

    /// Samples `f(x, y)` at every node.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut field = Self::zeros(grid);
        for j in 0..grid.side() {
            for i in 0..grid.side() {
                let (x, y) = grid.point(i, j);
                field.data[grid.index(i, j)] = f(x, y);
            }
        }
        field
    }

    pub fn from_values(grid: Grid, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "scalar field needs {} values, got {}",
                grid.len(),
                data.len()
            )));
        }
        Ok(Self { grid, data })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.grid.index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let k = self.grid.index(i, j);
        self.data[k] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_values(self) -> Vec<f64> {
        self.data
    }

    /// Quadrature mean over the unit square.
    pub fn mean(&self) -> f64 {
        self.data
            .iter()
            .enumerate()
            .map(|(k, v)| self.grid.weight_at(k) * v)
            .sum()
    }

    /// Subtracts the quadrature mean in place.
    pub fn remove_mean(&mut self) {
        let m = self.mean();
        self.data.iter_mut().for_each(|v| *v -= m);
    }

    pub fn scale(&mut self, a: f64) {
        self.data.iter_mut().for_each(|v| *v *= a);
    }

    /// `self += a · other`.
    pub fn axpy(&mut self, a: f64, other: &ScalarField) {
        debug_assert_eq!(self.grid, other.grid);
        self.data.iter_mut().zip(&other.data).for_each(|(s, o)| *s += a * o);
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Two components per node, zero on the boundary (homogeneous Dirichlet data)
/// unless explicitly built with [`VectorField::from_fn_unmasked`].
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl VectorField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            x: vec![0.0; grid.len()],
            y: vec![0.0; grid.len()],
        }
    }

    /// Samples `f(x, y)` at interior nodes; boundary values are zero.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64, f64) -> [f64; 2]) -> Self {
        let mut field = Self::zeros(grid);
        for j in 1..grid.n() {
            for i in 1..grid.n() {
                let (x, y) = grid.point(i, j);
                let [a, b] = f(x, y);
                let k = grid.index(i, j);
                field.x[k] = a;
                field.y[k] = b;
            }
        }
        field
    }

    /// Samples `f` at every node, boundary included. Such fields violate the
    /// Dirichlet mask; they exist for consistency tests of the stencils.
    pub fn from_fn_unmasked(grid: Grid, mut f: impl FnMut(f64, f64) -> [f64; 2]) -> Self {
        let mut field = Self::zeros(grid);
        for j in 0..grid.side() {
            for i in 0..grid.side() {
                let (x, y) = grid.point(i, j);
                let [a, b] = f(x, y);
                let k = grid.index(i, j);
                field.x[k] = a;
                field.y[k] = b;
            }
        }
        field
    }

    /// Builds a field from full nodal component arrays; boundary entries must
    /// be zero.
    pub fn from_components(grid: Grid, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != grid.len() || y.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "vector field needs {} values per component",
                grid.len()
            )));
        }
        let field = Self { grid, x, y };
        if !field.satisfies_mask() {
            return Err(Error::InvalidArgument(
                "vector field is nonzero on the boundary".into(),
            ));
        }
        Ok(field)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn get(&self, i: usize, j: usize) -> [f64; 2] {
        let k = self.grid.index(i, j);
        [self.x[k], self.y[k]]
    }

    pub fn at(&self, k: usize) -> [f64; 2] {
        [self.x[k], self.y[k]]
    }

    pub fn set(&mut self, i: usize, j: usize, value: [f64; 2]) {
        let k = self.grid.index(i, j);
        self.x[k] = value[0];
        self.y[k] = value[1];
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub(crate) fn components_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.x, &mut self.y)
    }

    /// Pointwise Euclidean length.
    pub fn magnitude(&self, k: usize) -> f64 {
        self.x[k].hypot(self.y[k])
    }

    pub fn satisfies_mask(&self) -> bool {
        let n = self.grid.n();
        (0..self.grid.side()).all(|t| {
            [(t, 0), (t, n), (0, t), (n, t)].iter().all(|&(i, j)| {
                let k = self.grid.index(i, j);
                self.x[k] == 0.0 && self.y[k] == 0.0
            })
        })
    }

    /// Zeroes the boundary values.
    pub fn apply_mask(&mut self) {
        let n = self.grid.n();
        for t in 0..self.grid.side() {
            for (i, j) in [(t, 0), (t, n), (0, t), (n, t)] {
                let k = self.grid.index(i, j);
                self.x[k] = 0.0;
                self.y[k] = 0.0;
            }
        }
    }

    pub fn scale(&mut self, a: f64) {
        self.x.iter_mut().chain(self.y.iter_mut()).for_each(|v| *v *= a);
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// `self += a · other`.
    pub fn axpy(&mut self, a: f64, other: &VectorField) {
        debug_assert_eq!(self.grid, other.grid);
        for (s, o) in self.x.iter_mut().zip(&other.x) {
            *s += a * o;
        }
        for (s, o) in self.y.iter_mut().zip(&other.y) {
            *s += a * o;
        }
    }

    /// `self − other`.
    pub fn difference(&self, other: &VectorField) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(&self.y).all(|v| v.is_finite())
    }

    /// Full nodal layout `[x…, y…]` used by the iterative solvers.
    pub(crate) fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.x.len());
        out.extend_from_slice(&self.x);
        out.extend_from_slice(&self.y);
        out
    }

    /// Inverse of [`VectorField::to_flat`]; the mask is not re-checked.
    pub(crate) fn from_flat(grid: Grid, flat: &[f64]) -> Self {
        let len = grid.len();
        debug_assert_eq!(flat.len(), 2 * len);
        Self {
            grid,
            x: flat[..len].to_vec(),
            y: flat[len..].to_vec(),
        }
    }

    /// Interior degrees of freedom `[x-components…, y-components…]`.
    pub fn to_interior_vec(&self) -> Vec<f64> {
        let idx: Vec<usize> = self.grid.interior_indices().collect();
        idx.iter().map(|&k| self.x[k]).chain(idx.iter().map(|&k| self.y[k])).collect()
    }

    /// Inverse of [`VectorField::to_interior_vec`].
    pub fn from_interior_vec(grid: Grid, dofs: &[f64]) -> Result<Self> {
        let m = grid.interior_len();
        if dofs.len() != 2 * m {
            return Err(Error::InvalidArgument(format!(
                "expected {} interior values, got {}",
                2 * m,
                dofs.len()
            )));
        }
        let mut field = Self::zeros(grid);
        for (r, k) in grid.interior_indices().enumerate() {
            field.x[k] = dofs[r];
            field.y[k] = dofs[m + r];
        }
        Ok(field)
    }
}

/// A 2×2 matrix per node.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField {
    grid: Grid,
    data: Vec<Matrix2>,
}

impl TensorField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            data: vec![Matrix2::ZERO; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64, f64) -> Matrix2) -> Self {
        let mut field = Self::zeros(grid);
        for j in 0..grid.side() {
            for i in 0..grid.side() {
                let (x, y) = grid.point(i, j);
                field.data[grid.index(i, j)] = f(x, y);
            }
        }
        field
    }

    pub fn from_values(grid: Grid, data: Vec<Matrix2>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "tensor field needs {} values, got {}",
                grid.len(),
                data.len()
            )));
        }
        Ok(Self { grid, data })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn get(&self, i: usize, j: usize) -> Matrix2 {
        self.data[self.grid.index(i, j)]
    }

    pub fn at(&self, k: usize) -> Matrix2 {
        self.data[k]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Matrix2) {
        let k = self.grid.index(i, j);
        self.data[k] = value;
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Matrix2> {
        self.data.iter()
    }

    pub fn values(&self) -> &[Matrix2] {
        &self.data
    }

    /// Applies `f` at every node.
    pub fn map(&self, mut f: impl FnMut(&Matrix2) -> Matrix2) -> Self {
        Self {
            grid: self.grid,
            data: self.data.iter().map(&mut f).collect(),
        }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_map(&self, other: &TensorField, mut f: impl FnMut(&Matrix2, &Matrix2) -> Matrix2) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.data.iter().all(|m| (m.0[0][1] - m.0[1][0]).abs() <= tol)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(Matrix2::is_finite)
    }
}
