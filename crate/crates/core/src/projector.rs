//! Discrete Helmholtz–Leray projection and the Bogovskii operator.
//!
//! With `L = div_vec ∘ grad_scalar` (self-adjoint, negative semidefinite in
//! the weighted product) the potential of `v` is the minimal-norm solution of
//! `L G = div v`; then `Π⊥v = ∇G` and `Πv = v − ∇G`. Minimal norm means
//! orthogonal to the kernel of the scalar gradient, which contains the
//! constants, so `G` has zero mean.
//!
//! Collocated central differences have a larger kernel than the constants:
//! the indicator of each of the four parity classes `(i mod 2, j mod 2)`
//! (corners excluded) and each corner node. The range of the divergence is
//! the orthogonal complement of that 8-dimensional space. The Bogovskii
//! operator here is the minimal-`∇`-norm least-squares right inverse, so
//! `div B g = g` holds exactly when `g` lies in that range (for instance when
//! `g = div v` or `g` is a sine product), and in general `div B g` is the
//! orthogonal projection of `g` onto the range.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{self, div_tensor, div_vec, grad_scalar, grad_vec, Grid, ScalarField, TensorField, VectorField};
use crate::linalg::{conjugate_gradient, power_iteration, wdot, BlockPseudoInverse};

/// Largest grid solved with the dense block pseudo-inverse under
/// [`HelmholtzBackend::Auto`].
pub const DENSE_MAX_CELLS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HelmholtzBackend {
    #[default]
    Auto,
    /// Eigendecomposition of each connected block of `L`, assembled once.
    Dense,
    /// Weighted conjugate gradients per solve.
    Iterative,
}

#[derive(Debug, Clone)]
enum Solver {
    Dense(BlockPseudoInverse),
    Iterative,
}

/// Result of [`HelmholtzOperator::leray_project`]; `v_div + v_grad = v`.
#[derive(Debug, Clone, PartialEq)]
pub struct HelmholtzSplit {
    pub v_div: VectorField,
    pub v_grad: VectorField,
    pub potential: ScalarField,
}

/// The Neumann–Poisson solve behind `Π`, fixed to one grid.
#[derive(Debug, Clone)]
pub struct HelmholtzOperator {
    grid: Grid,
    weights: Vec<f64>,
    kernel: Vec<Vec<f64>>,
    solver: Solver,
    tol: f64,
    max_iter: usize,
}

/// `w`-orthonormal basis of the kernel of [`grad_scalar`].
fn gradient_kernel(grid: Grid) -> Vec<Vec<f64>> {
    let n = grid.n();
    let corners = [(0, 0), (n, 0), (0, n), (n, n)];
    let is_corner = |i: usize, j: usize| corners.contains(&(i, j));
    let mut basis = Vec::with_capacity(8);
    for (pi, pj) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
        let mut v = vec![0.0; grid.len()];
        for j in 0..grid.side() {
            for i in 0..grid.side() {
                if i % 2 == pi && j % 2 == pj && !is_corner(i, j) {
                    v[grid.index(i, j)] = 1.0;
                }
            }
        }
        basis.push(v);
    }
    for (i, j) in corners {
        let mut v = vec![0.0; grid.len()];
        v[grid.index(i, j)] = 1.0;
        basis.push(v);
    }
    // Disjoint supports: normalising is enough.
    let w = grid.weights();
    for v in &mut basis {
        let norm = wdot(&w, v, v).sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
    }
    basis
}

fn apply_laplacian(grid: Grid, x: &[f64], out: &mut [f64]) {
    let q = ScalarField::from_values(grid, x.to_vec()).expect("length checked by caller");
    out.copy_from_slice(div_vec(&grad_scalar(&q)).values());
}

impl HelmholtzOperator {
    pub fn new(grid: Grid) -> Result<Self> {
        Self::with_backend(grid, HelmholtzBackend::Auto)
    }

    pub fn with_backend(grid: Grid, backend: HelmholtzBackend) -> Result<Self> {
        let dense = match backend {
            HelmholtzBackend::Auto => grid.n() <= DENSE_MAX_CELLS,
            HelmholtzBackend::Dense => true,
            HelmholtzBackend::Iterative => false,
        };
        let weights = grid.weights();
        let solver = if dense {
            let pinv = BlockPseudoInverse::assemble(
                &weights,
                |c, out| {
                    let mut e = vec![0.0; grid.len()];
                    e[c] = 1.0;
                    apply_laplacian(grid, &e, out);
                },
                1e-10,
            )?;
            Solver::Dense(pinv)
        } else {
            Solver::Iterative
        };
        Ok(Self {
            grid,
            weights,
            kernel: gradient_kernel(grid),
            solver,
            tol: 1e-10,
            max_iter: 10 * grid.n() * grid.n(),
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn backend(&self) -> HelmholtzBackend {
        match self.solver {
            Solver::Dense(_) => HelmholtzBackend::Dense,
            Solver::Iterative => HelmholtzBackend::Iterative,
        }
    }

    /// Dimension of the numerical kernel of `L` (8 on every grid; the dense
    /// backend measures it, the iterative one uses the known basis).
    pub fn kernel_dim(&self) -> usize {
        match &self.solver {
            Solver::Dense(p) => p.kernel_dim(),
            Solver::Iterative => self.kernel.len(),
        }
    }

    /// Relative tolerance of the iterative backend.
    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    fn remove_kernel(&self, x: &mut [f64]) {
        for b in &self.kernel {
            let c = wdot(&self.weights, b, x);
            x.iter_mut().zip(b).for_each(|(x, b)| *x -= c * b);
        }
    }

    /// Minimal-norm least-squares solution `G` of `L G = f`.
    pub fn solve_potential(&self, f: &ScalarField) -> Result<ScalarField> {
        self.grid.ensure_same(&f.grid())?;
        let mut rhs = f.values().to_vec();
        self.remove_kernel(&mut rhs);
        let mut x = vec![0.0; self.grid.len()];
        match &self.solver {
            Solver::Dense(p) => p.solve(&rhs, &mut x),
            Solver::Iterative => {
                let grid = self.grid;
                let neg_rhs: Vec<f64> = rhs.iter().map(|v| -v).collect();
                conjugate_gradient(
                    "helmholtz",
                    |x, out| {
                        apply_laplacian(grid, x, out);
                        out.iter_mut().for_each(|v| *v = -*v);
                    },
                    &self.weights,
                    &neg_rhs,
                    &mut x,
                    self.tol,
                    0.0,
                    self.max_iter,
                )?;
            }
        }
        self.remove_kernel(&mut x);
        Ok(ScalarField::from_values(self.grid, x).expect("length matches grid"))
    }

    /// `v = v_div + v_grad` with `v_grad = ∇G`.
    pub fn leray_project(&self, v: &VectorField) -> Result<HelmholtzSplit> {
        self.grid.ensure_same(&v.grid())?;
        if !v.is_finite() {
            return Err(Error::NonFinite("leray_project input".into()));
        }
        let potential = self.solve_potential(&div_vec(v))?;
        let v_grad = grad_scalar(&potential);
        let v_div = v.difference(&v_grad);
        Ok(HelmholtzSplit { v_div, v_grad, potential })
    }

    /// `Π v`.
    pub fn project(&self, v: &VectorField) -> Result<VectorField> {
        Ok(self.leray_project(v)?.v_div)
    }

    /// `Π⊥ v = v − Π v`.
    pub fn project_complement(&self, v: &VectorField) -> Result<VectorField> {
        Ok(self.leray_project(v)?.v_grad)
    }

    /// `Π div S`; by adjointness `⟨Π div S, ξ⟩ = −⟨S, ∇Πξ⟩`.
    pub fn project_div_s(&self, s: &TensorField) -> Result<VectorField> {
        self.grid.ensure_same(&s.grid())?;
        self.project(&div_tensor(s))
    }

    /// Largest observed `‖∇Πv‖ / ‖∇v‖` over random smooth fields (sums of a
    /// few low sine modes with random amplitudes).
    pub fn gradient_stability(&self, samples: usize, seed: u64) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let coeffs: Vec<[f64; 4]> = (0..4)
                .map(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0)))
                .collect();
            let v = VectorField::from_fn(self.grid, |x, y| {
                let pi = std::f64::consts::PI;
                let mut out = [0.0; 2];
                for (m, c) in coeffs.iter().enumerate() {
                    let k = (m + 1) as f64;
                    let base = (k * pi * x).sin() * ((m % 2 + 1) as f64 * pi * y).sin();
                    let alt = ((m % 2 + 1) as f64 * pi * x).sin() * (k * pi * y).sin();
                    out[0] += c[0] * base + c[1] * alt;
                    out[1] += c[2] * alt + c[3] * base;
                }
                out
            });
            let denom = field::norm(&grad_vec(&v));
            if denom > 0.0 {
                worst = worst.max(field::norm(&grad_vec(&self.project(&v)?)) / denom);
            }
        }
        Ok(worst)
    }
}

/// `A = −div_tensor ∘ grad_vec`, the (positive definite) vector Laplacian.
fn apply_vector_laplacian(v: &VectorField) -> VectorField {
    div_tensor(&grad_vec(v)).scaled(-1.0)
}

/// Minimal-`∇`-norm right inverse of the divergence and its adjoint.
#[derive(Debug, Clone)]
pub struct BogovskiiOperator {
    helmholtz: HelmholtzOperator,
    tol: f64,
    max_iter: usize,
}

impl BogovskiiOperator {
    pub fn new(helmholtz: HelmholtzOperator) -> Self {
        let n = helmholtz.grid().n();
        Self {
            helmholtz,
            tol: 1e-12,
            max_iter: 10 * n * n,
        }
    }

    pub fn helmholtz(&self) -> &HelmholtzOperator {
        &self.helmholtz
    }

    pub fn grid(&self) -> Grid {
        self.helmholtz.grid()
    }

    /// Divergence-free `y` with `Π A y = Π rhs` (projected conjugate
    /// gradients on the kernel of the divergence).
    fn solve_div_free(&self, rhs: &VectorField) -> Result<VectorField> {
        let grid = self.grid();
        let b = self.helmholtz.project(rhs)?.to_flat();
        // Π rhs can be pure round-off (e.g. rhs = A B g); measure against rhs.
        let floor = 1e-13 * field::norm(rhs);
        let w: Vec<f64> = self.helmholtz.weights.iter().chain(&self.helmholtz.weights).copied().collect();
        let mut x = vec![0.0; b.len()];
        let mut failure = None;
        let outcome = conjugate_gradient(
            "bogovskii",
            |z, out| {
                let zf = VectorField::from_flat(grid, z);
                let res = self
                    .helmholtz
                    .project(&zf)
                    .and_then(|pz| self.helmholtz.project(&apply_vector_laplacian(&pz)));
                match res {
                    Ok(r) => out.copy_from_slice(&r.to_flat()),
                    Err(e) => {
                        failure.get_or_insert(e);
                        out.iter_mut().for_each(|v| *v = 0.0);
                    }
                }
            },
            &w,
            &b,
            &mut x,
            self.tol,
            floor,
            self.max_iter,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        outcome?;
        self.helmholtz.project(&VectorField::from_flat(grid, &x))
    }

    /// `B g`. Rejects `g` whose mean exceeds `1e−12·‖g‖`.
    pub fn apply(&self, g: &ScalarField) -> Result<VectorField> {
        let grid = self.grid();
        grid.ensure_same(&g.grid())?;
        let norm = field::norm(g);
        if norm == 0.0 {
            return Ok(VectorField::zeros(grid));
        }
        let mean = g.mean();
        if mean.abs() > 1e-12 * norm {
            return Err(Error::NotMeanFree { mean, norm });
        }
        let particular = grad_scalar(&self.helmholtz.solve_potential(g)?);
        let correction = self.solve_div_free(&apply_vector_laplacian(&particular).scaled(-1.0))?;
        let mut out = particular;
        out.axpy(1.0, &correction);
        Ok(out)
    }

    /// `B* v = −L⁺ div(v − A y)` with `Π A y = Π v`; always mean-free.
    pub fn adjoint_apply(&self, v: &VectorField) -> Result<ScalarField> {
        let grid = self.grid();
        grid.ensure_same(&v.grid())?;
        let y = self.solve_div_free(v)?;
        let mut r = v.clone();
        r.axpy(-1.0, &apply_vector_laplacian(&y));
        let mut out = self.helmholtz.solve_potential(&div_vec(&r))?;
        out.scale(-1.0);
        Ok(out)
    }

    /// Operator norm of `g ↦ ∇Bg` on mean-free data in the discrete `L²`
    /// product, by power iteration on `B* A B`.
    pub fn gradient_constant(&self, max_iter: usize) -> Result<f64> {
        let grid = self.grid();
        let w = self.helmholtz.weights.clone();
        let f = ScalarField::from_fn(grid, |x, y| {
            (2.0 * std::f64::consts::PI * x).sin() * (2.0 * std::f64::consts::PI * y).sin() + x * x - y
        });
        // L L⁺ f is the projection of f onto the range of the divergence.
        let start = div_vec(&grad_scalar(&self.helmholtz.solve_potential(&f)?));
        let top = power_iteration(
            |g| {
                let gf = ScalarField::from_values(grid, g.to_vec())?;
                let bg = self.apply(&gf)?;
                Ok(self.adjoint_apply(&apply_vector_laplacian(&bg))?.into_values())
            },
            &w,
            start.into_values(),
            max_iter,
            1e-6,
        )?;
        Ok(top.sqrt())
    }

    /// Assembles `B*` as a dense matrix acting on interior velocity values.
    pub fn materialize_adjoint(&self) -> Result<AdjointMatrix> {
        let grid = self.grid();
        let m = grid.interior_len();
        let mut columns = Vec::with_capacity(2 * m);
        let mut dofs = vec![0.0; 2 * m];
        for c in 0..2 * m {
            dofs[c] = 1.0;
            let e = VectorField::from_interior_vec(grid, &dofs)?;
            dofs[c] = 0.0;
            columns.push(self.adjoint_apply(&e)?.into_values());
        }
        Ok(AdjointMatrix { grid, columns })
    }
}

/// Dense `B*`, column `c` being `B*` of the `c`-th interior unit vector in
/// the `[x…, y…]` layout.
#[derive(Debug, Clone)]
pub struct AdjointMatrix {
    grid: Grid,
    columns: Vec<Vec<f64>>,
}

impl AdjointMatrix {
    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn apply(&self, v: &VectorField) -> Result<ScalarField> {
        self.grid.ensure_same(&v.grid())?;
        let mut out = vec![0.0; self.grid.len()];
        for (col, a) in self.columns.iter().zip(v.to_interior_vec()) {
            if a != 0.0 {
                out.iter_mut().zip(col).for_each(|(o, c)| *o += a * c);
            }
        }
        ScalarField::from_values(self.grid, out)
    }
}
