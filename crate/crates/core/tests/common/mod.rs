//! Dense matrix assembly of the discrete operators, shared by the oracle
//! and acceptance suites.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use stokeslab::field::{div_vec, grad_vec, sym_grad, Grid, TensorField, VectorField};
use stokeslab::nfunction::PotentialParams;
use stokeslab::projector::HelmholtzOperator;
use stokeslab::stepper::{SolverConfig, Stepper};
use stokeslab::stochastics::{NoiseModel, NoiseSpec};

/// Discrete operators as dense matrices on interior velocity values.
pub struct Dense {
    pub grid: Grid,
    /// Velocity weights (interior node weights, once per component).
    pub w: DVector<f64>,
    /// Orthonormal (Euclidean) basis of the discrete divergence-free space.
    pub z: DMatrix<f64>,
    /// Divergence, all nodes.
    pub d: DMatrix<f64>,
    /// `ε` weighted by `√w`, so `‖εv‖² = |E v|²`.
    pub e: DMatrix<f64>,
    /// `∇` weighted by `√w`.
    pub g: DMatrix<f64>,
}

pub fn tensor_rows(t: &TensorField, sqrt_w: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(4 * sqrt_w.len());
    for (k, m) in t.values().iter().enumerate() {
        for row in m.0 {
            for x in row {
                out.push(sqrt_w[k] * x);
            }
        }
    }
    out
}

impl Dense {
    pub fn new(n: usize) -> Self {
        let grid = Grid::new(n).unwrap();
        let m = 2 * grid.interior_len();
        let sqrt_w: Vec<f64> = grid.weights().iter().map(|w| w.sqrt()).collect();
        let wi: Vec<f64> = grid.interior_indices().map(|k| grid.weight_at(k)).collect();
        let w = DVector::from_iterator(m, wi.iter().chain(&wi).copied());
        let mut d = DMatrix::zeros(grid.len(), m);
        let mut e = DMatrix::zeros(4 * grid.len(), m);
        let mut g = DMatrix::zeros(4 * grid.len(), m);
        let mut unit = vec![0.0; m];
        for c in 0..m {
            unit[c] = 1.0;
            let v = VectorField::from_interior_vec(grid, &unit).unwrap();
            unit[c] = 0.0;
            d.set_column(c, &DVector::from_column_slice(div_vec(&v).values()));
            e.set_column(c, &DVector::from_vec(tensor_rows(&sym_grad(&v), &sqrt_w)));
            g.set_column(c, &DVector::from_vec(tensor_rows(&grad_vec(&v), &sqrt_w)));
        }
        let eig = (d.transpose() * &d).symmetric_eigen();
        let top = eig.eigenvalues.max();
        let kernel: Vec<_> = (0..m)
            .filter(|&i| eig.eigenvalues[i] < 1e-12 * top)
            .map(|i| eig.eigenvectors.column(i).into_owned())
            .collect();
        let z = DMatrix::from_columns(&kernel);
        Self { grid, w, z, d, e, g }
    }

    pub fn wz(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.w) * &self.z
    }

    /// W-orthogonal projector onto the divergence-free space.
    pub fn projector(&self) -> DMatrix<f64> {
        let wz = self.wz();
        let gram = self.z.transpose() * &wz;
        &self.z * gram.cholesky().unwrap().inverse() * wz.transpose()
    }

    pub fn field(&self, x: &DVector<f64>) -> VectorField {
        VectorField::from_interior_vec(self.grid, x.as_slice()).unwrap()
    }
}

pub fn vec_of(v: &VectorField) -> DVector<f64> {
    DVector::from_vec(v.to_interior_vec())
}

pub fn random_dofs(m: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(m, |_, _| rng.random_range(-1.0..1.0))
}

pub fn linear_stepper(n: usize, dt: f64, steps: usize) -> Stepper {
    let grid = Grid::new(n).unwrap();
    let helm = HelmholtzOperator::new(grid).unwrap();
    let noise = NoiseModel::new(NoiseSpec::zero(), &helm).unwrap();
    let params = PotentialParams::new(2.0, 0.0).unwrap();
    Stepper::new(params, SolverConfig::new(dt, dt * steps as f64).unwrap(), noise, helm).unwrap()
}


impl Dense {
    /// Implicit Euler for `p = 2, κ = 0`: `argmin ½‖v − u‖² + dt·½‖εv‖²`
    /// over the divergence-free space, as a dense solve.
    pub fn implicit_euler(&self, dt: f64) -> impl Fn(&DVector<f64>) -> DVector<f64> + '_ {
        let wz = self.wz();
        let q = self.e.transpose() * &self.e;
        let lhs = self.z.transpose() * &wz + (self.z.transpose() * &q * &self.z) * dt;
        let chol = lhs.cholesky().expect("positive definite");
        move |x| &self.z * chol.solve(&(wz.transpose() * x))
    }
}
