//! Semi-implicit Euler–Maruyama stepping of the projected gradient flow.
//!
//! One step minimises `Φ(v) = dt·J(v) + ½‖v − r‖²` over discretely
//! divergence-free `v`, with `r = u_n + Π G(u_n)ΔW` (noise explicit, diffusion
//! implicit). Internally the scaled functional `Φ/dt = J(v) + ‖v − r‖²/(2dt)`
//! is used: adding a nonnegative term to `J` in floating point can never
//! produce a value below `J`, so with zero noise `J(u_{n+1}) ≤ J(u_n)` holds
//! exactly and not just up to rounding.

use crate::error::{Error, Result};
use crate::field::{self, div_tensor, grad_scalar, lp_norm, sym_grad, w12_norm, ScalarField, TensorField, VectorField};
use crate::linalg::conjugate_gradient;
use crate::nfunction::{energy, s_tensor, stress_derivative, v_tensor, PotentialParams};
use crate::projector::{AdjointMatrix, BogovskiiOperator, HelmholtzOperator};
use crate::stochastics::{NoiseModel, PathRng, WienerIncrement};

const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_final: f64,
    /// Newton stops once `‖V(εv^{k+1}) − V(εv^k)‖²` drops below this.
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Floor for `κ` inside the Hessian; only matters for `κ = 0`, `p < 2`.
    pub kappa_reg: f64,
    /// Snapshot stride in steps.
    pub store_every: usize,
    /// Relative tolerance of the inner conjugate-gradient solves.
    pub linear_tol: f64,
}

impl SolverConfig {
    pub fn new(dt: f64, t_final: f64) -> Result<Self> {
        let config = Self {
            dt,
            t_final,
            newton_tol: 1e-20,
            newton_max_iter: 50,
            kappa_reg: 1e-7,
            store_every: 1,
            linear_tol: 1e-11,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidArgument(format!("T must be >= 0, got {}", self.t_final)));
        }
        let ratio = self.t_final / self.dt;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "T/dt must be an integer, got {ratio}"
            )));
        }
        if !(self.newton_tol > 0.0) {
            return Err(Error::InvalidArgument("newton_tol must be positive".into()));
        }
        if self.newton_max_iter == 0 || self.store_every == 0 {
            return Err(Error::InvalidArgument("newton_max_iter and store_every must be >= 1".into()));
        }
        if !(self.kappa_reg >= 0.0) || !(self.linear_tol > 0.0) {
            return Err(Error::InvalidArgument("kappa_reg must be >= 0 and linear_tol > 0".into()));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepReport {
    pub newton_iterations: usize,
    pub cg_iterations: usize,
    pub halvings: usize,
    /// `‖V(εv^{k+1}) − V(εv^k)‖²` of the last accepted Newton step.
    pub last_vdiff: f64,
    /// Norm of the projected gradient of `Φ/dt` at the returned iterate.
    pub gradient_norm: f64,
    /// `Φ` at the initial iterate `u_n` and at the result.
    pub phi_start: f64,
    pub phi_end: f64,
}

/// Scalar series recorded at every step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub k: usize,
    pub t: f64,
    pub energy: f64,
    /// `‖Π div S(εu)‖`.
    pub residual_l2: f64,
    pub u_l2: f64,
    /// `‖V(εu_k) − V(εu_{k−1})‖`, zero at `k = 0`.
    pub vdiff: f64,
    /// `‖π_det‖_{L^{p'}}`.
    pub pi_det_lpprime: f64,
    /// `‖K_sto‖_{W^{1,2}}`.
    pub k_sto_w12: f64,
    /// `‖S(εu)‖_{L^{p'}}`.
    pub stress_lpprime: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub k: usize,
    pub t: f64,
    pub u: VectorField,
    pub v: TensorField,
    pub residual: VectorField,
    pub pi_det: ScalarField,
    pub k_sto: ScalarField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathTrajectory {
    pub dt: f64,
    pub store_every: usize,
    pub records: Vec<StepRecord>,
    pub reports: Vec<StepReport>,
    pub snapshots: Vec<Snapshot>,
}

impl PathTrajectory {
    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn energy_sup(&self) -> f64 {
        self.records.iter().map(|r| r.energy).fold(0.0, f64::max)
    }

    /// `dt · Σ ‖Π div S(εu_k)‖²` over the steps `k ≥ 1`.
    pub fn residual_integral(&self) -> f64 {
        self.dt * self.records.iter().skip(1).map(|r| r.residual_l2 * r.residual_l2).sum::<f64>()
    }
}

/// A path run; `error` is set when a step failed and `trajectory` then holds
/// everything up to the failure.
#[derive(Debug)]
pub struct PathOutcome {
    pub trajectory: PathTrajectory,
    pub error: Option<Error>,
}

#[derive(Debug, Clone)]
pub struct Stepper {
    params: PotentialParams,
    config: SolverConfig,
    noise: NoiseModel,
    bogovskii: BogovskiiOperator,
    adjoint: Option<AdjointMatrix>,
    /// `−B*Π⊥(λ_j ψ_j)` for additive noise with a materialised adjoint.
    k_basis: Option<Vec<ScalarField>>,
}

impl Stepper {
    pub fn new(params: PotentialParams, config: SolverConfig, noise: NoiseModel, helmholtz: HelmholtzOperator) -> Result<Self> {
        config.validate()?;
        helmholtz.grid().ensure_same(&noise.grid())?;
        Ok(Self {
            params,
            config,
            noise,
            bogovskii: BogovskiiOperator::new(helmholtz),
            adjoint: None,
            k_basis: None,
        })
    }

    /// Assembles `B*` densely so pressure reconstruction costs one
    /// matrix-vector product per step.
    pub fn with_dense_adjoint(mut self) -> Result<Self> {
        let adjoint = self.bogovskii.materialize_adjoint()?;
        if self.noise.is_additive() {
            let zero = VectorField::zeros(self.grid());
            let mut basis = Vec::with_capacity(self.noise.mode_count());
            for j in 0..self.noise.mode_count() {
                let g = self.noise.coefficient(j, &zero);
                let mut k = adjoint.apply(&self.helmholtz().project_complement(&g)?)?;
                k.scale(-1.0);
                basis.push(k);
            }
            self.k_basis = Some(basis);
        }
        self.adjoint = Some(adjoint);
        Ok(self)
    }

    pub fn params(&self) -> &PotentialParams {
        &self.params
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn helmholtz(&self) -> &HelmholtzOperator {
        self.bogovskii.helmholtz()
    }

    pub fn bogovskii(&self) -> &BogovskiiOperator {
        &self.bogovskii
    }

    pub fn grid(&self) -> field::Grid {
        self.helmholtz().grid()
    }

    fn adjoint_apply(&self, v: &VectorField) -> Result<ScalarField> {
        match &self.adjoint {
            Some(a) => a.apply(v),
            None => self.bogovskii.adjoint_apply(v),
        }
    }

    fn kappa_floor(&self) -> f64 {
        if self.params.kappa() == 0.0 && self.params.p() < 2.0 {
            self.config.kappa_reg
        } else {
            0.0
        }
    }

    /// `J(v)`.
    pub fn energy(&self, v: &VectorField) -> f64 {
        energy(&self.params, &sym_grad(v))
    }

    /// `Φ(v) = dt·J(v) + ½‖v − r‖²`.
    pub fn objective(&self, v: &VectorField, r: &VectorField) -> f64 {
        self.config.dt * self.scaled_objective(v, r)
    }

    fn scaled_objective(&self, v: &VectorField, r: &VectorField) -> f64 {
        let d = v.difference(r);
        self.energy(v) + 0.5 * field::dot(&d, &d) / self.config.dt
    }

    fn stress(&self, eps: &TensorField) -> TensorField {
        eps.map(|xi| s_tensor(&self.params, xi))
    }

    /// Projected gradient of `Φ`: `v − r − dt·Π div S(εv)`.
    pub fn objective_gradient(&self, v: &VectorField, r: &VectorField) -> Result<VectorField> {
        let mut g = v.difference(r);
        let force = self.helmholtz().project_div_s(&self.stress(&sym_grad(v)))?;
        g.axpy(-self.config.dt, &force);
        Ok(g)
    }

    /// `r = u_n + Π G(u_n)ΔW`.
    pub fn explicit_target(&self, u_n: &VectorField, dw: &WienerIncrement) -> Result<VectorField> {
        let mut r = u_n.clone();
        if !self.noise.spec().is_zero() {
            r.axpy(1.0, &self.helmholtz().project(&self.noise.apply_g(u_n, dw)?)?);
        }
        Ok(r)
    }

    /// Minimiser of `Φ` by projected damped Newton started at `u_n`.
    pub fn step(&self, u_n: &VectorField, dw: &WienerIncrement) -> Result<(VectorField, StepReport)> {
        let r = self.explicit_target(u_n, dw)?;
        self.minimize(u_n.clone(), &r)
    }

    fn minimize(&self, mut v: VectorField, r: &VectorField) -> Result<(VectorField, StepReport)> {
        let grid = self.grid();
        let dt = self.config.dt;
        let helm = self.helmholtz();
        let weights: Vec<f64> = grid.weights().into_iter().cycle().take(2 * grid.len()).collect();
        let floor = self.kappa_floor();

        let mut eps = sym_grad(&v);
        let mut value = self.scaled_objective(&v, r);
        let mut report = StepReport {
            phi_start: dt * value,
            ..Default::default()
        };
        let mut v_tensor_field = eps.map(|xi| v_tensor(&self.params, xi));

        for iteration in 0..self.config.newton_max_iter {
            // Gradient of Φ/dt.
            let inertia = v.difference(r).scaled(1.0 / dt);
            let force = helm.project_div_s(&self.stress(&eps))?;
            let mut grad = inertia.clone();
            grad.axpy(-1.0, &force);
            let grad_norm = field::norm(&grad);
            report.gradient_norm = grad_norm;
            let scale = field::norm(&inertia) + field::norm(&force);
            if grad_norm <= 1e-14 * scale || grad_norm == 0.0 {
                report.phi_end = dt * value;
                return Ok((v, report));
            }

            // Newton direction: (I/dt − Π div DS(εv)[ε·]) d = −grad on div-free fields.
            let rhs: Vec<f64> = grad.to_flat().iter().map(|g| -g).collect();
            let mut d = vec![0.0; rhs.len()];
            let mut failure = None;
            let outcome = conjugate_gradient(
                "newton-cg",
                |z, out| {
                    let zf = VectorField::from_flat(grid, z);
                    let ez = sym_grad(&zf);
                    let mut lin = TensorField::zeros(grid);
                    for k in 0..grid.len() {
                        let (i, j) = grid.coords(k);
                        lin.set(i, j, stress_derivative(&self.params, floor, &eps.at(k), &ez.at(k)));
                    }
                    match helm.project(&div_tensor(&lin)) {
                        Ok(pd) => {
                            let mut h = zf.scaled(1.0 / dt);
                            h.axpy(-1.0, &pd);
                            out.copy_from_slice(&h.to_flat());
                        }
                        Err(e) => {
                            failure.get_or_insert(e);
                            out.iter_mut().for_each(|o| *o = 0.0);
                        }
                    }
                },
                &weights,
                &rhs,
                &mut d,
                self.config.linear_tol,
                1e-15 * scale,
                20 * grid.n() * grid.n(),
            );
            if let Some(e) = failure {
                return Err(e);
            }
            report.cg_iterations += outcome?.iterations;
            let dir = VectorField::from_flat(grid, &d);
            let slope = field::dot(&grad, &dir);
            if !(slope < 0.0) {
                // Not a descent direction: only possible at round-off level.
                report.phi_end = dt * value;
                return Ok((v, report));
            }

            let mut alpha = 1.0;
            let mut accepted = None;
            for _ in 0..MAX_HALVINGS {
                let mut trial = v.clone();
                trial.axpy(alpha, &dir);
                let trial_value = self.scaled_objective(&trial, r);
                if trial_value <= value + ARMIJO * alpha * slope {
                    accepted = Some((trial, trial_value));
                    break;
                }
                alpha *= 0.5;
                report.halvings += 1;
            }
            let Some((next, next_value)) = accepted else {
                if slope.abs() <= 1e-12 * value.abs().max(f64::MIN_POSITIVE) {
                    report.phi_end = dt * value;
                    return Ok((v, report));
                }
                return Err(Error::LineSearch { iteration, slope });
            };

            let next_eps = sym_grad(&next);
            let next_v = next_eps.map(|xi| v_tensor(&self.params, xi));
            let vdiff = {
                let diff = next_v.zip_map(&v_tensor_field, |a, b| *a - *b)?;
                field::dot(&diff, &diff)
            };
            v = next;
            eps = next_eps;
            v_tensor_field = next_v;
            value = next_value;
            report.newton_iterations = iteration + 1;
            report.last_vdiff = vdiff;
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("Newton iterate {iteration}")));
            }
            if vdiff <= self.config.newton_tol {
                report.phi_end = dt * value;
                return Ok((v, report));
            }
        }
        Err(Error::NoConvergence {
            solver: "newton",
            iterations: self.config.newton_max_iter,
            residual: report.last_vdiff,
        })
    }

    /// `Π div S(εu)`.
    pub fn strong_residual(&self, u: &VectorField) -> Result<VectorField> {
        self.helmholtz().project_div_s(&self.stress(&sym_grad(u)))
    }

    /// `π_det = −B* Π⊥ div S(εu)`.
    pub fn pressure_det(&self, u: &VectorField) -> Result<ScalarField> {
        let split = self.helmholtz().leray_project(&div_tensor(&self.stress(&sym_grad(u))))?;
        let mut p = self.adjoint_apply(&split.v_grad)?;
        p.scale(-1.0);
        Ok(p)
    }

    /// Discrete `L²` operator norm of `S ↦ −B*Π⊥ div S`, by power iteration
    /// on `T T*` with `T* g = ∇(Π⊥ B g)`.
    pub fn pressure_constant(&self, max_iter: usize) -> Result<f64> {
        let grid = self.grid();
        let helm = self.helmholtz();
        let pi = std::f64::consts::PI;
        let f = ScalarField::from_fn(grid, |x, y| (2.0 * pi * x).cos() * (pi * y).sin() + x - y * y);
        let start = crate::field::div_vec(&grad_scalar(&helm.solve_potential(&f)?));
        let top = crate::linalg::power_iteration(
            |g| {
                let gf = ScalarField::from_values(grid, g.to_vec())?;
                let lifted = helm.project_complement(&self.bogovskii.apply(&gf)?)?;
                let split = helm.leray_project(&div_tensor(&crate::field::grad_vec(&lifted)))?;
                let mut out = self.adjoint_apply(&split.v_grad)?;
                out.scale(-1.0);
                Ok(out.into_values())
            },
            &grid.weights(),
            start.into_values(),
            max_iter,
            1e-6,
        )?;
        Ok(top.sqrt())
    }

    /// `−B* Π⊥ G(u_n)ΔW`.
    pub fn k_increment(&self, u_n: &VectorField, dw: &WienerIncrement) -> Result<ScalarField> {
        let grid = self.grid();
        if self.noise.spec().is_zero() || dw.z.iter().all(|z| *z == 0.0) {
            return Ok(ScalarField::zeros(grid));
        }
        if let Some(basis) = &self.k_basis {
            let mut out = ScalarField::zeros(grid);
            for (k, &z) in basis.iter().zip(&dw.z) {
                out.axpy(z, k);
            }
            return Ok(out);
        }
        let grad_part = self.helmholtz().project_complement(&self.noise.apply_g(u_n, dw)?)?;
        let mut out = self.adjoint_apply(&grad_part)?;
        out.scale(-1.0);
        Ok(out)
    }

    /// `K_next = K_prev − B*Π⊥ G(u_n)ΔW`.
    pub fn accumulate_k_sto(&self, k_prev: &ScalarField, u_n: &VectorField, dw: &WienerIncrement) -> Result<ScalarField> {
        let mut k = k_prev.clone();
        k.axpy(1.0, &self.k_increment(u_n, dw)?);
        Ok(k)
    }

    /// Runs one path from `u0`, drawing increments from `rng`.
    pub fn run_path(&self, u0: &VectorField, rng: &mut PathRng) -> Result<PathOutcome> {
        let grid = self.grid();
        grid.ensure_same(&u0.grid())?;
        if !u0.satisfies_mask() {
            return Err(Error::InvalidArgument("initial velocity violates the boundary mask".into()));
        }
        let div = field::norm(&crate::field::div_vec(u0));
        if div > 1e-8 * (1.0 + field::norm(&crate::field::grad_vec(u0))) {
            return Err(Error::InvalidArgument(format!(
                "initial velocity is not divergence-free (‖div u0‖ = {div:.3e})"
            )));
        }
        let j0 = self.energy(u0);
        if !j0.is_finite() {
            return Err(Error::NonFinite("J(u0)".into()));
        }

        let steps = self.config.steps();
        let dt = self.config.dt;
        let mut trajectory = PathTrajectory {
            dt,
            store_every: self.config.store_every,
            records: Vec::with_capacity(steps + 1),
            reports: Vec::with_capacity(steps),
            snapshots: Vec::new(),
        };
        let mut u = u0.clone();
        let mut k_sto = ScalarField::zeros(grid);
        let mut prev_v: Option<TensorField> = None;
        let mode_count = self.noise.mode_count();

        for k in 0..=steps {
            if k > 0 {
                let dw = WienerIncrement::sample(rng, mode_count, dt)?;
                let advance = self
                    .accumulate_k_sto(&k_sto, &u, &dw)
                    .and_then(|next_k| self.step(&u, &dw).map(|(next_u, rep)| (next_k, next_u, rep)));
                match advance {
                    Ok((next_k, next_u, rep)) => {
                        k_sto = next_k;
                        u = next_u;
                        trajectory.reports.push(rep);
                    }
                    Err(e) => {
                        return Ok(PathOutcome {
                            trajectory,
                            error: Some(e),
                        })
                    }
                }
            }
            match self.record(k, &u, &k_sto, prev_v.as_ref()) {
                Ok((record, v, snapshot_parts)) => {
                    if !record.energy.is_finite() || !u.is_finite() {
                        return Ok(PathOutcome {
                            trajectory,
                            error: Some(Error::NonFinite(format!("step {k}"))),
                        });
                    }
                    trajectory.records.push(record);
                    if k % self.config.store_every == 0 {
                        let (residual, pi_det) = snapshot_parts;
                        trajectory.snapshots.push(Snapshot {
                            k,
                            t: record.t,
                            u: u.clone(),
                            v: v.clone(),
                            residual,
                            pi_det,
                            k_sto: k_sto.clone(),
                        });
                    }
                    prev_v = Some(v);
                }
                Err(e) => {
                    return Ok(PathOutcome {
                        trajectory,
                        error: Some(e),
                    })
                }
            }
        }
        Ok(PathOutcome {
            trajectory,
            error: None,
        })
    }

    #[allow(clippy::type_complexity)]
    fn record(
        &self,
        k: usize,
        u: &VectorField,
        k_sto: &ScalarField,
        prev_v: Option<&TensorField>,
    ) -> Result<(StepRecord, TensorField, (VectorField, ScalarField))> {
        let eps = sym_grad(u);
        let stress = self.stress(&eps);
        let split = self.helmholtz().leray_project(&div_tensor(&stress))?;
        let mut pi_det = self.adjoint_apply(&split.v_grad)?;
        pi_det.scale(-1.0);
        let v = eps.map(|xi| v_tensor(&self.params, xi));
        let vdiff = match prev_v {
            Some(p) => field::norm(&v.zip_map(p, |a, b| *a - *b)?),
            None => 0.0,
        };
        let p_prime = self.params.p_conjugate();
        let record = StepRecord {
            k,
            t: k as f64 * self.config.dt,
            energy: energy(&self.params, &eps),
            residual_l2: field::norm(&split.v_div),
            u_l2: field::norm(u),
            vdiff,
            pi_det_lpprime: lp_norm(&pi_det, p_prime)?,
            k_sto_w12: w12_norm(k_sto),
            stress_lpprime: lp_norm(&stress, p_prime)?,
        };
        Ok((record, v, (split.v_div, pi_det)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{div_vec, grad_vec, l2_inner, Grid};
    use crate::stochastics::{Flavor, NoiseSpec, Profile};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn stepper(n: usize, p: f64, kappa: f64, dt: f64, t: f64, spec: NoiseSpec) -> Stepper {
        let helm = HelmholtzOperator::new(Grid::new(n).unwrap()).unwrap();
        let noise = NoiseModel::new(spec, &helm).unwrap();
        Stepper::new(
            PotentialParams::new(p, kappa).unwrap(),
            SolverConfig::new(dt, t).unwrap(),
            noise,
            helm,
        )
        .unwrap()
    }

    fn smooth_div_free(s: &Stepper, amp: f64) -> VectorField {
        let pi = std::f64::consts::PI;
        let raw = VectorField::from_fn(s.grid(), |x, y| {
            [
                amp * (pi * x).sin() * (2.0 * pi * y).sin() + 0.3 * amp * (2.0 * pi * x).sin() * (pi * y).sin(),
                -amp * (2.0 * pi * x).sin() * (pi * y).sin(),
            ]
        });
        s.helmholtz().project(&raw).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::new(0.0, 1.0).is_err());
        assert!(SolverConfig::new(0.3, 1.0).is_err());
        assert_eq!(SolverConfig::new(0.25, 1.0).unwrap().steps(), 4);
    }

    #[test]
    fn zero_state_is_stationary() {
        let s = stepper(8, 2.5, 0.1, 0.01, 0.04, NoiseSpec::zero());
        let (u, rep) = s.step(&VectorField::zeros(s.grid()), &WienerIncrement::zero(0, 0.01)).unwrap();
        assert_eq!(u, VectorField::zeros(s.grid()));
        assert_eq!(rep.newton_iterations, 0);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let s = stepper(8, 3.0, 0.1, 0.01, 0.01, NoiseSpec::zero());
        let v = smooth_div_free(&s, 1.0);
        let r = smooth_div_free(&s, 0.7);
        let g = s.objective_gradient(&v, &r).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let raw = VectorField::from_fn(s.grid(), |_, _| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
            let d = s.helmholtz().project(&raw).unwrap();
            let h = 1e-5;
            let mut plus = v.clone();
            plus.axpy(h, &d);
            let mut minus = v.clone();
            minus.axpy(-h, &d);
            let fd = (s.objective(&plus, &r) - s.objective(&minus, &r)) / (2.0 * h);
            let exact = l2_inner(&g, &d).unwrap();
            assert!((fd - exact).abs() <= 1e-5 * exact.abs().max(1e-8), "{fd} vs {exact}");
        }
    }

    #[test]
    fn step_descends_and_stays_divergence_free() {
        let spec = NoiseSpec::uniform(8, 2.0, 0.5, Profile::Multiplicative, Flavor::Mixed).unwrap();
        let s = stepper(8, 3.0, 0.0, 0.01, 0.01, spec);
        let u = smooth_div_free(&s, 1.0);
        let mut rng = PathRng::new(3, 0);
        let dw = WienerIncrement::sample(&mut rng, 8, 0.01).unwrap();
        let r = s.explicit_target(&u, &dw).unwrap();
        let (next, rep) = s.step(&u, &dw).unwrap();
        assert!(s.objective(&next, &r) <= s.objective(&u, &r));
        assert!(rep.phi_end <= rep.phi_start);
        assert!(field::norm(&div_vec(&next)) <= 1e-9 * field::norm(&grad_vec(&next)));
        assert!(next.satisfies_mask());
    }

    #[test]
    fn shear_thinning_regularised_step_converges() {
        let s = stepper(8, 1.5, 0.0, 0.01, 0.01, NoiseSpec::zero());
        let u = smooth_div_free(&s, 1.0);
        let (next, _) = s.step(&u, &WienerIncrement::zero(0, 0.01)).unwrap();
        assert!(s.energy(&next) <= s.energy(&u));
    }

    #[test]
    fn pressure_identity_and_kernel_case() {
        let s = stepper(8, 2.5, 0.1, 0.01, 0.01, NoiseSpec::zero());
        assert_eq!(field::norm(&s.pressure_det(&VectorField::zeros(s.grid())).unwrap()), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = VectorField::from_fn(s.grid(), |_, _| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
        let pi = s.pressure_det(&u).unwrap();
        assert!(pi.mean().abs() < 1e-12 * field::norm(&pi));
        let stress = sym_grad(&u).map(|xi| s_tensor(s.params(), xi));
        for _ in 0..5 {
            let xi = VectorField::from_fn(s.grid(), |_, _| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
            let lhs = l2_inner(&pi, &div_vec(&xi)).unwrap();
            let perp = s.helmholtz().project_complement(&xi).unwrap();
            let rhs = l2_inner(&stress, &grad_vec(&perp)).unwrap();
            assert!((lhs - rhs).abs() <= 1e-7 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn pressure_constant_bounds_random_stresses() {
        let s = stepper(8, 2.5, 0.1, 0.01, 0.01, NoiseSpec::zero()).with_dense_adjoint().unwrap();
        let c = s.pressure_constant(300).unwrap();
        assert!(c.is_finite() && c > 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let u = VectorField::from_fn(s.grid(), |_, _| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
            let stress = sym_grad(&u).map(|xi| s_tensor(s.params(), xi));
            let ratio = field::norm(&s.pressure_det(&u).unwrap()) / field::norm(&stress);
            assert!(ratio <= c * (1.0 + 1e-4), "{ratio} > {c}");
        }
    }

    #[test]
    fn k_sto_increments() {
        let spec = NoiseSpec::uniform(4, 2.0, 1.0, Profile::Additive, Flavor::DivergenceFree).unwrap();
        let s = stepper(8, 2.5, 0.1, 0.01, 0.01, spec).with_dense_adjoint().unwrap();
        let mut rng = PathRng::new(1, 0);
        let u = VectorField::zeros(s.grid());
        let dw = WienerIncrement::sample(&mut rng, 4, 0.01).unwrap();
        assert!(field::norm(&s.k_increment(&u, &dw).unwrap()) <= 1e-10);

        let spec = NoiseSpec::uniform(1, 2.0, 1.0, Profile::Additive, Flavor::Gradient).unwrap();
        let dense = stepper(8, 2.5, 0.1, 0.01, 0.01, spec.clone()).with_dense_adjoint().unwrap();
        let free = stepper(8, 2.5, 0.1, 0.01, 0.01, spec);
        let dw = WienerIncrement { dt: 0.01, z: vec![0.37] };
        let a = dense.k_increment(&u, &dw).unwrap();
        let b = free.k_increment(&u, &dw).unwrap();
        let mut d = a.clone();
        d.axpy(-1.0, &b);
        assert!(field::norm(&d) <= 1e-10 * field::norm(&b));
        let k0 = ScalarField::zeros(free.grid());
        assert_eq!(free.accumulate_k_sto(&k0, &u, &WienerIncrement::zero(1, 0.01)).unwrap(), k0);
    }

    #[test]
    fn zero_run_is_zero_and_deterministic() {
        let s = stepper(8, 2.5, 0.01, 0.01, 0.05, NoiseSpec::zero());
        let out = s.run_path(&VectorField::zeros(s.grid()), &mut PathRng::new(1, 0)).unwrap();
        assert!(out.error.is_none());
        assert_eq!(out.trajectory.records.len(), 6);
        assert!(out.trajectory.records.iter().all(|r| r.energy == 0.0 && r.k_sto_w12 == 0.0));

        let spec = NoiseSpec::uniform(6, 2.0, 1.0, Profile::Multiplicative, Flavor::Mixed).unwrap();
        let s = stepper(8, 2.5, 0.01, 0.01, 0.05, spec);
        let a = s.run_path(&VectorField::zeros(s.grid()), &mut PathRng::new(9, 2)).unwrap();
        let b = s.run_path(&VectorField::zeros(s.grid()), &mut PathRng::new(9, 2)).unwrap();
        assert_eq!(a.trajectory, b.trajectory);
        assert!(a.trajectory.records.last().unwrap().k_sto_w12 > 0.0);
    }

    #[test]
    fn deterministic_flow_is_energy_monotone() {
        for (p, kappa) in [(2.0, 0.0), (3.0, 0.0), (2.5, 0.01)] {
            let s = stepper(8, p, kappa, 1e-3, 0.02, NoiseSpec::zero());
            let u0 = smooth_div_free(&s, 1.0);
            let out = s.run_path(&u0, &mut PathRng::new(0, 0)).unwrap();
            assert!(out.error.is_none());
            let e: Vec<f64> = out.trajectory.records.iter().map(|r| r.energy).collect();
            assert!(e.windows(2).all(|w| w[1] <= w[0]), "p={p}");
            let r0 = out.trajectory.records[0].residual_l2;
            assert!(out.trajectory.records.iter().all(|r| r.residual_l2 <= 1.01 * r0));
        }
    }

    #[test]
    fn rejects_bad_initial_data() {
        let s = stepper(8, 2.5, 0.01, 0.01, 0.02, NoiseSpec::zero());
        let not_div_free = VectorField::from_fn(s.grid(), |x, _| [x * (1.0 - x), 0.0]);
        assert!(s.run_path(&not_div_free, &mut PathRng::new(0, 0)).is_err());
    }
}
