//! Invariant batteries for every module, printed as a pass/fail table.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{div_tensor, div_vec, grad_scalar, grad_vec, l2_inner, Grid, ScalarField, TensorField, VectorField};
use crate::nfunction::{inequality_report, phi, s_tensor, v_tensor, Matrix2, PotentialParams};
use crate::normlab::{besov_seminorm, dyadic_lags, luxemburg_norm, OrliczSpec, SampledPath};
use crate::projector::{BogovskiiOperator, HelmholtzOperator};
use crate::stepper::{SolverConfig, Stepper};
use crate::stochastics::{Flavor, NoiseModel, NoiseSpec, PathRng, Profile};

/// Deliberate defects for negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corruption {
    /// Perturbs the discrete gradient inside the adjointness check.
    Adjointness,
}

#[derive(Debug, Clone, Default)]
pub struct SelftestOptions {
    pub corrupt: Option<Corruption>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub module: &'static str,
    pub name: &'static str,
    /// Worst observed error (or the measured statistic).
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestReport {
    pub checks: Vec<CheckResult>,
}

impl SelftestReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut s = format!("{:<12} {:<34} {:>12} {:>12}  status\n", "module", "check", "value", "tolerance");
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{:<12} {:<34} {:>12.3e} {:>12.3e}  {}",
                c.module,
                c.name,
                c.value,
                c.tolerance,
                if c.passed { "pass" } else { "FAIL" }
            );
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(s, "{} checks, {failed} failed", self.checks.len());
        s
    }
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

struct Battery {
    checks: Vec<CheckResult>,
}

impl Battery {
    /// Records `value ≤ tolerance`; errors count as failures with value NaN.
    fn check(&mut self, module: &'static str, name: &'static str, tolerance: f64, value: crate::Result<f64>) {
        let value = value.unwrap_or(f64::NAN);
        self.checks.push(CheckResult {
            module,
            name,
            value,
            tolerance,
            passed: value <= tolerance,
        });
    }
}

fn random_vector(grid: Grid, rng: &mut ChaCha8Rng) -> VectorField {
    VectorField::from_fn(grid, |_, _| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
}

fn random_matrix(rng: &mut ChaCha8Rng) -> Matrix2 {
    Matrix2::new(
        rng.random_range(-3.0..3.0),
        rng.random_range(-3.0..3.0),
        rng.random_range(-3.0..3.0),
        rng.random_range(-3.0..3.0),
    )
}

fn nfunction_battery(b: &mut Battery) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut scaling = 0.0_f64;
    let mut compat = 0.0_f64;
    for _ in 0..2000 {
        let p = rng.random_range(1.2..5.0);
        let kappa = rng.random_range(0.0..2.0);
        let t = rng.random_range(0.0..20.0);
        let pr = PotentialParams::new(p, kappa).expect("valid parameters");
        let half = PotentialParams::new(p, 0.5 * kappa).expect("valid parameters");
        let lhs = phi(&pr, 2.0 * t).unwrap_or(f64::NAN);
        let rhs = 2f64.powf(p) * phi(&half, t).unwrap_or(f64::NAN);
        scaling = scaling.max(rel(lhs, rhs));
        let xi = random_matrix(&mut rng);
        compat = compat.max(rel(s_tensor(&pr, &xi).dot(&xi), v_tensor(&pr, &xi).norm_sq()));
    }
    b.check("nfunction", "scaling identity", 1e-12, Ok(scaling));
    b.check("nfunction", "S:xi = |V|^2", 1e-12, Ok(compat));
    let linear = inequality_report(&PotentialParams::new(2.0, 0.0).expect("valid"), 2000, 3)
        .map(|r| (r.ratio_min - 1.0).abs().max((r.ratio_max - 1.0).abs()));
    b.check("nfunction", "equivalence bracket p=2 kappa=0", 1e-12, linear);
    let bracket = inequality_report(&PotentialParams::new(3.0, 1e-3).expect("valid"), 2000, 4)
        .map(|r| if r.ratio_min > 0.0 && r.ratio_max.is_finite() { 0.0 } else { 1.0 });
    b.check("nfunction", "equivalence bracket p=3 positive", 0.0, bracket);
}

fn field_battery(b: &mut Battery, corrupt: Option<Corruption>) {
    let grid = Grid::new(16).expect("valid grid");
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0.0_f64;
    let mut worst_tensor = 0.0_f64;
    for _ in 0..50 {
        let q = ScalarField::from_fn(grid, |_, _| rng.random_range(-1.0..1.0));
        let v = random_vector(grid, &mut rng);
        let mut g = grad_scalar(&q);
        if corrupt == Some(Corruption::Adjointness) {
            g.scale(1.0 + 1e-6);
        }
        let lhs = l2_inner(&g, &v).unwrap_or(f64::NAN);
        let rhs = -l2_inner(&q, &div_vec(&v)).unwrap_or(f64::NAN);
        worst = worst.max(rel(lhs, rhs));
        let s = TensorField::from_fn(grid, |_, _| random_matrix(&mut rng));
        let lhs = l2_inner(&grad_vec(&v), &s).unwrap_or(f64::NAN);
        let rhs = -l2_inner(&v, &div_tensor(&s)).unwrap_or(f64::NAN);
        worst_tensor = worst_tensor.max(rel(lhs, rhs));
    }
    b.check("field", "grad/div adjointness", 1e-12, Ok(worst));
    b.check("field", "grad_vec/div_tensor adjointness", 1e-12, Ok(worst_tensor));
}

fn projector_battery(b: &mut Battery) {
    for n in [8, 16] {
        let grid = Grid::new(n).expect("valid grid");
        let helm = match HelmholtzOperator::new(grid) {
            Ok(h) => h,
            Err(e) => {
                b.check("projector", "assembly", 0.0, Err(e));
                continue;
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(13 + n as u64);
        let mut idem = 0.0_f64;
        let mut duality = 0.0_f64;
        let mut pythagoras = 0.0_f64;
        for _ in 0..10 {
            let v = random_vector(grid, &mut rng);
            let w = random_vector(grid, &mut rng);
            let run = || -> crate::Result<(f64, f64, f64)> {
                let pv = helm.project(&v)?;
                let ppv = helm.project(&pv)?;
                let split = helm.leray_project(&v)?;
                let i = crate::field::norm(&ppv.difference(&pv)) / crate::field::norm(&v);
                let d = rel(l2_inner(&pv, &w)?, l2_inner(&v, &helm.project(&w)?)?);
                let total = l2_inner(&v, &v)?;
                let parts = l2_inner(&split.v_div, &split.v_div)? + l2_inner(&split.v_grad, &split.v_grad)?;
                Ok((i, d, rel(total, parts)))
            };
            match run() {
                Ok((i, d, p)) => {
                    idem = idem.max(i);
                    duality = duality.max(d);
                    pythagoras = pythagoras.max(p);
                }
                Err(_) => idem = f64::NAN,
            }
        }
        let (name_i, name_d, name_p, name_b) = if n == 8 {
            ("idempotence 8x8", "duality 8x8", "pythagoras 8x8", "bogovskii right inverse 8x8")
        } else {
            ("idempotence 16x16", "duality 16x16", "pythagoras 16x16", "bogovskii right inverse 16x16")
        };
        b.check("projector", name_i, 1e-10, Ok(idem));
        b.check("projector", name_d, 1e-8, Ok(duality));
        b.check("projector", name_p, 1e-10, Ok(pythagoras));
        let bog = BogovskiiOperator::new(helm.clone());
        let pi = std::f64::consts::PI;
        let g = ScalarField::from_fn(grid, |x, y| (2.0 * pi * x).cos() * (pi * y).cos());
        let target = div_vec(&grad_scalar(&helm.solve_potential(&g).unwrap_or_else(|_| g.clone())));
        let residual = bog.apply(&target).map(|bg| {
            let mut d = div_vec(&bg);
            d.axpy(-1.0, &target);
            crate::field::norm(&d) / crate::field::norm(&target)
        });
        b.check("projector", name_b, 1e-8, residual);
    }
}

fn stochastics_battery(b: &mut Battery) {
    let grid = Grid::new(8).expect("valid grid");
    let result = HelmholtzOperator::new(grid).and_then(|helm| {
        let spec = NoiseSpec::uniform(4, 2.0, 1.0, Profile::Additive, Flavor::Mixed)?;
        let model = NoiseModel::new(spec, &helm)?;
        let rep = model.ito_isometry_check(&VectorField::zeros(grid), 1.0 / 64.0, 64, 2000, 21)?;
        Ok((rep.terminal_second_moment - rep.expected).abs() / rep.standard_error)
    });
    b.check("stochastics", "ito isometry (standard errors)", 4.0, result);
    let mut a = PathRng::new(5, 3);
    let mut c = PathRng::new(5, 3);
    let same = (0..100).all(|_| a.standard_normal() == c.standard_normal());
    b.check("stochastics", "path stream replay", 0.0, Ok(if same { 0.0 } else { 1.0 }));
}

fn stepper_battery(b: &mut Battery) {
    let grid = Grid::new(8).expect("valid grid");
    let build = |p: f64, kappa: f64, dt: f64, t: f64| -> crate::Result<Stepper> {
        let helm = HelmholtzOperator::new(grid)?;
        let noise = NoiseModel::new(NoiseSpec::zero(), &helm)?;
        Stepper::new(PotentialParams::new(p, kappa)?, SolverConfig::new(dt, t)?, noise, helm)
    };
    let pi = std::f64::consts::PI;
    let smooth = |s: &Stepper, a: f64| {
        s.helmholtz().project(&VectorField::from_fn(grid, |x, y| {
            [a * (pi * x).sin() * (2.0 * pi * y).sin(), -a * (2.0 * pi * x).sin() * (pi * y).sin()]
        }))
    };
    let fd = build(3.0, 0.1, 0.01, 0.01).and_then(|s| {
        let v = smooth(&s, 1.0)?;
        let r = smooth(&s, 0.6)?;
        let g = s.objective_gradient(&v, &r)?;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut worst = 0.0_f64;
        for _ in 0..10 {
            let d = s.helmholtz().project(&random_vector(grid, &mut rng))?;
            let h = 1e-5;
            let mut plus = v.clone();
            plus.axpy(h, &d);
            let mut minus = v.clone();
            minus.axpy(-h, &d);
            let num = (s.objective(&plus, &r) - s.objective(&minus, &r)) / (2.0 * h);
            worst = worst.max(rel(num, l2_inner(&g, &d)?));
        }
        Ok(worst)
    });
    b.check("stepper", "objective gradient vs differences", 1e-5, fd);
    let monotone = build(2.5, 0.01, 1e-3, 0.02).and_then(|s| {
        let u0 = smooth(&s, 1.0)?;
        let out = s.run_path(&u0, &mut PathRng::new(0, 0))?;
        if let Some(e) = out.error {
            return Err(e);
        }
        let rises = out.trajectory.records.windows(2).filter(|w| w[1].energy > w[0].energy).count();
        Ok(rises as f64)
    });
    b.check("stepper", "zero-noise energy monotone", 0.0, monotone);
    let pressure = build(2.5, 0.1, 0.01, 0.01).and_then(|s| {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let u = random_vector(grid, &mut rng);
        let pd = s.pressure_det(&u)?;
        let stress = crate::field::sym_grad(&u).map(|xi| s_tensor(s.params(), xi));
        let xi = random_vector(grid, &mut rng);
        let lhs = l2_inner(&pd, &div_vec(&xi))?;
        let rhs = l2_inner(&stress, &grad_vec(&s.helmholtz().project_complement(&xi)?))?;
        Ok((lhs - rhs).abs() / (1.0 + rhs.abs()))
    });
    b.check("stepper", "pressure identity", 1e-7, pressure);
}

fn normlab_battery(b: &mut Battery) {
    let c = 1.3;
    let constant = SampledPath::new(1.0 / 128.0, vec![c; 129]);
    let phi2 = constant.map(|p| rel(luxemburg_norm(&p, OrliczSpec::Phi2), c / 2f64.ln().sqrt()));
    b.check("normlab", "phi2 norm of a constant", 1e-12, phi2);
    let linear = SampledPath::from_fn(1.0 / 1024.0, 1024, |t| t).and_then(|p| {
        let rep = besov_seminorm(&p, 0.5, OrliczSpec::Power(2.0), &dyadic_lags(p.len()))?;
        Ok(rep
            .h
            .iter()
            .zip(&rep.norms)
            .map(|(h, n)| (n - h * (1.0 - h).sqrt()).abs())
            .fold(0.0, f64::max))
    });
    b.check("normlab", "linear path closed form", 1e-10, linear);
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let path = SampledPath::new(0.01, (0..200).map(|_| rng.random_range(-1.0..1.0)).collect());
    let homog = path.map(|p| {
        [OrliczSpec::Power(1.5), OrliczSpec::Phi2, OrliczSpec::Nq(2.0)]
            .iter()
            .map(|s| rel(luxemburg_norm(&p.scaled(-3.7), *s), 3.7 * luxemburg_norm(&p, *s)))
            .fold(0.0, f64::max)
    });
    b.check("normlab", "luxemburg homogeneity", 1e-10, homog);
}

pub fn run_selftest(options: &SelftestOptions) -> SelftestReport {
    let mut b = Battery { checks: Vec::new() };
    nfunction_battery(&mut b);
    field_battery(&mut b, options.corrupt);
    projector_battery(&mut b);
    stochastics_battery(&mut b);
    stepper_battery(&mut b);
    normlab_battery(&mut b);
    SelftestReport { checks: b.checks }
}
