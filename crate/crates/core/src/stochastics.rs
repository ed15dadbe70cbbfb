//! Truncated cylindrical Wiener noise with Nemytskii coefficients
//! `g_j(x, v) = λ_j ψ_j(x) ρ(|v(x)|)`.
//!
//! Mode shapes come from sine products `(sin kπx sin lπy, sin lπx sin kπy)`
//! ordered by `k² + l²`, then either Leray-projected (divergence-free), replaced
//! by the discrete gradient of `sin kπx sin lπy` (gradient) or kept as they
//! are (mixed). Every shape is normalised to unit discrete `L²` norm.

use rand::{Rng, SeedableRng};
use rand_chacha::{ChaCha20Rng, ChaCha8Rng};
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::field::{self, grad_scalar, lp_norm, sym_grad, Grid, ScalarField, VectorField};
use crate::projector::HelmholtzOperator;

/// Multiplicative profile `ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// `ρ ≡ 1`.
    Additive,
    /// `ρ(s) = 1/(1+s²)`.
    Multiplicative,
}

impl Profile {
    #[inline]
    pub fn rho(self, s: f64) -> f64 {
        match self {
            Profile::Additive => 1.0,
            Profile::Multiplicative => 1.0 / (1.0 + s * s),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Profile::Additive => "additive",
            Profile::Multiplicative => "multiplicative",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "additive" => Ok(Profile::Additive),
            "multiplicative" => Ok(Profile::Multiplicative),
            other => Err(Error::Config(format!("unknown noise profile `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    DivergenceFree,
    Gradient,
    Mixed,
}

impl Flavor {
    pub fn name(self) -> &'static str {
        match self {
            Flavor::DivergenceFree => "divergence_free",
            Flavor::Gradient => "gradient",
            Flavor::Mixed => "mixed",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "divergence_free" | "div_free" => Ok(Flavor::DivergenceFree),
            "gradient" => Ok(Flavor::Gradient),
            "mixed" => Ok(Flavor::Mixed),
            other => Err(Error::Config(format!("unknown noise flavor `{other}`"))),
        }
    }
}

/// Grid-independent description of the noise.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    /// One flavor per mode; the mode count is `flavors.len()`.
    pub flavors: Vec<Flavor>,
    /// Decay exponent `a > 1` of `λ_j = amplitude · j^{−a}`.
    pub decay: f64,
    pub amplitude: f64,
    pub profile: Profile,
}

impl NoiseSpec {
    pub fn uniform(mode_count: usize, decay: f64, amplitude: f64, profile: Profile, flavor: Flavor) -> Result<Self> {
        let spec = Self {
            flavors: vec![flavor; mode_count],
            decay,
            amplitude,
            profile,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// No noise at all.
    pub fn zero() -> Self {
        Self {
            flavors: Vec::new(),
            decay: 2.0,
            amplitude: 0.0,
            profile: Profile::Additive,
        }
    }

    pub fn mode_count(&self) -> usize {
        self.flavors.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.decay > 1.0) || !self.decay.is_finite() {
            return Err(Error::InvalidArgument(format!("noise decay must exceed 1, got {}", self.decay)));
        }
        if !self.amplitude.is_finite() || self.amplitude < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "noise amplitude must be finite and >= 0, got {}",
                self.amplitude
            )));
        }
        Ok(())
    }

    /// `λ_j` for `j = 1..=J`.
    pub fn lambdas(&self) -> Vec<f64> {
        (1..=self.mode_count()).map(|j| self.amplitude * (j as f64).powf(-self.decay)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude == 0.0 || self.flavors.is_empty()
    }
}

/// Counter-based per-path generator: ChaCha20 keyed by the master seed with
/// the path index as stream id, so every path owns an independent stream and
/// replays bit-exactly regardless of scheduling.
#[derive(Debug, Clone)]
pub struct PathRng {
    master_seed: u64,
    path_index: u64,
    inner: ChaCha20Rng,
}

impl PathRng {
    pub fn new(master_seed: u64, path_index: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(master_seed);
        inner.set_stream(path_index);
        Self {
            master_seed,
            path_index,
            inner,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn path_index(&self) -> u64 {
        self.path_index
    }

    /// Position in the stream, in 32-bit words.
    pub fn counter(&self) -> u128 {
        self.inner.get_word_pos()
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }
}

/// Brownian increments `ΔW_j ~ N(0, dt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerIncrement {
    pub dt: f64,
    pub z: Vec<f64>,
}

impl WienerIncrement {
    pub fn sample(rng: &mut PathRng, mode_count: usize, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
        }
        let s = dt.sqrt();
        Ok(Self {
            dt,
            z: (0..mode_count).map(|_| s * rng.standard_normal()).collect(),
        })
    }

    pub fn zero(mode_count: usize, dt: f64) -> Self {
        Self {
            dt,
            z: vec![0.0; mode_count],
        }
    }
}

/// A [`NoiseSpec`] realised on a grid.
#[derive(Debug, Clone)]
pub struct NoiseModel {
    spec: NoiseSpec,
    grid: Grid,
    modes: Vec<VectorField>,
    lambdas: Vec<f64>,
}

/// Sine index pairs `(k, l)` with `1 ≤ k, l < n`, ordered by `k² + l²`.
fn mode_indices(n: usize, count: usize) -> Result<Vec<(usize, usize)>> {
    let mut pairs: Vec<(usize, usize)> = (1..n).flat_map(|k| (1..n).map(move |l| (k, l))).collect();
    if pairs.len() < count {
        return Err(Error::InvalidArgument(format!(
            "a {n}x{n} grid resolves only {} sine modes, {count} requested",
            pairs.len()
        )));
    }
    pairs.sort_by_key(|&(k, l)| (k * k + l * l, k, l));
    pairs.truncate(count);
    Ok(pairs)
}

impl NoiseModel {
    pub fn new(spec: NoiseSpec, helmholtz: &HelmholtzOperator) -> Result<Self> {
        spec.validate()?;
        let grid = helmholtz.grid();
        let pi = std::f64::consts::PI;
        let mut modes = Vec::with_capacity(spec.mode_count());
        for (&(k, l), flavor) in mode_indices(grid.n(), spec.mode_count())?.iter().zip(&spec.flavors) {
            let (kf, lf) = (k as f64 * pi, l as f64 * pi);
            let raw = VectorField::from_fn(grid, |x, y| {
                [(kf * x).sin() * (lf * y).sin(), (lf * x).sin() * (kf * y).sin()]
            });
            let shape = match flavor {
                Flavor::DivergenceFree => helmholtz.project(&raw)?,
                Flavor::Gradient => grad_scalar(&ScalarField::from_fn(grid, |x, y| (kf * x).sin() * (lf * y).sin())),
                Flavor::Mixed => raw,
            };
            let norm = field::norm(&shape);
            if norm < 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "mode ({k},{l}) with flavor {} vanishes on this grid",
                    flavor.name()
                )));
            }
            modes.push(shape.scaled(1.0 / norm));
        }
        let lambdas = spec.lambdas();
        Ok(Self {
            spec,
            grid,
            modes,
            lambdas,
        })
    }

    pub fn spec(&self) -> &NoiseSpec {
        &self.spec
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn modes(&self) -> &[VectorField] {
        &self.modes
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn is_additive(&self) -> bool {
        self.spec.profile == Profile::Additive
    }

    fn profile_values(&self, u: &VectorField) -> Option<Vec<f64>> {
        match self.spec.profile {
            Profile::Additive => None,
            p => Some((0..self.grid.len()).map(|k| p.rho(u.magnitude(k))).collect()),
        }
    }

    /// `g_j(·, u)`.
    pub fn coefficient(&self, j: usize, u: &VectorField) -> VectorField {
        let mut out = self.modes[j].scaled(self.lambdas[j]);
        if let Some(rho) = self.profile_values(u) {
            let (x, y) = out.components_mut();
            for k in 0..rho.len() {
                x[k] *= rho[k];
                y[k] *= rho[k];
            }
        }
        out
    }

    /// `G(u) ΔW = Σ_j λ_j ρ(|u|) ψ_j ΔW_j`.
    pub fn apply_g(&self, u: &VectorField, dw: &WienerIncrement) -> Result<VectorField> {
        self.grid.ensure_same(&u.grid())?;
        if dw.z.len() != self.mode_count() {
            return Err(Error::InvalidArgument(format!(
                "increment has {} modes, noise has {}",
                dw.z.len(),
                self.mode_count()
            )));
        }
        let mut out = VectorField::zeros(self.grid);
        for ((mode, &lambda), &z) in self.modes.iter().zip(&self.lambdas).zip(&dw.z) {
            if z != 0.0 && lambda != 0.0 {
                out.axpy(lambda * z, mode);
            }
        }
        if let Some(rho) = self.profile_values(u) {
            let (x, y) = out.components_mut();
            for k in 0..rho.len() {
                x[k] *= rho[k];
                y[k] *= rho[k];
            }
        }
        Ok(out)
    }

    /// `(Σ_j ‖g_j(·, u)‖²)^{1/2}`.
    pub fn hs_norm(&self, u: &VectorField) -> Result<f64> {
        self.grid.ensure_same(&u.grid())?;
        let sum: f64 = (0..self.mode_count())
            .map(|j| {
                let g = self.coefficient(j, u);
                field::dot(&g, &g)
            })
            .sum();
        Ok(sum.sqrt())
    }

    /// Measured constants of the growth, Lipschitz and strong (symmetric
    /// gradient in `L^p`) conditions over random fields.
    pub fn check_assumptions(
        &self,
        helmholtz: &HelmholtzOperator,
        p: f64,
        sample_count: usize,
        seed: u64,
    ) -> Result<AssumptionReport> {
        if sample_count < 2 {
            return Err(Error::InvalidArgument("need at least 2 samples".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = self.grid;
        let pi = std::f64::consts::PI;
        let random_field = |rng: &mut ChaCha8Rng| -> Result<VectorField> {
            let scale = 10f64.powf(rng.random_range(-1.0..1.0));
            let c: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
            let v = VectorField::from_fn(grid, |x, y| {
                [
                    c[0] * (pi * x).sin() * (2.0 * pi * y).sin() + c[1] * (2.0 * pi * x).sin() * (pi * y).sin()
                        + c[2] * (3.0 * pi * x).sin() * (pi * y).sin()
                        + c[3] * (pi * x).sin() * (pi * y).sin(),
                    c[4] * (pi * x).sin() * (pi * y).sin() + c[5] * (2.0 * pi * x).sin() * (2.0 * pi * y).sin()
                        + c[6] * (pi * x).sin() * (3.0 * pi * y).sin()
                        + c[7] * (2.0 * pi * x).sin() * (pi * y).sin(),
                ]
            });
            Ok(helmholtz.project(&v)?.scaled(scale))
        };
        let mut c_growth: f64 = 0.0;
        let mut c_lip: f64 = 0.0;
        let mut strong: f64 = 0.0;
        for _ in 0..sample_count {
            let u = random_field(&mut rng)?;
            let v = random_field(&mut rng)?;
            let hs = self.hs_norm(&u)?;
            c_growth = c_growth.max(hs * hs / (1.0 + field::dot(&u, &u)));

            let diff = u.difference(&v);
            let dist = field::dot(&diff, &diff);
            if dist > 0.0 && !self.is_additive() {
                let num: f64 = (0..self.mode_count())
                    .map(|j| {
                        let d = self.coefficient(j, &u).difference(&self.coefficient(j, &v));
                        field::dot(&d, &d)
                    })
                    .sum();
                c_lip = c_lip.max(num / dist);
            }

            let mut num = 0.0;
            for j in 0..self.mode_count() {
                let pg = helmholtz.project(&self.coefficient(j, &u))?;
                num += lp_norm(&sym_grad(&pg), p)?.powi(2);
            }
            strong = strong.max(num / (1.0 + lp_norm(&sym_grad(&u), p)?.powi(2)));
        }
        Ok(AssumptionReport {
            samples: sample_count,
            c_growth,
            c_lip,
            strong_constant: strong,
        })
    }

    /// Monte Carlo check of the Itô isometry for the frozen additive
    /// integrand `G(u_frozen)` on `[0, dt·steps]`.
    pub fn ito_isometry_check(
        &self,
        u_frozen: &VectorField,
        dt: f64,
        steps: usize,
        paths: usize,
        master_seed: u64,
    ) -> Result<ItoReport> {
        if !self.is_additive() {
            return Err(Error::InvalidArgument("the Itô check needs additive noise".into()));
        }
        if steps == 0 || paths < 2 {
            return Err(Error::InvalidArgument("need steps >= 1 and paths >= 2".into()));
        }
        let jn = self.mode_count();
        let coeffs: Vec<VectorField> = (0..jn).map(|j| self.coefficient(j, u_frozen)).collect();
        let gram: Vec<f64> = (0..jn * jn)
            .map(|ij| field::dot(&coeffs[ij / jn], &coeffs[ij % jn]))
            .collect();
        let hs2: f64 = (0..jn).map(|j| gram[j * jn + j]).sum();
        let horizon = dt * steps as f64;
        let quad = |beta: &[f64]| -> f64 {
            let mut s = 0.0;
            for i in 0..jn {
                let row = &gram[i * jn..(i + 1) * jn];
                s += beta[i] * row.iter().zip(beta).map(|(g, b)| g * b).sum::<f64>();
            }
            s
        };
        let mut terminal = Vec::with_capacity(paths);
        let mut sup = Vec::with_capacity(paths);
        let mut beta = vec![0.0; jn];
        for path in 0..paths {
            let mut rng = PathRng::new(master_seed, path as u64);
            beta.iter_mut().for_each(|b| *b = 0.0);
            let mut best: f64 = 0.0;
            for _ in 0..steps {
                let dw = WienerIncrement::sample(&mut rng, jn, dt)?;
                beta.iter_mut().zip(&dw.z).for_each(|(b, z)| *b += z);
                best = best.max(quad(&beta));
            }
            terminal.push(quad(&beta));
            sup.push(best);
        }
        let n = paths as f64;
        let mean = terminal.iter().sum::<f64>() / n;
        let var = terminal.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let sup_mean = sup.iter().sum::<f64>() / n;
        let integral = horizon * hs2;
        Ok(ItoReport {
            paths,
            horizon,
            terminal_second_moment: mean,
            standard_error: (var / n).sqrt(),
            expected: integral,
            sup_second_moment: sup_mean,
            integral_moment: integral,
            sup_ratio: if integral > 0.0 { sup_mean / integral } else { 0.0 },
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    pub samples: usize,
    /// `max Σ_j‖g_j(u)‖² / (1 + ‖u‖²)`.
    pub c_growth: f64,
    /// `max Σ_j‖g_j(u) − g_j(v)‖² / ‖u − v‖²`; zero for additive noise.
    pub c_lip: f64,
    /// `max Σ_j‖εΠg_j(u)‖²_{L^p} / (1 + ‖εu‖²_{L^p})`.
    pub strong_constant: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ItoReport {
    pub paths: usize,
    pub horizon: f64,
    /// Sample mean of `‖I(T)‖²`.
    pub terminal_second_moment: f64,
    pub standard_error: f64,
    /// `T · Σ_j ‖g_j‖²`.
    pub expected: f64,
    /// Sample mean of `max_k ‖I(t_k)‖²`.
    pub sup_second_moment: f64,
    /// `E ∫ ‖G‖²_{HS} dt`, equal to `expected` for a frozen integrand.
    pub integral_moment: f64,
    pub sup_ratio: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::div_vec;

    fn setup(n: usize, flavor: Flavor, profile: Profile, modes: usize) -> (HelmholtzOperator, NoiseModel) {
        let h = HelmholtzOperator::new(Grid::new(n).unwrap()).unwrap();
        let spec = NoiseSpec::uniform(modes, 2.0, 1.0, profile, flavor).unwrap();
        let m = NoiseModel::new(spec, &h).unwrap();
        (h, m)
    }

    #[test]
    fn replay_is_bit_exact_and_streams_differ() {
        let mut a = PathRng::new(42, 3);
        let mut b = PathRng::new(42, 3);
        let mut c = PathRng::new(42, 4);
        let xa = WienerIncrement::sample(&mut a, 16, 0.01).unwrap();
        let xb = WienerIncrement::sample(&mut b, 16, 0.01).unwrap();
        let xc = WienerIncrement::sample(&mut c, 16, 0.01).unwrap();
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
        assert!(a.counter() > 0);
    }

    #[test]
    fn increment_variance_matches_dt() {
        let dt = 0.25;
        let mut rng = PathRng::new(7, 0);
        let draws = 100_000;
        let modes = 4;
        let mut sum = vec![0.0; modes];
        let mut sq = vec![0.0; modes];
        for _ in 0..draws {
            let dw = WienerIncrement::sample(&mut rng, modes, dt).unwrap();
            for j in 0..modes {
                sum[j] += dw.z[j];
                sq[j] += dw.z[j] * dw.z[j];
            }
        }
        for j in 0..modes {
            let mean = sum[j] / draws as f64;
            let var = sq[j] / draws as f64 - mean * mean;
            assert!(var >= 0.97 * dt && var <= 1.03 * dt, "mode {j}: {var}");
            assert!(mean.abs() < 4.0 * (dt / draws as f64).sqrt());
        }
        assert!(WienerIncrement::sample(&mut rng, 1, 0.0).is_err());
    }

    #[test]
    fn modes_are_masked_normalised_and_flavored() {
        let (_, div_free) = setup(16, Flavor::DivergenceFree, Profile::Additive, 16);
        for m in div_free.modes() {
            assert!(m.satisfies_mask());
            assert!((field::norm(m) - 1.0).abs() < 1e-12);
            assert!(field::norm(&div_vec(m)) <= 1e-10);
        }
        let (h, grad) = setup(16, Flavor::Gradient, Profile::Additive, 16);
        for m in grad.modes() {
            assert!(field::norm(&h.project(m).unwrap()) <= 1e-9);
        }
        assert!(NoiseModel::new(
            NoiseSpec::uniform(10, 2.0, 1.0, Profile::Additive, Flavor::Mixed).unwrap(),
            &HelmholtzOperator::new(Grid::new(4).unwrap()).unwrap()
        )
        .is_err());
    }

    #[test]
    fn apply_g_examples() {
        let (_, m) = setup(8, Flavor::Mixed, Profile::Multiplicative, 6);
        let grid = m.grid();
        let u = VectorField::from_fn(grid, |x, y| [3.0 * x * y, x - y]);
        assert_eq!(field::norm(&m.apply_g(&u, &WienerIncrement::zero(6, 0.1)).unwrap()), 0.0);

        let (_, add) = setup(8, Flavor::Mixed, Profile::Additive, 6);
        let mut dw = WienerIncrement::zero(6, 0.1);
        dw.z[2] = 1.0;
        let g = add.apply_g(&u, &dw).unwrap();
        assert_eq!(g, add.modes()[2].scaled(add.lambdas()[2]));

        // Naive double loop oracle.
        let mut rng = PathRng::new(1, 1);
        let dw = WienerIncrement::sample(&mut rng, 6, 0.1).unwrap();
        let got = m.apply_g(&u, &dw).unwrap();
        for k in 0..grid.len() {
            let rho = 1.0 / (1.0 + u.magnitude(k).powi(2));
            let mut expect = [0.0; 2];
            for j in 0..6 {
                let lam = (j as f64 + 1.0).powf(-2.0);
                for c in 0..2 {
                    expect[c] += lam * rho * m.modes()[j].at(k)[c] * dw.z[j];
                }
            }
            for c in 0..2 {
                assert!((got.at(k)[c] - expect[c]).abs() <= 1e-13);
            }
        }

        // Linear in ΔW.
        let dw2 = WienerIncrement::sample(&mut rng, 6, 0.1).unwrap();
        let comb = WienerIncrement {
            dt: 0.1,
            z: dw.z.iter().zip(&dw2.z).map(|(a, b)| 2.0 * a - 0.5 * b).collect(),
        };
        let mut lin = m.apply_g(&u, &dw).unwrap().scaled(2.0);
        lin.axpy(-0.5, &m.apply_g(&u, &dw2).unwrap());
        assert!(field::norm(&lin.difference(&m.apply_g(&u, &comb).unwrap())) <= 1e-13);
    }

    #[test]
    fn hs_norm_examples() {
        let (h, add) = setup(8, Flavor::Mixed, Profile::Additive, 5);
        let expect: f64 = add.lambdas().iter().map(|l| l * l).sum::<f64>().sqrt();
        let u = VectorField::from_fn(add.grid(), |x, _| [x, 1.0]);
        assert!((add.hs_norm(&u).unwrap() - expect).abs() < 1e-12);
        let zero = NoiseModel::new(NoiseSpec::uniform(5, 2.0, 0.0, Profile::Additive, Flavor::Mixed).unwrap(), &h).unwrap();
        assert_eq!(zero.hs_norm(&u).unwrap(), 0.0);
    }

    #[test]
    fn assumption_constants() {
        let (h, add) = setup(8, Flavor::Mixed, Profile::Additive, 6);
        let r = add.check_assumptions(&h, 2.5, 20, 3).unwrap();
        assert_eq!(r.c_lip, 0.0);
        assert!(r.c_growth.is_finite() && r.strong_constant.is_finite());

        let (h, mult) = setup(8, Flavor::Mixed, Profile::Multiplicative, 6);
        let r = mult.check_assumptions(&h, 2.5, 20, 3).unwrap();
        assert!(r.c_lip > 0.0 && r.c_lip.is_finite());

        let (h, grad) = setup(8, Flavor::Gradient, Profile::Multiplicative, 6);
        let r = grad.check_assumptions(&h, 3.0, 20, 3).unwrap();
        assert!(r.strong_constant.is_finite());
    }

    #[test]
    fn ito_isometry_single_mode() {
        let (_, m) = setup(8, Flavor::Mixed, Profile::Additive, 1);
        let u = VectorField::zeros(m.grid());
        let r = m.ito_isometry_check(&u, 1.0 / 16.0, 16, 10_000, 11).unwrap();
        assert!((r.expected - 1.0).abs() < 1e-12);
        assert!((r.terminal_second_moment - r.expected).abs() <= 3.0 * r.standard_error);
        assert!(r.sup_ratio >= 1.0 && r.sup_ratio <= 4.2, "{}", r.sup_ratio);

        let zero = NoiseModel::new(
            NoiseSpec::uniform(1, 2.0, 0.0, Profile::Additive, Flavor::Mixed).unwrap(),
            &HelmholtzOperator::new(m.grid()).unwrap(),
        )
        .unwrap();
        let r = zero.ito_isometry_check(&u, 0.1, 10, 10, 1).unwrap();
        assert_eq!((r.terminal_second_moment, r.expected), (0.0, 0.0));
    }
}
