//! WebAssembly bindings behind `www/index.html`: potential curves, the
//! Wiener dichotomy experiment and a live single-path simulation.

use wasm_bindgen::prelude::*;

use stokeslab::field::{Grid, ScalarField, VectorField};
use stokeslab::nfunction::{phi, s_tensor, v_tensor, Matrix2, PotentialParams};
use stokeslab::normlab;
use stokeslab::projector::HelmholtzOperator;
use stokeslab::stepper::{SolverConfig, Stepper};
use stokeslab::stochastics::{Flavor, NoiseModel, NoiseSpec, PathRng, Profile, WienerIncrement};

fn js_err(e: stokeslab::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// `[t, φ_κ(t), |S(tE)|, |V(tE)|²]` rows, flattened, for a unit shear `E`.
#[wasm_bindgen]
pub fn potential_curves(p: f64, kappa: f64, t_max: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    let params = PotentialParams::new(p, kappa).map_err(js_err)?;
    if !(t_max > 0.0) || samples < 2 {
        return Err(JsError::new("need t_max > 0 and at least two samples"));
    }
    let shear = Matrix2::new(0.0, 1.0, 1.0, 0.0) * std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(4 * samples);
    for i in 0..samples {
        let t = t_max * i as f64 / (samples - 1) as f64;
        let xi = shear * t;
        out.push(t);
        out.push(phi(&params, t).map_err(js_err)?);
        out.push(s_tensor(&params, &xi).norm());
        out.push(v_tensor(&params, &xi).norm_sq());
    }
    Ok(out)
}

#[wasm_bindgen]
pub struct Dichotomy {
    dts: Vec<f64>,
    phi2: Vec<f64>,
    b22: Vec<f64>,
    phi2_ratios: Vec<f64>,
    b22_growth: Vec<f64>,
}

#[wasm_bindgen]
impl Dichotomy {
    pub fn dts(&self) -> Vec<f64> {
        self.dts.clone()
    }

    /// Median `B^{1/2}_{Φ₂,∞}` sup per level.
    pub fn phi2(&self) -> Vec<f64> {
        self.phi2.clone()
    }

    /// Median `B^{1/2}_{2,2}` quantity per level.
    pub fn b22(&self) -> Vec<f64> {
        self.b22.clone()
    }

    pub fn phi2_ratios(&self) -> Vec<f64> {
        self.phi2_ratios.clone()
    }

    pub fn b22_growth(&self) -> Vec<f64> {
        self.b22_growth.clone()
    }
}

/// Brownian paths at `dt = 2^{−coarse} … 2^{−fine}`.
#[wasm_bindgen]
pub fn wiener_dichotomy(paths: usize, coarse: u32, fine: u32, seed: u64) -> Result<Dichotomy, JsError> {
    let rep = normlab::wiener_dichotomy(paths, coarse, fine, seed).map_err(js_err)?;
    Ok(Dichotomy {
        dts: rep.levels.iter().map(|l| l.dt).collect(),
        phi2: rep.levels.iter().map(|l| l.median_phi2_sup).collect(),
        b22: rep.levels.iter().map(|l| l.median_b22).collect(),
        phi2_ratios: rep.phi2_ratios,
        b22_growth: rep.b22_growth,
    })
}

/// One sample path of the stochastic p-Stokes system, advanced on demand.
#[wasm_bindgen]
pub struct Simulation {
    stepper: Stepper,
    rng: PathRng,
    u: VectorField,
    k_sto: ScalarField,
    step: usize,
}

#[wasm_bindgen]
impl Simulation {
    #[wasm_bindgen(constructor)]
    pub fn new(n: usize, p: f64, kappa: f64, dt: f64, amplitude: f64, gradient_noise: bool, seed: u64) -> Result<Simulation, JsError> {
        let grid = Grid::new(n).map_err(js_err)?;
        let helm = HelmholtzOperator::new(grid).map_err(js_err)?;
        let flavor = if gradient_noise { Flavor::Mixed } else { Flavor::DivergenceFree };
        let spec = NoiseSpec::uniform(16, 2.0, amplitude, Profile::Additive, flavor).map_err(js_err)?;
        let noise = NoiseModel::new(spec, &helm).map_err(js_err)?;
        let config = SolverConfig::new(dt, dt).map_err(js_err)?;
        let params = PotentialParams::new(p, kappa).map_err(js_err)?;
        let stepper = Stepper::new(params, config, noise, helm).map_err(js_err)?;
        Ok(Simulation {
            stepper,
            rng: PathRng::new(seed, 0),
            u: VectorField::zeros(grid),
            k_sto: ScalarField::zeros(grid),
            step: 0,
        })
    }

    /// Advances `steps` Euler-Maruyama steps.
    pub fn advance(&mut self, steps: usize) -> Result<(), JsError> {
        let dt = self.stepper.config().dt;
        let modes = self.stepper.noise().mode_count();
        for _ in 0..steps {
            let dw = WienerIncrement::sample(&mut self.rng, modes, dt).map_err(js_err)?;
            self.k_sto = self.stepper.accumulate_k_sto(&self.k_sto, &self.u, &dw).map_err(js_err)?;
            self.u = self.stepper.step(&self.u, &dw).map_err(js_err)?.0;
            self.step += 1;
        }
        Ok(())
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.stepper.config().dt
    }

    pub fn energy(&self) -> f64 {
        self.stepper.energy(&self.u)
    }

    /// Nodes per side.
    pub fn side(&self) -> usize {
        self.stepper.grid().side()
    }

    /// `|u|` at every node, row-major.
    pub fn speed(&self) -> Vec<f64> {
        (0..self.stepper.grid().len()).map(|k| self.u.magnitude(k)).collect()
    }

    /// Interleaved `(u_x, u_y)` at every node, row-major.
    pub fn velocity(&self) -> Vec<f64> {
        self.u.x().iter().zip(self.u.y()).flat_map(|(x, y)| [*x, *y]).collect()
    }

    /// Integrated stochastic pressure `K_sto` at every node.
    pub fn k_sto(&self) -> Vec<f64> {
        self.k_sto.values().to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curves_start_at_zero() {
        let c = potential_curves(3.0, 0.1, 2.0, 5).unwrap();
        assert_eq!(c.len(), 20);
        assert_eq!(&c[..4], &[0.0, 0.0, 0.0, 0.0]);
        // |S(ξ)| |ξ| = |V(ξ)|² since S(ξ) ∥ ξ.
        for row in c.chunks(4) {
            assert!((row[2] * row[0] - row[3]).abs() <= 1e-12 * row[3].max(1.0));
        }
    }

    #[test]
    fn simulation_advances_and_replays() {
        let mut a = Simulation::new(8, 2.5, 0.01, 1.0 / 256.0, 1.0, true, 3).unwrap();
        let mut b = Simulation::new(8, 2.5, 0.01, 1.0 / 256.0, 1.0, true, 3).unwrap();
        a.advance(10).unwrap();
        b.advance(10).unwrap();
        assert_eq!(a.velocity(), b.velocity());
        assert!(a.energy() > 0.0);
        assert!((a.time() - 10.0 / 256.0).abs() < 1e-15);
        assert_eq!(a.speed().len(), 81);
        assert!(a.k_sto().iter().any(|k| *k != 0.0));
    }
}
