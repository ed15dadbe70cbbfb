//! Path execution and per-path persistence.
//!
//! Every path writes into its own `path_NNNN/` directory:
//! `series.csv` (one row per step), `increments.csv` (difference norms of the
//! stored snapshots) and the final `u`, `π_det`, `K_sto` fields.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use super::config::{ExperimentConfig, ExperimentKind, InitialCondition};
use super::manifest::{PathStatus, RunManifest};
use crate::error::{Error, Result};
use crate::field::{self, w12_norm, write_csv, CsvField, Grid, ScalarField, VectorField};
use crate::nfunction::PotentialParams;
use crate::normlab::{dyadic_lags, wiener_dichotomy, IncrementTable};
use crate::projector::{HelmholtzOperator, DENSE_MAX_CELLS};
use crate::stepper::{SolverConfig, StepRecord, Stepper};
use crate::stochastics::{NoiseModel, PathRng};

pub const SERIES_HEADER: &str = "k,t,J,res_l2,u_l2,Vdiff_placeholder,pi_det_lpprime,K_sto_w12,S_lpprime";
pub const INCREMENTS_HEADER: &str = "quantity,m,k,value";

/// Path reductions whose temporal regularity is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantity {
    /// `‖u(t+h) − u(t)‖_{L²}`.
    Velocity,
    /// `‖V(εu(t+h)) − V(εu(t))‖_{L²}`.
    Vgrad,
    /// `‖K_sto(t+h) − K_sto(t)‖_{W^{1,2}}`.
    Ksto,
}

impl Quantity {
    pub const ALL: [Quantity; 3] = [Quantity::Velocity, Quantity::Vgrad, Quantity::Ksto];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Velocity => "u",
            Quantity::Vgrad => "V",
            Quantity::Ksto => "K",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown quantity `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FinalState {
    pub u: VectorField,
    pub pi_det: ScalarField,
    pub k_sto: ScalarField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathResult {
    pub index: usize,
    pub error: Option<String>,
    pub records: Vec<StepRecord>,
    pub increments: Vec<(Quantity, IncrementTable)>,
    pub final_state: Option<FinalState>,
    pub newton_iterations: usize,
}

impl PathResult {
    pub fn table(&self, q: Quantity) -> Option<&IncrementTable> {
        self.increments.iter().find(|(k, _)| *k == q).map(|(_, t)| t)
    }

    pub fn energy_sup(&self) -> f64 {
        self.records.iter().map(|r| r.energy).fold(0.0, f64::max)
    }

    pub fn residual_integral(&self, dt: f64) -> f64 {
        dt * self.records.iter().skip(1).map(|r| r.residual_l2 * r.residual_l2).sum::<f64>()
    }
}

/// Dyadic lags `m` with `8m ≤ samples − 1`, i.e. up to `T/8`.
pub fn stored_lags(samples: usize) -> Vec<usize> {
    dyadic_lags(samples)
        .into_iter()
        .filter(|m| 8 * m <= samples.saturating_sub(1))
        .collect()
}

pub fn build_stepper(config: &ExperimentConfig) -> Result<Stepper> {
    let grid = Grid::new(config.n)?;
    let helmholtz = HelmholtzOperator::new(grid)?;
    let noise = NoiseModel::new(config.noise_spec()?, &helmholtz)?;
    let mut solver = SolverConfig::new(config.dt, config.t_final)?;
    solver.newton_tol = config.newton_tol;
    solver.newton_max_iter = config.newton_max_iter;
    solver.kappa_reg = config.kappa_reg;
    solver.store_every = config.store_every;
    let stepper = Stepper::new(PotentialParams::new(config.p, config.kappa)?, solver, noise, helmholtz)?;
    if config.n <= DENSE_MAX_CELLS {
        stepper.with_dense_adjoint()
    } else {
        Ok(stepper)
    }
}

pub fn initial_velocity(config: &ExperimentConfig, stepper: &Stepper) -> Result<VectorField> {
    let grid = stepper.grid();
    match config.initial {
        InitialCondition::Zero => Ok(VectorField::zeros(grid)),
        InitialCondition::Smooth => {
            let pi = std::f64::consts::PI;
            let a = config.initial_amplitude;
            let raw = VectorField::from_fn(grid, |x, y| {
                [
                    a * (pi * x).sin().powi(2) * (2.0 * pi * y).sin(),
                    -a * (2.0 * pi * x).sin() * (pi * y).sin().powi(2),
                ]
            });
            stepper.helmholtz().project(&raw)
        }
    }
}

/// Runs path `index` and reduces its snapshots to increment tables.
pub fn simulate_path(stepper: &Stepper, u0: &VectorField, seed: u64, index: usize) -> PathResult {
    let mut result = PathResult {
        index,
        error: None,
        records: Vec::new(),
        increments: Vec::new(),
        final_state: None,
        newton_iterations: 0,
    };
    let outcome = match stepper.run_path(u0, &mut PathRng::new(seed, index as u64)) {
        Ok(o) => o,
        Err(e) => {
            result.error = Some(e.to_string());
            return result;
        }
    };
    let tr = outcome.trajectory;
    result.error = outcome.error.map(|e| e.to_string());
    result.newton_iterations = tr.reports.iter().map(|r| r.newton_iterations).sum();
    let snaps = &tr.snapshots;
    let dt_s = tr.dt * tr.store_every as f64;
    if snaps.len() >= 4 {
        let lags = stored_lags(snaps.len());
        let tables = [
            (
                Quantity::Velocity,
                IncrementTable::from_distances(dt_s, snaps.len(), &lags, |j, k| {
                    field::norm(&snaps[j].u.difference(&snaps[k].u))
                }),
            ),
            (
                Quantity::Vgrad,
                IncrementTable::from_distances(dt_s, snaps.len(), &lags, |j, k| {
                    snaps[j]
                        .v
                        .zip_map(&snaps[k].v, |a, b| *a - *b)
                        .map(|d| field::norm(&d))
                        .unwrap_or(f64::NAN)
                }),
            ),
            (
                Quantity::Ksto,
                IncrementTable::from_distances(dt_s, snaps.len(), &lags, |j, k| {
                    let mut d = snaps[j].k_sto.clone();
                    d.axpy(-1.0, &snaps[k].k_sto);
                    w12_norm(&d)
                }),
            ),
        ];
        for (q, t) in tables {
            match t {
                Ok(t) => result.increments.push((q, t)),
                Err(e) => {
                    result.error.get_or_insert(e.to_string());
                }
            }
        }
    }
    if let Some(last) = snaps.last() {
        result.final_state = Some(FinalState {
            u: last.u.clone(),
            pi_det: last.pi_det.clone(),
            k_sto: last.k_sto.clone(),
        });
    }
    result.records = tr.records;
    result
}

pub(crate) fn map_paths<T: Send>(count: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}

/// All paths of a simulation config, in memory.
pub fn simulate(config: &ExperimentConfig) -> Result<Vec<PathResult>> {
    if !config.kind.is_simulation() {
        return Err(Error::Config(format!("`{}` is not a simulation experiment", config.kind.name())));
    }
    let stepper = build_stepper(config)?;
    let u0 = initial_velocity(config, &stepper)?;
    Ok(map_paths(config.paths, |i| simulate_path(&stepper, &u0, config.seed, i)))
}

pub fn render_series(records: &[StepRecord]) -> String {
    let mut s = String::with_capacity(records.len() * 160);
    s.push_str(SERIES_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            r.k, r.t, r.energy, r.residual_l2, r.u_l2, r.vdiff, r.pi_det_lpprime, r.k_sto_w12, r.stress_lpprime
        );
    }
    s
}

pub fn parse_series(text: &str, context: &str) -> Result<Vec<StepRecord>> {
    let err = |message: String| Error::Parse {
        context: context.to_string(),
        message,
    };
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(SERIES_HEADER) {
        return Err(err(format!("expected header `{SERIES_HEADER}`")));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(ln, line)| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 9 {
                return Err(err(format!("line {}: expected 9 columns", ln + 2)));
            }
            let num = |i: usize| f[i].parse::<f64>().map_err(|e| err(format!("line {}: {e}", ln + 2)));
            Ok(StepRecord {
                k: f[0].parse().map_err(|e| err(format!("line {}: {e}", ln + 2)))?,
                t: num(1)?,
                energy: num(2)?,
                residual_l2: num(3)?,
                u_l2: num(4)?,
                vdiff: num(5)?,
                pi_det_lpprime: num(6)?,
                k_sto_w12: num(7)?,
                stress_lpprime: num(8)?,
            })
        })
        .collect()
}

pub fn render_increments(tables: &[(Quantity, IncrementTable)]) -> String {
    let mut s = String::from(INCREMENTS_HEADER);
    s.push('\n');
    for (q, t) in tables {
        for (i, m) in t.lags().iter().enumerate() {
            for (k, v) in t.series(i).iter().enumerate() {
                let _ = writeln!(s, "{},{m},{k},{v:e}", q.name());
            }
        }
    }
    s
}

/// Inverse of [`render_increments`]; `dt` is the snapshot spacing.
pub fn parse_increments(text: &str, dt: f64, context: &str) -> Result<Vec<(Quantity, IncrementTable)>> {
    let err = |message: String| Error::Parse {
        context: context.to_string(),
        message,
    };
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(INCREMENTS_HEADER) {
        return Err(err(format!("expected header `{INCREMENTS_HEADER}`")));
    }
    // quantity -> [(m, values)] in file order.
    let mut grouped: Vec<(Quantity, Vec<(usize, Vec<f64>)>)> = Vec::new();
    for (ln, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(err(format!("line {}: expected 4 columns", ln + 2)));
        }
        let q = Quantity::parse(f[0]).map_err(|e| err(e.to_string()))?;
        let m: usize = f[1].parse().map_err(|e| err(format!("line {}: {e}", ln + 2)))?;
        let k: usize = f[2].parse().map_err(|e| err(format!("line {}: {e}", ln + 2)))?;
        let v: f64 = f[3].parse().map_err(|e| err(format!("line {}: {e}", ln + 2)))?;
        if grouped.last().map(|g| g.0) != Some(q) {
            grouped.push((q, Vec::new()));
        }
        let lags = &mut grouped.last_mut().expect("just pushed").1;
        if lags.last().map(|l| l.0) != Some(m) {
            lags.push((m, Vec::new()));
        }
        let series = &mut lags.last_mut().expect("just pushed").1;
        if series.len() != k {
            return Err(err(format!("line {}: increments out of order", ln + 2)));
        }
        series.push(v);
    }
    grouped
        .into_iter()
        .map(|(q, lags)| {
            let samples = lags.first().map(|(m, s)| m + s.len()).unwrap_or(0);
            let (ms, series): (Vec<usize>, Vec<Vec<f64>>) = lags.into_iter().unzip();
            Ok((q, IncrementTable::from_series(dt, samples, ms, series)?))
        })
        .collect()
}

pub fn path_dir_name(index: usize) -> String {
    format!("path_{index:04}")
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes the files of one path and returns their names relative to `root`.
fn persist_path(root: &Path, result: &PathResult) -> Result<Vec<String>> {
    let name = path_dir_name(result.index);
    let dir = root.join(&name);
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut files = Vec::new();
    write_text(&dir.join("series.csv"), &render_series(&result.records))?;
    files.push(format!("{name}/series.csv"));
    write_text(&dir.join("increments.csv"), &render_increments(&result.increments))?;
    files.push(format!("{name}/increments.csv"));
    if let Some(fs) = &result.final_state {
        for (file, field) in [
            ("u_final.csv", CsvField::from(fs.u.clone())),
            ("pi_det_final.csv", fs.pi_det.clone().into()),
            ("k_sto_final.csv", fs.k_sto.clone().into()),
        ] {
            write_csv(dir.join(file), &field)?;
            files.push(format!("{name}/{file}"));
        }
    }
    Ok(files)
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub manifest: RunManifest,
    pub failed_paths: Vec<usize>,
}

/// Executes an experiment into `dir`. The manifest is written before any path
/// starts and replaced atomically at the end.
pub fn cmd_run(config: &ExperimentConfig, dir: impl AsRef<Path>) -> Result<RunOutcome> {
    config.validate()?;
    let dir = dir.as_ref().to_path_buf();
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let started = Instant::now();
    let mut manifest = RunManifest::new(config);
    if !config.kind.is_simulation() {
        manifest.paths.clear();
    }
    manifest.write_atomic(&dir)?;

    let mut failed = Vec::new();
    match config.kind {
        ExperimentKind::WienerDichotomy => {
            let rep = wiener_dichotomy(config.paths, config.coarse_log2, config.fine_log2, config.seed)?;
            let mut s = String::from("dt,median_phi2_sup,median_b22,phi2_ratio,b22_growth\n");
            for (i, l) in rep.levels.iter().enumerate() {
                let ratio = i.checked_sub(1).map(|j| rep.phi2_ratios[j]);
                let growth = i.checked_sub(2).map(|j| rep.b22_growth[j]);
                let fmt = |v: Option<f64>| v.map(|v| format!("{v:e}")).unwrap_or_default();
                let _ = writeln!(s, "{:e},{:e},{:e},{},{}", l.dt, l.median_phi2_sup, l.median_b22, fmt(ratio), fmt(growth));
            }
            write_text(&dir.join("dichotomy.csv"), &s)?;
            manifest.record_file(&dir, "dichotomy.csv")?;
        }
        ExperimentKind::Selftest => {
            let rep = super::selftest::run_selftest(&Default::default());
            write_text(&dir.join("selftest.txt"), &rep.render())?;
            manifest.record_file(&dir, "selftest.txt")?;
            if !rep.all_passed() {
                manifest.status = "failed".into();
            }
        }
        _ => {
            let stepper = build_stepper(config)?;
            let u0 = initial_velocity(config, &stepper)?;
            manifest.set_note("initial_energy", format!("{:e}", stepper.energy(&u0)));
            if config.paths > 0 {
                let c = stepper.pressure_constant(300)?;
                manifest.set_note("pressure_constant", format!("{c:e}"));
            }
            let results = map_paths(config.paths, |i| {
                let r = simulate_path(&stepper, &u0, config.seed, i);
                let files = persist_path(&dir, &r);
                (r.index, r.error, r.records.len().saturating_sub(1), files)
            });
            for (index, error, steps, files) in results {
                let mut message = None;
                match files {
                    Ok(files) => {
                        for f in files {
                            manifest.record_file(&dir, &f)?;
                        }
                    }
                    Err(e) => message = Some(format!("could not write outputs: {e}")),
                }
                let entry = &mut manifest.paths[index];
                entry.steps = steps;
                entry.message = message;
                if let Some(e) = error {
                    entry.message.get_or_insert(e);
                }
                entry.status = if entry.message.is_some() {
                    failed.push(index);
                    PathStatus::Failed
                } else {
                    PathStatus::Complete
                };
            }
        }
    }
    if manifest.status == "running" {
        manifest.status = if failed.is_empty() { "complete" } else { "failed" }.into();
    }
    manifest.wall_clock_seconds = Some(started.elapsed().as_secs_f64());
    manifest.write_atomic(&dir)?;
    Ok(RunOutcome {
        dir,
        manifest,
        failed_paths: failed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ExperimentConfig {
        ExperimentConfig {
            n: 8,
            dt: 1.0 / 64.0,
            t_final: 0.5,
            modes: 4,
            paths: 2,
            ..Default::default()
        }
    }

    #[test]
    fn series_and_increments_round_trip() {
        let results = simulate(&tiny()).unwrap();
        let r = &results[1];
        assert!(r.error.is_none());
        assert_eq!(r.records.len(), 33);
        assert_eq!(parse_series(&render_series(&r.records), "mem").unwrap(), r.records);
        let back = parse_increments(&render_increments(&r.increments), 1.0 / 64.0, "mem").unwrap();
        assert_eq!(back, r.increments);
        assert_eq!(r.table(Quantity::Velocity).unwrap().lags(), &[1, 2, 4]);
    }

    #[test]
    fn quantity_names() {
        for q in Quantity::ALL {
            assert_eq!(Quantity::parse(q.name()).unwrap(), q);
        }
        assert!(Quantity::parse("w").is_err());
    }

    #[test]
    fn stored_lag_range() {
        assert_eq!(stored_lags(33), vec![1, 2, 4]);
        assert_eq!(stored_lags(4097), vec![1, 2, 4, 8, 16, 32, 64, 128, 256, 512]);
    }
}
