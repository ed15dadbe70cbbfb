//! `norms`, `fit` and `report` over a finished run directory.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::manifest::{PathStatus, RunManifest};
use super::run::{parse_increments, parse_series, path_dir_name, Quantity};
use crate::error::{Error, Result};
use crate::normlab::{besov_from_increments, fit_exponent, OrliczSpec, SeminormReport};

pub const NORMS_HEADER: &str = "h,norm,alpha,kind,sup_term";
pub const FIT_HEADER: &str = "alpha,slope,half_width,h_min,h_max";

/// Type-7 (linear interpolation) sample quantile of finite values.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn simulation_manifest(dir: &Path) -> Result<RunManifest> {
    let manifest = RunManifest::read(dir)?;
    if !manifest.config.kind.is_simulation() {
        return Err(Error::Config(format!(
            "{} holds a `{}` run, which has no trajectories",
            dir.display(),
            manifest.config.kind.name()
        )));
    }
    Ok(manifest)
}

fn usable_paths(manifest: &RunManifest) -> Vec<usize> {
    manifest
        .paths
        .iter()
        .filter(|p| p.status == PathStatus::Complete)
        .map(|p| p.index)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormsOutcome {
    pub paths: usize,
    /// `(quantity, alpha, kind) → per-path sup values`.
    pub sups: BTreeMap<(String, String, String), Vec<f64>>,
}

/// Per-path seminorm reports of `u`, `V(εu)` and `K_sto` plus medians and
/// quartiles across completed paths.
pub fn cmd_norms(dir: impl AsRef<Path>, alphas: &[f64], specs: &[OrliczSpec]) -> Result<NormsOutcome> {
    let dir = dir.as_ref();
    if alphas.is_empty() || specs.is_empty() {
        return Err(Error::InvalidArgument("need at least one alpha and one Orlicz function".into()));
    }
    for a in alphas {
        if !(*a > 0.0 && *a < 1.0) {
            return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {a}")));
        }
    }
    let mut manifest = simulation_manifest(dir)?;
    let cfg = manifest.config.clone();
    let dt_s = cfg.dt * cfg.store_every as f64;
    let paths = usable_paths(&manifest);
    let mut sups: BTreeMap<(String, String, String), Vec<f64>> = BTreeMap::new();
    let mut written = Vec::new();
    for &index in &paths {
        let name = path_dir_name(index);
        let inc_path = dir.join(&name).join("increments.csv");
        let tables = parse_increments(&read_text(&inc_path)?, dt_s, &inc_path.display().to_string())?;
        for (q, table) in &tables {
            let mut out = String::from(NORMS_HEADER);
            out.push('\n');
            for &alpha in alphas {
                for spec in specs {
                    let rep = besov_from_increments(table, alpha, *spec)?;
                    for ((h, n), s) in rep.h.iter().zip(&rep.norms).zip(rep.sup_terms()) {
                        let _ = writeln!(out, "{h:e},{n:e},{alpha},{spec},{s:e}");
                    }
                    sups.entry((q.name().to_string(), alpha.to_string(), spec.to_string()))
                        .or_default()
                        .push(rep.sup);
                }
            }
            let file = format!("{name}/norms_{}.csv", q.name());
            write_text(&dir.join(&file), &out)?;
            written.push(file);
        }
    }
    let mut summary = String::from("quantity,alpha,kind,paths,median_sup,q1_sup,q3_sup\n");
    for ((q, a, k), v) in &sups {
        let _ = writeln!(
            summary,
            "{q},{a},{k},{},{:e},{:e},{:e}",
            v.len(),
            quantile(v, 0.5),
            quantile(v, 0.25),
            quantile(v, 0.75)
        );
    }
    write_text(&dir.join("norms_summary.csv"), &summary)?;
    written.push("norms_summary.csv".into());
    for f in &written {
        manifest.record_file(dir, f)?;
    }
    manifest.write_atomic(dir)?;
    Ok(NormsOutcome {
        paths: paths.len(),
        sups,
    })
}

/// Rebuilds the reports of one `norms_<q>.csv`, keyed by `(alpha, kind)`.
pub fn parse_norms(text: &str, dt: f64, t_final: f64, context: &str) -> Result<Vec<SeminormReport>> {
    let err = |message: String| Error::Parse {
        context: context.to_string(),
        message,
    };
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(NORMS_HEADER) {
        return Err(err(format!("expected header `{NORMS_HEADER}`")));
    }
    let mut reports: Vec<SeminormReport> = Vec::new();
    for (ln, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(err(format!("line {}: expected 5 columns", ln + 2)));
        }
        let num = |i: usize| f[i].parse::<f64>().map_err(|e| err(format!("line {}: {e}", ln + 2)));
        let (h, norm, alpha, sup_term) = (num(0)?, num(1)?, num(2)?, num(4)?);
        let spec: OrliczSpec = f[3].parse()?;
        let fresh = reports.last().map(|r| r.alpha != alpha || r.spec != spec).unwrap_or(true);
        if fresh {
            reports.push(SeminormReport {
                alpha,
                spec,
                dt,
                t_final,
                h: Vec::new(),
                norms: Vec::new(),
                sup: 0.0,
                window: (4.0 * dt, t_final / 8.0),
            });
        }
        let r = reports.last_mut().expect("just pushed");
        r.h.push(h);
        r.norms.push(norm);
        r.sup = r.sup.max(sup_term);
    }
    Ok(reports)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOutcome {
    /// `(quantity, kind, alpha) → per-path slopes` (NaN for degenerate fits).
    pub slopes: BTreeMap<(String, String, String), Vec<f64>>,
}

/// Fits the temporal exponent of every stored norm report.
pub fn cmd_fit(dir: impl AsRef<Path>) -> Result<FitOutcome> {
    let dir = dir.as_ref();
    let mut manifest = simulation_manifest(dir)?;
    let cfg = manifest.config.clone();
    let dt_s = cfg.dt * cfg.store_every as f64;
    let mut slopes: BTreeMap<(String, String, String), Vec<f64>> = BTreeMap::new();
    let mut written = Vec::new();
    for index in usable_paths(&manifest) {
        let name = path_dir_name(index);
        for q in Quantity::ALL {
            let path = dir.join(&name).join(format!("norms_{}.csv", q.name()));
            if !path.exists() {
                return Err(Error::InvalidArgument(format!(
                    "{} is missing; run `norms` first",
                    path.display()
                )));
            }
            let reports = parse_norms(&read_text(&path)?, dt_s, cfg.t_final, &path.display().to_string())?;
            let mut per_kind: BTreeMap<String, String> = BTreeMap::new();
            for rep in &reports {
                let text = per_kind
                    .entry(rep.spec.to_string())
                    .or_insert_with(|| format!("{FIT_HEADER}\n"));
                let slope = match fit_exponent(rep) {
                    Ok(fit) => {
                        let _ = writeln!(
                            text,
                            "{},{:e},{:e},{:e},{:e}",
                            rep.alpha, fit.slope, fit.half_width, fit.h_min, fit.h_max
                        );
                        fit.slope
                    }
                    Err(Error::Degenerate(_)) => {
                        let _ = writeln!(text, "{},NaN,NaN,{:e},{:e}", rep.alpha, rep.window.0, rep.window.1);
                        f64::NAN
                    }
                    Err(e) => return Err(e),
                };
                slopes
                    .entry((q.name().to_string(), rep.spec.to_string(), rep.alpha.to_string()))
                    .or_default()
                    .push(slope);
            }
            for (kind, text) in per_kind {
                let file = format!("{name}/fit_{}_{kind}.csv", q.name());
                write_text(&dir.join(&file), &text)?;
                written.push(file);
            }
        }
    }
    let mut summary = String::from("quantity,kind,alpha,paths,degenerate,median_slope,q1_slope,q3_slope\n");
    for ((q, k, a), v) in &slopes {
        let _ = writeln!(
            summary,
            "{q},{k},{a},{},{},{:e},{:e},{:e}",
            v.len(),
            v.iter().filter(|s| s.is_nan()).count(),
            quantile(v, 0.5),
            quantile(v, 0.25),
            quantile(v, 0.75)
        );
    }
    write_text(&dir.join("fit_summary.csv"), &summary)?;
    written.push("fit_summary.csv".into());
    for f in &written {
        manifest.record_file(dir, f)?;
    }
    manifest.write_atomic(dir)?;
    Ok(FitOutcome { slopes })
}

/// Human-readable summary of a run directory; also written to `report.txt`.
pub fn cmd_report(dir: impl AsRef<Path>) -> Result<String> {
    let dir = dir.as_ref();
    let mut manifest = RunManifest::read(dir)?;
    let cfg = manifest.config.clone();
    let mut s = String::new();
    let _ = writeln!(s, "run {}", dir.display());
    let _ = writeln!(s, "kind {}  status {}  version {}", cfg.kind.name(), manifest.status, manifest.version);
    if let Some(w) = manifest.wall_clock_seconds {
        let _ = writeln!(s, "wall clock {w:.1} s");
    }
    let modified = manifest.verify(dir)?;
    if modified.is_empty() {
        let _ = writeln!(s, "files: {} listed, all digests match", manifest.files.len());
    } else {
        let _ = writeln!(s, "files: digest mismatch for {}", modified.join(", "));
    }

    if cfg.kind.is_simulation() {
        let _ = writeln!(
            s,
            "grid {}x{}  p {}  kappa {}  dt {:e}  T {}  noise {} modes, decay {}, amplitude {}, {} {}",
            cfg.n,
            cfg.n,
            cfg.p,
            cfg.kappa,
            cfg.dt,
            cfg.t_final,
            cfg.modes,
            cfg.decay,
            cfg.amplitude,
            cfg.profile.name(),
            cfg.flavor.name()
        );
        let done = manifest.paths.iter().filter(|p| p.status == PathStatus::Complete).count();
        let _ = writeln!(s, "paths {done}/{} complete", manifest.paths.len());
        for p in manifest.paths.iter().filter(|p| p.status != PathStatus::Complete) {
            let _ = writeln!(
                s,
                "  path {} {:?} after {} steps: {}",
                p.index,
                p.status,
                p.steps,
                p.message.as_deref().unwrap_or("-")
            );
        }
        let j0: f64 = manifest.note("initial_energy").and_then(|v| v.parse().ok()).unwrap_or(0.0);
        let constant: Option<f64> = manifest.note("pressure_constant").and_then(|v| v.parse().ok());
        let mut sup_j = 0.0_f64;
        let mut sup_res = 0.0_f64;
        let mut pressure_ratio = 0.0_f64;
        for p in &manifest.paths {
            let path = dir.join(path_dir_name(p.index)).join("series.csv");
            let Ok(text) = read_text(&path) else { continue };
            let records = parse_series(&text, &path.display().to_string())?;
            sup_j = records.iter().map(|r| r.energy).fold(sup_j, f64::max);
            let res: f64 = cfg.dt * records.iter().skip(1).map(|r| r.residual_l2 * r.residual_l2).sum::<f64>();
            sup_res = sup_res.max(res);
            let sup_s = records.iter().map(|r| r.stress_lpprime).fold(0.0, f64::max);
            let sup_pi = records.iter().map(|r| r.pi_det_lpprime).fold(0.0, f64::max);
            pressure_ratio = pressure_ratio.max(sup_pi / (1.0 + sup_s));
        }
        let bound = 1e3 * (j0 + 1.0);
        let _ = writeln!(
            s,
            "energy: J(u0) {j0:.4e}  max sup J {sup_j:.4e}  max dt*sum|res|^2 {sup_res:.4e}  bound {bound:.1e} -> {}",
            if sup_j <= bound && sup_res <= bound { "ok" } else { "EXCEEDED" }
        );
        if let Some(c) = constant {
            let _ = writeln!(
                s,
                "pressure: max sup|pi_det| / (1 + sup|S|) {pressure_ratio:.4e}  adjoint constant {c:.4e} -> {}",
                if pressure_ratio <= c { "ok" } else { "EXCEEDED" }
            );
        }
    }
    for (file, title) in [
        ("norms_summary.csv", "seminorm sups"),
        ("fit_summary.csv", "fitted exponents"),
        ("dichotomy.csv", "wiener refinement"),
        ("selftest.txt", "selftest"),
    ] {
        if let Ok(text) = read_text(&dir.join(file)) {
            let _ = writeln!(s, "{title} ({file}):");
            for line in text.lines() {
                let _ = writeln!(s, "  {line}");
            }
        }
    }
    write_text(&dir.join("report.txt"), &s)?;
    manifest.record_file(dir, "report.txt")?;
    manifest.write_atomic(dir)?;
    Ok(s)
}
