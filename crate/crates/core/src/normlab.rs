//! Temporal regularity of sampled paths: Luxemburg norms, Besov–Orlicz and
//! Nikolskii seminorms on dyadic `h` grids, Hölder norms and exponent fits.
//!
//! Differences `τ_h x(t) = x(t+h) − x(t)` enter through an [`IncrementTable`]:
//! either built from a scalar path or from distances between stored field
//! snapshots, in which case the spatial norm is taken after the difference.

use std::fmt;
use std::str::FromStr;

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::stochastics::PathRng;

/// Samples `x(t_k)` at `t_k = k·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    dt: f64,
    values: Vec<f64>,
}

impl SampledPath {
    pub fn new(dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
        }
        if values.len() < 4 {
            return Err(Error::InvalidArgument(format!(
                "a sampled path needs at least 4 samples, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("sampled path".into()));
        }
        Ok(Self { dt, values })
    }

    pub fn from_fn(dt: f64, steps: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(dt, (0..=steps).map(|k| f(k as f64 * dt)).collect())
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn t_final(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.dt
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            dt: self.dt,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// Every `factor`-th sample.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || (self.values.len() - 1) % factor != 0 {
            return Err(Error::InvalidArgument(format!(
                "cannot coarsen {} intervals by {factor}",
                self.values.len() - 1
            )));
        }
        Self::new(self.dt * factor as f64, self.values.iter().step_by(factor).copied().collect())
    }
}

/// Scalar Brownian motion on `[0, steps·dt]`.
pub fn wiener_path(rng: &mut PathRng, dt: f64, steps: usize) -> Result<SampledPath> {
    let s = dt.sqrt();
    let mut w = 0.0;
    let mut values = Vec::with_capacity(steps + 1);
    values.push(0.0);
    for _ in 0..steps {
        w += s * rng.standard_normal();
        values.push(w);
    }
    SampledPath::new(dt, values)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrliczSpec {
    Power(f64),
    /// `Φ₂(t) = e^{t²} − 1`.
    Phi2,
    /// `N_q(t) = t^q ln^{q/2}(t + 1)`.
    Nq(f64),
}

impl OrliczSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            OrliczSpec::Power(q) | OrliczSpec::Nq(q) if !(q >= 1.0 && q.is_finite()) => {
                Err(Error::InvalidArgument(format!("Orlicz exponent must lie in [1, inf), got {q}")))
            }
            _ => Ok(()),
        }
    }

    pub fn phi(&self, t: f64) -> f64 {
        match *self {
            OrliczSpec::Power(q) => t.powf(q),
            OrliczSpec::Phi2 => (t * t).exp_m1(),
            OrliczSpec::Nq(q) => t.powf(q) * t.ln_1p().powf(0.5 * q),
        }
    }

    pub fn phi_inverse(&self, s: f64) -> f64 {
        match *self {
            OrliczSpec::Power(q) => s.powf(1.0 / q),
            OrliczSpec::Phi2 => s.ln_1p().sqrt(),
            OrliczSpec::Nq(_) => {
                if s <= 0.0 {
                    return 0.0;
                }
                let mut hi = 1.0;
                while self.phi(hi) < s {
                    hi *= 2.0;
                }
                let mut lo = 0.0;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.phi(mid) < s {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= 1e-16 * hi {
                        break;
                    }
                }
                hi
            }
        }
    }
}

impl fmt::Display for OrliczSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrliczSpec::Power(q) => write!(f, "l{q}"),
            OrliczSpec::Phi2 => write!(f, "phi2"),
            OrliczSpec::Nq(q) => write!(f, "nq{q}"),
        }
    }
}

impl FromStr for OrliczSpec {
    type Err = Error;

    /// Accepts `phi2`, `nq<q>`, `l<q>` or a bare exponent `<q>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let number = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("unknown Orlicz function `{s}`")))
        };
        let spec = if s == "phi2" {
            OrliczSpec::Phi2
        } else if let Some(q) = s.strip_prefix("nq") {
            OrliczSpec::Nq(number(q)?)
        } else if let Some(q) = s.strip_prefix('l') {
            OrliczSpec::Power(number(q)?)
        } else {
            OrliczSpec::Power(number(&s)?)
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn trapezoid_weights(len: usize, dt: f64) -> Vec<f64> {
    let mut w = vec![dt; len];
    if len == 1 {
        w[0] = 0.0;
    } else {
        w[0] = 0.5 * dt;
        w[len - 1] = 0.5 * dt;
    }
    w
}

/// `inf{λ > 0 : Σ_k w_k Φ(|v_k|/λ) ≤ 1}`.
pub(crate) fn luxemburg_weighted(values: &[f64], weights: &[f64], spec: OrliczSpec) -> f64 {
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || weights.iter().all(|w| *w == 0.0) {
        return 0.0;
    }
    if let OrliczSpec::Power(q) = spec {
        let s: f64 = values.iter().zip(weights).map(|(v, w)| w * (v.abs() / scale).powf(q)).sum();
        return scale * s.powf(1.0 / q);
    }
    luxemburg_bisect(values, weights, spec, scale)
}

fn luxemburg_bisect(values: &[f64], weights: &[f64], spec: OrliczSpec, scale: f64) -> f64 {
    let modular = |mu: f64| -> f64 {
        values
            .iter()
            .zip(weights)
            .map(|(v, w)| w * spec.phi(v.abs() / scale / mu))
            .sum()
    };
    // A single term already reaches 1 at `lo`; all terms together stay below 1 at `hi`.
    let total: f64 = weights.iter().sum();
    let mut lo = values
        .iter()
        .zip(weights)
        .filter(|(_, w)| **w > 0.0)
        .map(|(v, w)| v.abs() / scale / spec.phi_inverse(1.0 / w))
        .fold(0.0_f64, f64::max);
    let mut hi = 1.0 / spec.phi_inverse(1.0 / total);
    if lo == 0.0 {
        lo = hi * 1e-300_f64.sqrt();
    }
    while hi / lo > 1.0 + 1e-14 {
        let mid = (lo * hi).sqrt();
        if modular(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    scale * hi
}

/// Luxemburg norm over `[0, T]` with trapezoid weights.
pub fn luxemburg_norm(path: &SampledPath, spec: OrliczSpec) -> f64 {
    luxemburg_weighted(&path.values, &trapezoid_weights(path.len(), path.dt), spec)
}

/// `τ_{m·dt} x` on the truncated range `k = 0..len−m`; may be shorter than a
/// regular path.
pub fn difference_path(path: &SampledPath, m: usize) -> Result<SampledPath> {
    if m == 0 || m >= path.len() {
        return Err(Error::InvalidArgument(format!(
            "difference lag {m} outside 1..{}",
            path.len()
        )));
    }
    Ok(SampledPath {
        dt: path.dt,
        values: path.values[m..].iter().zip(&path.values).map(|(a, b)| a - b).collect(),
    })
}

/// Dyadic lags `m = 2^l` with `4 ≤ m` and `m·dt ≤ T/8`.
pub fn window_lags(samples: usize) -> Vec<usize> {
    let intervals = samples.saturating_sub(1);
    (2..usize::BITS)
        .map(|l| 1usize << l)
        .take_while(|m| 8 * m <= intervals)
        .collect()
}

/// All dyadic lags `m = 2^l < samples − 1`.
pub fn dyadic_lags(samples: usize) -> Vec<usize> {
    let intervals = samples.saturating_sub(1);
    (0..usize::BITS).map(|l| 1usize << l).take_while(|m| *m < intervals).collect()
}

/// Nonnegative difference magnitudes `‖τ_{m·dt} X(t_k)‖` for a set of lags.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementTable {
    dt: f64,
    samples: usize,
    lags: Vec<usize>,
    series: Vec<Vec<f64>>,
}

impl IncrementTable {
    fn check_lags(samples: usize, lags: &[usize]) -> Result<()> {
        if samples < 4 {
            return Err(Error::InvalidArgument(format!("need at least 4 samples, got {samples}")));
        }
        if let Some(m) = lags.iter().find(|m| **m == 0 || **m >= samples) {
            return Err(Error::InvalidArgument(format!("difference lag {m} outside 1..{samples}")));
        }
        Ok(())
    }

    pub fn from_path(path: &SampledPath, lags: &[usize]) -> Result<Self> {
        Self::check_lags(path.len(), lags)?;
        let series = lags
            .iter()
            .map(|&m| Ok(difference_path(path, m)?.values.iter().map(|v| v.abs()).collect()))
            .collect::<Result<_>>()?;
        Ok(Self {
            dt: path.dt,
            samples: path.len(),
            lags: lags.to_vec(),
            series,
        })
    }

    /// `dist(k + m, k)` for every lag; `dist` is typically a spatial norm of
    /// the difference of two stored snapshots.
    pub fn from_distances(dt: f64, samples: usize, lags: &[usize], mut dist: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        Self::check_lags(samples, lags)?;
        let series: Vec<Vec<f64>> = lags
            .iter()
            .map(|&m| (0..samples - m).map(|k| dist(k + m, k)).collect())
            .collect();
        Self::from_series(dt, samples, lags.to_vec(), series)
    }

    pub fn from_series(dt: f64, samples: usize, lags: Vec<usize>, series: Vec<Vec<f64>>) -> Result<Self> {
        Self::check_lags(samples, &lags)?;
        if !(dt > 0.0) || lags.len() != series.len() {
            return Err(Error::InvalidArgument("malformed increment table".into()));
        }
        for (m, s) in lags.iter().zip(&series) {
            if s.len() != samples - m {
                return Err(Error::InvalidArgument(format!(
                    "lag {m}: expected {} increments, got {}",
                    samples - m,
                    s.len()
                )));
            }
            if s.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::InvalidArgument(format!("lag {m}: increments must be finite and >= 0")));
            }
        }
        Ok(Self { dt, samples, lags, series })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn t_final(&self) -> f64 {
        (self.samples - 1) as f64 * self.dt
    }

    pub fn lags(&self) -> &[usize] {
        &self.lags
    }

    pub fn series(&self, lag_index: usize) -> &[f64] {
        &self.series[lag_index]
    }

    /// Keeps only the given lags, in the given order.
    pub fn restrict(&self, lags: &[usize]) -> Result<Self> {
        let mut series = Vec::with_capacity(lags.len());
        for m in lags {
            let idx = self
                .lags
                .iter()
                .position(|l| l == m)
                .ok_or_else(|| Error::InvalidArgument(format!("lag {m} not in the table")))?;
            series.push(self.series[idx].clone());
        }
        Ok(Self {
            dt: self.dt,
            samples: self.samples,
            lags: lags.to_vec(),
            series,
        })
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            series: self.series.iter().map(|s| s.iter().map(|v| c.abs() * v).collect()).collect(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeminormReport {
    pub alpha: f64,
    pub spec: OrliczSpec,
    pub dt: f64,
    pub t_final: f64,
    pub h: Vec<f64>,
    /// `‖τ_h x‖_{L^Φ(I ∩ I−h)}`.
    pub norms: Vec<f64>,
    /// `max_h h^{−α}·norm`.
    pub sup: f64,
    /// Fit window `[4·dt, T/8]`.
    pub window: (f64, f64),
}

impl SeminormReport {
    pub fn sup_terms(&self) -> Vec<f64> {
        self.h.iter().zip(&self.norms).map(|(h, n)| h.powf(-self.alpha) * n).collect()
    }

    /// `∫ (h^{−α}‖τ_h x‖)^r dh/h` by the dyadic rule (`dh/h = ln 2` per level).
    pub fn r_quantity(&self, r: f64) -> f64 {
        std::f64::consts::LN_2 * self.sup_terms().iter().map(|s| s.powf(r)).sum::<f64>()
    }

    /// The `B^α_{Φ,r}` seminorm, `r_quantity(r)^{1/r}`.
    pub fn r_seminorm(&self, r: f64) -> f64 {
        self.r_quantity(r).powf(1.0 / r)
    }

    pub fn fit(&self) -> Result<ExponentFit> {
        fit_exponent(self)
    }
}

fn check_alpha(alpha: f64, max: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= max) || (max < 1.0 && alpha >= 1.0) {
        return Err(Error::InvalidArgument(format!("alpha out of range: {alpha}")));
    }
    Ok(())
}

/// Per-lag Luxemburg norms of the increments and the `r = ∞` sup.
pub fn besov_from_increments(table: &IncrementTable, alpha: f64, spec: OrliczSpec) -> Result<SeminormReport> {
    check_alpha(alpha, 0.999_999_999)?;
    spec.validate()?;
    let h: Vec<f64> = table.lags.iter().map(|m| *m as f64 * table.dt).collect();
    let norms: Vec<f64> = table
        .series
        .iter()
        .map(|s| luxemburg_weighted(s, &trapezoid_weights(s.len(), table.dt), spec))
        .collect();
    let sup = h
        .iter()
        .zip(&norms)
        .map(|(h, n)| h.powf(-alpha) * n)
        .fold(0.0, f64::max);
    let t_final = table.t_final();
    Ok(SeminormReport {
        alpha,
        spec,
        dt: table.dt,
        t_final,
        h,
        norms,
        sup,
        window: (4.0 * table.dt, t_final / 8.0),
    })
}

pub fn besov_seminorm(path: &SampledPath, alpha: f64, spec: OrliczSpec, lags: &[usize]) -> Result<SeminormReport> {
    besov_from_increments(&IncrementTable::from_path(path, lags)?, alpha, spec)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    /// 95% confidence half-width of the slope.
    pub half_width: f64,
    pub intercept: f64,
    pub points: usize,
    pub h_min: f64,
    pub h_max: f64,
}

/// Least-squares slope of `log₂ norm` against `log₂ h` inside the window.
pub fn fit_exponent(report: &SeminormReport) -> Result<ExponentFit> {
    let (lo, hi) = report.window;
    let pts: Vec<(f64, f64)> = report
        .h
        .iter()
        .zip(&report.norms)
        .filter(|(h, n)| **h >= lo * (1.0 - 1e-9) && **h <= hi * (1.0 + 1e-9) && **n > 0.0)
        .map(|(h, n)| (h.log2(), n.log2()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::Degenerate(format!(
            "{} positive increment norms inside the fit window, need 4",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let se = (ssr / (n - 2.0) / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, n - 2.0)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?
        .inverse_cdf(0.975);
    Ok(ExponentFit {
        slope,
        half_width: t * se,
        intercept,
        points: pts.len(),
        h_min: pts[0].0.exp2(),
        h_max: pts[pts.len() - 1].0.exp2(),
    })
}

/// `max |x_j − x_k| / |t_j − t_k|^α`: all pairs up to 512 samples, dyadic
/// lags beyond.
pub fn holder_norm(path: &SampledPath, alpha: f64) -> Result<f64> {
    check_alpha(alpha, 1.0)?;
    let x = &path.values;
    let quotient = |m: usize| {
        let denom = (m as f64 * path.dt).powf(alpha);
        x[m..].iter().zip(x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / denom
    };
    let lags: Vec<usize> = if x.len() <= 512 {
        (1..x.len()).collect()
    } else {
        dyadic_lags(x.len() + 1)
    };
    Ok(lags.into_iter().map(quotient).fold(0.0, f64::max))
}

/// Order `α − 1` certificate for a distribution through the `B^α` seminorms
/// of its time primitive.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativeOrderReport {
    pub order: f64,
    pub r: f64,
    pub besov: SeminormReport,
    pub r_quantity: f64,
    pub nikolskii_phi2: SeminormReport,
}

pub fn negative_order_report(primitive: &IncrementTable, alpha: f64, spec: OrliczSpec, r: f64) -> Result<NegativeOrderReport> {
    if !(r >= 1.0) {
        return Err(Error::InvalidArgument(format!("r must be >= 1, got {r}")));
    }
    let besov = besov_from_increments(primitive, alpha, spec)?;
    let r_quantity = if r.is_infinite() { besov.sup } else { besov.r_quantity(r) };
    Ok(NegativeOrderReport {
        order: alpha - 1.0,
        r,
        r_quantity,
        nikolskii_phi2: besov_from_increments(primitive, alpha, OrliczSpec::Phi2)?,
        besov,
    })
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Per-level medians of the Wiener refinement study.
#[derive(Debug, Clone, PartialEq)]
pub struct DichotomyLevel {
    pub dt: f64,
    pub median_phi2_sup: f64,
    pub median_b22: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DichotomyReport {
    pub paths: usize,
    pub levels: Vec<DichotomyLevel>,
    /// Median over paths of `sup(dt/2)/sup(dt)` for each successive 2× refinement.
    pub phi2_ratios: Vec<f64>,
    /// Median over paths of `Q(dt/4)/Q(dt)` for the `B^{1/2}_{2,2}` quantity.
    pub b22_growth: Vec<f64>,
}

/// Brownian paths on `[0, 1]` sampled at `dt = 2^{−coarse}, …, 2^{−fine}`
/// (nested, each coarse path subsamples the finest one), measured in
/// `B^{1/2}_{Φ₂,∞}` and `B^{1/2}_{2,2}` on the dyadic window.
pub fn wiener_dichotomy(paths: usize, coarse: u32, fine: u32, seed: u64) -> Result<DichotomyReport> {
    if paths == 0 || coarse < 5 || fine < coarse || fine > 24 {
        return Err(Error::InvalidArgument(format!(
            "need paths >= 1 and 5 <= coarse <= fine <= 24, got {paths}, {coarse}, {fine}"
        )));
    }
    let levels = (fine - coarse + 1) as usize;
    let mut sups = vec![Vec::with_capacity(paths); levels];
    let mut b22 = vec![Vec::with_capacity(paths); levels];
    for p in 0..paths {
        let mut rng = PathRng::new(seed, p as u64);
        let finest = wiener_path(&mut rng, (-(fine as f64)).exp2(), 1usize << fine)?;
        for (l, e) in (coarse..=fine).enumerate() {
            let path = finest.coarsen(1usize << (fine - e))?;
            let lags = window_lags(path.len());
            let table = IncrementTable::from_path(&path, &lags)?;
            sups[l].push(besov_from_increments(&table, 0.5, OrliczSpec::Phi2)?.sup);
            b22[l].push(besov_from_increments(&table, 0.5, OrliczSpec::Power(2.0))?.r_quantity(2.0));
        }
    }
    let ratio_medians = |series: &[Vec<f64>], step: usize| -> Vec<f64> {
        (0..levels.saturating_sub(step))
            .map(|l| {
                let mut r: Vec<f64> = series[l + step].iter().zip(&series[l]).map(|(a, b)| a / b).collect();
                median(&mut r)
            })
            .collect()
    };
    Ok(DichotomyReport {
        paths,
        levels: (0..levels)
            .map(|l| DichotomyLevel {
                dt: (-((coarse as usize + l) as f64)).exp2(),
                median_phi2_sup: median(&mut sups[l].clone()),
                median_b22: median(&mut b22[l].clone()),
            })
            .collect(),
        phi2_ratios: ratio_medians(&sups, 1),
        b22_growth: ratio_medians(&b22, 2),
    })
}
