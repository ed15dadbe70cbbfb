//! Flat `key = value` experiment files with `#` comments.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::stochastics::{Flavor, NoiseSpec, Profile};

pub const OUTPUT_ROOT_ENV: &str = "STOKESLAB_OUTPUT_ROOT";
const DEFAULT_OUTPUT_ROOT: &str = "runs";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    VelocityRegularity,
    VgradRegularity,
    PressureRegularity,
    WienerDichotomy,
    Selftest,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::VelocityRegularity => "velocity_regularity",
            ExperimentKind::VgradRegularity => "vgrad_regularity",
            ExperimentKind::PressureRegularity => "pressure_regularity",
            ExperimentKind::WienerDichotomy => "wiener_dichotomy",
            ExperimentKind::Selftest => "selftest",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        [
            ExperimentKind::VelocityRegularity,
            ExperimentKind::VgradRegularity,
            ExperimentKind::PressureRegularity,
            ExperimentKind::WienerDichotomy,
            ExperimentKind::Selftest,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| Error::Config(format!("unknown experiment kind `{s}`")))
    }

    pub fn is_simulation(self) -> bool {
        matches!(
            self,
            ExperimentKind::VelocityRegularity | ExperimentKind::VgradRegularity | ExperimentKind::PressureRegularity
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialCondition {
    Zero,
    /// Leray projection of a fixed smooth field scaled by `initial_amplitude`.
    Smooth,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n: usize,
    pub p: f64,
    pub kappa: f64,
    pub dt: f64,
    pub t_final: f64,
    pub modes: usize,
    pub decay: f64,
    pub amplitude: f64,
    pub profile: Profile,
    pub flavor: Flavor,
    pub paths: usize,
    pub seed: u64,
    pub store_every: usize,
    pub output: Option<PathBuf>,
    /// Allows `p < 2`, where strong-mode diagnostics are not backed by the
    /// energy estimate.
    pub experimental: bool,
    pub initial: InitialCondition,
    pub initial_amplitude: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub kappa_reg: f64,
    /// Wiener refinement study: `dt = 2^{−coarse_log2} … 2^{−fine_log2}`.
    pub coarse_log2: u32,
    pub fine_log2: u32,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: ExperimentKind::VelocityRegularity,
            n: 16,
            p: 2.5,
            kappa: 0.01,
            dt: 1.0 / 1024.0,
            t_final: 1.0,
            modes: 16,
            decay: 2.0,
            amplitude: 1.0,
            profile: Profile::Additive,
            flavor: Flavor::Mixed,
            paths: 8,
            seed: 1,
            store_every: 1,
            output: None,
            experimental: false,
            initial: InitialCondition::Zero,
            initial_amplitude: 0.0,
            newton_tol: 1e-20,
            newton_max_iter: 50,
            kappa_reg: 1e-7,
            coarse_log2: 10,
            fine_log2: 16,
        }
    }
}

/// `2^-12`, `2^3` or a plain float.
fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let bad = || Error::Config(format!("`{key}`: cannot parse `{v}` as a number"));
    if let Some(e) = v.strip_prefix("2^") {
        let e: i32 = e.parse().map_err(|_| bad())?;
        return Ok(f64::from(e).exp2());
    }
    v.parse::<f64>().map_err(|_| bad())
}

fn parse_int<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse::<T>()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{v}` as a nonnegative integer")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("`{key}`: expected true or false, got `{v}`"))),
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", ln + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if entries.insert(k.to_string(), v.to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key `{k}`", ln + 1)));
            }
        }
        let mut c = Self::default();
        for (k, v) in &entries {
            let v = v.as_str();
            match k.as_str() {
                "kind" => c.kind = ExperimentKind::parse(v)?,
                "n" => c.n = parse_int(k, v)?,
                "p" => c.p = parse_f64(k, v)?,
                "kappa" => c.kappa = parse_f64(k, v)?,
                "dt" => c.dt = parse_f64(k, v)?,
                "T" | "t_final" => c.t_final = parse_f64(k, v)?,
                "modes" => c.modes = parse_int(k, v)?,
                "decay" => c.decay = parse_f64(k, v)?,
                "amplitude" => c.amplitude = parse_f64(k, v)?,
                "profile" => c.profile = Profile::parse(v).map_err(|e| Error::Config(e.to_string()))?,
                "flavor" => c.flavor = Flavor::parse(v).map_err(|e| Error::Config(e.to_string()))?,
                "paths" => c.paths = parse_int(k, v)?,
                "seed" => c.seed = parse_int(k, v)?,
                "store_every" => c.store_every = parse_int(k, v)?,
                "output" => c.output = Some(PathBuf::from(v)),
                "experimental" => c.experimental = parse_bool(k, v)?,
                "initial" => {
                    c.initial = match v {
                        "zero" => InitialCondition::Zero,
                        "smooth" => InitialCondition::Smooth,
                        _ => return Err(Error::Config(format!("`initial`: expected zero or smooth, got `{v}`"))),
                    }
                }
                "initial_amplitude" => c.initial_amplitude = parse_f64(k, v)?,
                "newton_tol" => c.newton_tol = parse_f64(k, v)?,
                "newton_max_iter" => c.newton_max_iter = parse_int(k, v)?,
                "kappa_reg" => c.kappa_reg = parse_f64(k, v)?,
                "coarse_log2" => c.coarse_log2 = parse_int(k, v)?,
                "fine_log2" => c.fine_log2 = parse_int(k, v)?,
                other => return Err(Error::Config(format!("unknown key `{other}`"))),
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        match self.kind {
            ExperimentKind::Selftest => return Ok(()),
            ExperimentKind::WienerDichotomy => {
                if self.paths == 0 || self.coarse_log2 < 5 || self.fine_log2 < self.coarse_log2 || self.fine_log2 > 24 {
                    return fail("wiener_dichotomy needs paths >= 1 and 5 <= coarse_log2 <= fine_log2 <= 24".into());
                }
                return Ok(());
            }
            _ => {}
        }
        if self.n > 128 {
            return fail(format!("n = {} is beyond the supported 128", self.n));
        }
        crate::field::Grid::new(self.n).map_err(|e| Error::Config(e.to_string()))?;
        if !(self.p > 1.0 && self.p.is_finite()) || !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return fail(format!("need p > 1 and kappa >= 0, got p = {}, kappa = {}", self.p, self.kappa));
        }
        if self.p < 2.0 && !self.experimental {
            return fail(format!(
                "p = {} < 2: the strong energy estimate behind the residual and pressure diagnostics \
                 is only established for p >= 2 (the shear-thinning case is open); set `experimental = true` to run anyway",
                self.p
            ));
        }
        if !(self.dt > 0.0) || !(self.t_final >= 0.0) {
            return fail("dt must be positive and T nonnegative".into());
        }
        let ratio = self.t_final / self.dt;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
            return fail(format!("T/dt = {ratio} is not an integer"));
        }
        if self.store_every == 0 || self.newton_max_iter == 0 {
            return fail("store_every and newton_max_iter must be >= 1".into());
        }
        if !(self.newton_tol > 0.0) || !(self.kappa_reg >= 0.0) {
            return fail("newton_tol must be positive and kappa_reg nonnegative".into());
        }
        if self.steps() % self.store_every != 0 {
            return fail(format!("store_every = {} must divide the step count {}", self.store_every, self.steps()));
        }
        if !(self.initial_amplitude.is_finite()) {
            return fail("initial_amplitude must be finite".into());
        }
        self.noise_spec().map(|_| ()).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    pub fn noise_spec(&self) -> Result<NoiseSpec> {
        if self.modes == 0 || self.amplitude == 0.0 {
            return Ok(NoiseSpec::zero());
        }
        NoiseSpec::uniform(self.modes, self.decay, self.amplitude, self.profile, self.flavor)
    }

    /// Canonical `key = value` rendering; parses back to the same config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("kind", self.kind.name().into());
        kv("n", self.n.to_string());
        kv("p", format!("{:?}", self.p));
        kv("kappa", format!("{:?}", self.kappa));
        kv("dt", format!("{:?}", self.dt));
        kv("T", format!("{:?}", self.t_final));
        kv("modes", self.modes.to_string());
        kv("decay", format!("{:?}", self.decay));
        kv("amplitude", format!("{:?}", self.amplitude));
        kv("profile", self.profile.name().into());
        kv("flavor", self.flavor.name().into());
        kv("paths", self.paths.to_string());
        kv("seed", self.seed.to_string());
        kv("store_every", self.store_every.to_string());
        if let Some(o) = &self.output {
            kv("output", o.display().to_string());
        }
        kv("experimental", self.experimental.to_string());
        kv(
            "initial",
            match self.initial {
                InitialCondition::Zero => "zero".into(),
                InitialCondition::Smooth => "smooth".into(),
            },
        );
        kv("initial_amplitude", format!("{:?}", self.initial_amplitude));
        kv("newton_tol", format!("{:?}", self.newton_tol));
        kv("newton_max_iter", self.newton_max_iter.to_string());
        kv("kappa_reg", format!("{:?}", self.kappa_reg));
        kv("coarse_log2", self.coarse_log2.to_string());
        kv("fine_log2", self.fine_log2.to_string());
        s
    }

    /// Absolute `output` as given, relative `output` under the output root,
    /// otherwise `<root>/<fallback_name>`.
    pub fn output_dir(&self, fallback_name: &str) -> PathBuf {
        let root = output_root();
        match &self.output {
            Some(p) if p.is_absolute() => p.clone(),
            Some(p) => root.join(p),
            None => root.join(fallback_name),
        }
    }
}

pub fn output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_ROOT))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_round_trips() {
        let text = "# demo\nkind = pressure_regularity\nn = 8\np = 2.5 # shear thickening\ndt = 2^-8\nT = 0.25\nflavor = gradient\nprofile = multiplicative\npaths = 3\n";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(c.kind, ExperimentKind::PressureRegularity);
        assert_eq!(c.dt, 1.0 / 256.0);
        assert_eq!(c.steps(), 64);
        assert_eq!(c.flavor, Flavor::Gradient);
        assert_eq!(ExperimentConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "n = 8\nn = 9\n",
            "bogus = 1\n",
            "n 8\n",
            "p = 1.5\n",
            "dt = 0.3\nT = 1\n",
            "kind = nope\n",
            "store_every = 3\ndt = 2^-4\nT = 1\n",
            "p = abc\n",
        ] {
            assert!(matches!(ExperimentConfig::parse(text), Err(Error::Config(_))), "{text}");
        }
        let c = ExperimentConfig::parse("p = 1.5\nexperimental = true\n").unwrap();
        assert_eq!(c.p, 1.5);
        let err = ExperimentConfig::parse("p = 1.5\n").unwrap_err().to_string();
        assert!(err.contains("open"), "{err}");
    }

    #[test]
    fn output_resolution() {
        let mut c = ExperimentConfig::default();
        c.output = Some(PathBuf::from("/abs/dir"));
        assert_eq!(c.output_dir("x"), PathBuf::from("/abs/dir"));
        c.output = None;
        assert!(c.output_dir("demo").ends_with("demo"));
    }
}
