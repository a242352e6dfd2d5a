//! Flat `key = value` experiment configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Schemes a trial can run. Declaration order is the output order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    /// Joint selection and phase optimization on the full grid.
    Fris,
    /// Uniform sub-lattice, CEO-optimized phases.
    Ris,
    /// Uniform sub-lattice, co-phased quantized levels.
    Aligned,
    /// Exhaustive search over selections and phases.
    Oracle,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Fris, Scheme::Ris, Scheme::Aligned, Scheme::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Fris => "fris",
            Scheme::Ris => "ris",
            Scheme::Aligned => "aligned",
            Scheme::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheme {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub power_dbm: f64,
    pub noise_dbm: f64,
    pub rho_db: f64,
    pub alpha: f64,
    pub fc_hz: f64,
    /// Surface side length in wavelengths.
    pub surface_side_lambda: f64,
    pub my: usize,
    pub mz: usize,
    pub m_hat: usize,
    pub bits: u32,
    pub d_br_m: f64,
    pub d_ru_m: f64,
    /// `A = sample_factor · (M + M̂)`.
    pub sample_factor: usize,
    pub elite_frac: f64,
    pub smoothing: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub schemes: Vec<Scheme>,
    pub correlate_both: bool,
    pub out_path: PathBuf,
    pub prob_floor: f64,
    pub eigen_floor: f64,
    pub oracle_budget: u128,
    /// Record wall-clock time per scheme. Off by default so output is a
    /// pure function of the config.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            power_dbm: 30.0,
            noise_dbm: -115.0,
            rho_db: -20.0,
            alpha: 2.6,
            fc_hz: 5e9,
            surface_side_lambda: 2.0,
            my: 10,
            mz: 10,
            m_hat: 25,
            bits: 2,
            d_br_m: 400.0,
            d_ru_m: 75.0,
            sample_factor: 5,
            elite_frac: 0.05,
            smoothing: 0.55,
            tol: 1e-4,
            max_iter: 500,
            trials: 100,
            master_seed: 1,
            schemes: vec![Scheme::Fris, Scheme::Ris],
            correlate_both: false,
            out_path: PathBuf::from("results.csv"),
            prob_floor: 0.0,
            eigen_floor: 0.0,
            oracle_budget: crate::baselines::DEFAULT_ORACLE_BUDGET,
            timing: false,
        }
    }
}

/// Every accepted key. `grid` is shorthand that sets `my` and `mz`.
pub const KEYS: &[&str] = &[
    "power_dbm",
    "noise_dbm",
    "rho_db",
    "alpha",
    "fc_hz",
    "surface_side_lambda",
    "my",
    "mz",
    "grid",
    "m_hat",
    "bits",
    "d_br_m",
    "d_ru_m",
    "sample_factor",
    "elite_frac",
    "smoothing",
    "tol",
    "max_iter",
    "trials",
    "master_seed",
    "schemes",
    "correlate_both",
    "out_path",
    "prob_floor",
    "eigen_floor",
    "oracle_budget",
    "timing",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value {value:?} for {key}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!("invalid boolean {value:?} for {key}"))),
    }
}

impl ExperimentConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "power_dbm" => self.power_dbm = parse(key, value)?,
            "noise_dbm" => self.noise_dbm = parse(key, value)?,
            "rho_db" => self.rho_db = parse(key, value)?,
            "alpha" => self.alpha = parse(key, value)?,
            "fc_hz" => self.fc_hz = parse(key, value)?,
            "surface_side_lambda" => self.surface_side_lambda = parse(key, value)?,
            "my" => self.my = parse(key, value)?,
            "mz" => self.mz = parse(key, value)?,
            "grid" => {
                let n = parse(key, value)?;
                self.my = n;
                self.mz = n;
            }
            "m_hat" => self.m_hat = parse(key, value)?,
            "bits" => self.bits = parse(key, value)?,
            "d_br_m" => self.d_br_m = parse(key, value)?,
            "d_ru_m" => self.d_ru_m = parse(key, value)?,
            "sample_factor" => self.sample_factor = parse(key, value)?,
            "elite_frac" => self.elite_frac = parse(key, value)?,
            "smoothing" => self.smoothing = parse(key, value)?,
            "tol" => self.tol = parse(key, value)?,
            "max_iter" => self.max_iter = parse(key, value)?,
            "trials" => self.trials = parse(key, value)?,
            "master_seed" => self.master_seed = parse(key, value)?,
            "schemes" => {
                let mut schemes = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::parse)
                    .collect::<Result<Vec<Scheme>>>()?;
                schemes.sort();
                schemes.dedup();
                self.schemes = schemes;
            }
            "correlate_both" => self.correlate_both = parse_bool(key, value)?,
            "out_path" => self.out_path = PathBuf::from(value),
            "prob_floor" => self.prob_floor = parse(key, value)?,
            "eigen_floor" => self.eigen_floor = parse(key, value)?,
            "oracle_budget" => {
                // accept 1e6-style values as well as plain integers
                self.oracle_budget = match value.parse::<u128>() {
                    Ok(v) => v,
                    Err(_) => {
                        let f: f64 = parse(key, value)?;
                        if !(f.is_finite() && f >= 0.0 && f.fract() == 0.0) {
                            return Err(Error::Config(format!("invalid value {value:?} for {key}")));
                        }
                        f as u128
                    }
                }
            }
            "timing" => self.timing = parse_bool(key, value)?,
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected key=value, got {assignment:?}")))?;
        self.set(k, v)
    }

    /// Parses config text on top of the defaults. Blank lines and `#`
    /// comments are ignored; unknown keys are errors.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            cfg.set(k, v)
                .map_err(|e| Error::Config(format!("line {}: {}", lineno + 1, strip_prefix(e))))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::parse_str(&text)
    }

    /// Serializes to the same `key = value` format.
    pub fn to_config_string(&self) -> String {
        let schemes: Vec<&str> = self.schemes.iter().map(|s| s.name()).collect();
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        put("power_dbm", self.power_dbm.to_string());
        put("noise_dbm", self.noise_dbm.to_string());
        put("rho_db", self.rho_db.to_string());
        put("alpha", self.alpha.to_string());
        put("fc_hz", self.fc_hz.to_string());
        put("surface_side_lambda", self.surface_side_lambda.to_string());
        put("my", self.my.to_string());
        put("mz", self.mz.to_string());
        put("m_hat", self.m_hat.to_string());
        put("bits", self.bits.to_string());
        put("d_br_m", self.d_br_m.to_string());
        put("d_ru_m", self.d_ru_m.to_string());
        put("sample_factor", self.sample_factor.to_string());
        put("elite_frac", self.elite_frac.to_string());
        put("smoothing", self.smoothing.to_string());
        put("tol", self.tol.to_string());
        put("max_iter", self.max_iter.to_string());
        put("trials", self.trials.to_string());
        put("master_seed", self.master_seed.to_string());
        put("schemes", schemes.join(","));
        put("correlate_both", self.correlate_both.to_string());
        put("out_path", self.out_path.display().to_string());
        put("prob_floor", self.prob_floor.to_string());
        put("eigen_floor", self.eigen_floor.to_string());
        put("oracle_budget", self.oracle_budget.to_string());
        put("timing", self.timing.to_string());
        out
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("alpha", self.alpha),
            ("fc_hz", self.fc_hz),
            ("surface_side_lambda", self.surface_side_lambda),
            ("d_br_m", self.d_br_m),
            ("d_ru_m", self.d_ru_m),
        ];
        for (k, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{k} must be positive, got {v}")));
            }
        }
        for (k, v) in [("power_dbm", self.power_dbm), ("noise_dbm", self.noise_dbm), ("rho_db", self.rho_db)] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{k} must be finite, got {v}")));
            }
        }
        if self.my != self.mz {
            return Err(Error::Config(format!("only square surfaces are supported, got {}x{}", self.my, self.mz)));
        }
        if self.my < 2 {
            return Err(Error::Config(format!("grid must be at least 2x2, got {}x{}", self.my, self.mz)));
        }
        let m = self.my * self.mz;
        if self.m_hat == 0 || self.m_hat > m {
            return Err(Error::Config(format!("m_hat must lie in 1..={m}, got {}", self.m_hat)));
        }
        crate::rate::check_bits(self.bits).map_err(|e| Error::Config(strip_prefix(e)))?;
        if self.sample_factor == 0 {
            return Err(Error::Config("sample_factor must be ≥ 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be ≥ 1".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::Config("schemes must not be empty".into()));
        }
        if !(self.eigen_floor.is_finite() && self.eigen_floor >= 0.0) {
            return Err(Error::Config(format!("eigen_floor must be nonnegative, got {}", self.eigen_floor)));
        }
        self.ceo_config().validate()
    }

    pub fn total_elements(&self) -> usize {
        self.my * self.mz
    }

    pub fn ceo_config(&self) -> crate::ceo::CeoConfig {
        crate::ceo::CeoConfig {
            sample_count: self.sample_factor * (self.total_elements() + self.m_hat),
            elite_frac: self.elite_frac,
            smoothing: self.smoothing,
            tol: self.tol,
            max_iter: self.max_iter,
            prob_floor: self.prob_floor,
        }
    }
}

fn strip_prefix(e: Error) -> String {
    match e {
        Error::Config(msg) | Error::InvalidInput(msg) => msg,
        other => other.to_string(),
    }
}

/// `10^((dBm − 30)/10)` watts.
pub fn dbm_to_watt(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watt_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

/// `10^(dB/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
