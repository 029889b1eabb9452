use crate::nli_model::{LinkSpec, Method, QuadSettings};
use crate::ssfm_sim::SimConfig;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReportFormat {
    Csv,
    Json,
    PlotData,
}

impl ReportFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Some(Self::Csv),
            "json" => Some(Self::Json),
            "plot" | "plotdata" | "plot-data" => Some(Self::PlotData),
            _ => None,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{key}: {msg}")]
    Value { key: String, msg: String },
    #[error("invalid experiment: {0}")]
    Invalid(String),
}

/// Everything one comparison or sweep needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub link: LinkSpec,
    /// Catalog names or globs; empty means every catalog entry.
    pub selection: Vec<String>,
    pub methods: Vec<Method>,
    pub reference: Method,
    pub num_symbols: usize,
    pub samples_per_symbol: usize,
    pub phi_nl_max: f64,
    pub max_step_km: f64,
    /// One SSFM run per seed; eta is averaged in linear units.
    pub seeds: Vec<u64>,
    pub quad: QuadSettings,
    pub output_dir: PathBuf,
    pub reports: Vec<ReportFormat>,
    /// None: the environment override or the bundled catalog.
    pub catalog_dir: Option<PathBuf>,
    pub parallelism: usize,
    /// Reuse cached integrals and per-item results in `<output_dir>/cache`.
    pub use_cache: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let sim = SimConfig::new(LinkSpec::reference());
        Self {
            link: LinkSpec::reference(),
            selection: Vec::new(),
            methods: vec![Method::Model4D, Method::Egn4D, Method::Ssfm],
            reference: Method::Ssfm,
            num_symbols: sim.num_symbols,
            samples_per_symbol: sim.samples_per_symbol,
            phi_nl_max: sim.phi_nl_max,
            max_step_km: sim.max_step_km,
            seeds: vec![sim.seed],
            quad: QuadSettings::default(),
            output_dir: PathBuf::from("results"),
            reports: vec![ReportFormat::Csv, ReportFormat::Json, ReportFormat::PlotData],
            catalog_dir: None,
            parallelism: 1,
            use_cache: true,
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.trim().parse().map_err(|_| ConfigError::Value { key: key.into(), msg: format!("cannot parse {v:?}") })
}

fn list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl ExperimentConfig {
    pub fn sim_config(&self, seed: u64) -> SimConfig {
        SimConfig {
            link: self.link.clone(),
            num_symbols: self.num_symbols,
            samples_per_symbol: self.samples_per_symbol,
            phi_nl_max: self.phi_nl_max,
            max_step_km: self.max_step_km,
            seed,
        }
    }

    /// Set one key. Keys are the field names, plus the link fields unprefixed.
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), ConfigError> {
        let l = &mut self.link;
        match key {
            "alpha_db_km" => l.alpha_db_km = num(key, v)?,
            "dispersion" => l.dispersion = num(key, v)?,
            "wavelength_nm" => l.wavelength_nm = num(key, v)?,
            "gamma" => l.gamma = num(key, v)?,
            "span_length_km" => l.span_length_km = num(key, v)?,
            "span_count" => l.span_count = num(key, v)?,
            "symbol_rate" => l.symbol_rate = num(key, v)?,
            "rolloff" => l.rolloff = num(key, v)?,
            "launch_power_dbm" => l.launch_power_dbm = num(key, v)?,
            "formats" | "selection" => self.selection = list(v).map(String::from).collect(),
            "methods" => {
                self.methods = list(v)
                    .map(|m| Method::parse(m).ok_or_else(|| ConfigError::Value { key: key.into(), msg: format!("unknown method {m}") }))
                    .collect::<Result<_, _>>()?
            }
            "reference" => {
                self.reference = Method::parse(v.trim())
                    .ok_or_else(|| ConfigError::Value { key: key.into(), msg: format!("unknown method {v}") })?
            }
            "num_symbols" => self.num_symbols = num(key, v)?,
            "samples_per_symbol" => self.samples_per_symbol = num(key, v)?,
            "phi_nl_max" => self.phi_nl_max = num(key, v)?,
            "max_step_km" => self.max_step_km = num(key, v)?,
            "seed" | "seeds" => self.seeds = list(v).map(|s| num(key, s)).collect::<Result<_, _>>()?,
            "quad_order" => self.quad.order = num(key, v)?,
            "quad_density" => self.quad.density = num(key, v)?,
            "quad_levels" => self.quad.levels = num(key, v)?,
            "quad_rel_tol" => self.quad.rel_tol = num(key, v)?,
            "output_dir" => self.output_dir = PathBuf::from(v.trim()),
            "reports" => {
                self.reports = list(v)
                    .map(|r| ReportFormat::parse(r).ok_or_else(|| ConfigError::Value { key: key.into(), msg: format!("unknown report {r}") }))
                    .collect::<Result<_, _>>()?
            }
            "catalog_dir" => self.catalog_dir = Some(PathBuf::from(v.trim())),
            "parallelism" => self.parallelism = num(key, v)?,
            "use_cache" => self.use_cache = num(key, v)?,
            _ => return Err(ConfigError::Value { key: key.into(), msg: "unknown key".into() }),
        }
        Ok(())
    }

    /// Apply a flat `key = value` file ('#' comments, blank lines ignored) on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax { line: i + 1, msg: "expected key = value".into() })?;
            self.set(k.trim(), v).map_err(|e| ConfigError::Syntax { line: i + 1, msg: e.to_string() })?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut c = Self::default();
        c.apply_text(text)?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.methods.is_empty() {
            return Err(ConfigError::Invalid("no method selected".into()));
        }
        self.link.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.methods.contains(&Method::Ssfm) {
            if self.seeds.is_empty() {
                return Err(ConfigError::Invalid("SSFM requested without seeds".into()));
            }
            self.sim_config(self.seeds[0]).validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        Ok(())
    }
}
