//! Experiment runner: per-format comparisons of the 4D model, the 4D-EGN
//! baseline and the SSFM reference, per-cardinality aggregates, and CSV /
//! JSON / plot-data reports.

mod config;
mod report;

pub use config::{ConfigError, ExperimentConfig, ReportFormat};
pub use report::{csv_columns, emit_reports, parse_results_csv, ReportMeta, CSV_COLUMNS};

use crate::constellation::{Catalog, CatalogError, Constellation4D};
use crate::nli_model::{
    compute_chi_integrals, eta_4d, eta_egn_projection, ChiError, EtaEstimate, LinkIntegrals, Method, ModelError,
};
use crate::ssfm_sim::{run_ssfm, SimError};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Integrals(#[from] ChiError),
    #[error("{path}: {msg}")]
    Io { path: PathBuf, msg: String },
    #[error("empty selection: {0}")]
    EmptySelection(String),
}

pub(crate) fn io_err(path: &Path, e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Io { path: path.to_path_buf(), msg: e.to_string() }
}

/// Round to the 6-decimal canonical form used in every report.
pub fn canonical(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

fn digest(s: &str) -> String {
    hex::encode(&Sha256::digest(s.as_bytes())[..12])
}

pub fn constellation_digest(c: &Constellation4D) -> String {
    digest(&c.to_text())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub method: Method,
    pub eta_x_db: f64,
    pub eta_y_db: f64,
    pub eta_bar_db: f64,
    /// Absolute dB deviations from the reference method (None when it did not run).
    pub d_eta_x: Option<f64>,
    pub d_eta_y: Option<f64>,
    pub d_eta_bar: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRecord {
    pub name: String,
    pub m: usize,
    pub constellation_digest: String,
    pub reference: Method,
    /// Ordered MODEL_4D, EGN_4D, SSFM (those that ran).
    pub results: Vec<MethodResult>,
    /// Largest relative error estimate among the integrals (model methods).
    pub chi_max_rel_err: Option<f64>,
    pub seeds: Vec<u64>,
    /// Non-fatal problems, e.g. an SSFM run that diverged.
    pub flags: Vec<String>,
}

impl ComparisonRecord {
    pub fn result(&self, m: Method) -> Option<&MethodResult> {
        self.results.iter().find(|r| r.method == m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemError {
    pub name: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRun {
    pub records: Vec<ComparisonRecord>,
    pub errors: Vec<ItemError>,
    pub link_digest: String,
    pub quad_density: Option<f64>,
}

fn record_from(
    c: &Constellation4D,
    estimates: &[EtaEstimate],
    reference: Method,
    chi: Option<&LinkIntegrals>,
    seeds: &[u64],
    flags: Vec<String>,
) -> ComparisonRecord {
    let refe = estimates.iter().find(|e| e.method == reference);
    let mut results: Vec<MethodResult> = estimates
        .iter()
        .map(|e| {
            let d = refe.map(|r| (e.eta_x_db() - r.eta_x_db()).abs());
            let dy = refe.map(|r| (e.eta_y_db() - r.eta_y_db()).abs());
            MethodResult {
                method: e.method,
                eta_x_db: canonical(e.eta_x_db()),
                eta_y_db: canonical(e.eta_y_db()),
                eta_bar_db: canonical(e.eta_bar_db()),
                d_eta_x: d.map(canonical),
                d_eta_y: dy.map(canonical),
                d_eta_bar: d.zip(dy).map(|(a, b)| canonical(0.5 * (a + b))),
            }
        })
        .collect();
    results.sort_by_key(|r| r.method);
    let chi_max_rel_err = chi.map(|c| {
        (0..11).map(|i| c.chi_err[i] / c.chi_bar[i].norm().max(1e-300)).fold(0.0, f64::max)
    });
    ComparisonRecord {
        name: c.name.clone(),
        m: c.len(),
        constellation_digest: constellation_digest(c),
        reference,
        results,
        chi_max_rel_err,
        seeds: if estimates.iter().any(|e| e.method == Method::Ssfm) { seeds.to_vec() } else { Vec::new() },
        flags,
    }
}

struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    fn get<T: for<'de> Deserialize<'de>>(&self, key: &str) -> Option<T> {
        let p = self.dir.as_ref()?.join(format!("{key}.json"));
        serde_json::from_str(&std::fs::read_to_string(p).ok()?).ok()
    }

    fn put<T: Serialize>(&self, key: &str, v: &T) -> Result<(), HarnessError> {
        if let Some(d) = &self.dir {
            std::fs::create_dir_all(d).map_err(|e| io_err(d, e))?;
            let p = d.join(format!("{key}.json"));
            let s = serde_json::to_string(v).map_err(|e| io_err(&p, e))?;
            std::fs::write(&p, s).map_err(|e| io_err(&p, e))?;
        }
        Ok(())
    }
}

/// Integrals for the config's link, from the cache when possible.
pub fn integrals_for(cfg: &ExperimentConfig) -> Result<LinkIntegrals, HarnessError> {
    let cache = Cache { dir: cfg.use_cache.then(|| cfg.output_dir.join("cache")) };
    let key = format!(
        "chi-{}-{}",
        cfg.link.integral_digest(),
        digest(&serde_json::to_string(&cfg.quad).expect("serializable"))
    );
    if let Some(v) = cache.get::<LinkIntegrals>(&key) {
        return Ok(v);
    }
    let chi = compute_chi_integrals(&cfg.link, &cfg.quad)?;
    cache.put(&key, &chi)?;
    Ok(chi)
}

/// Catalog entries matching the selection, ascending M then name.
fn resolve(cfg: &ExperimentConfig, cat: &Catalog) -> (Vec<String>, Vec<ItemError>) {
    let mut names = Vec::new();
    let mut errors = Vec::new();
    if cfg.selection.is_empty() {
        names.extend(cat.entries.iter().map(|e| e.name.clone()));
    }
    for pat in &cfg.selection {
        let hits = cat.select(pat);
        if hits.is_empty() {
            errors.push(ItemError { name: pat.clone(), message: "no catalog entry matches".into() });
        }
        names.extend(hits.into_iter().map(|e| e.name.clone()));
    }
    let m_of = |n: &str| cat.entry(n).map(|e| e.m).unwrap_or(0);
    names.sort_by(|a, b| m_of(a).cmp(&m_of(b)).then(a.cmp(b)));
    names.dedup();
    (names, errors)
}

fn evaluate(
    c: &Constellation4D,
    cfg: &ExperimentConfig,
    chi: Option<&LinkIntegrals>,
    cache: &Cache,
) -> Result<(Vec<EtaEstimate>, Vec<String>), String> {
    let cd = constellation_digest(c);
    let ld = cfg.link.digest();
    let mut out = Vec::new();
    let mut flags = Vec::new();
    for &m in &cfg.methods {
        match m {
            Method::Model4D | Method::Egn4D => {
                let chi = chi.expect("integrals computed for model methods");
                let key = format!("{}-{}-{}-{}", m.tag(), cd, ld, digest(&format!("{:?}", chi.chi_bar)));
                if let Some(e) = cache.get::<EtaEstimate>(&key) {
                    out.push(e);
                    continue;
                }
                let r: Result<EtaEstimate, ModelError> =
                    if m == Method::Model4D { eta_4d(c, &cfg.link, chi) } else { eta_egn_projection(c, &cfg.link, chi) };
                let e = r.map_err(|e| format!("{m}: {e}"))?;
                cache.put(&key, &e).map_err(|e| e.to_string())?;
                out.push(e);
            }
            Method::Ssfm => {
                let mut acc = [0.0; 2];
                let mut last = None;
                let mut ok = 0;
                for &seed in &cfg.seeds {
                    let sc = cfg.sim_config(seed);
                    let key = format!("SSFM-{}-{}-{}", cd, ld, sc.digest());
                    let e = match cache.get::<EtaEstimate>(&key) {
                        Some(e) => e,
                        None => match run_ssfm(c, &sc) {
                            Ok(run) => {
                                cache.put(&key, &run.eta).map_err(|e| e.to_string())?;
                                run.eta
                            }
                            Err(err @ (SimError::NonFinite { .. } | SimError::Undefined(_))) => {
                                flags.push(format!("SSFM seed {seed}: {err}"));
                                continue;
                            }
                            Err(err) => return Err(format!("SSFM: {err}")),
                        },
                    };
                    acc[0] += e.eta_x;
                    acc[1] += e.eta_y;
                    ok += 1;
                    last = Some(e);
                }
                if let Some(mut e) = last {
                    e.eta_x = acc[0] / ok as f64;
                    e.eta_y = acc[1] / ok as f64;
                    out.push(e);
                }
            }
        }
    }
    Ok((out, flags))
}

/// One record per selected, available constellation. Integrals are computed
/// once and shared; per-item failures land in `errors`.
pub fn run_comparison(cfg: &ExperimentConfig) -> Result<ComparisonRun, HarnessError> {
    cfg.validate()?;
    let cat = match &cfg.catalog_dir {
        Some(d) => Catalog::open(d)?,
        None => Catalog::open_default()?,
    };
    let (names, mut errors) = resolve(cfg, &cat);
    let needs_chi = cfg.methods.iter().any(|m| *m != Method::Ssfm);
    let chi = if needs_chi { Some(integrals_for(cfg)?) } else { None };
    let cache = Cache { dir: cfg.use_cache.then(|| cfg.output_dir.join("cache")) };

    let mut items = Vec::new();
    for n in &names {
        match cat.load(n) {
            Ok(c) => items.push(c),
            Err(e) => errors.push(ItemError { name: n.clone(), message: e.to_string() }),
        }
    }
    let slots: Vec<Mutex<Option<Result<ComparisonRecord, String>>>> = items.iter().map(|_| Mutex::new(None)).collect();
    let next = Mutex::new(0usize);
    let workers = cfg.parallelism.max(1).min(items.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = {
                    let mut g = next.lock().unwrap();
                    let i = *g;
                    *g += 1;
                    i
                };
                if i >= items.len() {
                    break;
                }
                let c = &items[i];
                let r = evaluate(c, cfg, chi.as_ref(), &cache)
                    .map(|(est, flags)| record_from(c, &est, cfg.reference, chi.as_ref(), &cfg.seeds, flags));
                *slots[i].lock().unwrap() = Some(r);
            });
        }
    });
    let mut records = Vec::new();
    for (c, slot) in items.iter().zip(slots) {
        match slot.into_inner().unwrap().expect("every item evaluated") {
            Ok(r) => records.push(r),
            Err(msg) => errors.push(ItemError { name: c.name.clone(), message: msg }),
        }
    }
    errors.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(ComparisonRun { records, errors, link_digest: cfg.link.digest(), quad_density: chi.map(|c| c.density) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapStats {
    pub method: Method,
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Argmin {
    pub method: Method,
    pub name: String,
    pub eta_bar_db: f64,
    /// Other formats with exactly the same eta_bar (lexicographic tie-break).
    pub ties: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MAggregate {
    pub m: usize,
    pub formats: Vec<String>,
    /// Delta eta_bar against the reference, per non-reference method.
    pub gaps: Vec<GapStats>,
    pub argmin: Vec<Argmin>,
}

/// Per-M gap statistics and eta_bar minimizers; ascending M.
pub fn aggregate(records: &[ComparisonRecord], reference: Method) -> Vec<MAggregate> {
    let mut ms: Vec<usize> = records.iter().map(|r| r.m).collect();
    ms.sort();
    ms.dedup();
    let methods = [Method::Model4D, Method::Egn4D, Method::Ssfm];
    ms.into_iter()
        .map(|m| {
            let mut group: Vec<&ComparisonRecord> = records.iter().filter(|r| r.m == m).collect();
            group.sort_by(|a, b| a.name.cmp(&b.name));
            let mut gaps = Vec::new();
            let mut argmin = Vec::new();
            for meth in methods {
                let vals: Vec<f64> = if meth == reference {
                    Vec::new()
                } else {
                    group.iter().filter_map(|r| r.result(meth).and_then(|x| x.d_eta_bar)).collect()
                };
                if !vals.is_empty() {
                    let sum: f64 = vals.iter().sum();
                    gaps.push(GapStats {
                        method: meth,
                        count: vals.len(),
                        mean: canonical(sum / vals.len() as f64),
                        min: vals.iter().cloned().fold(f64::INFINITY, f64::min),
                        max: vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                    });
                }
                let cands: Vec<(&str, f64)> =
                    group.iter().filter_map(|r| r.result(meth).map(|x| (r.name.as_str(), x.eta_bar_db))).collect();
                if let Some(best) = cands.iter().map(|c| c.1).reduce(f64::min) {
                    let mut winners: Vec<&str> = cands.iter().filter(|c| c.1 == best).map(|c| c.0).collect();
                    winners.sort();
                    argmin.push(Argmin {
                        method: meth,
                        name: winners[0].to_string(),
                        eta_bar_db: best,
                        ties: winners[1..].iter().map(|s| s.to_string()).collect(),
                    });
                }
            }
            MAggregate { m, formats: group.iter().map(|r| r.name.clone()).collect(), gaps, argmin }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub run: ComparisonRun,
    pub aggregates: Vec<MAggregate>,
}

/// Comparison over the selection followed by per-M aggregation.
pub fn sweep_catalog(cfg: &ExperimentConfig) -> Result<SweepReport, HarnessError> {
    let run = run_comparison(cfg)?;
    if run.records.is_empty() {
        let why: Vec<String> = run.errors.iter().map(|e| format!("{}: {}", e.name, e.message)).collect();
        return Err(HarnessError::EmptySelection(why.join("; ")));
    }
    let aggregates = aggregate(&run.records, cfg.reference);
    Ok(SweepReport { run, aggregates })
}
