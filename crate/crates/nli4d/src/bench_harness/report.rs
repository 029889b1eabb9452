use super::{io_err, ComparisonRecord, ComparisonRun, ExperimentConfig, HarnessError, MAggregate, MethodResult, ReportFormat};
use crate::nli_model::Method;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

const METHODS: [Method; 3] = [Method::Model4D, Method::Egn4D, Method::Ssfm];
const FIELDS: [&str; 6] = ["eta_x_db", "eta_y_db", "eta_bar_db", "d_eta_x", "d_eta_y", "d_eta_bar"];

/// CSV column names in file order.
pub fn csv_columns() -> Vec<String> {
    let mut c = vec!["name".to_string(), "M".to_string()];
    for m in METHODS {
        for f in FIELDS {
            c.push(format!("{}_{}", m.tag(), f));
        }
    }
    c.push("reference".into());
    c.push("flags".into());
    c
}

pub const CSV_COLUMNS: usize = 2 + 3 * 6 + 2;

/// Static description of a run, written into the JSON report. Nothing
/// time-dependent goes here; wall-clock data lives in `run_info.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub crate_version: String,
    pub config: ExperimentConfig,
    pub link_digest: String,
    pub quad_density: Option<f64>,
}

impl ReportMeta {
    pub fn new(config: &ExperimentConfig, run: &ComparisonRun) -> Self {
        Self {
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            link_digest: run.link_digest.clone(),
            quad_density: run.quad_density,
        }
    }
}

#[derive(Serialize)]
struct JsonReport<'a> {
    meta: &'a ReportMeta,
    records: &'a [ComparisonRecord],
    aggregates: &'a [MAggregate],
    errors: &'a [super::ItemError],
}

fn f6(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

fn csv_text(records: &[ComparisonRecord]) -> String {
    let cols = csv_columns();
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# one row per constellation; dB(1/W^2) values and absolute dB deviations from the reference method, 6 decimals; empty cell = method not run"
    );
    let _ = writeln!(s, "{}", cols.join(","));
    for r in records {
        let mut row = vec![r.name.clone(), r.m.to_string()];
        for m in METHODS {
            let x = r.result(m);
            row.push(f6(x.map(|x| x.eta_x_db)));
            row.push(f6(x.map(|x| x.eta_y_db)));
            row.push(f6(x.map(|x| x.eta_bar_db)));
            row.push(f6(x.and_then(|x| x.d_eta_x)));
            row.push(f6(x.and_then(|x| x.d_eta_y)));
            row.push(f6(x.and_then(|x| x.d_eta_bar)));
        }
        row.push(r.reference.tag().to_string());
        row.push(r.flags.join(" | "));
        let row: Vec<String> = row
            .into_iter()
            .map(|c| if c.contains([',', '"']) { format!("\"{}\"", c.replace('"', "\"\"")) } else { c })
            .collect();
        let _ = writeln!(s, "{}", row.join(","));
    }
    s
}

/// Parse a results CSV back into (name, M, per-method results).
pub fn parse_results_csv(text: &str) -> Result<Vec<(String, usize, Vec<MethodResult>)>, String> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let head = rdr.headers().map_err(|e| e.to_string())?.clone();
    if head.iter().collect::<Vec<_>>() != csv_columns() {
        return Err("unexpected header".into());
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let opt = |i: usize| -> Result<Option<f64>, String> {
            let v = &rec[i];
            if v.is_empty() {
                Ok(None)
            } else {
                v.parse().map(Some).map_err(|_| format!("bad number {v:?}"))
            }
        };
        let m: usize = rec[1].parse().map_err(|_| "bad M".to_string())?;
        let mut res = Vec::new();
        for (k, meth) in METHODS.iter().enumerate() {
            let b = 2 + 6 * k;
            if let (Some(x), Some(y), Some(bar)) = (opt(b)?, opt(b + 1)?, opt(b + 2)?) {
                res.push(MethodResult {
                    method: *meth,
                    eta_x_db: x,
                    eta_y_db: y,
                    eta_bar_db: bar,
                    d_eta_x: opt(b + 3)?,
                    d_eta_y: opt(b + 4)?,
                    d_eta_bar: opt(b + 5)?,
                });
            }
        }
        out.push((rec[0].to_string(), m, res));
    }
    Ok(out)
}

fn fig1(records: &[ComparisonRecord]) -> String {
    let mut s = String::from("# eta_x and eta_y per format and method [dB 1/W^2]\nname,M,method,eta_x_db,eta_y_db\n");
    for r in records {
        for x in &r.results {
            let _ = writeln!(s, "{},{},{},{:.6},{:.6}", r.name, r.m, x.method.tag(), x.eta_x_db, x.eta_y_db);
        }
    }
    s
}

fn fig2(aggs: &[MAggregate]) -> String {
    let mut s = String::from("# Delta eta_bar vs M against the reference method [dB]\nM,method,count,mean,min,max\n");
    for a in aggs {
        for g in &a.gaps {
            let _ = writeln!(s, "{},{},{},{:.6},{:.6},{:.6}", a.m, g.method.tag(), g.count, g.mean, g.min, g.max);
        }
    }
    s
}

fn fig3(aggs: &[MAggregate]) -> String {
    let mut s = String::from("# minimum eta_bar vs M and its format [dB 1/W^2]\nM,method,eta_bar_db,name\n");
    for a in aggs {
        for g in &a.argmin {
            let _ = writeln!(s, "{},{},{:.6},{}", a.m, g.method.tag(), g.eta_bar_db, g.name);
        }
    }
    s
}

fn write(dir: &Path, name: &str, body: &str, out: &mut Vec<PathBuf>) -> Result<(), HarnessError> {
    let p = dir.join(name);
    std::fs::write(&p, body).map_err(|e| io_err(&p, e))?;
    out.push(p);
    Ok(())
}

/// Write the requested report files into `dir`; returns the paths written.
/// `run_info.json` (timestamp) is always written and is the only
/// non-reproducible output.
pub fn emit_reports(
    run: &ComparisonRun,
    aggregates: &[MAggregate],
    meta: &ReportMeta,
    formats: &[ReportFormat],
    dir: &Path,
) -> Result<Vec<PathBuf>, HarnessError> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut out = Vec::new();
    if formats.contains(&ReportFormat::Csv) {
        write(dir, "results.csv", &csv_text(&run.records), &mut out)?;
    }
    if formats.contains(&ReportFormat::Json) {
        let rep = JsonReport { meta, records: &run.records, aggregates, errors: &run.errors };
        let body = serde_json::to_string_pretty(&rep).map_err(|e| io_err(dir, e))?;
        write(dir, "results.json", &(body + "\n"), &mut out)?;
    }
    if formats.contains(&ReportFormat::PlotData) {
        write(dir, "fig1_eta.csv", &fig1(&run.records), &mut out)?;
        write(dir, "fig2_gap.csv", &fig2(aggregates), &mut out)?;
        write(dir, "fig3_min_eta.csv", &fig3(aggregates), &mut out)?;
    }
    let secs = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    write(dir, "run_info.json", &format!("{{\"unix_time\": {secs}}}\n"), &mut out)?;
    Ok(out)
}
