use clap::{Args, Parser, Subcommand};
use nli4d::bench_harness::{
    aggregate, emit_reports, run_comparison, sweep_catalog, ComparisonRun, ExperimentConfig, HarnessError, ReportMeta,
};
use nli4d::constellation::{compute_moments, normalize_energy, parse_constellation_file, Catalog, Constellation4D};
use nli4d::nli_model::{eta_4d, eta_egn_projection, EtaEstimate};
use nli4d::ssfm_sim::run_ssfm;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// NLI power coefficients of dual-polarization 4D formats.
#[derive(Parser)]
#[command(name = "nli4d", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the moments (total order <= 6) of a constellation file.
    Moments {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// 4D model eta for a catalog name or constellation file.
    EtaModel(Single),
    /// 4D-EGN baseline for a catalog name or constellation file.
    EtaEgn(Single),
    /// SSFM estimate for a catalog name or constellation file.
    EtaSsfm {
        #[command(flatten)]
        single: Single,
        /// Write the received waveform (f64 LE) plus a .txt sidecar.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Per-format comparison over a catalog selection; writes reports.
    Compare(Common),
    /// Comparison plus per-M aggregates; writes reports.
    Sweep(Common),
}

#[derive(Args)]
struct Single {
    /// Catalog name or path to a constellation file.
    format: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// Flat `key = value` file applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha_db_km: Option<f64>,
    /// ps/(nm km)
    #[arg(long, allow_negative_numbers = true)]
    dispersion: Option<f64>,
    #[arg(long)]
    wavelength_nm: Option<f64>,
    /// 1/(W km)
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    span_length_km: Option<f64>,
    #[arg(long)]
    spans: Option<u32>,
    #[arg(long)]
    symbol_rate: Option<f64>,
    #[arg(long)]
    rolloff: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    power_dbm: Option<f64>,
    /// Comma-separated names or globs (compare / sweep).
    #[arg(long)]
    formats: Option<String>,
    /// Comma-separated subset of model, egn, ssfm.
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    reference: Option<String>,
    #[arg(long)]
    symbols: Option<usize>,
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    phi_nl_max: Option<f64>,
    #[arg(long)]
    max_step_km: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    catalog: Option<PathBuf>,
    #[arg(long)]
    parallelism: Option<usize>,
    #[arg(long)]
    no_cache: bool,
}

impl Common {
    fn build(&self) -> Result<ExperimentConfig, String> {
        let mut cfg = ExperimentConfig::default();
        if let Some(p) = &self.config {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            cfg.apply_text(&text).map_err(|e| format!("{}: {e}", p.display()))?;
        }
        let flags: Vec<(&str, Option<String>)> = vec![
            ("alpha_db_km", self.alpha_db_km.map(|v| v.to_string())),
            ("dispersion", self.dispersion.map(|v| v.to_string())),
            ("wavelength_nm", self.wavelength_nm.map(|v| v.to_string())),
            ("gamma", self.gamma.map(|v| v.to_string())),
            ("span_length_km", self.span_length_km.map(|v| v.to_string())),
            ("span_count", self.spans.map(|v| v.to_string())),
            ("symbol_rate", self.symbol_rate.map(|v| v.to_string())),
            ("rolloff", self.rolloff.map(|v| v.to_string())),
            ("launch_power_dbm", self.power_dbm.map(|v| v.to_string())),
            ("formats", self.formats.clone()),
            ("methods", self.methods.clone()),
            ("reference", self.reference.clone()),
            ("num_symbols", self.symbols.map(|v| v.to_string())),
            ("seeds", self.seeds.clone()),
            ("phi_nl_max", self.phi_nl_max.map(|v| v.to_string())),
            ("max_step_km", self.max_step_km.map(|v| v.to_string())),
            ("output_dir", self.out.as_ref().map(|p| p.display().to_string())),
            ("catalog_dir", self.catalog.as_ref().map(|p| p.display().to_string())),
            ("parallelism", self.parallelism.map(|v| v.to_string())),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.set(k, &v).map_err(|e| e.to_string())?;
            }
        }
        if self.no_cache {
            cfg.use_cache = false;
        }
        Ok(cfg)
    }
}

fn load(spec: &str, cfg: &ExperimentConfig) -> Result<Constellation4D, String> {
    let p = Path::new(spec);
    if p.is_file() {
        let text = std::fs::read_to_string(p).map_err(|e| format!("{spec}: {e}"))?;
        let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| spec.to_string());
        let c = parse_constellation_file(&text, &name).map_err(|e| format!("{spec}: {e}"))?;
        return normalize_energy(&c).map_err(|e| format!("{spec}: {e}"));
    }
    let cat = match &cfg.catalog_dir {
        Some(d) => Catalog::open(d),
        None => Catalog::open_default(),
    }
    .map_err(|e| e.to_string())?;
    cat.load(spec).map_err(|e| e.to_string())
}

fn print_eta(e: &EtaEstimate) {
    println!(
        "{} {} (M={}): eta_x = {:.3} dB, eta_y = {:.3} dB, eta_bar = {:.3} dB [1/W^2]",
        e.method,
        e.constellation,
        e.m,
        e.eta_x_db(),
        e.eta_y_db(),
        e.eta_bar_db()
    );
}

fn finish(run: &ComparisonRun, written: &[PathBuf]) -> ExitCode {
    for p in written {
        println!("wrote {}", p.display());
    }
    if run.errors.is_empty() && run.records.iter().all(|r| r.flags.is_empty()) {
        return ExitCode::SUCCESS;
    }
    eprintln!("errors:");
    for e in &run.errors {
        eprintln!("  {}: {}", e.name, e.message);
    }
    for r in &run.records {
        for f in &r.flags {
            eprintln!("  {}: {}", r.name, f);
        }
    }
    ExitCode::from(2)
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn real_main() -> Result<ExitCode, String> {
    let cli = Cli::parse();
    let h = |e: HarnessError| e.to_string();
    match cli.cmd {
        Cmd::Moments { file, json } => {
            let text = std::fs::read_to_string(&file).map_err(|e| format!("{}: {e}", file.display()))?;
            let c = parse_constellation_file(&text, &file.display().to_string()).map_err(|e| e.to_string())?;
            let c = normalize_energy(&c).map_err(|e| e.to_string())?;
            let m = compute_moments(&c).map_err(|e| e.to_string())?;
            if json {
                let rows: Vec<_> = m.iter().map(|(k, v)| (k, [v.re, v.im])).collect();
                println!("{}", serde_json::to_string_pretty(&rows).map_err(|e| e.to_string())?);
            } else {
                // write errors (closed pipe under `head`) just end the listing
                let mut out = std::io::stdout().lock();
                let _ = (|| -> std::io::Result<()> {
                    writeln!(out, "# {} M={} (normalized to unit 4D energy)", c.name, c.len())?;
                    writeln!(out, "# a b c d : E[sx^a conj(sx)^b sy^c conj(sy)^d]")?;
                    for (k, v) in m.iter() {
                        writeln!(out, "{} {} {} {} : {:+.15e} {:+.15e}", k[0], k[1], k[2], k[3], v.re, v.im)?;
                    }
                    Ok(())
                })();
            }
        }
        Cmd::EtaModel(s) => {
            let cfg = s.common.build()?;
            let c = load(&s.format, &cfg)?;
            let chi = nli4d::bench_harness::integrals_for(&cfg).map_err(h)?;
            print_eta(&eta_4d(&c, &cfg.link, &chi).map_err(|e| e.to_string())?);
        }
        Cmd::EtaEgn(s) => {
            let cfg = s.common.build()?;
            let c = load(&s.format, &cfg)?;
            let chi = nli4d::bench_harness::integrals_for(&cfg).map_err(h)?;
            print_eta(&eta_egn_projection(&c, &cfg.link, &chi).map_err(|e| e.to_string())?);
        }
        Cmd::EtaSsfm { single, dump } => {
            let cfg = single.common.build()?;
            let c = load(&single.format, &cfg)?;
            for &seed in &cfg.seeds {
                let sc = cfg.sim_config(seed);
                if let Some(path) = &dump {
                    let (tx, _) = nli4d::ssfm_sim::synthesize_tx(&c, &sc).map_err(|e| e.to_string())?;
                    let rx = nli4d::ssfm_sim::propagate(&tx, &sc).map_err(|e| e.to_string())?;
                    rx.dump(path).map_err(|e| e.to_string())?;
                }
                let run = run_ssfm(&c, &sc).map_err(|e| e.to_string())?;
                print!("seed {seed}: ");
                print_eta(&run.eta);
            }
        }
        Cmd::Compare(common) => {
            let cfg = common.build()?;
            let run = run_comparison(&cfg).map_err(h)?;
            let aggs = aggregate(&run.records, cfg.reference);
            let written = emit_reports(&run, &aggs, &ReportMeta::new(&cfg, &run), &cfg.reports, &cfg.output_dir).map_err(h)?;
            for r in &run.records {
                let cells: Vec<String> =
                    r.results.iter().map(|x| format!("{} ({:.2}, {:.2})", x.method, x.eta_x_db, x.eta_y_db)).collect();
                println!("{:<16} M={:<5} {}", r.name, r.m, cells.join("  "));
            }
            return Ok(finish(&run, &written));
        }
        Cmd::Sweep(common) => {
            let cfg = common.build()?;
            let rep = sweep_catalog(&cfg).map_err(h)?;
            let written =
                emit_reports(&rep.run, &rep.aggregates, &ReportMeta::new(&cfg, &rep.run), &cfg.reports, &cfg.output_dir)
                    .map_err(h)?;
            for a in &rep.aggregates {
                for g in &a.gaps {
                    println!("M={:<5} {:<9} gap mean {:.3} max {:.3} dB ({} formats)", a.m, g.method, g.mean, g.max, g.count);
                }
                for w in &a.argmin {
                    println!("M={:<5} {:<9} min eta_bar {:.3} dB: {}", a.m, w.method, w.eta_bar_db, w.name);
                }
            }
            return Ok(finish(&rep.run, &written));
        }
    }
    Ok(ExitCode::SUCCESS)
}
