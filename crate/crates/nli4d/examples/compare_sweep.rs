//! Model vs 4D-EGN over the whole bundled catalog, aggregated per M, with
//! CSV / JSON / plot-data reports. SSFM is left out to keep it quick; add
//! it with `methods = model, egn, ssfm` and `reference = ssfm`.
//!
//! cargo run --release --example compare_sweep -- [output dir]
use nli4d::bench_harness::{emit_reports, sweep_catalog, ExperimentConfig, ReportMeta};

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "results/compare_sweep".into());
    let mut cfg = ExperimentConfig::from_text("methods = model, egn\nreference = model\n").unwrap();
    cfg.output_dir = out.into();
    let rep = sweep_catalog(&cfg).expect("sweep");
    for r in &rep.run.records {
        let e = r.results.iter().find(|x| x.method.tag() == "EGN_4D").unwrap();
        println!("{:<14} M={:<5} EGN off the model by ({:.3}, {:.3}) dB", r.name, r.m, e.d_eta_x.unwrap(), e.d_eta_y.unwrap());
    }
    for a in &rep.aggregates {
        let w = &a.argmin[0];
        println!("M={:<5} lowest model eta_bar {:.3} dB: {}", a.m, w.eta_bar_db, w.name);
    }
    for e in &rep.run.errors {
        println!("skipped {}: {}", e.name, e.message);
    }
    let written = emit_reports(&rep.run, &rep.aggregates, &ReportMeta::new(&cfg, &rep.run), &cfg.reports, &cfg.output_dir)
        .expect("reports");
    for p in written {
        println!("wrote {}", p.display());
    }
}
