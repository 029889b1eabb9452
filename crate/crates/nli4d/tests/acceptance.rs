//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero when an
//! evaluable criterion fails; a criterion whose constellations are not
//! bundled prints FAIL (not evaluable) and does not affect the exit code.

use nli4d::bench_harness::*;
use nli4d::constellation::*;
use nli4d::nli_model::*;
use nli4d::ssfm_sim::*;
use num_complex::Complex64;
use num_rational::Ratio;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};
use std::process::ExitCode;

mod common;

enum Verdict {
    Pass,
    Fail,
    NotEvaluable,
}

struct Line {
    id: &'static str,
    verdict: Verdict,
    detail: String,
}

fn line(id: &'static str, ok: bool, detail: String) -> Line {
    Line { id, verdict: if ok { Verdict::Pass } else { Verdict::Fail }, detail }
}

fn main() -> ExitCode {
    let t0 = std::time::Instant::now();
    let link = LinkSpec::reference();
    let chi = compute_chi_integrals(&link, &QuadSettings::default()).expect("band integrals");
    let cat = Catalog::open_default().expect("catalog");
    let mut out = Vec::new();

    out.push(criterion1(&link, &chi, &cat));

    // one full comparison over every bundled format feeds criteria 2 to 4
    let dir = tempfile::tempdir().expect("tempdir");
    let mut cfg = ExperimentConfig { output_dir: dir.path().to_path_buf(), use_cache: false, ..Default::default() };
    cfg.selection = cat.available().map(|e| e.name.clone()).collect();
    eprintln!("running model, EGN and SSFM over {} formats...", cfg.selection.len());
    let rep = sweep_catalog(&cfg).expect("sweep");
    for r in &rep.run.records {
        let cells: Vec<String> =
            r.results.iter().map(|x| format!("{} ({:.3}, {:.3})", x.method.tag(), x.eta_x_db, x.eta_y_db)).collect();
        println!("  {:<14} M={:<5} {}", r.name, r.m, cells.join("  "));
    }
    out.push(criterion2(&rep));
    out.push(criterion3(&rep));
    out.push(criterion4(&rep, &cat));

    let props = criterion5(&link, &chi, &rep);
    let good = props.iter().filter(|l| matches!(l.verdict, Verdict::Pass)).count();
    let detail = props
        .iter()
        .map(|l| format!("({}) {} {}", l.id, if matches!(l.verdict, Verdict::Pass) { "PASS" } else { "FAIL" }, l.detail))
        .collect::<Vec<_>>()
        .join("; ");
    out.push(line("5", good == props.len(), format!("{good}/{} properties: {detail}", props.len())));
    out.push(criterion6());

    let mut failed = 0;
    for l in &out {
        let v = match l.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => {
                failed += 1;
                "FAIL"
            }
            Verdict::NotEvaluable => "FAIL (not evaluable)",
        };
        println!("criterion {}: {v}: {}", l.id, l.detail);
    }
    println!("acceptance finished in {:.0} s", t0.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn criterion1(link: &LinkSpec, chi: &LinkIntegrals, cat: &Catalog) -> Line {
    let table = [
        ("dicyclic4_16", 30.2, 30.2),
        ("4D-2A8PSK-5b", 30.3, 30.3),
        ("4D-2A8PSK-6b", 30.3, 30.3),
        ("4D-2A8PSK-7b", 30.3, 30.3),
        ("w4_256", 30.7, 30.7),
        ("sphere4_512", 30.7, 30.7),
        ("120cell4_600", 30.3, 30.3),
        ("a4_2048", 30.7, 30.8),
        ("a4_4096", 30.8, 30.7),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    let mut missing = Vec::new();
    for (name, x, y) in table {
        match cat.load(name) {
            Ok(c) => {
                let e = eta_4d(&c, link, chi).expect("model");
                let good = (e.eta_x_db() - x).abs() <= 0.15 && (e.eta_y_db() - y).abs() <= 0.15;
                ok &= good;
                parts.push(format!("{name} ({:.2}, {:.2}) vs ({x}, {y})", e.eta_x_db(), e.eta_y_db()));
            }
            Err(_) => missing.push(name),
        }
    }
    let mut d = format!("published eta within 0.15 dB: {}", parts.join("; "));
    if !missing.is_empty() {
        d += &format!("; not bundled, not evaluated: {}", missing.join(", "));
    }
    line("1", ok, d)
}

fn record<'a>(rep: &'a SweepReport, name: &str) -> Option<&'a ComparisonRecord> {
    rep.run.records.iter().find(|r| r.name == name)
}

fn criterion2(rep: &SweepReport) -> Line {
    let r = record(rep, "PM-64QAM").expect("PM-64QAM is bundled");
    let v: Vec<f64> = [Method::Model4D, Method::Egn4D, Method::Ssfm].iter().map(|&m| r.result(m).unwrap().eta_bar_db).collect();
    let spread = v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min);
    line(
        "2",
        spread <= 0.1,
        format!("PM-64QAM eta_bar model {:.3}, EGN {:.3}, SSFM {:.3} dB; spread {spread:.3} dB (<= 0.1)", v[0], v[1], v[2]),
    )
}

fn criterion3(rep: &SweepReport) -> Line {
    let mut ok = true;
    let mut parts = Vec::new();
    for a in &rep.aggregates {
        let g = a.gaps.iter().find(|g| g.method == Method::Model4D).expect("model gap");
        ok &= g.mean <= 0.15 && g.max <= 0.3;
        parts.push(format!("M={} mean {:.3} max {:.3}", a.m, g.mean, g.max));
    }
    line("3", ok, format!("model vs SSFM gap per M (mean <= 0.15, max <= 0.3 dB): {}", parts.join("; ")))
}

fn criterion4(rep: &SweepReport, cat: &Catalog) -> Line {
    let needed = ["4D-64PRS", "4D-OS128"];
    let missing: Vec<&str> = needed.iter().copied().filter(|n| cat.load(n).is_err()).collect();
    if !missing.is_empty() {
        return Line {
            id: "4",
            verdict: Verdict::NotEvaluable,
            detail: format!("constellation data not bundled: {}", missing.join(", ")),
        };
    }
    let mut ok = true;
    let mut parts = Vec::new();
    for n in needed {
        let r = record(rep, n).expect("evaluated");
        let egn = r.result(Method::Egn4D).unwrap();
        let model = r.result(Method::Model4D).unwrap();
        let (de, dm) = (egn.d_eta_x.unwrap().min(egn.d_eta_y.unwrap()), model.d_eta_x.unwrap().max(model.d_eta_y.unwrap()));
        ok &= de >= 0.4 && dm <= 0.15;
        parts.push(format!("{n}: EGN off by >= {de:.2}, model within {dm:.2} dB"));
    }
    if let Some(r) = record(rep, "c4_16") {
        let dx = r.result(Method::Egn4D).unwrap().d_eta_x.unwrap();
        ok &= dx >= 0.6;
        parts.push(format!("c4_16: EGN eta_x off by {dx:.2} dB"));
    }
    line("4", ok, parts.join("; "))
}

fn criterion5(link: &LinkSpec, chi: &LinkIntegrals, rep: &SweepReport) -> Vec<Line> {
    let mut v = Vec::new();

    // (a) linear link
    let mut lin = link.clone();
    lin.gamma = 0.0;
    let sc = SimConfig { num_symbols: 1 << 16, ..SimConfig::new(lin) };
    let c16 = generate_pm_qam(16).unwrap();
    let (tx, rec) = synthesize_tx(&c16, &sc).unwrap();
    let rx = rx_dsp(&propagate(&tx, &sc).unwrap(), &sc, &rec).unwrap();
    let s = estimate_snr(&rx, &rec).unwrap();
    let (sx, sy) = (s.snr_db(Pol::X), s.snr_db(Pol::Y));
    v.push(line("a", sx >= 100.0 && sy >= 100.0, format!("gamma = 0 end-to-end SNR ({sx:.1}, {sy:.1}) dB (>= 100)")));

    // (b) first-order regime: -25 dBm against the -20 dBm SSFM of the sweep
    let dic = Catalog::open_default().unwrap().load("dicyclic4_16").unwrap();
    let at20 = record(rep, "dicyclic4_16").unwrap().result(Method::Ssfm).unwrap();
    let at25 = run_ssfm(&dic, &SimConfig::new(link.with_power(-25.0))).unwrap().eta;
    let (dx, dy) = ((at25.eta_x_db() - at20.eta_x_db).abs(), (at25.eta_y_db() - at20.eta_y_db).abs());
    v.push(line("b", dx <= 0.05 && dy <= 0.05, format!("dicyclic4_16 eta at -25 vs -20 dBm differs by ({dx:.4}, {dy:.4}) dB (<= 0.05)")));

    // (c) PM-2D reduction
    let mut worst: f64 = 0.0;
    for m in [4, 16, 64] {
        let c = generate_pm_qam(m).unwrap();
        let a = eta_4d(&c, link, chi).unwrap();
        let b = eta_egn_projection(&c, link, chi).unwrap();
        worst = worst.max((a.eta_x_db() - b.eta_x_db()).abs()).max((a.eta_y_db() - b.eta_y_db()).abs());
    }
    v.push(line("c", worst <= 0.01, format!("PM-QPSK/16QAM/64QAM model vs EGN max {worst:.2e} dB (<= 0.01)")));

    // (d) Gaussian moments
    let mut worst: f64 = 0.0;
    for pol in [Pol::X, Pol::Y] {
        let k = compute_modulation_coefficients_for(&MomentSet::gaussian(0.5, 0.5), pol).unwrap();
        worst = k.as_array()[1..].iter().chain(k.omega.iter()).map(|z| z.norm()).fold(worst, f64::max);
    }
    v.push(line("d", worst <= 1e-12, format!("Gaussian input: largest non-Phi1 coefficient {worst:.1e} (<= 1e-12)")));

    // (e) swap equivariance
    let mut ok = true;
    for c in [generate_squared_phase(), generate_2a8psk(6, 0.6).unwrap(), generate_pm_bpsk(), generate_120cell()] {
        let a = eta_4d(&c, link, chi).unwrap();
        let b = eta_4d(&c.swap_polarizations(), link, chi).unwrap();
        ok &= a.eta_x.to_bits() == b.eta_y.to_bits() && a.eta_y.to_bits() == b.eta_x.to_bits();
    }
    v.push(line("e", ok, "coordinate swap maps (eta_x, eta_y) to (eta_y, eta_x) bit for bit on 4 formats".into()));

    // (f) dense lattice oracle
    let lat = common::Lattice::new(link, 401);
    let mut worst: f64 = 0.0;
    for i in 0..11 {
        let o = lat.class_integral(&common::rep_blocks(i));
        let j = chi.normalized(i);
        worst = worst.max((o - j).norm() / j.norm());
    }
    let z = lat.zetas();
    for (k, zk) in z.iter().enumerate() {
        let q = chi.zeta_bar[k] * chi.symbol_rate;
        worst = worst.max((zk - q).norm() / q.norm());
    }
    v.push(line("f", worst <= 1e-3, format!("401-node lattice oracle vs quadrature: max rel {worst:.1e} (<= 1e-3)")));

    // (g) SNR estimator on synthetic AWGN
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(5);
    let nd = Normal::new(0.0, (0.5e-3f64).sqrt()).unwrap();
    let pts = generate_pm_qam(4).unwrap().complex_points();
    let txs: Vec<Complex64> = (0..1 << 16).map(|i| pts[i % 4].0 * 2f64.sqrt()).collect();
    let rxs: Vec<Complex64> = txs.iter().map(|t| t + Complex64::new(nd.sample(&mut rng), nd.sample(&mut rng))).collect();
    let snr = 10.0 * snr_data_aided(&rxs, &txs).unwrap().0.log10();
    v.push(line("g", (snr - 30.0).abs() <= 0.05, format!("AWGN variance 1e-3 on unit symbols: {snr:.3} dB (30 +- 0.05)")));

    // (h) byte-identical reports on rerun
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::from_text("methods = model, egn\nreference = model\nuse_cache = false").unwrap();
    cfg.output_dir = dir.path().to_path_buf();
    let files = ["results.csv", "results.json", "fig1_eta.csv", "fig2_gap.csv", "fig3_min_eta.csv"];
    let mut snapshots = Vec::new();
    for _ in 0..2 {
        let r = sweep_catalog(&cfg).unwrap();
        emit_reports(&r.run, &r.aggregates, &ReportMeta::new(&cfg, &r.run), &cfg.reports, dir.path()).unwrap();
        snapshots.push(files.map(|f| std::fs::read(dir.path().join(f)).unwrap()));
    }
    v.push(line("h", snapshots[0] == snapshots[1], format!("{} report files byte-identical on rerun", files.len())));
    v
}

fn criterion6() -> Line {
    let lv = [-3i64, -1, 1, 3];
    let (mut m2, mut m4) = (Ratio::from_integer(0i64), Ratio::from_integer(0i64));
    for a in lv {
        for b in lv {
            let e = a * a + b * b;
            m2 += Ratio::new(e, 16);
            m4 += Ratio::new(e * e, 16);
        }
    }
    let k = m4 / (m2 * m2);
    let m = compute_moments(&generate_pm_qam(16).unwrap()).unwrap();
    let kf = m.abs_x(2) / (m.abs_x(1) * m.abs_x(1));
    let mut worst: f64 = 0.0;
    for side in [2usize, 4, 8] {
        let mm = compute_moments(&generate_pm_qam(side * side).unwrap()).unwrap();
        let lv: Vec<f64> = (0..side).map(|i| (2 * i) as f64 - (side - 1) as f64).collect();
        let pts: Vec<Complex64> = lv.iter().flat_map(|&a| lv.iter().map(move |&b| Complex64::new(a, b))).collect();
        let p: f64 = pts.iter().map(|z| z.norm_sqr()).sum::<f64>() / pts.len() as f64;
        let pts: Vec<Complex64> = pts.iter().map(|z| z * (0.5 / p).sqrt()).collect();
        let mom = |a: u8, b: u8| -> Complex64 {
            pts.iter().map(|z| z.powu(a as u32) * z.conj().powu(b as u32)).sum::<Complex64>() / pts.len() as f64
        };
        for (s, v) in mm.iter() {
            worst = worst.max((v - mom(s[0], s[1]) * mom(s[2], s[3])).norm());
        }
    }
    line(
        "6",
        k == Ratio::new(132, 100) && (kf - 1.32).abs() < 1e-14 && worst <= 1e-13,
        format!("16QAM kurtosis {k} exactly (float {kf:.15}); PM-QAM product factorization max err {worst:.1e} (<= 1e-13)"),
    )
}
