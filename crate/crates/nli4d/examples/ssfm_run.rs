//! One SSFM run over the reference link, compared with the 4D model.
//!
//! cargo run --release --example ssfm_run -- [format] [log2 symbols] [seed]
use nli4d::constellation::*;
use nli4d::nli_model::{compute_chi_integrals, eta_4d, LinkSpec, QuadSettings};
use nli4d::ssfm_sim::{run_ssfm, SimConfig};
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let name = args.get(1).map(String::as_str).unwrap_or("PM-QPSK");
    let log2: u32 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(15);
    let seed: u64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(1);
    let c = match name {
        "PM-QPSK" => generate_pm_qam(4).unwrap(),
        "PM-16QAM" => generate_pm_qam(16).unwrap(),
        "PM-64QAM" => generate_pm_qam(64).unwrap(),
        "PM-BPSK" => generate_pm_bpsk(),
        "QPSK-squared" => generate_squared_phase(),
        "120cell4_600" => generate_120cell(),
        other => Catalog::open_default().and_then(|cat| cat.load(other)).expect("unknown format"),
    };
    let link = LinkSpec::reference();
    let mut cfg = SimConfig::new(link.clone());
    cfg.num_symbols = 1 << log2;
    cfg.seed = seed;
    let t = Instant::now();
    let run = run_ssfm(&c, &cfg).expect("ssfm");
    println!(
        "{}: SSFM eta = ({:.3}, {:.3}) dB  SNR = ({:.2}, {:.2}) dB  steps/span {}  [{:.1} s]",
        c.name,
        run.eta.eta_x_db(),
        run.eta.eta_y_db(),
        run.snr.snr_db(Pol::X),
        run.snr.snr_db(Pol::Y),
        run.stats.steps_per_span[0],
        t.elapsed().as_secs_f64()
    );
    let chi = compute_chi_integrals(&link, &QuadSettings::default()).unwrap();
    let m = eta_4d(&c, &link, &chi).unwrap();
    println!("{}: model eta = ({:.3}, {:.3}) dB", c.name, m.eta_x_db(), m.eta_y_db());
}
