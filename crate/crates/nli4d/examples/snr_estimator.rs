//! Data-aided SNR estimation and the conversion to eta on synthetic data.
use nli4d::constellation::*;
use nli4d::nli_model::LinkSpec;
use nli4d::ssfm_sim::{estimate_snr, eta_from_snr, snr_data_aided, RxRecord, SymbolRecord};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

fn main() {
    let link = LinkSpec::reference();
    let p = link.launch_power();
    let pts = generate_pm_qam(16).unwrap().complex_points();
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(3);
    let n = 1 << 16;
    let pick = rand::distributions::Uniform::new(0, pts.len());
    let syms: Vec<(Complex64, Complex64)> = (0..n).map(|_| pts[pick.sample(&mut rng)]).collect();
    let (x, y): (Vec<Complex64>, Vec<Complex64>) = syms.iter().map(|&(a, b)| (a * p.sqrt(), b * p.sqrt())).unzip();
    let tx = SymbolRecord::from_symbols("PM-16QAM", 256, x, y);
    // NLI-like noise at a chosen eta, plus a fixed gain and phase
    for eta_db in [28.0, 31.0] {
        // eta = noise variance per polarization / P^3
        let var = 10f64.powf(eta_db / 10.0) * p.powi(3);
        let nd = Normal::new(0.0, (var / 2.0).sqrt()).unwrap();
        let g = Complex64::from_polar(0.9, 0.2);
        let mut noisy = |v: &[Complex64]| -> Vec<Complex64> {
            v.iter().map(|s| (s + Complex64::new(nd.sample(&mut rng), nd.sample(&mut rng))) * g).collect()
        };
        let rx = RxRecord { x: noisy(&tx.x), y: noisy(&tx.y), gain: [Complex64::new(1.0, 0.0); 2] };
        let r = estimate_snr(&rx, &tx).unwrap();
        let e = eta_from_snr(&r, &link).unwrap();
        println!(
            "injected eta {eta_db:.1} dB: SNR ({:.2}, {:.2}) dB, fitted gain {:.3}, recovered eta ({:.3}, {:.3}) dB",
            r.snr_db(Pol::X),
            r.snr_db(Pol::Y),
            r.gain[0],
            e.eta_x_db(),
            e.eta_y_db()
        );
    }
    let (s, _) = snr_data_aided(&tx.x, &tx.x).unwrap();
    println!("noiseless input: SNR = {s} (eta undefined: {})", eta_from_snr(&estimate_snr(&RxRecord { x: tx.x.clone(), y: tx.y.clone(), gain: [Complex64::new(1.0, 0.0); 2] }, &tx).unwrap(), &link).unwrap_err());
}
