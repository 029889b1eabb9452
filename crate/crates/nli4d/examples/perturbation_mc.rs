//! First-order perturbation Monte Carlo on a periodic n-symbol block, as a
//! check of the closed-form model that shares nothing with it but the
//! kernel. Every output bin sums the kernel over all in-band pump pairs;
//! the NLI variance after a least-squares gain is eta (unit launch power).
//! Cost grows as n^3 per realization.
//!
//! cargo run --release --example perturbation_mc -- [format] [n] [realizations]
use nli4d::constellation::*;
use nli4d::nli_model::{compute_chi_integrals, eta_4d, to_db, LinkSpec, NormalizedKernel, QuadSettings};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rustfft::FftPlanner;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let name = args.get(1).map(String::as_str).unwrap_or("QPSK-squared");
    let n: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(256);
    let reals: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(48);
    let c = match name {
        "PM-BPSK" => generate_pm_bpsk(),
        "QPSK-squared" => generate_squared_phase(),
        other => Catalog::open_default().and_then(|cat| cat.load(other)).expect("unknown format"),
    };
    let link = LinkSpec::reference();
    let ker = NormalizedKernel::new(&link);
    let nn = (n * n) as i64;
    // kernel at every lattice pump product (k1 - k)(k2 - k) / n^2
    let mu: Vec<Complex64> = (-nn..=nn).map(|m| ker.eval(m as f64 / nn as f64)).collect();
    let g = 8.0 / 9.0 * link.gamma_si();
    let mut planner = FftPlanner::<f64>::new();
    let (fft, ifft) = (planner.plan_fft_forward(n), planner.plan_fft_inverse(n));
    let h = (n / 2) as i64;
    let pts = c.complex_points();
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(1);
    let zero = Complex64::new(0.0, 0.0);
    let mut acc = [0.0f64; 2];
    for r in 0..reals {
        let mut a = [vec![zero; n], vec![zero; n]];
        for i in 0..n {
            let (x, y) = pts[rng.gen_range(0..pts.len())];
            a[0][i] = x;
            a[1][i] = y;
        }
        // centered spectra, index k + n/2
        let mut cs = [vec![zero; n], vec![zero; n]];
        for p in 0..2 {
            let mut b = a[p].clone();
            fft.process(&mut b);
            for k in 0..n {
                let kk = if (k as i64) < h { k as i64 } else { k as i64 - n as i64 };
                cs[p][(kk + h) as usize] = b[k] / n as f64;
            }
        }
        // Manakov coupling: both polarizations' beat
        let mut s = vec![zero; n * n];
        for i in 0..n {
            for j in 0..n {
                s[i * n + j] = cs[0][i] * cs[0][j].conj() + cs[1][i] * cs[1][j].conj();
            }
        }
        for t in 0..2 {
            let mut b = vec![zero; n];
            for k in 0..n as i64 {
                let mut sum = zero;
                for k1 in 0..n as i64 {
                    for k2 in 0..n as i64 {
                        let k3 = k1 + k2 - k;
                        if (0..n as i64).contains(&k3) {
                            sum += mu[((k1 - k) * (k2 - k) + nn) as usize] * s[k1 as usize * n + k3 as usize] * cs[t][k2 as usize];
                        }
                    }
                }
                b[(k - h).rem_euclid(n as i64) as usize] = Complex64::new(0.0, g) * sum;
            }
            ifft.process(&mut b);
            let num: Complex64 = b.iter().zip(&a[t]).map(|(e, s)| e * s.conj()).sum();
            let den: f64 = a[t].iter().map(|s| s.norm_sqr()).sum();
            let gain = num / den;
            acc[t] += b.iter().zip(&a[t]).map(|(e, s)| (e - gain * s).norm_sqr()).sum::<f64>() / n as f64;
        }
        if (r + 1) % 16 == 0 {
            eprintln!("{} realizations: ({:.3}, {:.3}) dB", r + 1, to_db(acc[0] / (r + 1) as f64), to_db(acc[1] / (r + 1) as f64));
        }
    }
    let (mx, my) = (to_db(acc[0] / reals as f64), to_db(acc[1] / reals as f64));
    let chi = compute_chi_integrals(&link, &QuadSettings::default()).expect("integrals");
    let e = eta_4d(&c, &link, &chi).expect("model");
    println!("{}: perturbation MC ({mx:.3}, {my:.3}) dB, model ({:.3}, {:.3}) dB", c.name, e.eta_x_db(), e.eta_y_db());
}
