use nli4d::constellation::*;
use nli4d::nli_model::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rustfft::FftPlanner;
use std::sync::OnceLock;

fn link() -> LinkSpec {
    LinkSpec::reference()
}

fn chi() -> &'static LinkIntegrals {
    static CHI: OnceLock<LinkIntegrals> = OnceLock::new();
    CHI.get_or_init(|| compute_chi_integrals(&link(), &QuadSettings::default()).unwrap())
}

fn dicyclic() -> Constellation4D {
    normalize_energy(&generate_dicyclic(16).unwrap()).unwrap()
}

#[test]
fn gaussian_moments_leave_only_phi1() {
    let m = MomentSet::gaussian(0.5, 0.5);
    let names = [
        "Phi1", "Phi2", "Phi3", "Psi1", "Psi2", "Psi3", "Psi4", "Lambda1", "Lambda2", "Lambda3", "Lambda4", "Lambda5",
        "Lambda6", "Xi1",
    ];
    for pol in [Pol::X, Pol::Y] {
        let c = compute_modulation_coefficients_for(&m, pol).unwrap();
        for (i, v) in c.as_array().iter().enumerate() {
            if i == 0 {
                assert!(v.re > 0.1, "{pol:?} Phi1 = {v}");
            } else {
                assert!(v.norm() < 1e-12, "{pol:?} {} = {v}", names[i]);
            }
        }
        assert!(c.omega.iter().all(|w| w.norm() < 1e-12));
    }
    // pure GN term Px (2 Px^2 + Py^2) J1
    let (ex, ey) = eta_from_moments(&m, &link(), chi()).unwrap();
    let g = link().gamma_si();
    let gn = (8.0 / 9.0f64).powi(2) * g * g * 0.5 * (2.0 * 0.25 + 0.25) * chi().normalized(0).re;
    assert!((ex / gn - 1.0).abs() < 1e-12 && (ey / gn - 1.0).abs() < 1e-12);
}

/// For PM-2D formats the model equals the per-polarization EGN closed form.
#[test]
fn pm2d_reduces_to_egn() {
    for m in [4, 16, 64] {
        let c = generate_pm_qam(m).unwrap();
        let mm = compute_moments(&c).unwrap();
        let e = eta_4d(&c, &link(), chi()).unwrap();
        let p = eta_egn_projection(&c, &link(), chi()).unwrap();
        let mx = [mm.abs_x(1), mm.abs_x(2), mm.abs_x(3)];
        let my = [mm.abs_y(1), mm.abs_y(2), mm.abs_y(3)];
        let cf = egn_closed_form(mx, my, &link(), chi());
        assert!((e.eta_x_db() - p.eta_x_db()).abs() <= 0.01 && (e.eta_y_db() - p.eta_y_db()).abs() <= 0.01);
        assert!((e.eta_x / cf - 1.0).abs() < 1e-9, "{}: {} vs {}", c.name, e.eta_x, cf);
        assert!((e.eta_y / egn_closed_form(my, mx, &link(), chi()) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn swap_equivariance_exact() {
    for c in [generate_squared_phase(), generate_2a8psk(6, 0.6).unwrap(), dicyclic(), generate_pm_bpsk()] {
        let a = eta_4d(&c, &link(), chi()).unwrap();
        let b = eta_4d(&c.swap_polarizations(), &link(), chi()).unwrap();
        assert_eq!((a.eta_x, a.eta_y), (b.eta_y, b.eta_x), "{}", c.name);
        let m = compute_moments(&c).unwrap();
        let cy = compute_modulation_coefficients_for(&m, Pol::Y).unwrap();
        let cs = compute_modulation_coefficients(&m.swapped()).unwrap();
        assert_eq!(cy.as_array(), cs.as_array(), "{}", c.name);
    }
    // asymmetric format: the two polarizations really differ
    let a = eta_4d(&generate_squared_phase(), &link(), chi()).unwrap();
    assert!((a.eta_x_db() - a.eta_y_db()).abs() > 0.2);
}

#[test]
fn power_invariance_bit_stable() {
    let c = generate_2a8psk(5, 0.6).unwrap();
    let r = eta_4d(&c, &link(), chi()).unwrap();
    for p in [0.0, 3.0] {
        let e = eta_4d(&c, &link().with_power(p), chi()).unwrap();
        assert_eq!((e.eta_x.to_bits(), e.eta_y.to_bits()), (r.eta_x.to_bits(), r.eta_y.to_bits()));
    }
}

#[test]
fn gaussian_dominates_120cell() {
    let (gx, gy) = eta_from_moments(&MomentSet::gaussian(0.5, 0.5), &link(), chi()).unwrap();
    let c = eta_4d(&generate_120cell(), &link(), chi()).unwrap();
    assert!(gx >= c.eta_x && gy >= c.eta_y);
}

#[test]
fn symmetric_families_equal_polarizations() {
    for c in [dicyclic(), generate_120cell(), generate_2a8psk(5, 0.6).unwrap(), generate_2a8psk(7, 0.6).unwrap()] {
        let e = eta_4d(&c, &link(), chi()).unwrap();
        assert!((e.eta_x / e.eta_y - 1.0).abs() < 1e-10, "{}", c.name);
    }
}

/// Published optimal-format values for the bundled constellations, quoted to 0.1 dB.
#[test]
fn tabulated_rows_available() {
    let cat = Catalog::open_default().unwrap();
    let rows = [
        ("dicyclic4_16", 30.2, 30.2),
        ("4D-2A8PSK-5b", 30.3, 30.3),
        ("4D-2A8PSK-6b", 30.3, 30.3),
        ("4D-2A8PSK-7b", 30.3, 30.3),
        ("120cell4_600", 30.3, 30.3),
    ];
    for (name, x, y) in rows {
        let e = eta_4d(&cat.load(name).unwrap(), &link(), chi()).unwrap();
        assert!((e.eta_x_db() - x).abs() <= 0.15 && (e.eta_y_db() - y).abs() <= 0.15, "{name}: {e:?}");
    }
}

#[test]
fn errors() {
    let mut other = link();
    other.span_count = 5;
    let c = generate_pm_qam(4).unwrap();
    assert!(matches!(eta_4d(&c, &other, chi()), Err(ModelError::LinkMismatch { .. })));
    assert!(matches!(eta_4d(&c.scaled(2.0), &link(), chi()), Err(ModelError::Constellation(_))));
    // a moment set no constellation has: negative fourth moment
    let bad = MomentSet::from_fn(|a, b, c, d| {
        let g = MomentSet::gaussian(0.5, 0.5).get(a, b, c, d).unwrap();
        if (a, b) == (2, 2) { Complex64::new(-10.0, 0.0) } else { g }
    });
    assert!(matches!(eta_from_moments(&bad, &link(), chi()), Err(ModelError::NonPositive { pol: Pol::X, .. })));
}

#[test]
fn metrics() {
    let e = eta_4d(&generate_pm_qam(16).unwrap(), &link(), chi()).unwrap();
    let z = eta_metrics(&e, &e).unwrap();
    assert_eq!((z.d_eta_x, z.d_eta_y, z.d_eta_bar), (0.0, 0.0, 0.0));
    let mut d = e.clone();
    d.eta_x *= 2.0;
    let m = eta_metrics(&d, &e).unwrap();
    assert!((m.d_eta_x - 3.0103).abs() < 1e-4 && m.d_eta_y == 0.0 && (m.d_eta_bar - 1.50515).abs() < 1e-4);
    assert!((m.eta_bar_db - to_db(0.5 * (d.eta_x + d.eta_y))).abs() < 1e-12);
    let mut other = e.clone();
    other.constellation = "PM-QPSK".into();
    assert!(matches!(eta_metrics(&other, &e), Err(ModelError::Metadata(_))));
}

#[test]
fn method_tags() {
    for m in [Method::Model4D, Method::Egn4D, Method::Ssfm] {
        assert_eq!(Method::parse(m.tag()), Some(m));
    }
    assert_eq!(Method::parse("egn"), Some(Method::Egn4D));
    assert_eq!(Method::parse("x"), None);
}

/// First-order perturbation Monte Carlo on a periodic n-symbol block: the
/// NLI field of every frequency bin is summed directly from the kernel over
/// all in-band pump pairs, mapped back to symbols, and its variance after
/// a least-squares gain is eta (unit launch power). Independent of the band
/// integrals and of the modulation coefficients.
fn perturbation_mc(c: &Constellation4D, n: usize, reals: usize, seed: u64) -> (f64, f64) {
    let l = link();
    let ker = NormalizedKernel::new(&l);
    let nn = (n * n) as i64;
    let mu: Vec<Complex64> = (-nn..=nn).map(|m| ker.eval(m as f64 / nn as f64)).collect();
    let g = 8.0 / 9.0 * l.gamma_si();
    let mut planner = FftPlanner::<f64>::new();
    let (fft, ifft) = (planner.plan_fft_forward(n), planner.plan_fft_inverse(n));
    let h = (n / 2) as i64;
    let pts = c.complex_points();
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    let mut acc = [0.0f64; 2];
    for _ in 0..reals {
        let mut a = [vec![Complex64::new(0.0, 0.0); n], vec![Complex64::new(0.0, 0.0); n]];
        for i in 0..n {
            let (x, y) = pts[rng.gen_range(0..pts.len())];
            a[0][i] = x;
            a[1][i] = y;
        }
        // spectra indexed by k + n/2, k in [-n/2, n/2)
        let mut cs = [vec![Complex64::new(0.0, 0.0); n], vec![Complex64::new(0.0, 0.0); n]];
        for p in 0..2 {
            let mut b = a[p].clone();
            fft.process(&mut b);
            for k in 0..n {
                let kk = if (k as i64) < h { k as i64 } else { k as i64 - n as i64 };
                cs[p][(kk + h) as usize] = b[k] / n as f64;
            }
        }
        let mut s = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                s[i * n + j] = cs[0][i] * cs[0][j].conj() + cs[1][i] * cs[1][j].conj();
            }
        }
        for t in 0..2 {
            let mut b = vec![Complex64::new(0.0, 0.0); n];
            for k in 0..n as i64 {
                let mut sum = Complex64::new(0.0, 0.0);
                for k1 in 0..n as i64 {
                    for k2 in 0..n as i64 {
                        let k3 = k1 + k2 - k;
                        if (0..n as i64).contains(&k3) {
                            let m = mu[((k1 - k) * (k2 - k) + nn) as usize];
                            sum += m * s[k1 as usize * n + k3 as usize] * cs[t][k2 as usize];
                        }
                    }
                }
                b[(k - h).rem_euclid(n as i64) as usize] = Complex64::new(0.0, g) * sum;
            }
            ifft.process(&mut b);
            let num: Complex64 = b.iter().zip(&a[t]).map(|(e, s)| e * s.conj()).sum();
            let den: f64 = a[t].iter().map(|s| s.norm_sqr()).sum();
            let gain = num / den;
            let err: f64 = b.iter().zip(&a[t]).map(|(e, s)| (e - gain * s).norm_sqr()).sum();
            acc[t] += err / n as f64;
        }
    }
    (acc[0] / reals as f64, acc[1] / reals as f64)
}

/// Improper (BPSK) and cross-polarization third-order (squared-phase)
/// statistics against the perturbation Monte Carlo.
#[test]
fn model_matches_perturbation_mc() {
    for c in [generate_pm_bpsk(), generate_squared_phase()] {
        let (mx, my) = perturbation_mc(&c, 256, 96, 7);
        let e = eta_4d(&c, &link(), chi()).unwrap();
        println!("{}: model ({:.3}, {:.3}) mc ({:.3}, {:.3})", c.name, e.eta_x_db(), e.eta_y_db(), to_db(mx), to_db(my));
        assert!((e.eta_x_db() - to_db(mx)).abs() < 0.15 && (e.eta_y_db() - to_db(my)).abs() < 0.15, "{}", c.name);
    }
}
