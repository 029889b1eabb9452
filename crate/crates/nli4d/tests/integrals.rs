//! Kernel, dispersion conversion and band-integral checks against
//! independent brute-force evaluations.

use nli4d::nli_model::*;
use num_complex::Complex64;
use std::sync::OnceLock;

mod common;
use common::{rep_blocks, Lattice};

fn reference_chi() -> &'static LinkIntegrals {
    static CHI: OnceLock<LinkIntegrals> = OnceLock::new();
    CHI.get_or_init(|| compute_chi_integrals(&LinkSpec::reference(), &QuadSettings::default()).unwrap())
}

#[test]
fn beta2_conversion() {
    assert_eq!(beta2_from_dispersion(0.0, 1550.0), 0.0);
    // ps^2/km
    let b = beta2_from_dispersion(17.0, 1550.0) * 1e24 * 1e3;
    assert!((b + 21.6826).abs() < 1e-3, "{b}");
    assert_eq!(beta2_from_dispersion(-17.0, 1550.0), -beta2_from_dispersion(17.0, 1550.0));
    let l = LinkSpec::reference();
    let direct = -17e-6 * (1550e-9f64).powi(2) / (2.0 * std::f64::consts::PI * C_LIGHT);
    assert!((l.beta2() / direct - 1.0).abs() < 1e-9);
}

#[test]
fn kernel_limits() {
    let mut l = LinkSpec::reference();
    l.dispersion = 0.0;
    l.span_count = 1;
    l.alpha_db_km = 0.0;
    let k = link_kernel(3e9, -7e9, 1e9, &l);
    assert!((k.re / l.span_length() - 1.0).abs() < 1e-12 && k.im.abs() < 1e-9);

    l.alpha_db_km = 0.2;
    let a = l.alpha();
    let leff = (1.0 - (-a * l.span_length()).exp()) / a;
    let k = link_kernel(3e9, -7e9, 1e9, &l);
    assert!((k.re / leff - 1.0).abs() < 1e-12 && k.im.abs() < 1e-9);
}

/// Kernel against its defining z-integral over the whole link, done with a
/// composite Simpson rule per span.
#[test]
fn kernel_matches_z_quadrature() {
    let l = LinkSpec::reference();
    let (f1, f2, f) = (7.3e9, -11.9e9, 2.1e9);
    let dbeta = 4.0 * std::f64::consts::PI.powi(2) * l.beta2() * (f1 - f) * (f2 - f);
    let (a, ls) = (l.alpha(), l.span_length());
    let n = 200_000;
    let h = ls / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for s in 0..l.span_count {
        let z0 = s as f64 * ls;
        let g = |z: f64| Complex64::new(-a * z, dbeta * (z0 + z)).exp();
        let mut sum = g(0.0) + g(ls);
        for i in 1..n {
            sum += g(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc += sum * (h / 3.0);
    }
    let k = link_kernel(f1, f2, f, &l);
    assert!((k - acc).norm() / acc.norm() < 1e-9, "{k} vs {acc}");
}

/// Dense-grid oracle with 401 lattice nodes per frequency axis.
#[test]
fn chi_matches_dense_lattice() {
    let chi = reference_chi();
    let lat = Lattice::new(&LinkSpec::reference(), 401);
    for i in 0..11 {
        let o = lat.class_integral(&rep_blocks(i));
        let j = chi.normalized(i);
        let rel = (o - j).norm() / j.norm();
        println!("chi_{:<2} lattice {:.6e} quad {:.6e} rel {:.2e}", i + 1, o, j, rel);
        assert!(rel <= 1e-3, "class {}: {o} vs {j}", i + 1);
    }
    let z = lat.zetas();
    for k in 0..2 {
        let q = chi.zeta_bar[k] * chi.symbol_rate;
        let rel = (z[k] - q).norm() / q.norm();
        println!("zeta_{k} lattice {:.6e} quad {:.6e} rel {:.2e}", z[k], q, rel);
        assert!(rel <= 1e-3);
    }
}

#[test]
fn chi_structure() {
    let chi = reference_chi();
    assert!(chi.chi_bar[0].re > 0.0);
    assert_eq!(chi.link_digest, LinkSpec::reference().integral_digest());
    // independent of launch power
    assert_eq!(LinkSpec::reference().with_power(3.0).integral_digest(), chi.link_digest);
    for i in 0..11 {
        assert!(chi.chi_err[i] <= 1e-3 * chi.chi_bar[i].norm(), "class {}", i + 1);
    }
}

/// Doubling the density moves every entry by less than the reported error
/// estimate of the coarser result, and the estimates shrink monotonically
/// over three refinements. Finer kernel tables than the default keep their
/// interpolation floor (~1e-6 relative) below the last estimate.
#[test]
fn quadrature_convergence() {
    let l = LinkSpec::reference();
    let q = QuadSettings {
        density: 16.0,
        levels: 3,
        rel_tol: 1.0,
        table_intervals: 1 << 22,
        k_rows: 20000,
        k_cols: 2000,
        ..QuadSettings::default()
    };
    let coarse = compute_chi_integrals(&l, &q).unwrap();
    let fine = compute_chi_integrals(&l, &QuadSettings { levels: 4, ..q }).unwrap();
    assert_eq!(fine.history.len(), 3);
    for i in 0..11 {
        let h: Vec<f64> = fine.history.iter().map(|e| e[i]).collect();
        assert!(h[0] > h[1] && h[1] > h[2], "class {}: {h:?}", i + 1);
        let d = (fine.chi_bar[i] - coarse.chi_bar[i]).norm();
        assert!(d < coarse.chi_err[i], "class {}: {d} vs {}", i + 1, coarse.chi_err[i]);
    }
}

#[test]
fn more_spans_more_nli() {
    let q = QuadSettings { density: 48.0, ..QuadSettings::default() };
    let mut one = LinkSpec::reference();
    one.span_count = 1;
    let c1 = compute_chi_integrals(&one, &q).unwrap();
    let c10 = compute_chi_integrals(&LinkSpec::reference(), &q).unwrap();
    for i in 0..11 {
        assert!(c10.chi_bar[i].norm() > c1.chi_bar[i].norm(), "class {}", i + 1);
    }
}

#[test]
fn convergence_error_reported() {
    let q = QuadSettings { density: 2.0, levels: 2, rel_tol: 1e-9, ..QuadSettings::default() };
    match compute_chi_integrals(&LinkSpec::reference(), &q) {
        Err(ChiError::Convergence { achieved, tol, .. }) => assert!(achieved > tol),
        other => panic!("expected a convergence error, got {other:?}"),
    }
}
