//! The fourteen modulation-dependent coefficients and the data-aided
//! correction terms, per polarization, for a few formats.
use nli4d::constellation::*;
use nli4d::nli_model::{compute_modulation_coefficients_for, ModulationCoefficients};

const NAMES: [&str; 14] = [
    "Phi1", "Phi2", "Phi3", "Psi1", "Psi2", "Psi3", "Psi4", "Lambda1", "Lambda2", "Lambda3", "Lambda4", "Lambda5", "Lambda6",
    "Xi1",
];

fn show(k: &ModulationCoefficients) {
    for (n, v) in NAMES.iter().zip(k.as_array()) {
        if v.norm() > 1e-12 {
            print!("  {n} {:+.4}{:+.4}j", v.re, v.im);
        }
    }
    println!();
    println!("    Omega0 {:.4}  Omega1 {:.4}", k.omega[0], k.omega[1]);
}

fn main() {
    let gauss = MomentSet::gaussian(0.5, 0.5);
    println!("Gaussian");
    show(&compute_modulation_coefficients_for(&gauss, Pol::X).unwrap());
    for c in [generate_pm_qam(16).unwrap(), generate_pm_bpsk(), generate_squared_phase(), generate_120cell()] {
        let m = compute_moments(&c).unwrap();
        for pol in [Pol::X, Pol::Y] {
            println!("{} ({pol:?})", c.name);
            show(&compute_modulation_coefficients_for(&m, pol).unwrap());
        }
    }
}
