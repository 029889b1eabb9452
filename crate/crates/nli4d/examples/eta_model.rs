//! 4D model and 4D-EGN coefficients for a handful of generated formats.
use nli4d::constellation::*;
use nli4d::nli_model::{compute_chi_integrals, eta_4d, eta_egn_projection, LinkSpec, QuadSettings};

fn main() {
    let link = LinkSpec::reference();
    let chi = compute_chi_integrals(&link, &QuadSettings::default()).expect("integrals");
    let formats = vec![
        generate_pm_qam(4).unwrap(),
        generate_pm_qam(16).unwrap(),
        generate_pm_qam(64).unwrap(),
        generate_120cell(),
        normalize_energy(&generate_dicyclic(16).unwrap()).unwrap(),
        generate_2a8psk(5, 0.6).unwrap(),
        generate_2a8psk(6, 0.6).unwrap(),
        generate_2a8psk(7, 0.6).unwrap(),
        generate_pm_bpsk(),
        generate_squared_phase(),
    ];
    println!("{:<18} {:>5}  {:>16}  {:>16}", "format", "M", "model (x, y)", "4D-EGN (x, y)");
    for c in &formats {
        let m = eta_4d(c, &link, &chi).unwrap();
        let e = eta_egn_projection(c, &link, &chi).unwrap();
        println!(
            "{:<18} {:>5}  ({:.3}, {:.3})  ({:.3}, {:.3})",
            c.name,
            c.len(),
            m.eta_x_db(),
            m.eta_y_db(),
            e.eta_x_db(),
            e.eta_y_db()
        );
    }
}
