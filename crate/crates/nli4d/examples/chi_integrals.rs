//! Band-averaged kernel integrals for the reference link, with the
//! refinement error estimate of each entry.
use nli4d::nli_model::{compute_chi_integrals, LinkSpec, QuadSettings, CLASS_BLOCKS};
use std::time::Instant;

fn main() {
    let link = LinkSpec::reference();
    let t = Instant::now();
    let chi = compute_chi_integrals(&link, &QuadSettings::default()).expect("integrals");
    println!("computed in {:.1} s (density {}, GL order {})", t.elapsed().as_secs_f64(), chi.density, chi.order);
    for i in 0..11 {
        let j = chi.normalized(i);
        println!(
            "chi_bar_{:<2} = {:>12.5e} {:+.5e}j  [m^2 s^{}]   J = {:.6e} {:+.6e}j  err {:.2e}",
            i + 1,
            chi.chi_bar[i].re,
            chi.chi_bar[i].im,
            CLASS_BLOCKS[i],
            j.re,
            j.im,
            chi.chi_err[i] / chi.chi_bar[i].norm().max(1e-300)
        );
    }
    for k in 0..2 {
        let z = chi.zeta_bar[k] * link.symbol_rate;
        println!("zeta_{k} = {:.6e} {:+.6e}j", z.re, z.im);
    }
}
