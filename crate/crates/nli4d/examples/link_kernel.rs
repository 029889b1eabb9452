//! The link kernel: span-summed phase-matching factor as a function of the
//! pump frequency product, plus the derived link constants.
use nli4d::nli_model::{beta2_from_dispersion, link_kernel, LinkSpec, NormalizedKernel};

fn main() {
    let link = LinkSpec::reference();
    println!(
        "beta2 = {:.4} ps^2/km  alpha = {:.4e} 1/m  gamma = {:.2e} 1/(W m)  kappa = {:.3} rad",
        beta2_from_dispersion(link.dispersion, link.wavelength_nm) * 1e27,
        link.alpha(),
        link.gamma_si(),
        link.kappa()
    );
    let a = link.alpha();
    let leff = (1.0 - (-a * link.span_length()).exp()) / a;
    println!("L_eff = {:.2} km per span, {} spans", leff / 1e3, link.span_count);
    let k = NormalizedKernel::new(&link);
    println!("\n{:>10} {:>14} {:>10}", "p", "|mu(p)| [km]", "arg [rad]");
    for p in [0.0, 1e-4, 1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.25] {
        let m = k.eval(p);
        println!("{p:>10.0e} {:>14.4} {:>10.4}", m.norm() / 1e3, m.arg());
    }
    // same thing in physical frequencies: the kernel only sees (f1 - f)(f2 - f)
    let rs = link.symbol_rate;
    let direct = link_kernel(0.3 * rs, -0.2 * rs, 0.1 * rs, &link);
    println!("\nkernel at (f1, f2, f) = (0.3, -0.2, 0.1) Rs: {direct:.4e} vs normalized {:.4e}", k.eval(0.2 * -0.3));
}
