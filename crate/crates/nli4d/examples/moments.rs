//! Joint moments of a dual-polarization format: kurtosis, cross-polarization
//! structure, and what the product-of-marginals approximation throws away.
//!
//! cargo run --release --example moments -- [catalog name]
use nli4d::constellation::*;

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "dicyclic4_16".into());
    let c = Catalog::open_default().and_then(|cat| cat.load(&name)).expect("catalog format");
    let m = compute_moments(&c).expect("normalized constellation");
    println!("{} (M={}): {} moments of total order <= 6", c.name, c.len(), m.len());
    println!("P_x = {:.6}  P_y = {:.6}", m.power_x(), m.power_y());
    for (pol, p2, p4, p6) in [("x", m.abs_x(1), m.abs_x(2), m.abs_x(3)), ("y", m.abs_y(1), m.abs_y(2), m.abs_y(3))] {
        println!("{pol}: E|s|^4/P^2 = {:.6}  E|s|^6/P^3 = {:.6}", p4 / (p2 * p2), p6 / (p2 * p2 * p2));
    }
    println!("E[|sx|^2 |sy|^2] = {:.6} vs P_x P_y = {:.6}", m.cross_power(), m.power_x() * m.power_y());
    let indep = m.marginal_product();
    println!("largest deviation from the product of marginals: {:.3e}", m.max_abs_diff(&indep));
    println!("largest change under polarization swap: {:.3e}", m.max_abs_diff(&m.swapped()));
    println!("nonzero moments:");
    for (k, v) in m.iter().filter(|(_, v)| v.norm() > 1e-12) {
        println!("  E[sx^{} sx*^{} sy^{} sy*^{}] = {:+.6} {:+.6}j", k[0], k[1], k[2], k[3], v.re, v.im);
    }
}
