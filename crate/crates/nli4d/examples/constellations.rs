//! Generators, the bundled catalog, and the file format.
use nli4d::constellation::*;

fn describe(c: &Constellation4D) {
    let radii: Vec<f64> = c.points().iter().map(|p| p.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    let (lo, hi) = radii.iter().fold((f64::MAX, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    let mut px: Vec<(i64, i64)> =
        project_polarization(c, Pol::X).points.iter().map(|z| ((z.re * 1e9).round() as i64, (z.im * 1e9).round() as i64)).collect();
    px.sort();
    px.dedup();
    println!(
        "{:<16} M={:<5} E={:.3}  d_min={:.4}  4D radius [{:.3}, {:.3}]  distinct x points {}",
        c.name,
        c.len(),
        c.mean_energy(),
        c.min_distance(),
        lo,
        hi,
        px.len()
    );
}

fn main() {
    println!("generated:");
    for c in [
        generate_pm_bpsk(),
        generate_pm_qam(4).unwrap(),
        generate_pm_qam(16).unwrap(),
        generate_squared_phase(),
        generate_2a8psk(5, 0.6).unwrap(),
        generate_2a8psk(7, 0.6).unwrap(),
        normalize_energy(&generate_dicyclic(16).unwrap()).unwrap(),
        generate_120cell(),
    ] {
        describe(&c);
    }

    let cat = Catalog::open_default().expect("catalog");
    println!("\ncatalog {}:", Catalog::default_dir().display());
    for e in cat.available() {
        describe(&cat.load(&e.name).unwrap());
    }
    for e in cat.unavailable() {
        println!("{:<16} M={:<5} not bundled ({})", e.name, e.m, e.source);
    }
    match cat.load("c4_16") {
        Err(e) => println!("loading c4_16: {e}"),
        Ok(_) => println!("c4_16 is present"),
    }

    // the plain-text format: one point per line, '#' comments
    let text = "# a 4-point example\n1 0 0 0\n0 0 1 0\n-1 0 0 0\n0 0 0 -1\n";
    let c = normalize_energy(&parse_constellation_file(text, "toy").unwrap()).unwrap();
    describe(&c);
    print!("{}", c.rotate(Pol::Y, 0.5).to_text());
}
