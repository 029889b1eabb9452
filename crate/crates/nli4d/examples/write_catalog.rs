//! Regenerate the bundled catalog directory from the built-in generators.
//!
//! cargo run --example write_catalog -- [dir]
use nli4d::constellation::*;
use std::path::PathBuf;

/// Ring ratio used for every 4D-2A8PSK variant in the bundled catalog.
const RING_RATIO_2A8PSK: f64 = 0.6;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(Catalog::default_dir);
    std::fs::create_dir_all(&dir)?;
    let mut generated: Vec<(Constellation4D, String)> = vec![
        (generate_pm_qam(4)?, "generated: square QAM product".into()),
        (generate_pm_qam(16)?, "generated: square QAM product".into()),
        (generate_pm_qam(64)?, "generated: square QAM product".into()),
        (generate_dicyclic(16)?, "generated: binary dihedral group of order 16".into()),
        (generate_120cell(), "generated: vertices of the 120-cell polytope".into()),
    ];
    for bits in [5, 6, 7] {
        generated.push((
            generate_2a8psk(bits, RING_RATIO_2A8PSK)?,
            format!("generated: two-ring 8PSK family, ring ratio {RING_RATIO_2A8PSK}"),
        ));
    }
    let mut wtr = csv::Writer::from_writer(Vec::new());
    for (c, src) in &generated {
        let file = format!("{}.txt", c.name);
        std::fs::write(dir.join(&file), c.to_text())?;
        wtr.serialize(CatalogEntry { name: c.name.clone(), m: c.len(), source: src.clone(), file })?;
    }
    let missing = [
        ("c4_16", 16, "sphere-packing database; file not bundled"),
        ("4D-64PRS", 64, "published coordinates; file not bundled"),
        ("l4_128", 128, "sphere-packing database; file not bundled"),
        ("4D-OS128", 128, "published coordinates; file not bundled"),
        ("w4_256", 256, "sphere-packing database; file not bundled"),
        ("sphere4_512", 512, "sphere-packing database; file not bundled"),
        ("a4_2048", 2048, "sphere-packing database; file not bundled"),
        ("a4_4096", 4096, "sphere-packing database; file not bundled"),
    ];
    for (name, m, src) in missing {
        wtr.serialize(CatalogEntry { name: name.into(), m, source: src.into(), file: String::new() })?;
    }
    let body = String::from_utf8(wtr.into_inner()?)?;
    let head = "# Bundled 4D constellations. Rows with an empty file column name formats\n\
                # whose coordinates are not shipped; drop a file next to this manifest\n\
                # and fill the column to enable them.\n";
    std::fs::write(dir.join("manifest.csv"), format!("{head}{body}"))?;
    println!("wrote {} files to {}", generated.len() + 1, dir.display());
    Ok(())
}
