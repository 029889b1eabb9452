//! Experiment configuration from a flat key = value file, with later
//! settings overriding earlier ones (as the CLI flags do).
use nli4d::bench_harness::ExperimentConfig;

const EXAMPLE: &str = "\
# shorter link, two seeds, only the cheap methods
span_count = 5
launch_power_dbm = -22
methods = model, egn
reference = model
formats = PM-*, 4D-2A8PSK-*
seeds = 1, 2
reports = csv, json
";

fn main() {
    let mut cfg = match std::env::args().nth(1) {
        Some(path) => ExperimentConfig::from_text(&std::fs::read_to_string(path).expect("readable file")),
        None => ExperimentConfig::from_text(EXAMPLE),
    }
    .expect("valid config");
    cfg.set("span_count", "6").unwrap();
    cfg.validate().expect("consistent config");
    println!("{}", serde_json::to_string_pretty(&cfg).unwrap());
    for bad in ["span_count = many", "methods = model, oracle", "no equals sign"] {
        println!("{bad:?}: {}", ExperimentConfig::from_text(bad).unwrap_err());
    }
}
