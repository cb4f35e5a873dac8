//! Runs a scenario config from `configs/` and prints the CSV report.
//!
//! `cargo run --example run_config -- configs/resonant-pair.json`

use wignerlab::scenarios::{run_scenario, ScenarioConfig};

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/oracle-crosscheck.json").to_string());
    let cfg = match ScenarioConfig::from_path(path.as_ref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{path}: {e}");
            std::process::exit(2);
        }
    };
    match run_scenario(&cfg) {
        Ok(report) => {
            print!("{}", report.to_csv());
            print!("{}", report.summary_json());
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
