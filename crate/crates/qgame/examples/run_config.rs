//! Runs a TOML config through the same path as the `qgame` binary.
//!
//! `cargo run --example run_config -- crates/qgame/examples/configs/verify_cnot.toml`

use qgame::cli::{run, validate};

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/examples/configs/verify_cnot.toml"
        )
        .to_string()
    });
    let text = std::fs::read(&path).expect("readable config");
    let config = match validate(&text) {
        Ok(c) => c,
        Err(diags) => {
            for d in diags {
                eprintln!("{path}: {d}");
            }
            std::process::exit(2);
        }
    };
    match run(&config) {
        Ok(report) => print!("{}", report.to_canonical_json()),
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
