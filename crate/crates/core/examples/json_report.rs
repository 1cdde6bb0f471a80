//! Builds the JSON report for a command without going through the binary.
//!
//! Usage: `cargo run --example json_report [file.pde]`

use clap::Parser;
use formint::cli::{analyze, render_table, Cli};
use formint::format::parse_file;

fn main() {
    let file = std::env::args().nth(1).unwrap_or_else(|| {
        format!("{}/corpus/flat_connection_obstructed.pde", env!("CARGO_MANIFEST_DIR"))
    });
    let cli = Cli::parse_from(["formint", "goldschmidt", file.as_str(), "--l-max", "2"]);
    let s = parse_file(&file).unwrap();
    let outcome = analyze(&cli.command, &s).unwrap();
    print!("{}", render_table(&outcome.report));
    println!();
    print!("{}", outcome.report.to_json());
}
