//! Prolongation computed twice: as the formal prolongation of the PDE and as
//! the classical prolongation of the associated relative connection.
//!
//! Usage: `cargo run --example cross_oracle [levels]`

use formint::format::parse_file;
use formint::jetpde::crosscheck;

fn main() {
    let levels: usize = std::env::args().nth(1).map_or(3, |s| s.parse().expect("levels"));
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let mut files: Vec<_> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    for path in files {
        let s = parse_file(&path).unwrap();
        println!("{}", path.file_name().unwrap().to_string_lossy());
        println!("  level  Prol  F^(i)  images");
        for c in crosscheck(&s, levels).unwrap() {
            println!(
                "  {:>5} {:>5} {:>6}  {} / {}{}",
                c.level,
                c.prol_dim,
                c.fiber_dim,
                c.prol_image_dim,
                c.tower_image_dim,
                if c.agrees() { "" } else { "  MISMATCH" }
            );
        }
    }
}
