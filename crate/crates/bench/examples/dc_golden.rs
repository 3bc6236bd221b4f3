//! Regenerates the shared data-consistency vectors:
//! `cargo run -p hankel-bench --example dc_golden -- crates/bench/data/dc_golden.bin`

use std::fs::File;
use std::io::BufWriter;

use hankel_bench::golden::{golden_cases, write_golden, GOLDEN_COUNT, GOLDEN_SEED};

fn main() -> hankel_bench::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "dc_golden.bin".into());
    let cases = golden_cases(GOLDEN_COUNT, GOLDEN_SEED)?;
    write_golden(&mut BufWriter::new(File::create(&path)?), &cases)?;
    println!("wrote {} cases to {path}", cases.len());
    Ok(())
}
