//! Writes the bundled synthetic weather year: `data/porto_synthetic.epw`.

use ventplan_core::weather::{synthetic, write_epw};

const SEED: u64 = 20160301;

fn main() -> std::io::Result<()> {
    let year = synthetic::generate(&synthetic::SyntheticClimate::porto(), SEED);
    let path = std::env::args().nth(1).unwrap_or_else(|| "data/porto_synthetic.epw".to_string());
    let comment = format!("Synthetic Porto-like year; synthetic::generate seed {SEED}");
    std::fs::write(&path, write_epw(&year, &comment))?;
    eprintln!("wrote {path}: annual mean {:.2} C", year.annual_mean());
    Ok(())
}
