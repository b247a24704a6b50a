//! Computes the rate curves of every figure and reports how far they sit
//! from the reference data. Pass a directory to also write one CSV per figure.

use anyhow::Result;
use coded_pc::analysis::{figure_data, Figure};

fn main() -> Result<()> {
    let out_dir = std::env::args().nth(1);
    for fig in Figure::ALL {
        let data = figure_data(fig)?;
        println!("{fig}: {} rows", data.rows.len());
        for d in &data.deltas {
            println!("  {:<16} vs {:<14} max |delta| = {:.3e}", d.series, d.fixture, d.max_abs_delta);
        }
        if let Some(dir) = &out_dir {
            let path = std::path::Path::new(dir).join(format!("{fig}.csv"));
            data.write_csv(std::fs::File::create(&path)?)?;
            println!("  wrote {}", path.display());
        }
    }
    Ok(())
}
