//! Existence regions in the (τ, c) plane for the local point delay at
//! γ ∈ {0.1, 1, 3}, written as CSV for plotting.
//!
//! cargo run --release --example region_sweep -- [out_dir]

use std::path::PathBuf;

use wavefront_lab::spectral::region_sweep;
use wavefront_lab::KernelFamily;

fn main() -> wavefront_lab::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "region-out".into()));
    std::fs::create_dir_all(&out)?;
    let taus: Vec<f64> = (0..80).map(|i| 0.02 + 0.025 * i as f64).collect();
    let cs: Vec<f64> = (0..40).map(|j| 2.0 + 0.1 * j as f64).collect();
    for gamma in [0.1, 1.0, 3.0] {
        let table = region_sweep(KernelFamily::LocalDiscreteDelay, gamma, 1.0, &taus, &cs)?;
        std::fs::write(out.join(format!("cells-gamma{gamma}.csv")), table.cells_csv())?;
        std::fs::write(out.join(format!("boundaries-gamma{gamma}.csv")), table.boundaries_csv())?;
        let count = |f: fn(&wavefront_lab::spectral::RegionCell) -> bool| table.cells.iter().filter(|c| f(c)).count();
        println!(
            "gamma {gamma}: {} cells, {} sufficient, {} necessary, {} boundary points, strip tau <= {:.4}",
            table.cells.len(),
            count(|c| c.sufficient),
            count(|c| c.necessary),
            table.boundaries.len(),
            gamma * ((1.0 + gamma) / gamma).ln()
        );
    }
    println!("CSV written to {}", out.display());
    Ok(())
}
