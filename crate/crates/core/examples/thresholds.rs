//! Largest delays allowing monotone fronts, from the closed forms, next to
//! the verdict of the root scan on either side of each threshold.
//!
//! cargo run --release --example thresholds

use wavefront_lab::spectral::{classify, closed_form_threshold, speed_interval_discrete};
use wavefront_lab::{KernelFamily, KernelSpec, ModelParams};

fn main() -> wavefront_lab::Result<()> {
    let params = ModelParams::new(2.5, 1.0, 1.0)?;
    println!("{:<8} {:>6} {:>11} {:>11} {:>22}", "kernel", "gamma", "sufficient", "necessary", "scan at 0.99x / 1.01x");
    for family in [KernelFamily::NonlocalWeakGeneric, KernelFamily::NonlocalStrongGeneric] {
        for gamma in [0.2, 0.8, 1.0, 5.0] {
            let t = closed_form_threshold(family, gamma)?;
            let p = ModelParams { gamma, ..params };
            let at = |tau: f64| classify(&KernelSpec::new(family, tau)?, &p).map(|v| v.sufficient_holds);
            println!(
                "{:<8} {gamma:>6} {:>11.6} {:>11.6} {:>10} / {:<10}",
                family.name().trim_start_matches("nonlocal-"),
                t.sufficient,
                t.necessary,
                at(0.99 * t.sufficient)?,
                at(1.01 * t.sufficient)?
            );
        }
    }

    println!("\npoint delay, speeds admitting a monotone front:");
    for (gamma, tau) in [(1.0, 0.5), (1.0, 2f64.ln()), (1.0, 0.8), (1.0, 1.2), (0.1, 1.0)] {
        println!("  gamma {gamma:<4} tau {tau:<8.5} {:?}", speed_interval_discrete(gamma, tau)?);
    }
    Ok(())
}
