//! Negative roots of the characteristic function χ₊ and the existence
//! verdict for the overshoot parameters (weak kernel, γ = 40, τ = 10,
//! c = 10√2, d = 50), where γ·w = 2(1 - 1/√41) > 1.
//!
//! cargo run --release --example characteristic_roots -- [gamma tau c d]

use wavefront_lab::spectral::{chi_plus, classify};
use wavefront_lab::{KernelFamily, KernelSpec, ModelParams};

fn main() -> wavefront_lab::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let arg = |i: usize, default: f64| args.get(i).copied().unwrap_or(default);
    let (gamma, tau, c, d) = (arg(0, 40.0), arg(1, 10.0), arg(2, 10.0 * 2f64.sqrt()), arg(3, 50.0));
    let kernel = KernelSpec::new(KernelFamily::NonlocalWeakGeneric, tau)?;
    let params = ModelParams::new(c, gamma, d)?;

    let v = classify(&kernel, &params)?;
    println!("negative roots of chi_plus (domain starts at {:.6}):", v.report.domain_left);
    for (z, gw) in v.report.roots.iter().zip(&v.report.gamma_w) {
        println!("  z = {z:>12.8}   gamma*w = {gw:.12}   residual {:.1e}", chi_plus(&kernel, &params, *z)?);
    }
    println!("necessary: {}  sufficient: {}  regime: {:?}", v.necessary_holds, v.sufficient_holds, v.regime);
    if gamma == 40.0 && d == 50.0 {
        println!("2(1 - 1/sqrt(41)) = {:.12}", 2.0 * (1.0 - 1.0 / 41f64.sqrt()));
    }
    Ok(())
}
