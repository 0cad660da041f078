//! Delay kernels N_c: moments, the closed-form mgf and the sampled kernel
//! used by the profile solver.
//!
//! cargo run --release --example kernels -- [c d tau]

use wavefront_lab::kernel::{discretize, mgf, mgf_domain, moments};
use wavefront_lab::{KernelFamily, KernelSpec, ModelParams};

fn main() -> wavefront_lab::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let arg = |i: usize, default: f64| args.get(i).copied().unwrap_or(default);
    let (c, d, tau) = (arg(0, 2.5), arg(1, 1.0), arg(2, 0.3));
    let params = ModelParams::new(c, 1.0, d)?;

    println!("{:<18} {:>9} {:>9} {:>22} {:>10} {:>12}", "family", "mean", "var", "mgf domain", "N(-0.2)", "sampled");
    for family in KernelFamily::ALL {
        let kernel = KernelSpec::new(family, tau)?;
        let (mean, var) = moments(&kernel, &params);
        let dom = mgf_domain(&kernel, &params);
        let exact = mgf(&kernel, &params, -0.2)?;
        let dk = discretize(&kernel, &params, 0.02, 1e-10)?;
        println!(
            "{:<18} {mean:>9.4} {var:>9.4} {:>22} {exact:>10.6} {:>12.6}",
            family.to_string(),
            format!("({:.3}, {:.3})", dom.lo, dom.hi),
            dk.mgf(-0.2)
        );
    }
    Ok(())
}
