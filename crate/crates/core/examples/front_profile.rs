//! Front for the weak kernel by monotone iteration, checked against a Newton
//! solve started from the lower solution.
//!
//! cargo run --release --example front_profile -- [gamma tau c d]

use std::time::Instant;

use wavefront_lab::profile::{newton_bvp, solve_front, uniqueness_test, verify_front, FrontOptions};
use wavefront_lab::{KernelFamily, KernelSpec, ModelParams};

fn main() -> wavefront_lab::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let arg = |i: usize, default: f64| args.get(i).copied().unwrap_or(default);
    let (gamma, tau, c, d) = (arg(0, 1.0), arg(1, 0.3), arg(2, 2.5), arg(3, 1.0));
    let kernel = KernelSpec::new(KernelFamily::NonlocalWeakGeneric, tau)?;
    let params = ModelParams::new(c, gamma, d)?;

    let start = Instant::now();
    let sol = solve_front(&kernel, &params, &FrontOptions::default())?;
    println!("solved by {:?} in {:.2?}", sol.method, start.elapsed());
    if let Some(it) = &sol.iteration {
        println!(
            "  {} iterations, last gap {:.2e}, {} sandwich comparisons, worst excess {:.2e}",
            it.iterations, it.last_gap, it.sandwich_checks, it.max_sandwich_excess
        );
    }
    if let Some(a) = sol.alignment {
        println!("  upper solution shifted by sigma = {:.4}", a.sigma);
    }
    let report = verify_front(&kernel, &params, &sol.profile)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));

    // independent start: the lower solution itself
    let lower = sol.lower.expect("monotone iteration keeps its lower solution");
    let guess = lower.sample(sol.profile.grid);
    let newton = newton_bvp(&kernel, &params, &guess)?;
    let u = uniqueness_test(&sol.profile, &newton)?;
    println!("Newton from the lower solution: t' = {:.3e}, sup difference {:.3e}", u.t_prime, u.sup_difference);
    Ok(())
}
