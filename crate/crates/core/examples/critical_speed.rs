//! Front at the minimal speed c = 2√d, where the continuous left tail is
//! t·e^{t/√d}. The three-point stencil splits that double root into
//! 1/√d ± h/(2d) + O(h²), so the fitted left rate converges to 1/√d only as
//! the grid is refined. A Newton solve from a logistic confirms the profile.
//!
//! cargo run --release --example critical_speed

use wavefront_lab::profile::{
    newton_bvp, solve_front, uniqueness_test, verify_front, FrontOptions, Profile, TailExtension,
};
use wavefront_lab::{KernelFamily, KernelSpec, ModelParams};

/// Smaller positive root of d(2cosh(zh) - 2)/h² - c·sinh(zh)/h + 1 = 0.
fn lattice_rate(c: f64, d: f64, h: f64) -> f64 {
    let f = |z: f64| d * (2.0 * (z * h).cosh() - 2.0) / (h * h) - c * (z * h).sinh() / h + 1.0;
    let (mut lo, mut hi) = (0.0, 1.0 / d.sqrt());
    for _ in 0..100 {
        let m = 0.5 * (lo + hi);
        if f(m) > 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

fn main() -> wavefront_lab::Result<()> {
    let kernel = KernelSpec::new(KernelFamily::NonlocalWeakGeneric, 0.3)?;
    let params = ModelParams::new(2.0, 1.0, 1.0)?;
    println!("{:>6} {:>8} {:>11} {:>11} {:>11} {:>6}", "nodes", "h", "left rate", "lattice", "residual", "pass");
    let mut last = None;
    for nodes in [4096, 8192] {
        let opts = FrontOptions { nodes, ..FrontOptions::default() };
        let sol = solve_front(&kernel, &params, &opts)?;
        let r = verify_front(&kernel, &params, &sol.profile)?;
        let h = sol.profile.grid.step();
        println!(
            "{nodes:>6} {h:>8.5} {:>11.5} {:>11.5} {:>11.2e} {:>6}",
            r.left_rate,
            lattice_rate(params.c, params.d, h),
            r.residual_sup,
            r.pass
        );
        last = Some(sol);
    }
    let sol = last.expect("at least one grid");
    let guess = Profile::from_fn(sol.profile.grid, |t| {
        let s = 1.0 / (1.0 + (-t).exp());
        (s, 1.0 - s)
    })?
    .with_tails(TailExtension { left: 1.0, right: -1.0 });
    let newton = newton_bvp(&kernel, &params, &guess)?;
    let u = uniqueness_test(&sol.profile, &newton)?;
    println!("Newton from a logistic: sup difference {:.2e}", u.sup_difference);
    Ok(())
}
