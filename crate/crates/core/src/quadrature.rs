//! Adaptive Simpson quadrature.

/// Integrates `f` over `[a, b]` split into `panels` equal pieces, each refined
/// adaptively until the Richardson estimate drops below `rel_tol` times the
/// magnitude of the running total (with `abs_floor` as a lower bound).
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    panels: usize,
    rel_tol: f64,
    abs_floor: f64,
) -> f64 {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    // coarse pass to get a magnitude for the relative tolerance
    let mut coarse = Vec::with_capacity(panels);
    let mut scale = 0.0;
    for k in 0..panels {
        let x0 = a + k as f64 * h;
        let x1 = if k + 1 == panels { b } else { x0 + h };
        let (f0, f1) = (f(x0), f(x1));
        let fm = f(0.5 * (x0 + x1));
        let s = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        scale += s.abs();
        coarse.push((x0, x1, f0, fm, f1, s));
    }
    let tol = (rel_tol * scale).max(abs_floor);
    let per_panel = tol / panels as f64;
    coarse
        .into_iter()
        .map(|(x0, x1, f0, fm, f1, s)| refine(f, x0, x1, f0, fm, f1, s, per_panel, 50))
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let v = adaptive_simpson(&|x: f64| x * x * x - 2.0 * x, 0.0, 2.0, 1, 1e-12, 0.0);
        assert!((v - 0.0).abs() < 1e-13);
    }

    #[test]
    fn gaussian_mass() {
        let g = |x: f64| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let v = adaptive_simpson(&g, -12.0, 12.0, 8, 1e-12, 1e-300);
        assert!((v - 1.0).abs() < 1e-11);
    }
}
