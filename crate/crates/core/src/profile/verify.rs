//! A posteriori checks on computed fronts: residual, monotonicity, tail
//! rates against the characteristic roots, and translation uniqueness.

use serde::{Deserialize, Serialize};

use super::grid::Profile;
use super::newton::left_rate;
use super::operators::{Equation, FrontProblem};
use crate::error::{Error, Result};
use crate::kernel::{KernelSpec, ModelParams};
use crate::spectral::{find_negative_roots, minimal_speed, SPEED_RTOL};

/// Fraction of the grid used for tail fits at each end.
pub const TAIL_FRACTION: f64 = 0.15;
/// Acceptance threshold on the sup residual.
pub const RESIDUAL_ACCEPT: f64 = 1e-6;
/// Relative tolerance on tail rates.
pub const RATE_RTOL: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub left_rate: f64,
    pub right_rate: f64,
    pub left_degree: u32,
    pub right_degree: u32,
}

/// Least-squares slope of (x, y) pairs.
fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

fn is_critical(p: &Profile) -> bool {
    p.meta.is_some_and(|m| m.params.c <= minimal_speed(&m.params) * (1.0 + SPEED_RTOL))
}

/// Fits log φ ≈ a + r t (+ j log|t|) on the left end and
/// log(1 - φ) ≈ b + r t on the right end, over the outer 15% of the grid.
/// The degree j is 1 at the minimal speed and 0 otherwise.
pub fn fit_tails(p: &Profile) -> TailFit {
    let n = p.len();
    let m = ((n as f64 * TAIL_FRACTION) as usize).max(2);
    let left_degree = u32::from(is_critical(p));
    let left: Vec<(f64, f64)> = (0..m)
        .filter(|&i| p.values()[i] > 0.0)
        .map(|i| {
            let t = p.grid.t(i);
            let corr = if left_degree == 1 && t < 0.0 { (-t).ln() } else { 0.0 };
            (t, p.values()[i].ln() - corr)
        })
        .collect();
    let right: Vec<(f64, f64)> = (n - m..n)
        .filter(|&i| p.complement()[i] > 0.0)
        .map(|i| (p.grid.t(i), p.complement()[i].ln()))
        .collect();
    TailFit { left_rate: slope(&left), right_rate: slope(&right), left_degree, right_degree: 0 }
}

/// Outcome of [`verify_front`]. Serialized as the verification JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// Sup of the finite-difference residual over interior nodes.
    pub residual_sup: f64,
    /// min Δφ/Δt over the grid (positive for a strictly increasing profile).
    pub monotone_margin: f64,
    pub left_rate: f64,
    /// z₁, the smaller root of dz² - cz + 1 = 0.
    pub left_target: f64,
    pub left_degree: u32,
    pub right_rate: f64,
    /// The negative root of χ₊ matched by the right rate, if any.
    pub matched_root: Option<f64>,
    pub negative_roots: Vec<f64>,
    /// [φ(t_min), 1 - φ(t_max)].
    pub boundary_gaps: [f64; 2],
    pub interior_in_unit_interval: bool,
    pub residual_ok: bool,
    pub monotone_ok: bool,
    pub left_rate_ok: bool,
    pub right_rate_ok: bool,
    pub pass: bool,
}

fn rel_close(a: f64, b: f64, rtol: f64) -> bool {
    (a - b).abs() <= rtol * b.abs()
}

/// Checks a computed profile against the profile equation and the
/// predicted tail behaviour.
pub fn verify_front(kernel: &KernelSpec, params: &ModelParams, profile: &Profile) -> Result<VerificationReport> {
    let prob = FrontProblem::new(*kernel, *params, &profile.grid)?;
    let res = prob.residual(Equation::Full, profile)?;
    let n = profile.len();
    let residual_sup = res[1..n - 1].iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let h = profile.grid.step();
    let (phi, y) = (profile.values(), profile.complement());
    let monotone_margin = (0..n - 1)
        .map(|i| if phi[i + 1] <= 0.5 { phi[i + 1] - phi[i] } else { y[i] - y[i + 1] } / h)
        .fold(f64::INFINITY, f64::min);
    let interior_in_unit_interval = (1..n - 1).all(|i| phi[i] > 0.0 && y[i] > 0.0);

    let fit = {
        let mut p = profile.clone();
        p.meta = Some(prob.meta());
        fit_tails(&p)
    };
    let left_target = left_rate(params, Equation::Full);
    let roots = find_negative_roots(kernel, params).roots;
    let matched_root = roots
        .iter()
        .copied()
        .filter(|z| rel_close(fit.right_rate, *z, RATE_RTOL))
        .min_by(|a, b| (a - fit.right_rate).abs().partial_cmp(&(b - fit.right_rate).abs()).unwrap());

    let residual_ok = residual_sup < RESIDUAL_ACCEPT;
    let monotone_ok = monotone_margin > 0.0 && interior_in_unit_interval;
    let left_rate_ok = rel_close(fit.left_rate, left_target, RATE_RTOL);
    let right_rate_ok = matched_root.is_some();
    Ok(VerificationReport {
        residual_sup,
        monotone_margin,
        left_rate: fit.left_rate,
        left_target,
        left_degree: fit.left_degree,
        right_rate: fit.right_rate,
        matched_root,
        negative_roots: roots,
        boundary_gaps: [phi[0], y[n - 1]],
        interior_in_unit_interval,
        residual_ok,
        monotone_ok,
        left_rate_ok,
        right_rate_ok,
        pass: residual_ok && monotone_ok && left_rate_ok && right_rate_ok,
    })
}

/// Result of comparing two fronts up to translation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlignmentReport {
    /// ψ(t + t′) is compared with φ(t).
    pub t_prime: f64,
    pub sup_difference: f64,
    /// Common domain in φ's coordinate.
    pub t_lo: f64,
    pub t_hi: f64,
    pub nodes_compared: usize,
}

/// Aligns the level-1/2 crossings of φ and ψ and reports
/// sup|φ(t) - ψ(t + t′)| over φ's nodes in the common domain.
pub fn uniqueness_test(phi: &Profile, psi: &Profile) -> Result<AlignmentReport> {
    if let (Some(a), Some(b)) = (phi.meta, psi.meta) {
        let same = a.kernel.family == b.kernel.family
            && rel_close(a.kernel.tau, b.kernel.tau, 1e-12)
            && rel_close(a.params.c, b.params.c, 1e-12)
            && rel_close(a.params.d, b.params.d, 1e-12)
            && (a.params.gamma - b.params.gamma).abs() <= 1e-12 * a.params.gamma.abs().max(1.0);
        if !same {
            return Err(Error::invalid("profiles were computed for different kernels or parameters"));
        }
    }
    let cross = |p: &Profile| {
        p.crossing(0.5).ok_or_else(|| Error::invalid("profile never crosses 1/2"))
    };
    let t_prime = cross(psi)? - cross(phi)?;
    let t_lo = phi.grid.t_min.max(psi.grid.t_min - t_prime);
    let t_hi = phi.grid.t_max.min(psi.grid.t_max - t_prime);
    let mut sup: f64 = 0.0;
    let mut count = 0;
    for i in 0..phi.len() {
        let t = phi.grid.t(i);
        if t < t_lo || t > t_hi {
            continue;
        }
        let diff = if phi.values()[i] <= 0.5 {
            phi.values()[i] - psi.eval_cubic(t + t_prime)
        } else {
            phi.complement()[i] - psi.eval_complement_cubic(t + t_prime)
        };
        sup = sup.max(diff.abs());
        count += 1;
    }
    if count == 0 {
        return Err(Error::invalid("profiles have no common domain after alignment"));
    }
    Ok(AlignmentReport { t_prime, sup_difference: sup, t_lo, t_hi, nodes_compared: count })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::grid::{Grid, TailExtension};

    fn logistic(g: Grid, a: f64, b: f64) -> Profile {
        // φ = 1/(1 + e^{-a t}) on the left, 1 - φ ~ e^{-b t} on the right
        Profile::from_fn(g, |t| {
            if t < 0.0 {
                let e = (a * t).exp();
                (e / (1.0 + e), 1.0 / (1.0 + e))
            } else {
                let e = (-b * t).exp();
                (1.0 / (1.0 + e), e / (1.0 + e))
            }
        })
        .unwrap()
    }

    #[test]
    fn recovers_exponential_rates() {
        let g = Grid::with_zero_node(-100.0, 100.0, 2001).unwrap();
        let fit = fit_tails(&logistic(g, 0.5, 0.25));
        assert!((fit.left_rate - 0.5).abs() < 1e-6);
        assert!((fit.right_rate + 0.25).abs() < 1e-6);
    }

    #[test]
    fn shifted_copy_is_unique_up_to_translation() {
        let g = Grid::with_zero_node(-40.0, 40.0, 2001).unwrap();
        let p = logistic(g, 1.0, 1.0).with_tails(TailExtension { left: 1.0, right: -1.0 });
        let q = p.shifted_nodes(3);
        let r = uniqueness_test(&p, &q).unwrap();
        assert!((r.t_prime + 3.0 * g.step()).abs() < 1e-9);
        assert!(r.sup_difference < 1e-10, "{}", r.sup_difference);
    }

    #[test]
    fn equilibrium_is_not_a_front() {
        use crate::kernel::KernelFamily;
        let k = KernelSpec::new(KernelFamily::NonlocalWeakGeneric, 0.3).unwrap();
        let p = ModelParams::new(2.5, 1.0, 1.0).unwrap();
        let g = Grid::with_zero_node(-50.0, 50.0, 1001).unwrap();
        let one = Profile::new(g, vec![1.0; g.n]).unwrap();
        let r = verify_front(&k, &p, &one).unwrap();
        assert_eq!(r.residual_sup, 0.0);
        assert!(!r.monotone_ok && !r.pass);
    }

    #[test]
    fn different_speeds_are_rejected() {
        use crate::kernel::KernelFamily;
        use crate::profile::grid::FrontMeta;
        let k = KernelSpec::new(KernelFamily::NonlocalWeakGeneric, 0.3).unwrap();
        let g = Grid::with_zero_node(-40.0, 40.0, 1001).unwrap();
        let a = logistic(g, 1.0, 1.0).with_meta(FrontMeta { kernel: k, params: ModelParams::new(2.5, 1.0, 1.0).unwrap() });
        let b = logistic(g, 1.0, 1.0).with_meta(FrontMeta { kernel: k, params: ModelParams::new(3.0, 1.0, 1.0).unwrap() });
        assert!(matches!(uniqueness_test(&a, &b), Err(Error::InvalidArgument(_))));
    }
}
