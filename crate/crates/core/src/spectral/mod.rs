//! Characteristic functions, their real roots and the existence verdicts
//! built on them.

mod region;
mod thresholds;

pub use region::{region_sweep, BoundaryPoint, RegionCell, RegionTable};
pub use thresholds::{closed_form_threshold, speed_interval_discrete, SpeedSet, Thresholds};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{mgf, mgf_derivative, mgf_domain, KernelFamily, KernelSpec, ModelParams};

/// Most negative z scanned for roots.
pub const Z_MAX: f64 = 50.0;
const SCAN_POINTS: usize = 2000;
const ROOT_TOL: f64 = 1e-12;
const DOUBLE_ROOT_DERIV: f64 = 1e-6;
/// Relative slack in the speed bound c ≥ 2√d, so that decimal inputs such
/// as 14.1421356 for 10√2 are accepted.
pub const SPEED_RTOL: f64 = 1e-8;

/// χ₊(z) = dz² - cz - mgf(z)/(1+γ).
pub fn chi_plus(kernel: &KernelSpec, params: &ModelParams, z: f64) -> Result<f64> {
    Ok(params.w(z) - mgf(kernel, params, z)? / (1.0 + params.gamma))
}

pub fn chi_plus_derivative(kernel: &KernelSpec, params: &ModelParams, z: f64) -> Result<f64> {
    Ok(2.0 * params.d * z - params.c - mgf_derivative(kernel, params, z)? / (1.0 + params.gamma))
}

/// Reduced characteristic function χ(w, τ) of the nonlocal families.
pub fn chi_w(family: KernelFamily, tau: f64, gamma: f64, w: f64) -> Result<f64> {
    let g = 1.0 + gamma;
    match family {
        KernelFamily::NonlocalWeakGeneric | KernelFamily::NonlocalStrongGeneric => {
            let q = w * tau - 1.0;
            if q == 0.0 {
                return Err(Error::Singularity { w, tau });
            }
            if family == KernelFamily::NonlocalWeakGeneric {
                Ok(w + 1.0 / (g * q))
            } else {
                Ok(w - 1.0 / (g * q * q))
            }
        }
        KernelFamily::NonlocalDiscreteDelay => Ok(w - (w * tau).exp() / g),
        other => Err(Error::UnsupportedFamily { family: other.to_string(), operation: "chi_w" }),
    }
}

fn chi_w_derivative(family: KernelFamily, tau: f64, gamma: f64, w: f64) -> f64 {
    let g = 1.0 + gamma;
    let q = w * tau - 1.0;
    match family {
        KernelFamily::NonlocalWeakGeneric => 1.0 - tau / (g * q * q),
        KernelFamily::NonlocalStrongGeneric => 1.0 + 2.0 * tau / (g * q * q * q),
        _ => 1.0 - tau * (w * tau).exp() / g,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicReport {
    /// Ascending roots (negative z for χ₊, positive w for χ).
    pub roots: Vec<f64>,
    /// γ·w at each root.
    pub gamma_w: Vec<f64>,
    pub double_root_flag: bool,
    /// Left end -λ₀ of the mgf domain.
    pub domain_left: f64,
}

impl CharacteristicReport {
    /// The maximal root (the one closest to zero for χ₊).
    pub fn maximal_root(&self) -> Option<f64> {
        self.roots.last().copied()
    }
}

/// Sign scan on a grid followed by bisection; also catches tangential
/// (double) roots through a golden-section search at local extrema of f.
fn scan_roots<F: Fn(f64) -> f64, D: Fn(f64) -> f64>(f: F, df: D, xs: &[f64]) -> (Vec<f64>, bool) {
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut roots = Vec::new();
    let mut double = false;
    for k in 0..xs.len() - 1 {
        let (a, b) = (xs[k], xs[k + 1]);
        let (fa, fb) = (vals[k], vals[k + 1]);
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fa * fb < 0.0 {
            roots.push(bisect(&f, a, b, fa));
        }
    }
    if vals.last() == Some(&0.0) {
        roots.push(*xs.last().unwrap());
    }
    // near-tangencies without a sign change
    for k in 1..xs.len() - 1 {
        let (l, m, r) = (vals[k - 1], vals[k], vals[k + 1]);
        if l * m > 0.0 && m * r > 0.0 && m.abs() <= l.abs() && m.abs() <= r.abs() {
            let x = golden_min(|x| m.signum() * f(x), xs[k - 1], xs[k + 1]);
            let fx = f(x);
            if fx * m < 0.0 {
                // two close simple roots inside one scan cell
                roots.push(bisect(&f, xs[k - 1], x, l));
                roots.push(bisect(&f, x, xs[k + 1], fx));
            } else if fx.abs() < 1e-10 && !roots.iter().any(|&q| (q - x).abs() < 1e-9 * (1.0 + x.abs())) {
                roots.push(x);
                double = true;
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * (1.0 + a.abs()));
    // a pair closer than this is a double root split by rounding
    let close_pair = roots.windows(2).any(|w| (w[1] - w[0]).abs() < 1e-5 * (1.0 + w[0].abs()));
    if close_pair || roots.iter().any(|&x| df(x).abs() < DOUBLE_ROOT_DERIV) {
        double = true;
    }
    (roots, double)
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm.abs() < ROOT_TOL || m == a || m == b {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if (b - a).abs() < 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// Geometric grid from -|lo| up to -|hi| (both negative), ascending.
fn negative_geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.abs().ln(), hi.abs().ln());
    (0..n)
        .map(|k| -(a + (b - a) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Negative real roots of χ₊.
pub fn find_negative_roots(kernel: &KernelSpec, params: &ModelParams) -> CharacteristicReport {
    let dom = mgf_domain(kernel, params);
    let lo = (dom.lo + 1e-9).max(-Z_MAX);
    let xs = negative_geometric(lo, 1e-12, SCAN_POINTS);
    let f = |z: f64| chi_plus(kernel, params, z).unwrap_or(f64::NEG_INFINITY);
    let df = |z: f64| chi_plus_derivative(kernel, params, z).unwrap_or(f64::INFINITY);
    let (roots, double_root_flag) = scan_roots(f, df, &xs);
    let gamma_w = roots.iter().map(|&z| params.gamma * params.w(z)).collect();
    CharacteristicReport { roots, gamma_w, double_root_flag, domain_left: dom.lo }
}

/// Positive roots w of the reduced function χ(w, τ) on (0, 1/τ), or on
/// (0, W_MAX) for the nonlocal discrete delay.
pub fn find_w_roots(family: KernelFamily, tau: f64, gamma: f64) -> Result<CharacteristicReport> {
    chi_w(family, tau, gamma, 0.0)?;
    let hi = match family {
        KernelFamily::NonlocalDiscreteDelay => Z_MAX * Z_MAX,
        _ => 1.0 / tau - 1e-12 / tau,
    };
    let n = SCAN_POINTS;
    let (a, b) = (1e-12f64.ln(), hi.ln());
    let xs: Vec<f64> = (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect();
    let f = |w: f64| chi_w(family, tau, gamma, w).unwrap_or(f64::NAN);
    let df = |w: f64| chi_w_derivative(family, tau, gamma, w);
    let (roots, double_root_flag) = scan_roots(f, df, &xs);
    let gamma_w = roots.iter().map(|&w| gamma * w).collect();
    Ok(CharacteristicReport { roots, gamma_w, double_root_flag, domain_left: 0.0 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    MonotoneGuaranteed,
    EventuallyMonotonePossible,
    NoMonotoneFront,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExistenceVerdict {
    pub necessary_holds: bool,
    pub sufficient_holds: bool,
    pub witness_root: Option<f64>,
    /// γ·w at the witness root, or at the maximal root when no witness exists.
    pub gamma_w: Option<f64>,
    pub regime: Regime,
    pub report: CharacteristicReport,
}

/// 2√d.
pub fn minimal_speed(params: &ModelParams) -> f64 {
    2.0 * params.d.sqrt()
}

pub fn check_speed(params: &ModelParams) -> Result<()> {
    let minimal = minimal_speed(params);
    if params.c < minimal * (1.0 - SPEED_RTOL) {
        return Err(Error::SpeedBound { c: params.c, minimal });
    }
    Ok(())
}

pub fn classify(kernel: &KernelSpec, params: &ModelParams) -> Result<ExistenceVerdict> {
    check_speed(params)?;
    let report = find_negative_roots(kernel, params);
    // equality γw = 1 counts as sufficient; allow for rounding in w
    let witness = report
        .roots
        .iter()
        .zip(&report.gamma_w)
        .filter(|(_, gw)| **gw <= 1.0 + 1e-12)
        .map(|(z, gw)| (*z, *gw))
        .last();
    let necessary_holds = !report.roots.is_empty();
    let sufficient_holds = witness.is_some();
    let regime = if sufficient_holds {
        Regime::MonotoneGuaranteed
    } else if necessary_holds {
        Regime::EventuallyMonotonePossible
    } else {
        Regime::NoMonotoneFront
    };
    let gamma_w = witness.map(|w| w.1).or_else(|| report.gamma_w.last().copied());
    Ok(ExistenceVerdict {
        necessary_holds,
        sufficient_holds,
        witness_root: witness.map(|w| w.0),
        gamma_w,
        regime,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(f: KernelFamily, tau: f64) -> KernelSpec {
        KernelSpec::new(f, tau).unwrap()
    }

    /// Smaller root of 410w² - 41w + 1 = 0.
    fn w_prime() -> f64 {
        (41.0 - 41f64.sqrt()) / 820.0
    }

    #[test]
    fn chi_plus_at_zero() {
        let p = ModelParams::new(2.0, 0.7, 1.0).unwrap();
        let k = spec(KernelFamily::LocalDiscreteDelay, 0.3);
        assert!((chi_plus(&k, &p, 0.0).unwrap() + 1.0 / 1.7).abs() < 1e-15);
        let z = -0.4;
        let expected = z * z - 2.0 * z - (-z * 2.0 * 0.3f64).exp() / 1.7;
        assert!((chi_plus(&k, &p, z).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn chi_plus_vanishes_at_example_root() {
        let p = ModelParams::new(10.0 * 2f64.sqrt(), 40.0, 50.0).unwrap();
        let k = spec(KernelFamily::NonlocalWeakGeneric, 10.0);
        let z = (p.c - (p.c * p.c + 4.0 * p.d * w_prime()).sqrt()) / (2.0 * p.d);
        assert!(chi_plus(&k, &p, z).unwrap().abs() < 1e-9);
    }

    #[test]
    fn chi_w_examples() {
        let f = KernelFamily::NonlocalWeakGeneric;
        assert!((chi_w(f, 0.0, 3.0, 0.7).unwrap() - (0.7 - 0.25)).abs() < 1e-15);
        assert!(chi_w(f, 10.0, 40.0, w_prime()).unwrap().abs() < 1e-12);
        assert!(matches!(chi_w(f, 2.0, 1.0, 0.5), Err(Error::Singularity { .. })));
        assert!(chi_w(KernelFamily::LocalDiscreteDelay, 1.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn strong_double_root_at_threshold() {
        // at τ = 4(1+γ)/27 the double root sits at w = 1/(3τ)
        let gamma = 1.0;
        let tau = 4.0 * (1.0 + gamma) / 27.0;
        let w = 1.0 / (3.0 * tau);
        let f = KernelFamily::NonlocalStrongGeneric;
        assert!(chi_w(f, tau, gamma, w).unwrap().abs() < 1e-14);
        assert!(chi_w_derivative(f, tau, gamma, w).abs() < 1e-13);
    }

    #[test]
    fn weak_roots_match_quadratic() {
        let p = ModelParams::new(2.0, 1.0, 1.0).unwrap();
        let k = spec(KernelFamily::NonlocalWeakGeneric, 0.4);
        let rep = find_negative_roots(&k, &p);
        assert_eq!(rep.roots.len(), 2);
        // 0.8w² - 2w + 1 = 0
        let ws = [(2.0 - 0.8f64.sqrt()) / 1.6, (2.0 + 0.8f64.sqrt()) / 1.6];
        let mut got: Vec<f64> = rep.roots.iter().map(|&z| p.w(z)).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((got[0] - ws[0]).abs() < 1e-9 && (got[1] - ws[1]).abs() < 1e-9);
        for &z in &rep.roots {
            assert!(chi_plus(&k, &p, z).unwrap().abs() < 1e-10);
        }
        let wrep = find_w_roots(KernelFamily::NonlocalWeakGeneric, 0.4, 1.0).unwrap();
        assert!((wrep.roots[0] - ws[0]).abs() < 1e-9);
    }

    #[test]
    fn no_roots_beyond_necessary_threshold() {
        let p = ModelParams::new(2.0, 1.0, 1.0).unwrap();
        let rep = find_negative_roots(&spec(KernelFamily::NonlocalWeakGeneric, 1.0), &p);
        assert!(rep.roots.is_empty());
    }

    #[test]
    fn undelayed_limit() {
        let gamma = 0.5;
        let p = ModelParams::new(3.0, gamma, 1.0).unwrap();
        let zq = (3.0 - (9.0f64 + 4.0 / (1.0 + gamma)).sqrt()) / 2.0;
        for fam in KernelFamily::ALL {
            let rep = find_negative_roots(&spec(fam, 1e-9), &p);
            let z = rep.maximal_root().unwrap();
            assert!((z - zq).abs() < 1e-6, "{fam}: {z} vs {zq}");
        }
    }

    #[test]
    fn example_one_verdict() {
        let p = ModelParams::new(10.0 * 2f64.sqrt(), 40.0, 50.0).unwrap();
        let v = classify(&spec(KernelFamily::NonlocalWeakGeneric, 10.0), &p).unwrap();
        assert!(v.necessary_holds && !v.sufficient_holds);
        assert_eq!(v.regime, Regime::EventuallyMonotonePossible);
        let expected = 2.0 * (1.0 - 1.0 / 41f64.sqrt());
        assert!((v.gamma_w.unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn sufficient_cases() {
        let p = ModelParams::new(2.0, 1.0, 1.0).unwrap();
        let v = classify(&spec(KernelFamily::NonlocalWeakGeneric, 0.4), &p).unwrap();
        assert!(v.sufficient_holds);
        assert!((v.gamma_w.unwrap() - (2.0 - 0.8f64.sqrt()) / 1.6).abs() < 1e-9);
        for gamma in [0.0, 0.3, 7.0] {
            let p = ModelParams::new(2.5, gamma, 1.0).unwrap();
            let v = classify(&spec(KernelFamily::NonlocalWeakGeneric, 1e-9), &p).unwrap();
            assert!(v.sufficient_holds);
        }
    }

    #[test]
    fn speed_bound() {
        let p = ModelParams::new(1.9, 1.0, 1.0).unwrap();
        let k = spec(KernelFamily::NonlocalWeakGeneric, 0.2);
        assert!(matches!(classify(&k, &p), Err(Error::SpeedBound { .. })));
        // decimal approximation of 10√2 is accepted
        let p = ModelParams::new(14.1421356, 40.0, 50.0).unwrap();
        assert!(classify(&spec(KernelFamily::NonlocalWeakGeneric, 10.0), &p).is_ok());
    }

    #[test]
    fn minimal_speeds() {
        for (d, c) in [(1.0, 2.0), (50.0, 10.0 * 2f64.sqrt()), (4.0, 4.0)] {
            let p = ModelParams::new(1.0, 0.0, d).unwrap();
            assert!((minimal_speed(&p) - c).abs() < 1e-14);
        }
    }

    #[test]
    fn double_root_flagged_on_necessary_threshold() {
        let gamma = 1.0;
        let tau = (1.0 + gamma) / 4.0;
        let p = ModelParams::new(2.0, gamma, 1.0).unwrap();
        let rep = find_negative_roots(&spec(KernelFamily::NonlocalWeakGeneric, tau), &p);
        assert!(rep.double_root_flag, "{rep:?}");
        assert!(!rep.roots.is_empty());
    }
}
