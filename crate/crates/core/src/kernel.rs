//! Delay kernels, their effective one-dimensional kernels N_c and moment
//! generating functions.
//!
//! For a traveling wave with speed `c` every admissible kernel reduces to a
//! probability density N_c on the real line (or a point mass), and
//! `mgf(λ) = ∫ N_c(v) e^{-λv} dv`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::Profile;
use crate::quadrature::adaptive_simpson;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KernelFamily {
    /// Point delay, no spatial averaging: N_c = δ(v - cτ).
    LocalDiscreteDelay,
    /// Point delay with Gaussian spatial averaging.
    NonlocalDiscreteDelay,
    /// Strong generic delay (s/τ²)e^{-s/τ}, no spatial averaging.
    LocalStrongGeneric,
    /// Strong generic delay with Gaussian spatial averaging.
    NonlocalStrongGeneric,
    /// Weak generic delay e^{-s/τ}/τ with Gaussian spatial averaging.
    NonlocalWeakGeneric,
}

impl KernelFamily {
    pub const ALL: [KernelFamily; 5] = [
        KernelFamily::LocalDiscreteDelay,
        KernelFamily::NonlocalDiscreteDelay,
        KernelFamily::LocalStrongGeneric,
        KernelFamily::NonlocalStrongGeneric,
        KernelFamily::NonlocalWeakGeneric,
    ];

    pub fn is_nonlocal(self) -> bool {
        matches!(
            self,
            KernelFamily::NonlocalDiscreteDelay
                | KernelFamily::NonlocalStrongGeneric
                | KernelFamily::NonlocalWeakGeneric
        )
    }

    /// Short name used on the command line and in file headers.
    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::LocalDiscreteDelay => "local-discrete",
            KernelFamily::NonlocalDiscreteDelay => "nonlocal-discrete",
            KernelFamily::LocalStrongGeneric => "local-strong",
            KernelFamily::NonlocalStrongGeneric => "strong",
            KernelFamily::NonlocalWeakGeneric => "weak",
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fam = match s.trim().to_ascii_lowercase().as_str() {
            "weak" | "nonlocal-weak" | "nonlocalweakgeneric" => KernelFamily::NonlocalWeakGeneric,
            "strong" | "nonlocal-strong" | "nonlocalstronggeneric" => {
                KernelFamily::NonlocalStrongGeneric
            }
            "nonlocal-discrete" | "nonlocaldiscretedelay" => KernelFamily::NonlocalDiscreteDelay,
            "local-discrete" | "discrete" | "localdiscretedelay" => KernelFamily::LocalDiscreteDelay,
            "local-strong" | "localstronggeneric" => KernelFamily::LocalStrongGeneric,
            other => return Err(Error::invalid(format!("unknown kernel family `{other}`"))),
        };
        Ok(fam)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub tau: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::invalid(format!("tau must be positive and finite, got {tau}")));
        }
        Ok(KernelSpec { family, tau })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub c: f64,
    pub gamma: f64,
    pub d: f64,
}

impl ModelParams {
    pub fn new(c: f64, gamma: f64, d: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid(format!("c must be positive, got {c}")));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::invalid(format!("gamma must be nonnegative, got {gamma}")));
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::invalid(format!("d must be positive, got {d}")));
        }
        Ok(ModelParams { c, gamma, d })
    }

    pub fn with_speed(self, c: f64) -> Self {
        ModelParams { c, ..self }
    }

    /// w(λ) = dλ² - cλ.
    pub fn w(&self, lambda: f64) -> f64 {
        self.d * lambda * lambda - self.c * lambda
    }
}

/// Open interval, endpoints may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }
}

/// Roots of dλ² - cλ - 1/τ = 0, i.e. the ends of the set where wτ < 1.
fn weak_domain(tau: f64, p: &ModelParams) -> Interval {
    let disc = (p.c * p.c + 4.0 * p.d / tau).sqrt();
    // lower root written to avoid cancellation
    let hi = (p.c + disc) / (2.0 * p.d);
    let lo = -(1.0 / tau) / (p.d * hi);
    Interval { lo, hi }
}

pub fn mgf_domain(kernel: &KernelSpec, params: &ModelParams) -> Interval {
    match kernel.family {
        KernelFamily::NonlocalWeakGeneric | KernelFamily::NonlocalStrongGeneric => {
            weak_domain(kernel.tau, params)
        }
        KernelFamily::LocalDiscreteDelay | KernelFamily::NonlocalDiscreteDelay => Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        },
        KernelFamily::LocalStrongGeneric => Interval {
            lo: -1.0 / (params.c * kernel.tau),
            hi: f64::INFINITY,
        },
    }
}

fn check_domain(kernel: &KernelSpec, params: &ModelParams, lambda: f64) -> Result<()> {
    let dom = mgf_domain(kernel, params);
    if dom.contains(lambda) {
        Ok(())
    } else {
        Err(Error::OutOfDomain { lambda, lo: dom.lo, hi: dom.hi })
    }
}

/// Moment generating function ∫ N_c(v) e^{-λv} dv.
pub fn mgf(kernel: &KernelSpec, params: &ModelParams, lambda: f64) -> Result<f64> {
    check_domain(kernel, params, lambda)?;
    let tau = kernel.tau;
    let w = params.w(lambda);
    Ok(match kernel.family {
        KernelFamily::NonlocalWeakGeneric => 1.0 / (1.0 - w * tau),
        KernelFamily::NonlocalStrongGeneric => (1.0 - w * tau).powi(-2),
        KernelFamily::NonlocalDiscreteDelay => (w * tau).exp(),
        KernelFamily::LocalDiscreteDelay => (-lambda * params.c * tau).exp(),
        KernelFamily::LocalStrongGeneric => (1.0 + lambda * params.c * tau).powi(-2),
    })
}

/// d/dλ of [`mgf`].
pub fn mgf_derivative(kernel: &KernelSpec, params: &ModelParams, lambda: f64) -> Result<f64> {
    check_domain(kernel, params, lambda)?;
    let tau = kernel.tau;
    let w = params.w(lambda);
    let dw = 2.0 * params.d * lambda - params.c;
    let ct = params.c * tau;
    Ok(match kernel.family {
        KernelFamily::NonlocalWeakGeneric => tau * dw / (1.0 - w * tau).powi(2),
        KernelFamily::NonlocalStrongGeneric => 2.0 * tau * dw / (1.0 - w * tau).powi(3),
        KernelFamily::NonlocalDiscreteDelay => tau * dw * (w * tau).exp(),
        KernelFamily::LocalDiscreteDelay => -ct * (-lambda * ct).exp(),
        KernelFamily::LocalStrongGeneric => -2.0 * ct / (1.0 + lambda * ct).powi(3),
    })
}

/// Mean and variance of N_c.
pub fn moments(kernel: &KernelSpec, params: &ModelParams) -> (f64, f64) {
    let (tau, c, d) = (kernel.tau, params.c, params.d);
    match kernel.family {
        KernelFamily::NonlocalWeakGeneric => (c * tau, 2.0 * d * tau + c * c * tau * tau),
        KernelFamily::NonlocalStrongGeneric => {
            (2.0 * c * tau, 4.0 * d * tau + 2.0 * c * c * tau * tau)
        }
        KernelFamily::NonlocalDiscreteDelay => (c * tau, 2.0 * d * tau),
        KernelFamily::LocalDiscreteDelay => (c * tau, 0.0),
        KernelFamily::LocalStrongGeneric => (2.0 * c * tau, 2.0 * c * c * tau * tau),
    }
}

/// Density of N_c at `v`. Point masses have no density and return 0.
pub fn density(kernel: &KernelSpec, params: &ModelParams, v: f64) -> f64 {
    let (tau, c, d) = (kernel.tau, params.c, params.d);
    match kernel.family {
        KernelFamily::LocalDiscreteDelay => 0.0,
        KernelFamily::NonlocalDiscreteDelay => {
            let var2 = 4.0 * d * tau;
            (-(v - c * tau).powi(2) / var2).exp() / (std::f64::consts::PI * var2).sqrt()
        }
        KernelFamily::LocalStrongGeneric => {
            if v <= 0.0 {
                0.0
            } else {
                let s = v / c;
                s / (tau * tau) * (-s / tau).exp() / c
            }
        }
        KernelFamily::NonlocalWeakGeneric => {
            generic_density(|s| (-s / tau).exp() / tau, 40.0 * tau, params, tau, v)
        }
        KernelFamily::NonlocalStrongGeneric => generic_density(
            |s| s / (tau * tau) * (-s / tau).exp(),
            50.0 * tau,
            params,
            tau,
            v,
        ),
    }
}

/// N_c(v) = ∫ G(s) Gauss_{2ds}(v - cs) ds with the substitution s = u², which
/// removes the 1/√s singularity of the heat kernel at s = 0.
fn generic_density<G: Fn(f64) -> f64>(g: G, s_tail: f64, p: &ModelParams, tau: f64, v: f64) -> f64 {
    let (c, d) = (p.c, p.d);
    let norm = 2.0 / (4.0 * std::f64::consts::PI * d).sqrt();
    let integrand = |u: f64| {
        let s = u * u;
        if s == 0.0 {
            return if v == 0.0 { norm * g(0.0) } else { 0.0 };
        }
        norm * g(s) * (-(v - c * s).powi(2) / (4.0 * d * s)).exp()
    };
    // the integrand peaks near s ≈ |v| / sqrt(c² + 4d/τ); cover it generously
    let s_peak = v.abs() / (c * c + 4.0 * d / tau).sqrt();
    let s_hi = s_tail + 4.0 * s_peak;
    adaptive_simpson(&integrand, 0.0, s_hi.sqrt(), 32, 1e-10, 1e-300)
}

/// Sampled N_c on offsets that are integer multiples of `step`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretizedKernel {
    pub grid_offsets: Vec<f64>,
    pub weights: Vec<f64>,
    pub is_point_mass: bool,
    pub point_shift: f64,
    pub step: f64,
}

impl DiscretizedKernel {
    fn point(shift: f64, step: f64) -> Self {
        DiscretizedKernel {
            grid_offsets: vec![shift],
            weights: vec![1.0],
            is_point_mass: true,
            point_shift: shift,
            step,
        }
    }

    /// Σ w_i e^{-λ v_i}.
    pub fn mgf(&self, lambda: f64) -> f64 {
        self.grid_offsets
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| w * (-lambda * v).exp())
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.grid_offsets.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// Node offsets and weights for a grid with the kernel's step. A point
    /// mass between nodes is split linearly over its two neighbours.
    pub fn node_stencil(&self) -> NodeStencil {
        if self.is_point_mass {
            let x = self.point_shift / self.step;
            let k = x.floor();
            let frac = x - k;
            let k = k as isize;
            if frac < 1e-12 {
                return NodeStencil { offsets: vec![k], weights: vec![1.0] };
            }
            return NodeStencil { offsets: vec![k, k + 1], weights: vec![1.0 - frac, frac] };
        }
        NodeStencil {
            offsets: self
                .grid_offsets
                .iter()
                .map(|v| (v / self.step).round() as isize)
                .collect(),
            weights: self.weights.clone(),
        }
    }
}

/// Convolution weights attached to integer node offsets: (N∗φ)_i = Σ w_j φ_{i-o_j}.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeStencil {
    pub offsets: Vec<isize>,
    pub weights: Vec<f64>,
}

impl NodeStencil {
    pub fn min_offset(&self) -> isize {
        *self.offsets.iter().min().unwrap_or(&0)
    }

    pub fn max_offset(&self) -> isize {
        *self.offsets.iter().max().unwrap_or(&0)
    }
}

/// Discretize N_c with truncation where the omitted mass drops below `mass_tol`.
pub fn discretize(
    kernel: &KernelSpec,
    params: &ModelParams,
    step: f64,
    mass_tol: f64,
) -> Result<DiscretizedKernel> {
    discretize_tilted(kernel, params, step, mass_tol, &[0.0])
}

/// Like [`discretize`], but the omitted mass is measured under every
/// exponential tilt e^{-λv}/mgf(λ) for λ in `tilts`. Use this when the
/// discrete kernel must reproduce the mgf near the ends of its domain.
pub fn discretize_tilted(
    kernel: &KernelSpec,
    params: &ModelParams,
    step: f64,
    mass_tol: f64,
    tilts: &[f64],
) -> Result<DiscretizedKernel> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::invalid(format!("step must be positive, got {step}")));
    }
    if !(mass_tol > 0.0 && mass_tol < 0.1) {
        return Err(Error::invalid(format!("mass_tol must lie in (0, 0.1), got {mass_tol}")));
    }
    for &l in tilts {
        check_domain(kernel, params, l)?;
    }
    let (mean, var) = moments(kernel, params);
    let sd = var.sqrt();
    if kernel.family == KernelFamily::LocalDiscreteDelay {
        return Ok(DiscretizedKernel::point(mean, step));
    }
    // a kernel much narrower than the step acts as a shift by its mean
    if sd < 0.5 * step {
        return Ok(DiscretizedKernel::point(mean, step));
    }

    let dom = mgf_domain(kernel, params);
    let ln_tol = (1.0 / mass_tol).ln() + 10.0;
    // sampling window: several standard deviations plus enough room for the
    // exponential tails under every tilt
    let mut lo = mean - 12.0 * sd;
    let mut hi = mean + 12.0 * sd;
    for &l in tilts {
        if dom.lo.is_finite() {
            // right tail of N decays like e^{λ_lo v}; the tilt removes part of it
            let rate = l - dom.lo;
            hi = hi.max(mean + ln_tol / rate);
        }
        if dom.hi.is_finite() {
            let rate = dom.hi - l;
            lo = lo.min(mean - ln_tol / rate);
        }
        if kernel.family == KernelFamily::NonlocalDiscreteDelay {
            // tilting a Gaussian moves its centre by -2dτλ
            let shift = -2.0 * params.d * kernel.tau * l;
            lo = lo.min(mean + shift - 12.0 * sd);
            hi = hi.max(mean + shift + 12.0 * sd);
        }
    }
    if kernel.family == KernelFamily::LocalStrongGeneric {
        lo = 0.0;
    }
    let k_lo = (lo / step).floor() as i64;
    let k_hi = (hi / step).ceil() as i64;
    let mut offsets = Vec::with_capacity((k_hi - k_lo + 1) as usize);
    let mut dens = Vec::with_capacity(offsets.capacity());
    for k in k_lo..=k_hi {
        let v = k as f64 * step;
        offsets.push(v);
        dens.push(density(kernel, params, v).max(0.0));
    }
    let mass: f64 = dens.iter().sum::<f64>() * step;
    if (mass - 1.0).abs() > 0.25 {
        return Err(Error::Resolution { step, mass });
    }

    // trim from both ends while every tilted tail stays below mass_tol
    let n = offsets.len();
    let mut first = n - 1;
    let mut last = 0usize;
    // the weights are normalized untilted, so λ = 0 always takes part
    for &l in std::iter::once(&0.0).chain(tilts) {
        let tilted: Vec<f64> = offsets
            .iter()
            .zip(&dens)
            .map(|(v, p)| p * (-l * v).exp())
            .collect();
        let total: f64 = tilted.iter().sum();
        let mut acc = 0.0;
        let mut keep_first = 0usize;
        for (i, t) in tilted.iter().enumerate() {
            acc += t;
            if acc >= mass_tol * total {
                keep_first = i;
                break;
            }
        }
        acc = 0.0;
        let mut keep_last = n - 1;
        for i in (0..n).rev() {
            acc += tilted[i];
            if acc >= mass_tol * total {
                keep_last = i;
                break;
            }
        }
        // the most demanding tilt wins
        first = first.min(keep_first);
        last = last.max(keep_last);
    }
    let offsets = offsets[first..=last].to_vec();
    let mut weights = dens[first..=last].to_vec();
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }
    Ok(DiscretizedKernel { grid_offsets: offsets, weights, is_point_mass: false, point_shift: 0.0, step })
}

/// (N∗φ)(t) with φ read off the profile (linear interpolation on the grid and
/// the profile's tail continuation beyond it).
pub fn convolve(kernel: &DiscretizedKernel, profile: &Profile, t: f64) -> f64 {
    if kernel.is_point_mass {
        return profile.eval(t - kernel.point_shift);
    }
    kernel
        .grid_offsets
        .iter()
        .zip(&kernel.weights)
        .map(|(v, w)| w * profile.eval(t - v))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weak(tau: f64) -> KernelSpec {
        KernelSpec::new(KernelFamily::NonlocalWeakGeneric, tau).unwrap()
    }

    /// Two-sided exponential density with the weak kernel's mgf, obtained by
    /// partial fractions of 1/(1 - τ(dλ² - cλ)).
    fn weak_closed_form(tau: f64, p: &ModelParams, v: f64) -> f64 {
        let dom = weak_domain(tau, p);
        let (a, b) = (-dom.lo, dom.hi);
        let cst = 1.0 / (tau * p.d * (a + b));
        if v >= 0.0 {
            cst * (-a * v).exp()
        } else {
            cst * (b * v).exp()
        }
    }

    /// Self-convolution of the weak density: the strong kernel.
    fn strong_closed_form(tau: f64, p: &ModelParams, v: f64) -> f64 {
        let dom = weak_domain(tau, p);
        let (a, b) = (-dom.lo, dom.hi);
        let cst = 1.0 / (tau * p.d * (a + b));
        if v >= 0.0 {
            cst * cst * (-a * v).exp() * (v + 2.0 / (a + b))
        } else {
            cst * cst * (b * v).exp() * (-v + 2.0 / (a + b))
        }
    }

    #[test]
    fn mgf_at_zero_is_one() {
        let p = ModelParams::new(2.3, 0.7, 1.4).unwrap();
        for fam in KernelFamily::ALL {
            let k = KernelSpec::new(fam, 0.8).unwrap();
            assert!((mgf(&k, &p, 0.0).unwrap() - 1.0).abs() < 1e-15, "{fam}");
        }
    }

    #[test]
    fn local_discrete_mgf_value() {
        let k = KernelSpec::new(KernelFamily::LocalDiscreteDelay, 0.5).unwrap();
        let p = ModelParams::new(2.0, 1.0, 1.0).unwrap();
        let e = std::f64::consts::E;
        assert!((mgf(&k, &p, -1.0).unwrap() - e).abs() < 1e-14);
        // a narrow Gaussian around the point mass gives nearly the same value
        let sigma2: f64 = 1e-6;
        let mut acc = 0.0;
        let h = 1e-5;
        for i in -2000..=2000 {
            let v = 1.0 + i as f64 * h;
            let g = (-(v - 1.0).powi(2) / (2.0 * sigma2)).exp() / (2.0 * std::f64::consts::PI * sigma2).sqrt();
            acc += g * v.exp() * h;
        }
        assert!((acc - e).abs() < 1e-5);
    }

    #[test]
    fn mgf_at_overshoot_root() {
        let k = weak(10.0);
        let p = ModelParams::new(10.0 * 2f64.sqrt(), 40.0, 50.0).unwrap();
        let wp = (41.0 - 41f64.sqrt()) / 820.0;
        let z = (p.c - (p.c * p.c + 4.0 * p.d * wp).sqrt()) / (2.0 * p.d);
        let m = mgf(&k, &p, z).unwrap();
        assert!((m - 1.0 / (1.0 - 10.0 * wp)).abs() < 1e-10);
    }

    #[test]
    fn domains() {
        let p = ModelParams::new(2.0, 1.0, 1.0).unwrap();
        let dom = mgf_domain(&weak(1.0), &p);
        assert!((dom.lo - (1.0 - 2f64.sqrt())).abs() < 1e-14);
        assert!((dom.hi - (1.0 + 2f64.sqrt())).abs() < 1e-14);
        let ls = KernelSpec::new(KernelFamily::LocalStrongGeneric, 1.0).unwrap();
        let p1 = ModelParams::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(mgf_domain(&ls, &p1).lo, -1.0);
        let ld = KernelSpec::new(KernelFamily::LocalDiscreteDelay, 1.0).unwrap();
        let dom = mgf_domain(&ld, &p);
        assert!(dom.lo == f64::NEG_INFINITY && dom.hi == f64::INFINITY);
        assert!(matches!(mgf(&weak(1.0), &p, -0.5), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn mgf_blows_up_at_left_end() {
        let p = ModelParams::new(2.0, 1.0, 1.0).unwrap();
        let k = weak(1.0);
        let lo = mgf_domain(&k, &p).lo;
        let m1 = mgf(&k, &p, lo + 1e-3).unwrap();
        let m2 = mgf(&k, &p, lo + 1e-6).unwrap();
        assert!(m2 > 100.0 * m1 && m1 > 100.0);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = ModelParams::new(2.5, 1.0, 1.3).unwrap();
        for fam in KernelFamily::ALL {
            let k = KernelSpec::new(fam, 0.4).unwrap();
            let l = -0.2;
            let h = 1e-6;
            let fd = (mgf(&k, &p, l + h).unwrap() - mgf(&k, &p, l - h).unwrap()) / (2.0 * h);
            assert!((fd - mgf_derivative(&k, &p, l).unwrap()).abs() < 1e-7, "{fam}");
        }
    }

    #[test]
    fn generic_density_matches_closed_forms() {
        let p = ModelParams::new(2.0, 1.0, 1.0).unwrap();
        let s = KernelSpec::new(KernelFamily::NonlocalStrongGeneric, 0.7).unwrap();
        for &v in &[-5.0, -1.0, -0.01, 0.0, 0.3, 1.4, 6.0, 25.0] {
            let a = density(&weak(0.7), &p, v);
            let b = weak_closed_form(0.7, &p, v);
            assert!((a - b).abs() < 1e-9 * b.max(1e-3), "weak v={v}: {a} vs {b}");
            let a = density(&s, &p, v);
            let b = strong_closed_form(0.7, &p, v);
            assert!((a - b).abs() < 1e-9 * b.max(1e-3), "strong v={v}: {a} vs {b}");
        }
    }

    #[test]
    fn point_mass_discretization() {
        let k = KernelSpec::new(KernelFamily::LocalDiscreteDelay, 1.0).unwrap();
        let p = ModelParams::new(2.0, 1.0, 1.0).unwrap();
        let dk = discretize(&k, &p, 0.1, 1e-8).unwrap();
        assert!(dk.is_point_mass);
        assert_eq!(dk.point_shift, 2.0);
    }

    #[test]
    fn gaussian_discretization_mean() {
        let k = KernelSpec::new(KernelFamily::NonlocalDiscreteDelay, 1.0).unwrap();
        let p = ModelParams::new(2.0, 1.0, 1.0).unwrap();
        let dk = discretize(&k, &p, 0.05, 1e-8).unwrap();
        let sum: f64 = dk.weights.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert!((dk.mean() - 2.0).abs() < 1e-4);
        let var: f64 = dk
            .grid_offsets
            .iter()
            .zip(&dk.weights)
            .map(|(v, w)| w * (v - 2.0).powi(2))
            .sum();
        assert!((var - 2.0).abs() < 1e-3);
    }

    #[test]
    fn weak_discretization_mgf() {
        let k = weak(1.0);
        let p = ModelParams::new(2.0, 1.0, 1.0).unwrap();
        let dk = discretize_tilted(&k, &p, 0.05, 1e-8, &[-0.3, 0.3]).unwrap();
        for i in 0..=12 {
            let l = -0.3 + 0.05 * i as f64;
            let exact = mgf(&k, &p, l).unwrap();
            // O(h²) sampling error from the cusp at v = 0
            assert!((dk.mgf(l) - exact).abs() < 5e-4 * exact, "lambda {l}: {} vs {exact}", dk.mgf(l));
        }
    }

    #[test]
    fn narrow_kernel_collapses_to_shift() {
        let k = weak(1e-9);
        let p = ModelParams::new(2.0, 1.0, 1.0).unwrap();
        let dk = discretize(&k, &p, 0.1, 1e-8).unwrap();
        assert!(dk.is_point_mass);
        assert!((dk.point_shift - 2e-9).abs() < 1e-20);
    }

    #[test]
    fn invalid_inputs() {
        assert!(KernelSpec::new(KernelFamily::NonlocalWeakGeneric, 0.0).is_err());
        assert!(ModelParams::new(2.0, -1.0, 1.0).is_err());
        let p = ModelParams::new(2.0, 1.0, 1.0).unwrap();
        assert!(discretize(&weak(1.0), &p, -0.1, 1e-8).is_err());
    }

    #[test]
    fn family_names_round_trip() {
        for fam in KernelFamily::ALL {
            assert_eq!(fam.name().parse::<KernelFamily>().unwrap(), fam);
        }
    }
}
