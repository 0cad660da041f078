//! Green kernels turning the profile equation into a fixed-point problem.
//!
//! The profile equation is rewritten as dφ'' - cφ' + φ = 𝓕φ, whose bounded
//! solution is φ(t) = ∫₀^∞ A(s) (𝓕φ)(t + s) ds.

use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;

/// Continuous Green kernel A(s) of φ'' - cφ' + φ (unit diffusivity).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreenKernel {
    pub c: f64,
    pub z1: f64,
    pub z2: f64,
    pub critical: bool,
}

impl GreenKernel {
    pub fn a(&self, s: f64) -> f64 {
        if s < 0.0 {
            return 0.0;
        }
        if self.critical {
            s * (-s).exp()
        } else {
            ((-self.z1 * s).exp() - (-self.z2 * s).exp()) / (self.z2 - self.z1)
        }
    }

    /// ∫₀^∞ A(s) e^{λs} ds by adaptive quadrature, for λ < z₁.
    pub fn quadrature_moment(&self, lambda: f64) -> f64 {
        let decay = self.z1 - lambda;
        assert!(decay > 0.0, "moment diverges for lambda >= z1");
        let s_max = 80.0 / decay;
        let f = |s: f64| self.a(s) * (lambda * s).exp();
        adaptive_simpson(&f, 0.0, s_max, 64, 1e-13, 1e-300)
    }

    /// Closed form 1/(λ² - cλ + 1) of the same moment.
    pub fn exact_moment(&self, lambda: f64) -> f64 {
        1.0 / (lambda * lambda - self.c * lambda + 1.0)
    }
}

pub fn green_kernel(c: f64) -> Result<GreenKernel> {
    if !(c >= 2.0) {
        return Err(Error::SpeedBound { c, minimal: 2.0 });
    }
    let disc = (c * c - 4.0).sqrt();
    let z2 = (c + disc) / 2.0;
    // z1 = 1/z2 avoids cancellation for large c
    let z1 = 1.0 / z2;
    Ok(GreenKernel { c, z1, z2, critical: c == 2.0 })
}

/// Exact Green kernel of the three-point discretization
/// d(φ_{i+1} - 2φ_i + φ_{i-1})/h² - c(φ_{i+1} - φ_{i-1})/(2h) + φ_i = g_i,
/// namely φ_i = Σ_{k≥1} G_k g_{i+k} with G_k = (r₁^k - r₂^k)/(α(r₁ - r₂)).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeGreen {
    pub r1: f64,
    pub r2: f64,
    /// Coefficient of φ_{i-1}.
    pub alpha: f64,
    /// Coefficient of φ_i.
    pub beta: f64,
    /// Coefficient of φ_{i+1}.
    pub kappa: f64,
}

impl LatticeGreen {
    pub fn new(c: f64, d: f64, h: f64) -> Result<Self> {
        let dh = d / (h * h);
        let ch = c / (2.0 * h);
        let alpha = dh + ch;
        let beta = 1.0 - 2.0 * dh;
        let kappa = dh - ch;
        if !(kappa > 0.0 && beta < 0.0) {
            return Err(Error::invalid(format!(
                "grid step {h} too coarse for c = {c}, d = {d} (need h < min(2d/c, sqrt(2d)))"
            )));
        }
        let disc = beta * beta - 4.0 * alpha * kappa;
        if disc <= 0.0 {
            return Err(Error::SpeedBound { c, minimal: 2.0 * d.sqrt() });
        }
        let sq = disc.sqrt();
        // roots of α r² + β r + κ = 0, both in (0, 1)
        let r1 = (-beta + sq) / (2.0 * alpha);
        let r2 = kappa / (alpha * r1);
        Ok(LatticeGreen { r1, r2, alpha, beta, kappa })
    }

    pub fn weight(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        (self.r1.powi(k as i32) - self.r2.powi(k as i32)) / (self.alpha * (self.r1 - self.r2))
    }

    /// φ_i = Σ_{k≥1} G_k g_{i+k}, where beyond the last node g continues as
    /// `beyond(k)` = g_{n-1+k}. The continuation is summed in closed form from
    /// `tail_sums(r)` = Σ_{k≥1} r^k g_{n-1+k} for r = r₁, r₂.
    pub fn apply<T: Fn(f64) -> f64>(&self, g: &[f64], tail_sums: T) -> Vec<f64> {
        let n = g.len();
        let mut out = vec![0.0; n];
        let mut s1 = tail_sums(self.r1);
        let mut s2 = tail_sums(self.r2);
        let scale = 1.0 / (self.alpha * (self.r1 - self.r2));
        out[n - 1] = (s1 - s2) * scale;
        for i in (0..n - 1).rev() {
            s1 = self.r1 * (g[i + 1] + s1);
            s2 = self.r2 * (g[i + 1] + s2);
            out[i] = (s1 - s2) * scale;
        }
        out
    }
}
