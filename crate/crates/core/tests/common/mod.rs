//! Property checks shared by the proptest suite and the acceptance harness.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use wavefront_lab::kernel::{density, discretize, discretize_tilted, mgf, mgf_domain, moments};
use wavefront_lab::pde::{run, InitialData, SimConfig};
use wavefront_lab::profile::{apply_a, left_rate, shift_align, Equation, Grid, LowerSolution, Profile, TailExtension};
use wavefront_lab::{KernelFamily, KernelSpec, ModelParams};

pub const CASES: u32 = 100;

pub fn family() -> impl Strategy<Value = KernelFamily> {
    prop::sample::select(KernelFamily::ALL.to_vec())
}

fn sigmoid(t: f64) -> (f64, f64) {
    if t < 0.0 {
        let e = t.exp();
        (e / (1.0 + e), 1.0 / (1.0 + e))
    } else {
        let e = (-t).exp();
        (1.0 / (1.0 + e), e / (1.0 + e))
    }
}

/// (kernel, params, a1, s1, a2, s2): two logistic fronts whose pointwise
/// max and min give an ordered monotone pair.
pub fn monotonicity_case() -> impl Strategy<Value = (KernelSpec, ModelParams, f64, f64, f64, f64)> {
    (family(), 0.05f64..2.0, 2.0f64..4.0, 0.0f64..5.0, 0.2f64..2.0, -5.0f64..5.0, 0.2f64..2.0, -5.0f64..5.0)
        .prop_map(|(f, tau, c, gamma, a1, s1, a2, s2)| {
            (KernelSpec::new(f, tau).unwrap(), ModelParams::new(c, gamma, 1.0).unwrap(), a1, s1, a2, s2)
        })
}

/// φ ≤ ψ monotone ⇒ 𝒜φ ≤ 𝒜ψ at every node.
pub fn check_monotonicity(case: (KernelSpec, ModelParams, f64, f64, f64, f64)) -> Result<(), TestCaseError> {
    let (k, p, a1, s1, a2, s2) = case;
    let g = Grid::with_zero_node(-30.0, 30.0, 601).unwrap();
    let one = |t: f64| sigmoid(a1 * (t - s1));
    let two = |t: f64| sigmoid(a2 * (t - s2));
    let lo = Profile::from_fn(g, |t| if one(t).0 <= two(t).0 { one(t) } else { two(t) }).unwrap();
    let hi = Profile::from_fn(g, |t| if one(t).0 >= two(t).0 { one(t) } else { two(t) }).unwrap();
    let al = apply_a(&k, &p, &lo).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let ah = apply_a(&k, &p, &hi).map_err(|e| TestCaseError::fail(e.to_string()))?;
    for i in 0..g.n {
        let diff = if al.values()[i] <= 0.5 && ah.values()[i] <= 0.5 {
            al.values()[i] - ah.values()[i]
        } else {
            ah.complement()[i] - al.complement()[i]
        };
        prop_assert!(diff <= 1e-14, "node {i}: excess {diff:e}");
    }
    Ok(())
}

pub fn kernel_case() -> impl Strategy<Value = (KernelSpec, ModelParams)> {
    (family(), 0.1f64..3.0, 2.0f64..5.0, 0.0f64..10.0, 0.5f64..5.0).prop_map(|(f, tau, c, gamma, d)| {
        let c = c * d.sqrt();
        (KernelSpec::new(f, tau).unwrap(), ModelParams::new(c, gamma, d).unwrap())
    })
}

/// N_c integrates to one, and its discretization has unit mass and the
/// analytic mean.
pub fn check_normalization(case: (KernelSpec, ModelParams)) -> Result<(), TestCaseError> {
    let (k, p) = case;
    let (mean, var) = moments(&k, &p);
    let sd = var.sqrt();
    let dom = mgf_domain(&k, &p);
    if k.family.is_nonlocal() {
        // composite Simpson on each half line separately, so that 0, where
        // the weak kernel has its kink, is a panel boundary and each side's
        // step follows its own decay rate
        let side = |sign: f64, rate: f64| {
            let reach = if rate.is_finite() { 40.0 / rate } else { 0.0 } + mean.abs() + 20.0 * sd;
            let h0 = if rate.is_finite() { (sd / 40.0).min(0.05 / rate) } else { sd / 40.0 };
            let m = 2 * (reach / (2.0 * h0)).ceil() as usize;
            let h = reach / m as f64;
            let f = |j: usize| density(&k, &p, sign * j as f64 * h);
            (0..m).step_by(2).map(|j| h / 3.0 * (f(j) + 4.0 * f(j + 1) + f(j + 2))).sum::<f64>()
        };
        let mass = side(-1.0, dom.hi) + side(1.0, -dom.lo);
        prop_assert!((mass - 1.0).abs() < 1e-6, "{k:?} {p:?}: mass {mass}");
    }
    let fastest = dom.hi.max(-dom.lo);
    let step = if fastest.is_finite() { (sd / 8.0).min(0.2 / fastest) } else { sd / 8.0 };
    let step = step.max(1e-3);
    let dk = discretize(&k, &p, step, 1e-10).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let total: f64 = dk.weights.iter().sum();
    prop_assert!((total - 1.0).abs() < 1e-12);
    prop_assert!(dk.weights.iter().all(|w| *w >= 0.0));
    prop_assert!((dk.mean() - mean).abs() < 1e-2 * (sd + mean.abs()), "mean {} vs {mean}", dk.mean());
    Ok(())
}

pub fn mgf_case() -> impl Strategy<Value = (KernelSpec, ModelParams, f64)> {
    (kernel_case(), -0.6f64..0.6).prop_map(|((k, p), frac)| (k, p, frac))
}

/// Σ w e^{-λv} of the discretized kernel matches the closed-form mgf at
/// λ up to 60% of the way to either end of the domain.
pub fn check_mgf(case: (KernelSpec, ModelParams, f64)) -> Result<(), TestCaseError> {
    let (k, p, frac) = case;
    let dom = mgf_domain(&k, &p);
    let edge = if frac < 0.0 { dom.lo.max(-5.0) } else { dom.hi.min(5.0) };
    let lambda = frac.abs() * edge;
    let sd = moments(&k, &p).1.sqrt();
    // resolve the width, the faster exponential tail and the tilt itself
    let fastest = dom.hi.max(-dom.lo);
    let mut step = (sd / 20.0).min(0.05 / lambda.abs());
    if fastest.is_finite() {
        step = step.min(0.05 / fastest);
    }
    let step = step.max(1e-3);
    let dk = discretize_tilted(&k, &p, step, 1e-10, &[lambda]).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let exact = mgf(&k, &p, lambda).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let got = dk.mgf(lambda);
    prop_assert!((got - exact).abs() < 2e-3 * exact, "{k:?} {p:?} lambda {lambda}: {got} vs {exact}");
    Ok(())
}

pub fn align_case() -> impl Strategy<Value = (f64, f64, f64, f64, f64, usize)> {
    (2.0f64..4.0, -2.0f64..-0.05, 0.3f64..1.0, 1.0f64..3.0, -3.0f64..3.0, 0usize..40)
}

/// Shifting the upper profile left by k nodes lowers the alignment shift
/// by k nodes, down to zero.
pub fn check_align(case: (f64, f64, f64, f64, f64, usize)) -> Result<(), TestCaseError> {
    let (c, zp, left_frac, right_mult, s, k) = case;
    let params = ModelParams::new(c, 1.0, 1.0).unwrap();
    let z1 = left_rate(&params, Equation::Full);
    let lower = LowerSolution::new(z1, zp).unwrap();
    // the upper profile must decay no faster than φ₋ on the left and
    // approach 1 no slower than φ₋ on the right
    let (a, b) = (left_frac * z1, right_mult * zp.abs());
    let g = Grid::with_zero_node(-60.0, 60.0, 1201).unwrap();
    let upper = Profile::from_fn(g, |t| if t < s { sigmoid(a * (t - s)) } else { sigmoid(b * (t - s)) })
        .unwrap()
        .with_tails(TailExtension { left: a, right: -b });
    let base = shift_align(&upper, &lower).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let moved = shift_align(&upper.shifted_nodes(k), &lower).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(moved.nodes, base.nodes.saturating_sub(k));
    Ok(())
}

pub fn equilibrium_case() -> impl Strategy<Value = (f64, f64, f64, f64, usize, bool)> {
    (0.0f64..50.0, 0.05f64..20.0, 0.1f64..5.0, 50.0f64..500.0, 200usize..400, any::<bool>())
}

/// Constant states 0 and 1 stay put to round-off.
pub fn check_equilibrium(case: (f64, f64, f64, f64, usize, bool)) -> Result<(), TestCaseError> {
    let (gamma, tau, d, length, nx, high) = case;
    let level = if high { 1.0 } else { 0.0 };
    let cfg = SimConfig {
        gamma,
        tau,
        d,
        length,
        nx,
        dt: None,
        t_end: 0.5,
        initial: InitialData::Uniform { u: level, v: level },
        snapshot_every: 0.25,
    };
    let r = run(&cfg).map_err(|e| TestCaseError::fail(e.to_string()))?;
    for s in &r.snapshots {
        prop_assert!(s.u.iter().chain(&s.v).all(|w| (w - level).abs() < 1e-12));
    }
    Ok(())
}
