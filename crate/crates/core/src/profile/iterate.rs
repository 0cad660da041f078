//! Monotone iteration φ_{n+1} = 𝒜φ_n between an upper and a lower solution.

use serde::{Deserialize, Serialize};

use super::green::green_kernel;
use super::grid::{Grid, Profile, TailExtension};
use super::newton::{left_rate, newton_bvp, newton_solve};
use super::operators::{excess, Equation, FrontProblem};
use crate::error::{Error, Result};
use crate::kernel::{KernelSpec, ModelParams};
use crate::spectral::{check_speed, classify, minimal_speed, ExistenceVerdict, SPEED_RTOL};

/// Pointwise tolerance of the upper and lower certificates and of the
/// sandwich checks during the iteration.
pub const CERT_TOL: f64 = 1e-8;
/// Default stopping tolerance on sup|φ_{n+1} - φ_n|.
pub const ITER_TOL: f64 = 1e-8;
/// Default node count of solver grids.
pub const DEFAULT_NODES: usize = 4096;

/// Two-piece lower solution: a·e^{z₁t} for t ≤ ζ and 1 - e^{z′t} for t ≥ ζ,
/// pasted with matching value and slope.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerSolution {
    pub z_prime: f64,
    pub zeta: f64,
    pub a_coef: f64,
    pub z1: f64,
}

impl LowerSolution {
    pub fn new(z1: f64, z_prime: f64) -> Result<Self> {
        if !(z_prime < 0.0) {
            return Err(Error::invalid(format!("z' must be negative, got {z_prime}")));
        }
        if !(z1 > 0.0) {
            return Err(Error::invalid(format!("z1 must be positive, got {z1}")));
        }
        let zeta = (z1 / (z1 - z_prime)).ln() / z_prime;
        let a_coef = (1.0 - (z_prime * zeta).exp()) * (-z1 * zeta).exp();
        Ok(LowerSolution { z_prime, zeta, a_coef, z1 })
    }

    /// (φ₋(t), 1 - φ₋(t)).
    pub fn eval(&self, t: f64) -> (f64, f64) {
        if t >= self.zeta {
            let y = (self.z_prime * t).exp();
            (1.0 - y, y)
        } else {
            let v = self.a_coef * (self.z1 * t).exp();
            (v, 1.0 - v)
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        if t >= self.zeta {
            -self.z_prime * (self.z_prime * t).exp()
        } else {
            self.a_coef * self.z1 * (self.z1 * t).exp()
        }
    }

    pub fn sample(&self, grid: Grid) -> Profile {
        Profile::from_fn(grid, |t| self.eval(t))
            .expect("lower solution is finite")
            .with_tails(TailExtension { left: self.z1, right: self.z_prime })
    }
}

/// Lower solution for speed `c` (unit diffusivity) and a negative
/// characteristic root `z_prime`.
pub fn lower_solution(c: f64, z_prime: f64) -> Result<LowerSolution> {
    LowerSolution::new(green_kernel(c)?.z1, z_prime)
}

/// Largest deficit max(φ₋ - 𝒜φ₋) over the grid; nonpositive up to rounding
/// when φ₋ is a lower solution.
pub fn lower_certificate(prob: &FrontProblem, lower: &LowerSolution, grid: Grid) -> Result<(f64, f64)> {
    let lp = lower.sample(grid);
    let a = prob.apply_a(Equation::Full, &lp)?;
    Ok(worst(&lp, &a))
}

/// Max over nodes of the excess of `a` over `b`, with the node's t.
fn worst(a: &Profile, b: &Profile) -> (f64, f64) {
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 0..a.len() {
        let e = excess(a, b, i);
        if e > best.0 {
            best = (e, a.grid.t(i));
        }
    }
    best
}

/// Default truncated grid for a front: long enough that both tails fall
/// below e^{-60}, clipped to 200√d on each side, with t = 0 on a node.
pub fn default_grid(params: &ModelParams, z_prime: f64, n: usize) -> Result<Grid> {
    let slow_left = left_rate(params, Equation::Modified).min(left_rate(params, Equation::Full));
    let clip = 200.0 * params.d.sqrt();
    let t_min = (-60.0 / slow_left).max(-clip);
    let t_max = (60.0 / z_prime.abs()).min(clip);
    Grid::with_zero_node(t_min, t_max, n)
}

fn logistic_guess(grid: Grid, rate: f64) -> Profile {
    Profile::from_fn(grid, |t| {
        if t < 0.0 {
            let e = (rate * t).exp();
            (e / (1.0 + e), 1.0 / (1.0 + e))
        } else {
            let e = (-rate * t).exp();
            (1.0 / (1.0 + e), e / (1.0 + e))
        }
    })
    .expect("finite guess")
}

/// Front of the modified equation on `grid`, certified as an upper solution
/// of the full equation: 𝒜φ₊ ≤ φ₊ + CERT_TOL at every node.
pub fn upper_solution_on(kernel: &KernelSpec, params: &ModelParams, grid: Grid, z_prime: f64) -> Result<Profile> {
    let prob = FrontProblem::new(*kernel, *params, &grid)?;
    let zl = left_rate(params, Equation::Modified);
    let tails = TailExtension { left: zl, right: z_prime };
    let rate = 2.0 * zl * z_prime.abs() / (zl + z_prime.abs());
    let guess = logistic_guess(grid, rate).with_tails(tails);
    let out = newton_solve(&prob, Equation::Modified, &guess, tails)?;
    let upper = out.profile.normalized();
    let a = prob.apply_a(Equation::Full, &upper)?;
    let (e, t) = worst(&a, &upper);
    if e > CERT_TOL {
        return Err(Error::Certification { excess: e, t });
    }
    let mut upper = upper;
    upper.fit_tails();
    Ok(upper)
}

fn require_sufficient(kernel: &KernelSpec, params: &ModelParams) -> Result<(ExistenceVerdict, f64)> {
    let v = classify(kernel, params)?;
    match v.witness_root {
        Some(z) if v.sufficient_holds => Ok((v, z)),
        _ => Err(Error::invalid(format!(
            "no root of the characteristic equation with gamma*w <= 1 for {kernel:?}, {params:?}"
        ))),
    }
}

/// Upper solution on the default grid.
pub fn upper_solution(kernel: &KernelSpec, params: &ModelParams) -> Result<Profile> {
    let (_, z) = require_sufficient(kernel, params)?;
    upper_solution_on(kernel, params, default_grid(params, z, DEFAULT_NODES)?, z)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Alignment {
    /// Shift in grid nodes.
    pub nodes: usize,
    /// Shift in t, nodes × step.
    pub sigma: f64,
}

/// Smallest node shift σ ≥ 0 such that φ₊(t + σ) ≥ φ₋(t) at every node.
pub fn shift_align(upper: &Profile, lower: &LowerSolution) -> Result<Alignment> {
    if upper.tails.left > lower.z1 + 1e-12 {
        // φ₊ would fall below φ₋ as t → -∞
        return Err(Error::Alignment { cap: 0 });
    }
    let lp = lower.sample(upper.grid);
    let cap = upper.len() / 2;
    for k in 0..=cap {
        let s = upper.shifted_nodes(k);
        if (0..s.len()).all(|i| excess(&lp, &s, i) <= 0.0) {
            return Ok(Alignment { nodes: k, sigma: k as f64 * upper.grid.step() });
        }
    }
    Err(Error::Alignment { cap })
}

#[derive(Clone, Debug)]
pub struct IterationReport {
    pub profile: Profile,
    pub iterations: usize,
    pub last_gap: f64,
    pub converged: bool,
    /// Sup-norm gap after each iteration.
    pub gaps: Vec<f64>,
    /// Number of node comparisons made for the sandwich property.
    pub sandwich_checks: usize,
    /// Largest excess seen in any sandwich comparison (≤ CERT_TOL when the
    /// iteration succeeds; positive values are rounding-level).
    pub max_sandwich_excess: f64,
}

/// Iterates 𝒜 from the aligned upper solution, asserting
/// φ₋ ≤ φ_{n+1} ≤ φ_n ≤ φ₊ at every node and step.
pub fn monotone_iterate(
    prob: &FrontProblem,
    upper: &Profile,
    lower: &LowerSolution,
    tol: f64,
    max_iter: usize,
) -> Result<IterationReport> {
    let lp = lower.sample(upper.grid);
    let mut cur = upper.clone();
    let mut gaps = Vec::new();
    let mut checks = 0usize;
    let mut max_excess = f64::NEG_INFINITY;
    let mut converged = false;
    for it in 1..=max_iter {
        let next = prob.apply_a(Equation::Full, &cur)?;
        let mut gap: f64 = 0.0;
        for i in 0..next.len() {
            let below_lower = excess(&lp, &next, i);
            let above_prev = excess(&next, &cur, i);
            let above_upper = excess(&next, upper, i);
            checks += 3;
            let e = below_lower.max(above_prev).max(above_upper);
            max_excess = max_excess.max(e);
            if e > CERT_TOL {
                let what = if below_lower == e {
                    "below the lower solution"
                } else if above_prev == e {
                    "above the previous iterate"
                } else {
                    "above the upper solution"
                };
                return Err(Error::IterationIntegrity {
                    iteration: it,
                    detail: format!("iterate {what} by {e:e} at t = {}", next.grid.t(i)),
                });
            }
            gap = gap.max(excess(&cur, &next, i).abs());
        }
        gaps.push(gap);
        cur = next;
        if gap < tol {
            converged = true;
            break;
        }
    }
    let iterations = gaps.len();
    let last_gap = gaps.last().copied().unwrap_or(f64::NAN);
    let mut profile = cur.normalized();
    profile.meta = Some(prob.meta());
    profile.fit_tails();
    Ok(IterationReport {
        profile,
        iterations,
        last_gap,
        converged,
        gaps,
        sandwich_checks: checks,
        max_sandwich_excess: max_excess,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrontOptions {
    pub grid: Option<Grid>,
    pub nodes: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FrontOptions {
    fn default() -> Self {
        FrontOptions { grid: None, nodes: DEFAULT_NODES, tol: ITER_TOL, max_iter: 20_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrontMethod {
    MonotoneIteration,
    /// Newton continuation from a slightly faster front.
    Continuation,
}

#[derive(Clone, Debug)]
pub struct FrontSolution {
    pub profile: Profile,
    pub method: FrontMethod,
    pub verdict: ExistenceVerdict,
    pub upper: Option<Profile>,
    pub lower: Option<LowerSolution>,
    pub alignment: Option<Alignment>,
    pub iteration: Option<IterationReport>,
}

fn iterate_pipeline(
    kernel: &KernelSpec,
    params: &ModelParams,
    verdict: ExistenceVerdict,
    z_prime: f64,
    opts: &FrontOptions,
) -> Result<FrontSolution> {
    let grid = match opts.grid {
        Some(g) => g,
        None => default_grid(params, z_prime, opts.nodes)?,
    };
    let upper = upper_solution_on(kernel, params, grid, z_prime)?;
    let prob = FrontProblem::new(*kernel, *params, &upper.grid)?;
    let lower = LowerSolution::new(left_rate(params, Equation::Full), z_prime)?;
    let (deficit, t) = lower_certificate(&prob, &lower, upper.grid)?;
    if deficit > CERT_TOL {
        return Err(Error::LowerCertificate { deficit, t });
    }
    let alignment = shift_align(&upper, &lower)?;
    let start = upper.shifted_nodes(alignment.nodes);
    let report = monotone_iterate(&prob, &start, &lower, opts.tol, opts.max_iter)?;
    if !report.converged {
        return Err(Error::Divergence(format!(
            "monotone iteration stopped after {} steps with gap {:e}",
            report.iterations, report.last_gap
        )));
    }
    Ok(FrontSolution {
        profile: report.profile.clone(),
        method: FrontMethod::MonotoneIteration,
        verdict,
        upper: Some(upper),
        lower: Some(lower),
        alignment: Some(alignment),
        iteration: Some(report),
    })
}

/// Computes the monotone front for (kernel, params): upper solution,
/// lower solution, alignment and monotone iteration. At the minimal speed or
/// at a double characteristic root, failures of that pipeline fall back to
/// Newton continuation from c + 0.05√d down to c.
pub fn solve_front(kernel: &KernelSpec, params: &ModelParams, opts: &FrontOptions) -> Result<FrontSolution> {
    check_speed(params)?;
    let (verdict, z_prime) = require_sufficient(kernel, params)?;
    let cmin = minimal_speed(params);
    let critical = params.c <= cmin * (1.0 + SPEED_RTOL);
    let delicate = critical || verdict.report.double_root_flag;
    match iterate_pipeline(kernel, params, verdict.clone(), z_prime, opts) {
        Ok(sol) => Ok(sol),
        Err(e) if delicate && e.is_numerical() => continuation(kernel, params, verdict, opts),
        Err(e) => Err(e),
    }
}

fn continuation(
    kernel: &KernelSpec,
    params: &ModelParams,
    verdict: ExistenceVerdict,
    opts: &FrontOptions,
) -> Result<FrontSolution> {
    let sd = params.d.sqrt();
    let c_start = params.c + 0.05 * sd;
    let start_params = params.with_speed(c_start);
    let (v0, z0) = require_sufficient(kernel, &start_params)?;
    let mut opts0 = *opts;
    if opts0.grid.is_none() {
        opts0.grid = Some(default_grid(params, verdict.witness_root.unwrap_or(z0), opts.nodes)?);
    }
    let mut prof = iterate_pipeline(kernel, &start_params, v0, z0, &opts0)?.profile;
    let steps = 10;
    for k in 1..=steps {
        let c = c_start + (params.c - c_start) * k as f64 / steps as f64;
        let p = if k == steps { *params } else { params.with_speed(c) };
        prof = newton_bvp(kernel, &p, &prof)?;
    }
    Ok(FrontSolution {
        profile: prof,
        method: FrontMethod::Continuation,
        verdict,
        upper: None,
        lower: None,
        alignment: None,
        iteration: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_solution_example() {
        let l = lower_solution(2.5, -0.5).unwrap();
        assert!(((l.z_prime * l.zeta).exp() - 0.5).abs() < 1e-15);
        assert!((l.zeta - 2.0 * 2f64.ln()).abs() < 1e-14);
        assert!((l.a_coef - 0.25).abs() < 1e-15);
    }

    #[test]
    fn lower_solution_is_c1_and_below_one() {
        for &(c, z) in &[(2.5, -0.5), (3.0, -0.1), (2.01, -1.7), (2.0, -0.3)] {
            let l = lower_solution(c, z).unwrap();
            let (a, b) = (l.eval(l.zeta - 1e-13).0, l.eval(l.zeta).0);
            assert!((a - b).abs() < 1e-12);
            let left = l.a_coef * l.z1 * (l.z1 * l.zeta).exp();
            let right = -l.z_prime * (l.z_prime * l.zeta).exp();
            assert!((left - right).abs() < 1e-12);
            assert!(l.zeta > 0.0 && l.a_coef > 0.0);
            for k in 0..200 {
                let t = -20.0 + 0.5 * k as f64;
                assert!(l.eval(t).1 > 0.0);
                if t < l.zeta {
                    assert!(1.0 - (l.z_prime * t).exp() < l.a_coef * (l.z1 * t).exp());
                }
            }
        }
        assert!(lower_solution(2.5, 0.1).is_err());
    }
}
