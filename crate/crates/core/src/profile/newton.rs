//! Direct solution of the finite-difference profile equation by damped Newton.
//!
//! Unknowns are φ_i left of the pinned node and 1 - φ_i right of it, so both
//! tails are resolved to full relative precision. The equations are the
//! difference equation at nodes 1..n-2, the pin φ_p = value, and the decay
//! condition y_{n-1} = e^{ẑh} y_{n-2} on the right. No condition is needed on
//! the left because both left modes of the linearization decay.

use super::banded::BandMatrix;
use super::grid::{Profile, TailExtension};
use super::operators::{Equation, FrontProblem};
use crate::error::{Error, Result};
use crate::kernel::{KernelSpec, ModelParams};
use crate::spectral::{check_speed, find_negative_roots};

const MAX_ITER: usize = 60;
const MAX_HALVINGS: usize = 30;
const RESIDUAL_TOL: f64 = 1e-11;

#[derive(Clone, Debug)]
pub struct NewtonOutcome {
    pub profile: Profile,
    pub iterations: usize,
    pub residual: f64,
}

struct System<'a> {
    prob: &'a FrontProblem,
    eq: Equation,
    pin: usize,
    pin_value: f64,
    tails: TailExtension,
    grid: super::grid::Grid,
}

impl System<'_> {
    fn profile(&self, x: &[f64]) -> Profile {
        let n = x.len();
        let mut phi = vec![0.0; n];
        let mut y = vec![0.0; n];
        for i in 0..n {
            if i <= self.pin {
                phi[i] = x[i];
                y[i] = 1.0 - x[i];
            } else {
                y[i] = x[i];
                phi[i] = 1.0 - x[i];
            }
        }
        // the pinned split is authoritative; bypass reconciliation
        let mut p = Profile::from_parts(self.grid, phi.clone(), y.clone())
            .expect("lengths match")
            .with_tails(self.tails);
        p.overwrite(phi, y);
        p
    }

    fn sign(&self, j: usize) -> f64 {
        if j <= self.pin {
            1.0
        } else {
            -1.0
        }
    }

    /// Residual vector and, optionally, the Jacobian in band form.
    fn assemble(&self, x: &[f64], jac: Option<&mut BandMatrix>) -> Vec<f64> {
        let n = x.len();
        let p = self.profile(x);
        let r = self.prob.reaction(self.eq, &p);
        let (d, c, h) = (self.prob.params.d, self.prob.params.c, self.prob.step);
        let g = self.prob.params.gamma;
        let lo_c = d / (h * h) + c / (2.0 * h);
        let mid_c = -2.0 * d / (h * h);
        let hi_c = d / (h * h) - c / (2.0 * h);
        let q = (self.tails.right * h).exp();
        let mut f = vec![0.0; n];
        let mut jac = jac;

        // row index for the equation at node i
        let row_of = |i: usize| if i <= self.pin { i - 1 } else { i };
        for i in 1..n - 1 {
            let row = row_of(i);
            let fd = if i <= self.pin {
                let (a, b, e) = (p.values()[i - 1], p.values()[i], p.values()[i + 1]);
                d * (e - 2.0 * b + a) / (h * h) - c * (e - a) / (2.0 * h)
            } else {
                let (a, b, e) = (p.complement()[i - 1], p.complement()[i], p.complement()[i + 1]);
                -(d * (e - 2.0 * b + a) / (h * h) - c * (e - a) / (2.0 * h))
            };
            f[row] = fd + r.source[i];
            if let Some(jm) = jac.as_deref_mut() {
                let phi_i = p.values()[i];
                let (reac, dr_dm) = match self.eq {
                    Equation::Full => {
                        let den = 1.0 + g * r.m[i];
                        (r.y[i] / den, -(1.0 + g) / (den * den))
                    }
                    Equation::Modified => (r.y[i] / (1.0 + g), -1.0 / (1.0 + g)),
                };
                jm.add(row, i - 1, lo_c * self.sign(i - 1));
                jm.add(row, i, (mid_c + reac) * self.sign(i));
                jm.add(row, i + 1, hi_c * self.sign(i + 1));
                for (&o, &w) in self.prob.stencil.offsets.iter().zip(&self.prob.stencil.weights) {
                    let j = i as isize - o;
                    let coef = phi_i * w * dr_dm;
                    if j < 0 {
                        let factor = (self.tails.left * j as f64 * h).exp();
                        jm.add(row, 0, coef * factor * self.sign(0));
                    } else if j >= n as isize {
                        let factor = q.powi((j - n as isize + 1) as i32);
                        jm.add(row, n - 1, coef * factor * self.sign(n - 1));
                    } else {
                        let j = j as usize;
                        jm.add(row, j, coef * self.sign(j));
                    }
                }
            }
        }
        f[self.pin] = x[self.pin] - self.pin_value;
        f[n - 1] = x[n - 1] - q * x[n - 2];
        if let Some(jm) = jac {
            jm.add(self.pin, self.pin, 1.0);
            jm.add(n - 1, n - 1, 1.0);
            jm.add(n - 1, n - 2, -q);
        }
        f
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Left decay rate of a front: the smallest positive root of dz² - cz + s = 0,
/// with s = 1 for the full equation and 1/(1+γ) for the modified one.
pub fn left_rate(params: &ModelParams, eq: Equation) -> f64 {
    let s = match eq {
        Equation::Full => 1.0,
        Equation::Modified => 1.0 / (1.0 + params.gamma),
    };
    let disc = (params.c * params.c - 4.0 * params.d * s).max(0.0).sqrt();
    2.0 * s / (params.c + disc)
}

/// Damped Newton for the profile equation on the guess's grid, with the
/// given tail continuation rates. The node where the guess is closest to 1/2
/// is pinned to the guess's value there.
pub fn newton_solve(
    prob: &FrontProblem,
    eq: Equation,
    guess: &Profile,
    tails: TailExtension,
) -> Result<NewtonOutcome> {
    let n = prob.n;
    if guess.len() != n {
        return Err(Error::invalid("guess does not match the problem grid"));
    }
    if guess.values().iter().any(|v| !(-1e-12..=1.0 + 1e-12).contains(v)) {
        return Err(Error::invalid("guess must take values in [0, 1]"));
    }
    let pin = (1..n - 2)
        .min_by(|&a, &b| {
            let da = (guess.values()[a] - 0.5).abs();
            let db = (guess.values()[b] - 0.5).abs();
            da.partial_cmp(&db).unwrap()
        })
        .unwrap();
    let pin_value = guess.values()[pin];
    if !(0.05..=0.95).contains(&pin_value) {
        return Err(Error::invalid("guess never comes close to 1/2"));
    }
    let sys = System { prob, eq, pin, pin_value, tails, grid: guess.grid };
    let mut x: Vec<f64> = (0..n)
        .map(|i| if i <= pin { guess.values()[i] } else { guess.complement()[i] })
        .collect();

    let (kl, ku) = {
        let omax = prob.stencil.max_offset().max(1) as usize;
        let omin = (-prob.stencil.min_offset()).max(1) as usize;
        (omax + 2, omin + 2)
    };
    let mut f = sys.assemble(&x, None);
    let mut norm = sup(&f);
    let mut iterations = 0;
    while norm > RESIDUAL_TOL {
        if iterations == MAX_ITER {
            return Err(Error::Divergence(format!(
                "no convergence after {MAX_ITER} iterations (residual {norm:e})"
            )));
        }
        iterations += 1;
        let mut jm = BandMatrix::zeros(n, kl, ku);
        sys.assemble(&x, Some(&mut jm));
        let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        let dx = jm.solve(rhs).ok_or_else(|| Error::Divergence("singular Jacobian".into()))?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + lambda * b).collect();
            let ft = sys.assemble(&trial, None);
            let nt = sup(&ft);
            if nt < norm {
                x = trial;
                f = ft;
                norm = nt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            // rounding floor reached: accept if already tiny
            if norm < 1e-8 {
                break;
            }
            return Err(Error::Divergence(format!(
                "no decrease after {MAX_HALVINGS} step halvings (residual {norm:e})"
            )));
        }
        if sup(&dx) * lambda < 1e-15 {
            break;
        }
    }
    let mut profile = sys.profile(&x);
    profile.meta = Some(prob.meta());
    Ok(NewtonOutcome { profile, iterations, residual: norm })
}

/// Newton's method for the front of the full profile equation, started from
/// `guess` and using the guess's grid. Tail continuation uses z₁ on the left
/// and the maximal negative characteristic root on the right.
pub fn newton_bvp(kernel: &KernelSpec, params: &ModelParams, guess: &Profile) -> Result<Profile> {
    check_speed(params)?;
    let prob = FrontProblem::new(*kernel, *params, &guess.grid)?;
    let right = find_negative_roots(kernel, params).maximal_root().unwrap_or(guess.tails.right);
    let tails = TailExtension { left: left_rate(params, Equation::Full), right };
    let out = newton_solve(&prob, Equation::Full, guess, tails)?;
    let mut p = out.profile.normalized();
    p.fit_tails();
    Ok(p)
}
