//! The operators 𝓕 and 𝒜 and the finite-difference residual of the profile
//! equation, all evaluated on a fixed grid.

use super::green::LatticeGreen;
use super::grid::{FrontMeta, Grid, Profile};
use crate::error::{Error, Result};
use crate::kernel::{discretize, KernelSpec, ModelParams, NodeStencil};

/// Kernel truncation tolerance used by the solvers.
pub const KERNEL_MASS_TOL: f64 = 1e-8;

/// Which profile equation is meant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Equation {
    /// dφ'' - cφ' + φ(1 - N∗φ)/(1 + γN∗φ) = 0.
    Full,
    /// dφ'' - cφ' + φ(1 - N∗φ)/(1 + γ) = 0, whose front is an upper solution.
    Modified,
}

/// Everything needed to evaluate the operators for one (kernel, params, grid).
#[derive(Clone, Debug)]
pub struct FrontProblem {
    pub kernel: KernelSpec,
    pub params: ModelParams,
    pub step: f64,
    pub n: usize,
    pub stencil: NodeStencil,
    pub lattice: LatticeGreen,
}

/// Values of the convolution and of 𝓕 at every node, each with its complement.
pub struct Reaction {
    /// N∗φ.
    pub m: Vec<f64>,
    /// N∗(1 - φ) = 1 - N∗φ.
    pub y: Vec<f64>,
    /// 𝓕φ.
    pub f: Vec<f64>,
    /// 1 - 𝓕φ.
    pub fy: Vec<f64>,
    /// φ - 𝓕φ.
    pub source: Vec<f64>,
}

impl FrontProblem {
    pub fn new(kernel: KernelSpec, params: ModelParams, grid: &Grid) -> Result<Self> {
        let step = grid.step();
        let dk = discretize(&kernel, &params, step, KERNEL_MASS_TOL)?;
        let lattice = LatticeGreen::new(params.c, params.d, step)?;
        Ok(FrontProblem { kernel, params, step, n: grid.n, stencil: dk.node_stencil(), lattice })
    }

    pub fn meta(&self) -> FrontMeta {
        FrontMeta { kernel: self.kernel, params: self.params }
    }

    fn check(&self, p: &Profile) -> Result<()> {
        if p.len() != self.n || (p.grid.step() - self.step).abs() > 1e-9 * self.step {
            return Err(Error::invalid("profile grid does not match the problem grid"));
        }
        Ok(())
    }

    /// N∗φ and N∗(1 - φ) at every node.
    pub fn convolutions(&self, p: &Profile) -> (Vec<f64>, Vec<f64>) {
        let n = self.n as isize;
        let mut m = vec![0.0; self.n];
        let mut y = vec![0.0; self.n];
        let phi = p.values();
        let comp = p.complement();
        for i in 0..n {
            let (mut sm, mut sy) = (0.0, 0.0);
            for (&o, &w) in self.stencil.offsets.iter().zip(&self.stencil.weights) {
                let j = i - o;
                if j >= 0 && j < n {
                    sm += w * phi[j as usize];
                    sy += w * comp[j as usize];
                } else {
                    sm += w * p.phi_at(j);
                    sy += w * p.y_at(j);
                }
            }
            m[i as usize] = sm;
            y[i as usize] = sy;
        }
        (m, y)
    }

    pub fn reaction(&self, eq: Equation, p: &Profile) -> Reaction {
        let (m, y) = self.convolutions(p);
        let g = self.params.gamma;
        let n = self.n;
        let mut f = vec![0.0; n];
        let mut fy = vec![0.0; n];
        let mut source = vec![0.0; n];
        for i in 0..n {
            let (phi, comp) = (p.values()[i], p.complement()[i]);
            match eq {
                Equation::Full => {
                    let den = 1.0 + g * m[i];
                    f[i] = phi * (1.0 + g) * m[i] / den;
                    fy[i] = (y[i] + (1.0 + g) * m[i] * comp) / den;
                    source[i] = phi * y[i] / den;
                }
                Equation::Modified => {
                    source[i] = phi * y[i] / (1.0 + g);
                    f[i] = phi - source[i];
                    fy[i] = comp + source[i];
                }
            }
        }
        Reaction { m, y, f, fy, source }
    }

    /// 𝒜φ: the discrete Green kernel applied to 𝓕φ, on both sides.
    pub fn apply_a(&self, eq: Equation, p: &Profile) -> Result<Profile> {
        self.check(p)?;
        let r = self.reaction(eq, p);
        let q = (p.tails.right * self.step).exp();
        let last = r.fy[self.n - 1];
        let tail_y = |rr: f64| last * rr * q / (1.0 - rr * q);
        let phi = self.lattice.apply(&r.f, |rr| rr / (1.0 - rr) - tail_y(rr));
        let comp = self.lattice.apply(&r.fy, tail_y);
        let mut out = Profile::from_parts(p.grid, phi, comp)?;
        out.tails = p.tails;
        out.meta = p.meta;
        Ok(out)
    }

    /// Residual of the finite-difference profile equation at every node;
    /// the end nodes use the tail continuation for their outer neighbour.
    pub fn residual(&self, eq: Equation, p: &Profile) -> Result<Vec<f64>> {
        self.check(p)?;
        let r = self.reaction(eq, p);
        let (d, c, h) = (self.params.d, self.params.c, self.step);
        let n = self.n as isize;
        let out = (0..n)
            .map(|i| {
                let k = i as usize;
                let fd = if p.values()[k] <= 0.5 {
                    let (a, b, e) = (p.phi_at(i - 1), p.phi_at(i), p.phi_at(i + 1));
                    d * (e - 2.0 * b + a) / (h * h) - c * (e - a) / (2.0 * h)
                } else {
                    let (a, b, e) = (p.y_at(i - 1), p.y_at(i), p.y_at(i + 1));
                    -(d * (e - 2.0 * b + a) / (h * h) - c * (e - a) / (2.0 * h))
                };
                fd + r.source[k]
            })
            .collect();
        Ok(out)
    }
}

/// Amount by which `a` exceeds `b` at node `i`, read from whichever
/// representation is precise there.
pub(crate) fn excess(a: &Profile, b: &Profile, i: usize) -> f64 {
    let (pa, pb) = (a.values()[i], b.values()[i]);
    if pa <= 0.5 && pb <= 0.5 {
        pa - pb
    } else {
        b.complement()[i] - a.complement()[i]
    }
}

/// 𝓕φ on the profile's grid.
pub fn apply_f(kernel: &KernelSpec, params: &ModelParams, profile: &Profile) -> Result<Vec<f64>> {
    let prob = FrontProblem::new(*kernel, *params, &profile.grid)?;
    Ok(prob.reaction(Equation::Full, profile).f)
}

/// 𝒜φ on the profile's grid.
pub fn apply_a(kernel: &KernelSpec, params: &ModelParams, profile: &Profile) -> Result<Profile> {
    let prob = FrontProblem::new(*kernel, *params, &profile.grid)?;
    prob.apply_a(Equation::Full, profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelFamily;
    use crate::profile::grid::TailExtension;

    fn setup() -> (KernelSpec, ModelParams, Grid) {
        let k = KernelSpec::new(KernelFamily::NonlocalWeakGeneric, 0.3).unwrap();
        let p = ModelParams::new(2.5, 1.0, 1.0).unwrap();
        let g = Grid::with_zero_node(-40.0, 40.0, 801).unwrap();
        (k, p, g)
    }

    #[test]
    fn constants_are_fixed_points() {
        let (k, p, g) = setup();
        for v in [0.0, 1.0] {
            let prof = Profile::new(g, vec![v; g.n]).unwrap();
            let f = apply_f(&k, &p, &prof).unwrap();
            assert!(f.iter().all(|x| (x - v).abs() < 1e-14));
            let a = apply_a(&k, &p, &prof).unwrap();
            assert!(a.values().iter().all(|x| (x - v).abs() < 1e-12), "v = {v}");
        }
    }

    #[test]
    fn fixed_point_satisfies_difference_equation() {
        // 𝒜 inverts the discrete operator exactly: residual of 𝒜φ against 𝓕φ
        let (k, p, g) = setup();
        let prob = FrontProblem::new(k, p, &g).unwrap();
        let prof = Profile::from_fn(g, |t| {
            let s = 1.0 / (1.0 + (-t).exp());
            (s, 1.0 - s)
        })
        .unwrap()
        .with_tails(TailExtension { left: 1.0, right: -1.0 });
        let a = prob.apply_a(Equation::Full, &prof).unwrap();
        let f = prob.reaction(Equation::Full, &prof).f;
        let lg = prob.lattice;
        for i in 1..g.n - 1 {
            let lhs = lg.kappa * a.values()[i + 1] + lg.beta * a.values()[i] + lg.alpha * a.values()[i - 1];
            assert!((lhs - f[i]).abs() < 1e-10, "node {i}");
        }
    }

    #[test]
    fn monotone_input_gives_monotone_output() {
        let (k, p, g) = setup();
        let prof = Profile::from_fn(g, |t| {
            let s = 1.0 / (1.0 + (-0.7 * t).exp());
            (s, 1.0 - s)
        })
        .unwrap();
        let a = apply_a(&k, &p, &prof).unwrap();
        for w in a.values().windows(2) {
            assert!(w[1] >= w[0] - 1e-15);
        }
        assert!(a.values().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }
}
