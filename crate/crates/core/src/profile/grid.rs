use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{KernelSpec, ModelParams};

/// Uniform grid on a truncated interval containing 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub t_min: f64,
    pub t_max: f64,
    pub n: usize,
}

impl Grid {
    pub const MIN_NODES: usize = 512;

    pub fn new(t_min: f64, t_max: f64, n: usize) -> Result<Self> {
        if !(t_min < 0.0 && t_max > 0.0 && t_min.is_finite() && t_max.is_finite()) {
            return Err(Error::invalid(format!("grid must satisfy t_min < 0 < t_max, got [{t_min}, {t_max}]")));
        }
        if n < Self::MIN_NODES {
            return Err(Error::invalid(format!("grid needs at least {} nodes, got {n}", Self::MIN_NODES)));
        }
        Ok(Grid { t_min, t_max, n })
    }

    /// Grid on roughly [t_min, t_max] with `n` nodes, adjusted so that t = 0 is a node.
    pub fn with_zero_node(t_min: f64, t_max: f64, n: usize) -> Result<Self> {
        Grid::new(t_min, t_max, n)?;
        let h = (t_max - t_min) / (n - 1) as f64;
        let i0 = (-t_min / h).round().clamp(1.0, (n - 2) as f64);
        let t_min = -i0 * h;
        Ok(Grid { t_min, t_max: t_min + (n - 1) as f64 * h, n })
    }

    pub fn step(&self) -> f64 {
        (self.t_max - self.t_min) / (self.n - 1) as f64
    }

    pub fn t(&self, i: usize) -> f64 {
        self.t_min + i as f64 * self.step()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.t(i)).collect()
    }

    /// Index of the node closest to `t`, clamped to the grid.
    pub fn nearest(&self, t: f64) -> usize {
        ((t - self.t_min) / self.step()).round().clamp(0.0, (self.n - 1) as f64) as usize
    }

    pub fn translated(&self, dt: f64) -> Grid {
        Grid { t_min: self.t_min + dt, t_max: self.t_max + dt, n: self.n }
    }
}

/// Exponential continuation beyond the grid ends:
/// φ(t) = φ(t_min)·e^{left (t - t_min)} on the left and
/// 1 - φ(t) = (1 - φ(t_max))·e^{right (t - t_max)} on the right.
/// Rates of 0 continue the end values as constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailExtension {
    pub left: f64,
    pub right: f64,
}

impl Default for TailExtension {
    fn default() -> Self {
        TailExtension { left: 0.0, right: 0.0 }
    }
}

/// The kernel and parameters a profile was computed for.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontMeta {
    pub kernel: KernelSpec,
    pub params: ModelParams,
}

/// Sampled profile on a uniform grid.
///
/// Values near 1 are stored through their complement 1 - φ as well, so
/// that tails on both sides keep full relative precision. `values` and
/// `complement` always satisfy φ + (1 - φ) = 1 up to rounding; whichever
/// of the two is smaller is authoritative.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    pub grid: Grid,
    values: Vec<f64>,
    complement: Vec<f64>,
    pub tails: TailExtension,
    /// Fitted exponent of φ at the left end.
    pub left_rate: f64,
    /// Fitted exponent of 1 - φ at the right end.
    pub right_rate: f64,
    pub left_degree: u32,
    pub right_degree: u32,
    pub meta: Option<FrontMeta>,
}

impl Profile {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        let complement = values.iter().map(|v| 1.0 - v).collect();
        Profile::from_parts(grid, values, complement)
    }

    pub fn from_parts(grid: Grid, values: Vec<f64>, complement: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n || complement.len() != grid.n {
            return Err(Error::invalid(format!(
                "profile has {} values and {} complements for {} grid nodes",
                values.len(),
                complement.len(),
                grid.n
            )));
        }
        if values.iter().chain(&complement).any(|v| !v.is_finite()) {
            return Err(Error::invalid("profile contains non-finite values"));
        }
        let mut p = Profile {
            grid,
            values,
            complement,
            tails: TailExtension::default(),
            left_rate: f64::NAN,
            right_rate: f64::NAN,
            left_degree: 0,
            right_degree: 0,
            meta: None,
        };
        p.reconcile();
        Ok(p)
    }

    /// Profile sampled from a function returning (φ, 1 - φ).
    pub fn from_fn<F: Fn(f64) -> (f64, f64)>(grid: Grid, f: F) -> Result<Self> {
        let (values, complement) = grid.nodes().into_iter().map(f).unzip();
        Profile::from_parts(grid, values, complement)
    }

    pub fn with_tails(mut self, tails: TailExtension) -> Self {
        self.tails = tails;
        self
    }

    pub fn with_meta(mut self, meta: FrontMeta) -> Self {
        self.meta = Some(meta);
        self
    }

    /// Make the less precise representation agree with the more precise one.
    pub(crate) fn reconcile(&mut self) {
        for (v, y) in self.values.iter_mut().zip(self.complement.iter_mut()) {
            if *v <= 0.5 {
                *y = 1.0 - *v;
            } else {
                *v = 1.0 - *y;
            }
        }
    }

    /// Replace both representations without reconciling them.
    pub(crate) fn overwrite(&mut self, values: Vec<f64>, complement: Vec<f64>) {
        debug_assert!(values.len() == self.grid.n && complement.len() == self.grid.n);
        self.values = values;
        self.complement = complement;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn complement(&self) -> &[f64] {
        &self.complement
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// φ at node index `i`, using the tail continuation outside the grid.
    pub fn phi_at(&self, i: isize) -> f64 {
        let n = self.values.len() as isize;
        if i < 0 {
            let h = self.grid.step();
            self.values[0] * (self.tails.left * i as f64 * h).exp()
        } else if i >= n {
            1.0 - self.y_at(i)
        } else {
            self.values[i as usize]
        }
    }

    /// 1 - φ at node index `i`, using the tail continuation outside the grid.
    pub fn y_at(&self, i: isize) -> f64 {
        let n = self.values.len() as isize;
        if i >= n {
            let h = self.grid.step();
            self.complement[(n - 1) as usize] * (self.tails.right * (i - n + 1) as f64 * h).exp()
        } else if i < 0 {
            1.0 - self.phi_at(i)
        } else {
            self.complement[i as usize]
        }
    }

    /// φ(t) by linear interpolation, tail continuation off the grid.
    pub fn eval(&self, t: f64) -> f64 {
        self.interp(t, false)
    }

    /// 1 - φ(t), evaluated with the same precision rules as [`Profile::eval`].
    pub fn eval_complement(&self, t: f64) -> f64 {
        self.interp(t, true)
    }

    fn interp(&self, t: f64, comp: bool) -> f64 {
        let g = &self.grid;
        let h = g.step();
        let x = (t - g.t_min) / h;
        let n = g.n as f64;
        if x <= 0.0 {
            let phi = self.values[0] * (self.tails.left * (t - g.t_min)).exp();
            return if comp { 1.0 - phi } else { phi };
        }
        if x >= n - 1.0 {
            let y = self.complement[g.n - 1] * (self.tails.right * (t - g.t_max)).exp();
            return if comp { y } else { 1.0 - y };
        }
        let i = x.floor() as usize;
        let f = x - i as f64;
        let (a, b) = if comp {
            (self.complement[i], self.complement[i + 1])
        } else {
            (self.values[i], self.values[i + 1])
        };
        a + f * (b - a)
    }

    /// φ(t) by four-point Lagrange interpolation, tail continuation off the grid.
    pub fn eval_cubic(&self, t: f64) -> f64 {
        self.cubic(t, false)
    }

    /// 1 - φ(t) by four-point Lagrange interpolation.
    pub fn eval_complement_cubic(&self, t: f64) -> f64 {
        self.cubic(t, true)
    }

    fn cubic(&self, t: f64, comp: bool) -> f64 {
        let g = &self.grid;
        let x = (t - g.t_min) / g.step();
        if x <= 0.0 || x >= (g.n - 1) as f64 {
            return self.interp(t, comp);
        }
        let base = (x.floor() as usize).saturating_sub(1).min(g.n - 4);
        let data = if comp { &self.complement } else { &self.values };
        let mut sum = 0.0;
        for j in 0..4 {
            let mut l = 1.0;
            for m in 0..4 {
                if m != j {
                    l *= (x - (base + m) as f64) / (j as f64 - m as f64);
                }
            }
            sum += l * data[base + j];
        }
        sum
    }

    /// Position of the first level crossing φ = `level`: bracketed on the
    /// nodes, then refined by bisection on the cubic interpolant.
    pub fn crossing(&self, level: f64) -> Option<f64> {
        let v = &self.values;
        for i in 0..v.len() - 1 {
            if (v[i] - level) * (v[i + 1] - level) <= 0.0 && v[i] != v[i + 1] {
                let (mut a, mut b) = (self.grid.t(i), self.grid.t(i + 1));
                let fa = self.eval_cubic(a) - level;
                if fa == 0.0 {
                    return Some(a);
                }
                for _ in 0..80 {
                    let m = 0.5 * (a + b);
                    if (self.eval_cubic(m) - level) * fa > 0.0 {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                return Some(0.5 * (a + b));
            }
        }
        None
    }

    /// Shift the grid origin so that φ(0) = 1/2 (no resampling).
    pub fn normalized(mut self) -> Self {
        if let Some(t) = self.crossing(0.5) {
            self.grid = self.grid.translated(-t);
        }
        self
    }

    /// Same values with the grid moved by `dt`, i.e. ψ(t) = φ(t - dt).
    pub fn translated(mut self, dt: f64) -> Self {
        self.grid = self.grid.translated(dt);
        self
    }

    /// ψ(t_i) = φ(t_i + k h): the profile shifted left by `k` nodes on the
    /// same grid, padded from the right tail continuation.
    pub fn shifted_nodes(&self, k: usize) -> Profile {
        let n = self.values.len();
        let values = (0..n).map(|i| self.phi_at((i + k) as isize)).collect();
        let complement = (0..n).map(|i| self.y_at((i + k) as isize)).collect();
        let mut p = Profile::from_parts(self.grid, values, complement).expect("same length");
        p.tails = self.tails;
        p.meta = self.meta;
        p
    }

    /// Fit the tail exponents on the outer 15% of the grid at each end.
    pub fn fit_tails(&mut self) {
        let fit = super::verify::fit_tails(self);
        self.left_rate = fit.left_rate;
        self.right_rate = fit.right_rate;
        self.left_degree = fit.left_degree;
        self.right_degree = fit.right_degree;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::with_zero_node(-10.0, 10.0, 1001).unwrap()
    }

    #[test]
    fn zero_is_a_node() {
        let g = Grid::with_zero_node(-7.3, 12.1, 777).unwrap();
        let i = g.nearest(0.0);
        assert!(g.t(i).abs() < 1e-12);
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(1.0, 2.0, 600).is_err());
        assert!(Grid::new(-1.0, 2.0, 100).is_err());
    }

    #[test]
    fn two_sided_storage_keeps_small_complements() {
        let g = grid();
        let p = Profile::from_fn(g, |t| {
            let y = (-t).exp().min(1.0) * 0.5;
            (1.0 - y, y)
        })
        .unwrap();
        let last = p.complement()[g.n - 1];
        assert!((last - 0.5 * (-g.t_max).exp()).abs() < 1e-25);
    }

    #[test]
    fn interpolation_and_extension() {
        let g = grid();
        let p = Profile::from_fn(g, |t| {
            let s = 1.0 / (1.0 + (-t).exp());
            (s, 1.0 - s)
        })
        .unwrap();
        assert!((p.eval(0.0) - 0.5).abs() < 1e-12);
        // constant continuation by default
        assert_eq!(p.eval(-50.0), p.values()[0]);
        let q = p.clone().with_tails(TailExtension { left: 1.0, right: -1.0 });
        assert!((q.eval(g.t_min - 2.0) - p.values()[0] * (-2f64).exp()).abs() < 1e-20);
        assert!((q.eval_complement(g.t_max + 3.0) - p.complement()[g.n - 1] * (-3f64).exp()).abs() < 1e-20);
    }

    #[test]
    fn normalization_moves_origin() {
        let g = grid();
        let p = Profile::from_fn(g, |t| {
            let s = 1.0 / (1.0 + (-(t - 1.234)).exp());
            (s, 1.0 - s)
        })
        .unwrap();
        let q = p.normalized();
        assert!((q.eval(0.0) - 0.5).abs() < 1e-4);
        assert!((q.grid.t_min - (g.t_min - 1.234)).abs() < 1e-3);
    }

    #[test]
    fn cubic_interpolation_is_accurate() {
        let g = grid();
        let f = |t: f64| 1.0 / (1.0 + (-t).exp());
        let p = Profile::from_fn(g, |t| (f(t), 1.0 - f(t))).unwrap();
        let h = g.step();
        for k in 0..50 {
            let t = -5.0 + 0.2 * k as f64 + 0.37 * h;
            assert!((p.eval_cubic(t) - f(t)).abs() < 1e-8);
        }
        assert!((p.crossing(0.7).unwrap() - (0.7f64 / 0.3).ln()).abs() < 1e-7);
    }

    #[test]
    fn node_shift_pads_with_tail() {
        let g = grid();
        let p = Profile::from_fn(g, |t| (t.exp().min(1.0) * 0.5, 1.0 - t.exp().min(1.0) * 0.5))
            .unwrap();
        let s = p.shifted_nodes(3);
        assert_eq!(s.values()[0], p.values()[3]);
        assert_eq!(s.values()[g.n - 1], p.values()[g.n - 1]);
    }
}
