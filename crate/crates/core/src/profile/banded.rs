//! Banded linear systems solved by Gaussian elimination with partial pivoting.

/// Square matrix with `kl` sub- and `ku` super-diagonals. Row `i` stores the
/// columns `i - kl ..= i + ku + kl`; the extra `kl` columns absorb fill-in
/// from row swaps.
#[derive(Clone, Debug)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        BandMatrix { n, kl, ku, width, data: vec![0.0; n * width] }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku + self.kl, "({i}, {j}) outside band");
        i * self.width + (j + self.kl - i)
    }

    /// Adds `v` at (i, j); (i, j) must lie within the declared band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(j + self.kl >= i && j <= i + self.ku, "({i}, {j}) outside band");
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl < i || j > i + self.ku + self.kl {
            return 0.0;
        }
        self.data[self.idx(i, j)]
    }

    /// Solves A x = b in place (A is destroyed). Returns `None` when a pivot
    /// vanishes.
    pub fn solve(mut self, mut b: Vec<f64>) -> Option<Vec<f64>> {
        let n = self.n;
        let reach = self.ku + self.kl;
        for k in 0..n {
            let last_row = (k + self.kl).min(n - 1);
            let mut p = k;
            let mut best = self.get(k, k).abs();
            for i in k + 1..=last_row {
                let v = self.get(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > 0.0) || !best.is_finite() {
                return None;
            }
            let last_col = (k + reach).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let (a, c) = (self.idx(k, j), self.idx(p, j));
                    self.data.swap(a, c);
                }
                b.swap(k, p);
            }
            let pivot = self.data[self.idx(k, k)];
            for i in k + 1..=last_row {
                let f = self.data[self.idx(i, k)] / pivot;
                if f == 0.0 {
                    continue;
                }
                let ik = self.idx(i, k);
                self.data[ik] = 0.0;
                let (rk, ri) = (self.idx(k, k), self.idx(i, k));
                for off in 1..=last_col - k {
                    let v = self.data[rk + off];
                    self.data[ri + off] -= f * v;
                }
                b[i] -= f * b[k];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let last_col = (i + reach).min(n - 1);
            let base = self.idx(i, i);
            let mut s = b[i];
            for off in 1..=last_col - i {
                s -= self.data[base + off] * x[i + off];
            }
            x[i] = s / self.data[base];
        }
        Some(x)
    }
}
