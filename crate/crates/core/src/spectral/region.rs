use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classify;
use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::kernel::{KernelFamily, KernelSpec, ModelParams};
use crate::pool::worker_pool;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionCell {
    pub tau: f64,
    pub c: f64,
    pub necessary: bool,
    pub sufficient: bool,
    pub witness_root: Option<f64>,
    pub gamma_w: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub curve_id: String,
    pub tau: f64,
    pub c: f64,
}

/// Verdicts on a (τ, c) grid plus the boundaries between them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionTable {
    pub family: KernelFamily,
    pub gamma: f64,
    pub d: f64,
    pub taus: Vec<f64>,
    pub cs: Vec<f64>,
    /// Row-major: cell (i, j) has τ = taus[i], c = cs[j].
    pub cells: Vec<RegionCell>,
    pub boundaries: Vec<BoundaryPoint>,
}

impl RegionTable {
    pub fn cell(&self, i: usize, j: usize) -> &RegionCell {
        &self.cells[i * self.cs.len() + j]
    }

    pub fn cells_csv(&self) -> String {
        let mut out = String::from("tau,c,necessary,sufficient,witness_root,gamma_w\n");
        for cell in &self.cells {
            let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt_f64(cell.tau),
                fmt_f64(cell.c),
                cell.necessary,
                cell.sufficient,
                opt(cell.witness_root),
                opt(cell.gamma_w)
            );
        }
        out
    }

    pub fn boundaries_csv(&self) -> String {
        let mut out = String::from("curve_id,tau,c\n");
        for p in &self.boundaries {
            let _ = writeln!(out, "{},{},{}", p.curve_id, fmt_f64(p.tau), fmt_f64(p.c));
        }
        out
    }
}

fn verdict(family: KernelFamily, gamma: f64, d: f64, tau: f64, c: f64) -> Result<RegionCell> {
    let kernel = KernelSpec::new(family, tau)?;
    let params = ModelParams::new(c, gamma, d)?;
    let v = classify(&kernel, &params)?;
    Ok(RegionCell {
        tau,
        c,
        necessary: v.necessary_holds,
        sufficient: v.sufficient_holds,
        witness_root: v.witness_root,
        gamma_w: v.gamma_w,
    })
}

#[derive(Clone, Copy, PartialEq)]
enum Curve {
    Sufficient,
    Necessary,
}

impl Curve {
    fn name(self) -> &'static str {
        match self {
            Curve::Sufficient => "sufficient",
            Curve::Necessary => "necessary",
        }
    }

    fn pick(self, cell: &RegionCell) -> bool {
        match self {
            Curve::Sufficient => cell.sufficient,
            Curve::Necessary => cell.necessary,
        }
    }
}

/// Bisect along the segment from `a` to `b` (points in the (τ, c) plane)
/// where `curve` flips.
fn bisect_edge(
    family: KernelFamily,
    gamma: f64,
    d: f64,
    curve: Curve,
    a: (f64, f64),
    b: (f64, f64),
) -> Result<(f64, f64)> {
    let at = |s: f64| (a.0 + s * (b.0 - a.0), a.1 + s * (b.1 - a.1));
    let start = {
        let (t, c) = at(0.0);
        curve.pick(&verdict(family, gamma, d, t, c)?)
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..40 {
        let m = 0.5 * (lo + hi);
        let (t, c) = at(m);
        if curve.pick(&verdict(family, gamma, d, t, c)?) == start {
            lo = m;
        } else {
            hi = m;
        }
    }
    Ok(at(0.5 * (lo + hi)))
}

/// Classify every (τ, c) cell and extract the sufficient and necessary
/// boundaries. Flips of the necessary verdict sit on the double-root locus
/// of χ₊, where two negative roots merge and disappear.
pub fn region_sweep(
    family: KernelFamily,
    gamma: f64,
    d: f64,
    taus: &[f64],
    cs: &[f64],
) -> Result<RegionTable> {
    let ascending = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
    if taus.is_empty() || cs.is_empty() || !ascending(taus) || !ascending(cs) {
        return Err(Error::invalid("region grids must be nonempty and strictly ascending"));
    }
    let nc = cs.len();
    let pool = worker_pool();
    let cells: Vec<RegionCell> = pool.install(|| {
        (0..taus.len() * nc)
            .into_par_iter()
            .map(|k| verdict(family, gamma, d, taus[k / nc], cs[k % nc]))
            .collect::<Result<Vec<_>>>()
    })?;

    // every edge whose end verdicts differ, for both curves
    let mut edges = Vec::new();
    for curve in [Curve::Sufficient, Curve::Necessary] {
        for i in 0..taus.len() {
            for j in 0..nc {
                let here = curve.pick(&cells[i * nc + j]);
                if i + 1 < taus.len() && curve.pick(&cells[(i + 1) * nc + j]) != here {
                    edges.push((curve, (taus[i], cs[j]), (taus[i + 1], cs[j])));
                }
                if j + 1 < nc && curve.pick(&cells[i * nc + j + 1]) != here {
                    edges.push((curve, (taus[i], cs[j]), (taus[i], cs[j + 1])));
                }
            }
        }
    }
    let points: Vec<(Curve, (f64, f64))> = pool.install(|| {
        edges
            .par_iter()
            .map(|&(curve, a, b)| bisect_edge(family, gamma, d, curve, a, b).map(|p| (curve, p)))
            .collect::<Result<Vec<_>>>()
    })?;

    let dtau = (taus[taus.len() - 1] - taus[0]) / (taus.len().max(2) - 1) as f64;
    let dc = (cs[nc - 1] - cs[0]) / (nc.max(2) - 1) as f64;
    let mut boundaries = Vec::new();
    for curve in [Curve::Sufficient, Curve::Necessary] {
        let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.0 == curve).map(|p| p.1).collect();
        for (idx, chain) in chain_points(pts, dtau, dc).into_iter().enumerate() {
            let id = format!("{}-{}", curve.name(), idx);
            boundaries.extend(chain.into_iter().map(|(tau, c)| BoundaryPoint { curve_id: id.clone(), tau, c }));
        }
    }
    Ok(RegionTable {
        family,
        gamma,
        d,
        taus: taus.to_vec(),
        cs: cs.to_vec(),
        cells,
        boundaries,
    })
}

/// Greedy nearest-neighbour chaining into polylines; a gap of more than a
/// few cells starts a new polyline.
fn chain_points(mut pts: Vec<(f64, f64)>, dtau: f64, dc: f64) -> Vec<Vec<(f64, f64)>> {
    let scale = |a: (f64, f64), b: (f64, f64)| {
        let x = if dtau > 0.0 { (a.0 - b.0) / dtau } else { 0.0 };
        let y = if dc > 0.0 { (a.1 - b.1) / dc } else { 0.0 };
        (x * x + y * y).sqrt()
    };
    let mut chains = Vec::new();
    pts.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.partial_cmp(&b.0).unwrap()));
    while !pts.is_empty() {
        let mut chain = vec![pts.remove(0)];
        loop {
            let last = *chain.last().unwrap();
            let best = pts
                .iter()
                .enumerate()
                .map(|(k, &p)| (k, scale(last, p)))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
            match best {
                Some((k, dist)) if dist <= 2.5 => chain.push(pts.remove(k)),
                _ => break,
            }
        }
        chains.push(chain);
    }
    chains
}
