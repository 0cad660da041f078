//! Method-of-lines simulation of the linear-chain system
//!
//! ```text
//! u_t = d u_xx + u (1 - v) / (1 + γ v)
//! v_t = d v_xx + (u - v) / τ
//! ```
//!
//! on [0, L] with homogeneous Neumann conditions, which is the nonlocal model
//! with the weak generic kernel. Central differences in space, classical
//! RK4 in time.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::fmt_f64;

/// Safety factor applied to dx²/(2d) for the automatic time step.
pub const DT_SAFETY: f64 = 0.2;
/// Fraction of the run discarded before measuring the speed.
pub const TRANSIENT_FRACTION: f64 = 0.3;
/// Minimum number of snapshots in the measurement window.
pub const MIN_SNAPSHOTS: usize = 10;
/// Distance to the boundaries, in kernel widths √(dτ), required for a
/// snapshot to enter the speed fit.
pub const BOUNDARY_WIDTHS: f64 = 10.0;
/// Values below this are reported as positivity warnings.
pub const POSITIVITY_FLOOR: f64 = -1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    /// u = v = 0 for x ≤ split and 1 for x > split.
    Step { split: f64 },
    /// Constant state.
    Uniform { u: f64, v: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub gamma: f64,
    pub tau: f64,
    pub d: f64,
    /// Domain length L.
    pub length: f64,
    pub nx: usize,
    /// Fixed time step; `None` picks 0.2·dx²/(2d).
    pub dt: Option<f64>,
    pub t_end: f64,
    pub initial: InitialData,
    pub snapshot_every: f64,
}

impl SimConfig {
    /// The setting of the overshooting front: γ = 40, τ = 10, d = 50 on
    /// [0, 1800], step at x = 1500.
    pub fn overshoot_example() -> Self {
        SimConfig {
            gamma: 40.0,
            tau: 10.0,
            d: 50.0,
            length: 1800.0,
            nx: 1800,
            dt: None,
            t_end: 80.0,
            initial: InitialData::Step { split: 1500.0 },
            snapshot_every: 1.0,
        }
    }

    /// A monotone-regime run: γ = 1, τ = 0.3, d = 1.
    pub fn monotone_example() -> Self {
        SimConfig {
            gamma: 1.0,
            tau: 0.3,
            d: 1.0,
            length: 400.0,
            nx: 801,
            dt: None,
            t_end: 100.0,
            initial: InitialData::Step { split: 300.0 },
            snapshot_every: 1.0,
        }
    }

    pub fn dx(&self) -> f64 {
        self.length / (self.nx - 1) as f64
    }

    /// Explicit stability limit dx²/(2d).
    pub fn stability_limit(&self) -> f64 {
        self.dx() * self.dx() / (2.0 * self.d)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, message: String| Err(Error::Config { field: field.into(), message });
        if !(self.length > 0.0 && self.length.is_finite()) {
            return bad("length", format!("must be positive, got {}", self.length));
        }
        if self.nx < 200 {
            return bad("nx", format!("must be at least 200, got {}", self.nx));
        }
        if !(self.d > 0.0 && self.d.is_finite()) {
            return bad("d", format!("must be positive, got {}", self.d));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return bad("tau", format!("must be positive, got {}", self.tau));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return bad("gamma", format!("must be nonnegative, got {}", self.gamma));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad("t_end", format!("must be positive, got {}", self.t_end));
        }
        if !(self.snapshot_every > 0.0 && self.snapshot_every <= self.t_end) {
            return bad("snapshot_every", format!("must lie in (0, t_end], got {}", self.snapshot_every));
        }
        if let InitialData::Step { split } = self.initial {
            if !(split > 0.0 && split < self.length) {
                return bad("split", format!("must lie in (0, L), got {split}"));
            }
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) {
                return bad("dt", format!("must be positive, got {dt}"));
            }
            if dt > self.stability_limit() {
                return Err(Error::Stability { dt, limit: self.stability_limit() });
            }
        }
        Ok(())
    }

    /// (time step, steps between snapshots). The automatic step is shrunk
    /// slightly so that snapshots fall on exact multiples of the cadence.
    pub fn schedule(&self) -> (f64, usize) {
        match self.dt {
            Some(dt) => (dt, ((self.snapshot_every / dt).round() as usize).max(1)),
            None => {
                let dt_max = DT_SAFETY * self.stability_limit();
                let k = (self.snapshot_every / dt_max).ceil().max(1.0) as usize;
                (self.snapshot_every / k as f64, k)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub time: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShapeClass {
    Monotone,
    NonMonotoneNonOscillating,
    Oscillating,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimResult {
    pub config: SimConfig,
    pub x: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    /// `None` when the measurement preconditions are not met.
    pub speed_estimate: Option<f64>,
    pub shape_class: Option<ShapeClass>,
    /// max u - 1 over the classification window of the final snapshot.
    pub overshoot_max: Option<f64>,
    pub min_value: f64,
    pub warnings: Vec<String>,
}

struct Rhs {
    gamma: f64,
    inv_tau: f64,
    diff: f64,
}

impl Rhs {
    fn eval(&self, u: &[f64], v: &[f64], du: &mut [f64], dv: &mut [f64]) {
        let n = u.len();
        let lap = |w: &[f64], i: usize| {
            // ghost nodes mirror the first interior node
            let l = if i == 0 { w[1] } else { w[i - 1] };
            let r = if i == n - 1 { w[n - 2] } else { w[i + 1] };
            l - 2.0 * w[i] + r
        };
        for i in 0..n {
            du[i] = self.diff * lap(u, i) + u[i] * (1.0 - v[i]) / (1.0 + self.gamma * v[i]);
            dv[i] = self.diff * lap(v, i) + self.inv_tau * (u[i] - v[i]);
        }
    }
}

/// Integrates the system and, when possible, measures the speed and
/// classifies the final shape.
pub fn run(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let n = config.nx;
    let dx = config.dx();
    let x: Vec<f64> = (0..n).map(|i| i as f64 * dx).collect();
    let (mut u, mut v): (Vec<f64>, Vec<f64>) = match config.initial {
        InitialData::Step { split } => x.iter().map(|&xi| if xi <= split { (0.0, 0.0) } else { (1.0, 1.0) }).unzip(),
        InitialData::Uniform { u, v } => (vec![u; n], vec![v; n]),
    };
    let (dt, per_snap) = config.schedule();
    let rhs = Rhs { gamma: config.gamma, inv_tau: 1.0 / config.tau, diff: config.d / (dx * dx) };
    let total_snaps = (config.t_end / config.snapshot_every).round().max(1.0) as usize;

    let mut k = [(); 4].map(|_| (vec![0.0; n], vec![0.0; n]));
    let (mut ut, mut vt) = (vec![0.0; n], vec![0.0; n]);
    let mut snapshots = vec![Snapshot { time: 0.0, u: u.clone(), v: v.clone() }];
    let mut min_value = u.iter().chain(&v).copied().fold(f64::INFINITY, f64::min);
    let mut warnings = Vec::new();
    let mut step = 0usize;
    for _ in 0..total_snaps {
        for _ in 0..per_snap {
            let [k1, k2, k3, k4] = &mut k;
            rhs.eval(&u, &v, &mut k1.0, &mut k1.1);
            for i in 0..n {
                ut[i] = u[i] + 0.5 * dt * k1.0[i];
                vt[i] = v[i] + 0.5 * dt * k1.1[i];
            }
            rhs.eval(&ut, &vt, &mut k2.0, &mut k2.1);
            for i in 0..n {
                ut[i] = u[i] + 0.5 * dt * k2.0[i];
                vt[i] = v[i] + 0.5 * dt * k2.1[i];
            }
            rhs.eval(&ut, &vt, &mut k3.0, &mut k3.1);
            for i in 0..n {
                ut[i] = u[i] + dt * k3.0[i];
                vt[i] = v[i] + dt * k3.1[i];
            }
            rhs.eval(&ut, &vt, &mut k4.0, &mut k4.1);
            for i in 0..n {
                u[i] += dt / 6.0 * (k1.0[i] + 2.0 * k2.0[i] + 2.0 * k3.0[i] + k4.0[i]);
                v[i] += dt / 6.0 * (k1.1[i] + 2.0 * k2.1[i] + 2.0 * k3.1[i] + k4.1[i]);
            }
            step += 1;
        }
        let time = step as f64 * dt;
        if u.iter().chain(&v).any(|w| !w.is_finite()) {
            return Err(Error::BlowUp { time });
        }
        let lowest = u.iter().chain(&v).copied().fold(f64::INFINITY, f64::min);
        if lowest < POSITIVITY_FLOOR && lowest < min_value {
            warnings.push(format!("negative value {lowest:e} at t = {time}"));
        }
        min_value = min_value.min(lowest);
        snapshots.push(Snapshot { time, u: u.clone(), v: v.clone() });
    }

    let mut result = SimResult {
        config: *config,
        x,
        snapshots,
        speed_estimate: None,
        shape_class: None,
        overshoot_max: None,
        min_value,
        warnings,
    };
    match estimate_speed(&result, 0.5) {
        Ok(c) => result.speed_estimate = Some(c),
        Err(e) => result.warnings.push(format!("speed not measured: {e}")),
    }
    match classify_shape(&result) {
        Ok((class, over)) => {
            result.shape_class = Some(class);
            result.overshoot_max = Some(over);
        }
        Err(e) => result.warnings.push(format!("shape not classified: {e}")),
    }
    Ok(result)
}

/// Leftmost position where `u` crosses `level`, by linear interpolation.
pub fn level_position(x: &[f64], u: &[f64], level: f64) -> Option<f64> {
    (0..u.len() - 1).find_map(|i| {
        let (a, b) = (u[i] - level, u[i + 1] - level);
        if a == 0.0 {
            Some(x[i])
        } else if a * b < 0.0 {
            Some(x[i] + (x[i + 1] - x[i]) * a / (a - b))
        } else {
            None
        }
    })
}

/// Least-squares speed of the level set over the snapshots after the
/// transient, using only snapshots whose level set keeps ten kernel widths
/// away from both boundaries.
pub fn estimate_speed(result: &SimResult, level: f64) -> Result<f64> {
    let cfg = &result.config;
    let clearance = BOUNDARY_WIDTHS * (cfg.d * cfg.tau).sqrt();
    let t0 = TRANSIENT_FRACTION * cfg.t_end;
    let mut crossed = false;
    let pts: Vec<(f64, f64)> = result
        .snapshots
        .iter()
        .filter(|s| s.time >= t0 - 1e-9)
        .filter_map(|s| {
            let xf = level_position(&result.x, &s.u, level)?;
            crossed = true;
            (xf >= clearance && xf <= cfg.length - clearance).then_some((s.time, xf))
        })
        .collect();
    if !crossed {
        return Err(Error::Measurement(format!("level {level} never crossed after the transient")));
    }
    if pts.len() < MIN_SNAPSHOTS {
        return Err(Error::Measurement(format!(
            "only {} snapshots with the front away from the boundaries (need {MIN_SNAPSHOTS})",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mx = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - mx)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
    Ok((sxy / sxx).abs())
}

/// Classifies the final snapshot on the window from 0.2·L behind the level
/// set up to where the level set stood when the measurement window opened;
/// the window thus holds the developed front and its wake but not the
/// remains of the initial step. Returns the class and max u - 1 on the
/// window.
pub fn classify_shape(result: &SimResult) -> Result<(ShapeClass, f64)> {
    let cfg = &result.config;
    let last = result.snapshots.last().ok_or_else(|| Error::Classification("no snapshots".into()))?;
    let xf = level_position(&result.x, &last.u, 0.5)
        .ok_or_else(|| Error::Classification("final snapshot has no front".into()))?;
    let t0 = TRANSIENT_FRACTION * cfg.t_end;
    let opening = result
        .snapshots
        .iter()
        .find(|s| s.time >= t0 - 1e-9)
        .and_then(|s| level_position(&result.x, &s.u, 0.5))
        .unwrap_or(cfg.length);
    let lo = (xf - 0.2 * cfg.length).max(0.0);
    let hi = opening.max(xf).min(cfg.length);
    let idx: Vec<usize> = (0..result.x.len()).filter(|&i| result.x[i] >= lo && result.x[i] <= hi).collect();
    if idx.len() < 3 {
        return Err(Error::Classification("front window has fewer than three nodes".into()));
    }
    let u: Vec<f64> = idx.iter().map(|&i| last.u[i]).collect();
    Ok(classify_profile(&u))
}

/// Shape class of samples u of a front rising from 0 towards 1 along the
/// array, and max u - 1.
pub fn classify_profile(u: &[f64]) -> (ShapeClass, f64) {
    let max = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = u.iter().copied().fold(f64::INFINITY, f64::min);
    let margin = 1e-6 * (max - min);
    let overshoot = max - 1.0;
    if u.windows(2).all(|w| w[1] - w[0] >= -margin) {
        return (ShapeClass::Monotone, overshoot);
    }
    // sign changes of u - 1, counted from the state below 1 the front rises
    // from; excursions under 1e-3 of the overshoot are ignored
    let threshold = 1e-3 * overshoot.max(0.0);
    let mut changes = 0;
    let mut sign = -1i8;
    for &w in u {
        let s = if w - 1.0 > threshold {
            1
        } else if w - 1.0 < -threshold {
            -1
        } else {
            0
        };
        if s != 0 && s != sign {
            changes += 1;
            sign = s;
        }
    }
    let class = if changes >= 2 { ShapeClass::Oscillating } else { ShapeClass::NonMonotoneNonOscillating };
    (class, overshoot)
}

/// Long-format CSV: time,x,u,v.
pub fn snapshots_csv(result: &SimResult) -> String {
    let mut out = String::from("time,x,u,v\n");
    for s in &result.snapshots {
        let t = fmt_f64(s.time);
        for (i, x) in result.x.iter().enumerate() {
            out.push_str(&format!("{t},{},{},{}\n", fmt_f64(*x), fmt_f64(s.u[i]), fmt_f64(s.v[i])));
        }
    }
    out
}

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"WFLSNAP1";

/// Compact binary dump: magic, nx and snapshot count as little-endian u64,
/// the x array, then per snapshot its time, u and v, all little-endian f64.
pub fn write_snapshots_binary<W: Write>(result: &SimResult, mut w: W) -> Result<()> {
    w.write_all(SNAPSHOT_MAGIC)?;
    w.write_all(&(result.x.len() as u64).to_le_bytes())?;
    w.write_all(&(result.snapshots.len() as u64).to_le_bytes())?;
    let mut put = |vals: &[f64]| -> std::io::Result<()> {
        for v in vals {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    };
    put(&result.x)?;
    for s in &result.snapshots {
        put(&[s.time])?;
        put(&s.u)?;
        put(&s.v)?;
    }
    Ok(())
}

/// Reads a dump written by [`write_snapshots_binary`]: (x, snapshots).
pub fn read_snapshots_binary(bytes: &[u8]) -> Result<(Vec<f64>, Vec<Snapshot>)> {
    let bad = || Error::Parse("truncated or malformed snapshot dump".into());
    if bytes.len() < 24 || &bytes[..8] != SNAPSHOT_MAGIC {
        return Err(bad());
    }
    let word = |k: usize| -> [u8; 8] { bytes[k..k + 8].try_into().expect("eight bytes") };
    let nx = u64::from_le_bytes(word(8)) as usize;
    let ns = u64::from_le_bytes(word(16)) as usize;
    if bytes.len() != 24 + 8 * (nx + ns * (1 + 2 * nx)) {
        return Err(bad());
    }
    let mut pos = 24;
    let mut take = |m: usize| {
        let v: Vec<f64> = (0..m).map(|j| f64::from_le_bytes(word(pos + 8 * j))).collect();
        pos += 8 * m;
        v
    };
    let x = take(nx);
    let snaps = (0..ns)
        .map(|_| {
            let time = take(1)[0];
            let u = take(nx);
            let v = take(nx);
            Snapshot { time, u, v }
        })
        .collect();
    Ok((x, snaps))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub speed_estimate: Option<f64>,
    pub shape_class: Option<ShapeClass>,
    pub overshoot_max: Option<f64>,
    pub min_value: f64,
    pub warnings: Vec<String>,
    pub config: SimConfig,
}

impl SimResult {
    pub fn summary(&self) -> SimSummary {
        SimSummary {
            speed_estimate: self.speed_estimate,
            shape_class: self.shape_class,
            overshoot_max: self.overshoot_max,
            min_value: self.min_value,
            warnings: self.warnings.clone(),
            config: self.config,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(initial: InitialData) -> SimConfig {
        SimConfig {
            gamma: 2.0,
            tau: 0.5,
            d: 1.0,
            length: 100.0,
            nx: 201,
            dt: None,
            t_end: 5.0,
            initial,
            snapshot_every: 0.5,
        }
    }

    #[test]
    fn equilibria_are_stationary() {
        for (a, b) in [(0.0, 0.0), (1.0, 1.0)] {
            let r = run(&small(InitialData::Uniform { u: a, v: b })).unwrap();
            let s = r.snapshots.last().unwrap();
            assert!(s.u.iter().chain(&s.v).all(|w| (w - a).abs() < 1e-12));
        }
    }

    #[test]
    fn forced_dt_above_limit_is_rejected() {
        let mut c = small(InitialData::Step { split: 50.0 });
        c.dt = Some(c.stability_limit() * 1.01);
        assert!(matches!(run(&c), Err(Error::Stability { .. })));
    }

    #[test]
    fn translating_tanh_speed() {
        let x: Vec<f64> = (0..1001).map(|i| i as f64 * 0.2).collect();
        let mut cfg = small(InitialData::Step { split: 50.0 });
        cfg.length = 200.0;
        cfg.t_end = 20.0;
        let snapshots = (0..=40)
            .map(|k| {
                let t = 0.5 * k as f64;
                let u: Vec<f64> = x.iter().map(|&xi| 0.5 * (1.0 + (xi - 150.0 + 3.0 * t).tanh())).collect();
                Snapshot { time: t, v: u.clone(), u }
            })
            .collect();
        let r = SimResult {
            config: cfg,
            x,
            snapshots,
            speed_estimate: None,
            shape_class: None,
            overshoot_max: None,
            min_value: 0.0,
            warnings: vec![],
        };
        assert!((estimate_speed(&r, 0.5).unwrap() - 3.0).abs() < 1e-3);
    }

    #[test]
    fn damped_oscillation_is_oscillating() {
        let u: Vec<f64> = (0..400)
            .map(|i| {
                let x = i as f64 * 0.025;
                1.0 + 0.1 * x.sin() * (-x).exp()
            })
            .collect();
        assert_eq!(classify_profile(&u).0, ShapeClass::Oscillating);
        let mono: Vec<f64> = (0..300).map(|i| 1.0 - (-(i as f64) / 30.0).exp()).collect();
        assert_eq!(classify_profile(&mono).0, ShapeClass::Monotone);
        let mut bump: Vec<f64> = (0..200).map(|i| i as f64 / 200.0).collect();
        bump.extend((0..300).map(|i| 1.0 + 0.05 * (i as f64 / 30.0) * (-(i as f64) / 30.0).exp()));
        let (class, over) = classify_profile(&bump);
        assert_eq!(class, ShapeClass::NonMonotoneNonOscillating);
        assert!(over > 0.01);
    }

    #[test]
    fn binary_dump_round_trip() {
        let r = run(&small(InitialData::Step { split: 50.0 })).unwrap();
        let mut buf = Vec::new();
        write_snapshots_binary(&r, &mut buf).unwrap();
        let (x, snaps) = read_snapshots_binary(&buf).unwrap();
        assert_eq!(x, r.x);
        assert_eq!(snaps, r.snapshots);
        assert!(read_snapshots_binary(&buf[..buf.len() - 1]).is_err());
    }
}
