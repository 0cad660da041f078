//! Command-line front end.
//!
//! Every command reads its settings from an optional flat `key = value`
//! file (`--config`), overridden by flags. Outputs go to
//! `<out-dir>/<command>-<hash>.{csv,json}` where the hash is taken over the
//! effective settings, so identical settings give identical file names and
//! contents. Exit status: 0 success, 1 bad configuration or input file,
//! 2 domain or precondition error, 3 numerical failure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::kernel::{KernelFamily, KernelSpec, ModelParams};
use crate::pde::{self, InitialData, SimConfig};
use crate::profile::{self, FrontOptions, Grid};
use crate::spectral::{self, SpeedSet};

#[derive(Parser, Debug)]
#[command(name = "wavefront-lab", version, about = "Monotone wavefronts of the nonlocal food-limited model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Negative roots of the characteristic function.
    Roots(Flags),
    /// Necessary and sufficient existence conditions for one (kernel, c).
    Verdict(Flags),
    /// Closed-form delay thresholds (weak, strong) or speed set (local-discrete).
    Threshold(Flags),
    /// Verdicts on a (tau, c) grid and their boundary curves.
    Region(Flags),
    /// Front profile by monotone iteration.
    Front(Flags),
    /// Verification report for a profile CSV.
    Verify(Flags),
    /// Compare two profile CSVs up to translation.
    Uniqueness(Flags),
    /// Simulate the linear-chain system.
    Simulate(Flags),
}

impl Command {
    fn split(self) -> (&'static str, Flags) {
        match self {
            Command::Roots(f) => ("roots", f),
            Command::Verdict(f) => ("verdict", f),
            Command::Threshold(f) => ("threshold", f),
            Command::Region(f) => ("region", f),
            Command::Front(f) => ("front", f),
            Command::Verify(f) => ("verify", f),
            Command::Uniqueness(f) => ("uniqueness", f),
            Command::Simulate(f) => ("simulate", f),
        }
    }
}

/// Flags shared by all commands; each command reads the ones it needs.
#[derive(Args, Debug, Default)]
struct Flags {
    /// Flat key = value settings file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for output files (default: current directory).
    #[arg(long = "out-dir")]
    out_dir: Option<String>,
    /// Kernel family: weak, strong, local-discrete, nonlocal-discrete, local-strong.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    tau: Option<String>,
    /// Speed; expressions such as `2*sqrt(d)` are accepted.
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long = "tau-min")]
    tau_min: Option<String>,
    #[arg(long = "tau-max")]
    tau_max: Option<String>,
    #[arg(long = "tau-n")]
    tau_n: Option<String>,
    #[arg(long = "c-min")]
    c_min: Option<String>,
    #[arg(long = "c-max")]
    c_max: Option<String>,
    #[arg(long = "c-n")]
    c_n: Option<String>,
    /// Grid nodes for front computations.
    #[arg(long)]
    nodes: Option<String>,
    #[arg(long = "t-min")]
    t_min: Option<String>,
    #[arg(long = "t-max")]
    t_max: Option<String>,
    /// Stopping tolerance of the monotone iteration.
    #[arg(long)]
    tol: Option<String>,
    #[arg(long = "max-iter")]
    max_iter: Option<String>,
    /// Profile CSV for verify and uniqueness.
    #[arg(long)]
    profile: Option<String>,
    /// Second profile CSV for uniqueness.
    #[arg(long)]
    other: Option<String>,
    #[arg(long)]
    length: Option<String>,
    #[arg(long)]
    nx: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long = "t-end")]
    t_end: Option<String>,
    /// Position of the initial step.
    #[arg(long)]
    split: Option<String>,
    #[arg(long = "snapshot-every")]
    snapshot_every: Option<String>,
    /// Snapshot format for simulate: csv or binary.
    #[arg(long)]
    format: Option<String>,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("out_dir", &self.out_dir),
            ("family", &self.family),
            ("gamma", &self.gamma),
            ("tau", &self.tau),
            ("c", &self.c),
            ("d", &self.d),
            ("tau_min", &self.tau_min),
            ("tau_max", &self.tau_max),
            ("tau_n", &self.tau_n),
            ("c_min", &self.c_min),
            ("c_max", &self.c_max),
            ("c_n", &self.c_n),
            ("nodes", &self.nodes),
            ("t_min", &self.t_min),
            ("t_max", &self.t_max),
            ("tol", &self.tol),
            ("max_iter", &self.max_iter),
            ("profile", &self.profile),
            ("other", &self.other),
            ("length", &self.length),
            ("nx", &self.nx),
            ("dt", &self.dt),
            ("t_end", &self.t_end),
            ("split", &self.split),
            ("snapshot_every", &self.snapshot_every),
            ("format", &self.format),
        ]
    }
}

/// Keys accepted in config files (flag names with `-` replaced by `_`).
const KNOWN_KEYS: &[&str] = &[
    "command", "out_dir", "family", "gamma", "tau", "c", "d", "tau_min", "tau_max", "tau_n", "c_min",
    "c_max", "c_n", "nodes", "t_min", "t_max", "tol", "max_iter", "profile", "other", "length", "nx",
    "dt", "t_end", "split", "snapshot_every", "format",
];

/// The effective settings of one run: a command and its key-value pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub values: BTreeMap<String, String>,
}

fn config_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config { field: field.to_string(), message: message.into() }
}

/// Parses a flat `key = value` file; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| config_err(&format!("line {}", k + 1), "expected `key = value`"))?;
        let key = key.trim().replace('-', "_");
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(config_err(&key, "unknown key"));
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

impl RunConfig {
    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| config_err(key, "required"))
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|s| s.trim().parse::<f64>().map_err(|_| config_err(key, format!("not a number: `{s}`"))))
            .transpose()
    }

    fn number_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.number(key)?.unwrap_or(default))
    }

    fn req_number(&self, key: &str) -> Result<f64> {
        self.number(key)?.ok_or_else(|| config_err(key, "required"))
    }

    fn count(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            Some(s) => s.trim().parse().map_err(|_| config_err(key, format!("not a count: `{s}`"))),
            None => Ok(default),
        }
    }

    /// A speed-like value that may be an expression in d.
    fn speed(&self, key: &str, d: f64) -> Result<Option<f64>> {
        self.get(key).map(|s| eval_expr(s, d).map_err(|m| config_err(key, m))).transpose()
    }

    fn family(&self) -> Result<KernelFamily> {
        let s = self.require("family")?;
        s.parse().map_err(|_| config_err("family", format!("unknown kernel family `{s}`")))
    }

    fn d(&self) -> Result<f64> {
        self.number_or("d", 1.0)
    }

    fn kernel(&self) -> Result<KernelSpec> {
        let family = self.family()?;
        let tau = self.req_number("tau")?;
        if !(tau > 0.0) {
            return Err(config_err("tau", "must be positive"));
        }
        KernelSpec::new(family, tau)
    }

    fn params(&self) -> Result<ModelParams> {
        let d = self.d()?;
        let c = self.speed("c", d)?.ok_or_else(|| config_err("c", "required"))?;
        let gamma = self.req_number("gamma")?;
        ModelParams::new(c, gamma, d).map_err(|e| match e {
            Error::InvalidArgument(m) => config_err("params", m),
            other => other,
        })
    }

    /// Hex prefix of the SHA-256 of the canonical settings.
    pub fn hash(&self) -> String {
        let mut canon = format!("command={}\n", self.command);
        for (k, v) in &self.values {
            if k != "out_dir" {
                let _ = writeln!(canon, "{k}={v}");
            }
        }
        let digest = Sha256::digest(canon.as_bytes());
        digest.iter().take(6).map(|b| format!("{b:02x}")).collect()
    }

    fn out_path(&self, ext: &str) -> PathBuf {
        let dir = self.get("out_dir").unwrap_or(".");
        Path::new(dir).join(format!("{}-{}.{ext}", self.command, self.hash()))
    }
}

/// Evaluates a speed expression: numbers, `d`, `sqrt(..)`, + - * / and
/// parentheses.
pub fn eval_expr(src: &str, d: f64) -> std::result::Result<f64, String> {
    struct P<'a> {
        s: &'a [u8],
        i: usize,
        d: f64,
    }
    impl P<'_> {
        fn ws(&mut self) {
            while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
                self.i += 1;
            }
        }
        fn eat(&mut self, c: u8) -> bool {
            self.ws();
            if self.s.get(self.i) == Some(&c) {
                self.i += 1;
                true
            } else {
                false
            }
        }
        fn expr(&mut self) -> std::result::Result<f64, String> {
            let mut v = self.term()?;
            loop {
                if self.eat(b'+') {
                    v += self.term()?;
                } else if self.eat(b'-') {
                    v -= self.term()?;
                } else {
                    return Ok(v);
                }
            }
        }
        fn term(&mut self) -> std::result::Result<f64, String> {
            let mut v = self.factor()?;
            loop {
                if self.eat(b'*') {
                    v *= self.factor()?;
                } else if self.eat(b'/') {
                    v /= self.factor()?;
                } else {
                    return Ok(v);
                }
            }
        }
        fn factor(&mut self) -> std::result::Result<f64, String> {
            self.ws();
            if self.eat(b'-') {
                return Ok(-self.factor()?);
            }
            if self.eat(b'(') {
                let v = self.expr()?;
                return if self.eat(b')') { Ok(v) } else { Err("missing `)`".into()) };
            }
            let rest = &self.s[self.i..];
            if rest.starts_with(b"sqrt") {
                self.i += 4;
                if !self.eat(b'(') {
                    return Err("expected `(` after sqrt".into());
                }
                let v = self.expr()?;
                if !self.eat(b')') {
                    return Err("missing `)`".into());
                }
                return Ok(v.sqrt());
            }
            if rest.first() == Some(&b'd') {
                self.i += 1;
                return Ok(self.d);
            }
            let start = self.i;
            while self.i < self.s.len() {
                let c = self.s[self.i];
                let exp_sign = (c == b'+' || c == b'-') && self.i > start && matches!(self.s[self.i - 1], b'e' | b'E');
                if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                    self.i += 1;
                } else {
                    break;
                }
            }
            let tok = std::str::from_utf8(&self.s[start..self.i]).expect("ascii");
            tok.parse().map_err(|_| format!("unexpected input at `{}`", String::from_utf8_lossy(&self.s[start..])))
        }
    }
    let mut p = P { s: src.as_bytes(), i: 0, d };
    let v = p.expr()?;
    p.ws();
    if p.i != p.s.len() {
        return Err(format!("trailing input `{}`", &src[p.i..]));
    }
    if !v.is_finite() {
        return Err(format!("`{src}` is not finite"));
    }
    Ok(v)
}

/// Files written and the one-line summary of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub summary: String,
    pub files: Vec<PathBuf>,
    /// Exit status when the command itself ran (verify reports 3 on a failed check).
    pub status: i32,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn read_profile(cfg: &RunConfig, key: &str) -> Result<profile::Profile> {
    let path = cfg.require(key)?;
    let text = std::fs::read_to_string(path).map_err(|e| config_err(key, format!("cannot read `{path}`: {e}")))?;
    profile::read_profile_csv(&text)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// Runs one command.
pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    if let Some(dir) = cfg.get("out_dir") {
        std::fs::create_dir_all(dir).map_err(|e| config_err("out_dir", format!("cannot create `{dir}`: {e}")))?;
    }
    let json = cfg.out_path("json");
    let csv = cfg.out_path("csv");
    match cfg.command.as_str() {
        "roots" => {
            let (kernel, params) = (cfg.kernel()?, cfg.params()?);
            spectral::check_speed(&params)?;
            let rep = spectral::find_negative_roots(&kernel, &params);
            let mut text = String::from("index,z,gamma_w\n");
            for (k, (z, gw)) in rep.roots.iter().zip(&rep.gamma_w).enumerate() {
                let _ = writeln!(text, "{k},{},{}", fmt_f64(*z), fmt_f64(*gw));
            }
            std::fs::write(&csv, text)?;
            write_json(&json, &rep)?;
            let summary = format!(
                "roots={} maximal={} double_root={}",
                rep.roots.len(),
                rep.maximal_root().map(|z| z.to_string()).unwrap_or_else(|| "none".into()),
                rep.double_root_flag
            );
            Ok(Outcome { summary, files: vec![csv, json], status: 0 })
        }
        "verdict" => {
            let v = spectral::classify(&cfg.kernel()?, &cfg.params()?)?;
            write_json(&json, &v)?;
            let gw = v.gamma_w.map(|g| g.to_string()).unwrap_or_else(|| "none".into());
            let summary = format!("necessary={} sufficient={} gamma_w={gw}", v.necessary_holds, v.sufficient_holds);
            Ok(Outcome { summary, files: vec![json], status: 0 })
        }
        "threshold" => {
            let family = cfg.family()?;
            let gamma = cfg.req_number("gamma")?;
            if family == KernelFamily::LocalDiscreteDelay {
                let strip = gamma * ((1.0 + gamma) / gamma).ln();
                let set = match cfg.number("tau")? {
                    Some(tau) => Some(spectral::speed_interval_discrete(gamma, tau)?),
                    None => None,
                };
                #[derive(Serialize)]
                struct Discrete {
                    all_speeds_up_to_tau: f64,
                    speed_set: Option<SpeedSet>,
                }
                write_json(&json, &Discrete { all_speeds_up_to_tau: strip, speed_set: set })?;
                let mut summary = format!("all_speeds_up_to_tau={strip}");
                if let Some(s) = set {
                    let _ = write!(summary, " speed_set={s:?}");
                }
                Ok(Outcome { summary, files: vec![json], status: 0 })
            } else {
                let t = spectral::closed_form_threshold(family, gamma)?;
                write_json(&json, &t)?;
                let summary = format!("sufficient={} necessary={}", t.sufficient, t.necessary);
                Ok(Outcome { summary, files: vec![json], status: 0 })
            }
        }
        "region" => {
            let family = cfg.family()?;
            let gamma = cfg.req_number("gamma")?;
            let d = cfg.d()?;
            let taus = linspace(
                cfg.number_or("tau_min", 0.05)?,
                cfg.number_or("tau_max", 2.0)?,
                cfg.count("tau_n", 40)?,
            );
            let cmin = cfg.speed("c_min", d)?.unwrap_or(2.0 * d.sqrt());
            let cmax = cfg.speed("c_max", d)?.unwrap_or(3.0 * cmin);
            let cs = linspace(cmin, cmax, cfg.count("c_n", 20)?);
            let table = spectral::region_sweep(family, gamma, d, &taus, &cs)?;
            let bpath = cfg.out_path("boundaries.csv");
            std::fs::write(&csv, table.cells_csv())?;
            std::fs::write(&bpath, table.boundaries_csv())?;
            write_json(&json, &table)?;
            let suff = table.cells.iter().filter(|c| c.sufficient).count();
            let nec = table.cells.iter().filter(|c| c.necessary).count();
            let summary = format!(
                "cells={} sufficient={suff} necessary={nec} boundary_points={}",
                table.cells.len(),
                table.boundaries.len()
            );
            Ok(Outcome { summary, files: vec![csv, bpath, json], status: 0 })
        }
        "front" => {
            let (kernel, params) = (cfg.kernel()?, cfg.params()?);
            let mut opts = FrontOptions::default();
            opts.nodes = cfg.count("nodes", opts.nodes)?;
            opts.tol = cfg.number_or("tol", opts.tol)?;
            opts.max_iter = cfg.count("max_iter", opts.max_iter)?;
            if let (Some(a), Some(b)) = (cfg.number("t_min")?, cfg.number("t_max")?) {
                opts.grid = Some(Grid::with_zero_node(a, b, opts.nodes).map_err(|e| config_err("t_min", e.to_string()))?);
            }
            let sol = profile::solve_front(&kernel, &params, &opts)?;
            let report = profile::verify_front(&kernel, &params, &sol.profile)?;
            std::fs::write(&csv, profile::write_profile_csv(&sol.profile)?)?;
            #[derive(Serialize)]
            struct FrontJson<'a> {
                method: profile::FrontMethod,
                iterations: Option<usize>,
                last_gap: Option<f64>,
                sigma: Option<f64>,
                max_sandwich_excess: Option<f64>,
                verification: &'a profile::VerificationReport,
            }
            let it = sol.iteration.as_ref();
            write_json(
                &json,
                &FrontJson {
                    method: sol.method,
                    iterations: it.map(|r| r.iterations),
                    last_gap: it.map(|r| r.last_gap),
                    sigma: sol.alignment.map(|a| a.sigma),
                    max_sandwich_excess: it.map(|r| r.max_sandwich_excess),
                    verification: &report,
                },
            )?;
            let summary = format!(
                "method={:?} residual={:e} left_rate={} right_rate={} pass={}",
                sol.method, report.residual_sup, report.left_rate, report.right_rate, report.pass
            );
            Ok(Outcome { summary, files: vec![csv, json], status: 0 })
        }
        "verify" => {
            let prof = read_profile(cfg, "profile")?;
            let (kernel, params) = match (prof.meta, cfg.get("family")) {
                (Some(m), None) => (m.kernel, m.params),
                _ => (cfg.kernel()?, cfg.params()?),
            };
            let report = profile::verify_front(&kernel, &params, &prof)?;
            write_json(&json, &report)?;
            let summary = format!(
                "pass={} residual={:e} monotone_margin={:e} left_rate={} right_rate={} matched_root={}",
                report.pass,
                report.residual_sup,
                report.monotone_margin,
                report.left_rate,
                report.right_rate,
                report.matched_root.map(|z| z.to_string()).unwrap_or_else(|| "none".into())
            );
            Ok(Outcome { summary, files: vec![json], status: if report.pass { 0 } else { 3 } })
        }
        "uniqueness" => {
            let a = read_profile(cfg, "profile")?;
            let b = read_profile(cfg, "other")?;
            let rep = profile::uniqueness_test(&a, &b)?;
            write_json(&json, &rep)?;
            let summary = format!("t_prime={} sup_difference={:e}", rep.t_prime, rep.sup_difference);
            Ok(Outcome { summary, files: vec![json], status: 0 })
        }
        "simulate" => {
            if let Some(f) = cfg.get("family") {
                if f.parse::<KernelFamily>().ok() != Some(KernelFamily::NonlocalWeakGeneric) {
                    return Err(config_err("family", "simulate supports only the weak kernel"));
                }
            }
            let base = SimConfig::overshoot_example();
            let length = cfg.number_or("length", base.length)?;
            let sim = SimConfig {
                gamma: cfg.req_number("gamma")?,
                tau: cfg.req_number("tau")?,
                d: cfg.d()?,
                length,
                nx: cfg.count("nx", base.nx)?,
                dt: cfg.number("dt")?,
                t_end: cfg.number_or("t_end", base.t_end)?,
                initial: InitialData::Step { split: cfg.number_or("split", length * 5.0 / 6.0)? },
                snapshot_every: cfg.number_or("snapshot_every", base.snapshot_every)?,
            };
            let result = pde::run(&sim)?;
            let data = match cfg.get("format").unwrap_or("csv") {
                "csv" => {
                    std::fs::write(&csv, pde::snapshots_csv(&result))?;
                    csv
                }
                "binary" => {
                    let path = cfg.out_path("bin");
                    let file = std::fs::File::create(&path)?;
                    pde::write_snapshots_binary(&result, std::io::BufWriter::new(file))?;
                    path
                }
                other => return Err(config_err("format", format!("expected csv or binary, got `{other}`"))),
            };
            write_json(&json, &result.summary())?;
            let summary = format!(
                "speed={} shape={} overshoot_max={}",
                result.speed_estimate.map(|c| c.to_string()).unwrap_or_else(|| "none".into()),
                result.shape_class.map(|s| format!("{s:?}")).unwrap_or_else(|| "none".into()),
                result.overshoot_max.map(|o| o.to_string()).unwrap_or_else(|| "none".into())
            );
            Ok(Outcome { summary, files: vec![data, json], status: 0 })
        }
        other => Err(config_err("command", format!("unknown command `{other}`"))),
    }
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } | Error::Parse(_) | Error::Io(_) => 1,
        e if e.is_numerical() => 3,
        _ => 2,
    }
}

fn build_config(command: &str, flags: &Flags) -> Result<RunConfig> {
    let mut values = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| config_err("config", format!("cannot read `{}`: {e}", path.display())))?;
            parse_config_file(&text)?
        }
        None => BTreeMap::new(),
    };
    if let Some(c) = values.remove("command") {
        if c != command {
            return Err(config_err("command", format!("config file is for `{c}`, not `{command}`")));
        }
    }
    for (k, v) in flags.pairs() {
        if let Some(v) = v {
            values.insert(k.to_string(), v.clone());
        }
    }
    Ok(RunConfig { command: command.to_string(), values })
}

/// Entry point of the binary; returns the exit status.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let (command, flags) = cli.command.split();
    let result = build_config(command, &flags).and_then(|cfg| execute(&cfg));
    match result {
        Ok(out) => {
            println!("{}", out.summary);
            out.status
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expressions() {
        assert_eq!(eval_expr("2*sqrt(d)", 50.0).unwrap(), 2.0 * 50f64.sqrt());
        assert_eq!(eval_expr("14.1421356", 50.0).unwrap(), 14.1421356);
        assert_eq!(eval_expr("(1 + 2) / 4 - -1", 1.0).unwrap(), 1.75);
        assert_eq!(eval_expr("1e-3*2", 1.0).unwrap(), 2e-3);
        assert!(eval_expr("2*", 1.0).is_err());
        assert!(eval_expr("sqrt(d", 1.0).is_err());
        assert!(eval_expr("2 x", 1.0).is_err());
    }

    #[test]
    fn config_file_parsing() {
        let m = parse_config_file("# comment\nfamily = weak\ngamma=40 # trailing\nt-end = 5\n").unwrap();
        assert_eq!(m["family"], "weak");
        assert_eq!(m["gamma"], "40");
        assert_eq!(m["t_end"], "5");
        assert!(matches!(parse_config_file("bogus = 1"), Err(Error::Config { .. })));
        assert!(matches!(parse_config_file("no equals"), Err(Error::Config { .. })));
    }

    #[test]
    fn hash_ignores_output_dir_and_order() {
        let mut a = RunConfig { command: "verdict".into(), values: BTreeMap::new() };
        a.values.insert("gamma".into(), "1".into());
        a.values.insert("tau".into(), "0.3".into());
        let mut b = a.clone();
        b.values.insert("out_dir".into(), "/tmp/x".into());
        assert_eq!(a.hash(), b.hash());
        b.values.insert("tau".into(), "0.4".into());
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&config_err("x", "y")), 1);
        assert_eq!(exit_code(&Error::SpeedBound { c: 1.0, minimal: 2.0 }), 2);
        assert_eq!(exit_code(&Error::Divergence("x".into())), 3);
    }
}
