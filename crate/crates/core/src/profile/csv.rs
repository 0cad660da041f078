//! Profile CSV files.
//!
//! Comment lines starting with `#` carry the grid, kernel, parameters, tail
//! continuation and fitted rates, so a profile read back is bit-identical to
//! the one written. The data columns are `t,phi,F_phi,residual,one_minus_phi`;
//! the last column keeps the right tail at full precision.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::grid::{FrontMeta, Grid, Profile, TailExtension};
use super::operators::{Equation, FrontProblem};
use crate::error::{Error, Result};
use crate::io::{fmt_f64, parse_f64};
use crate::kernel::{KernelSpec, ModelParams};

pub const PROFILE_HEADER: &str = "t,phi,F_phi,residual,one_minus_phi";

pub fn write_profile_csv(p: &Profile) -> Result<String> {
    let mut out = String::from("# wavefront-lab profile\n");
    let g = p.grid;
    let _ = writeln!(out, "# grid t_min={} t_max={} n={}", fmt_f64(g.t_min), fmt_f64(g.t_max), g.n);
    let (f, res) = match p.meta {
        Some(m) => {
            let _ = writeln!(out, "# kernel family={} tau={}", m.kernel.family, fmt_f64(m.kernel.tau));
            let _ = writeln!(
                out,
                "# params c={} gamma={} d={}",
                fmt_f64(m.params.c),
                fmt_f64(m.params.gamma),
                fmt_f64(m.params.d)
            );
            let prob = FrontProblem::new(m.kernel, m.params, &g)?;
            (prob.reaction(Equation::Full, p).f, prob.residual(Equation::Full, p)?)
        }
        None => (vec![f64::NAN; g.n], vec![f64::NAN; g.n]),
    };
    let _ = writeln!(out, "# tails left={} right={}", fmt_f64(p.tails.left), fmt_f64(p.tails.right));
    let _ = writeln!(
        out,
        "# fit left_rate={} right_rate={} left_degree={} right_degree={}",
        fmt_f64(p.left_rate),
        fmt_f64(p.right_rate),
        p.left_degree,
        p.right_degree
    );
    out.push_str(PROFILE_HEADER);
    out.push('\n');
    for i in 0..p.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(g.t(i)),
            fmt_f64(p.values()[i]),
            fmt_f64(f[i]),
            fmt_f64(res[i]),
            fmt_f64(p.complement()[i])
        );
    }
    Ok(out)
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn read_profile_csv(text: &str) -> Result<Profile> {
    let mut sections: HashMap<String, HashMap<String, String>> = HashMap::new();
    let mut lines = text.lines();
    let mut header = None;
    for line in lines.by_ref() {
        if let Some(rest) = line.strip_prefix('#') {
            let mut words = rest.split_whitespace();
            if let Some(section) = words.next() {
                let kv = words
                    .filter_map(|w| w.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
                    .collect();
                sections.insert(section.to_string(), kv);
            }
        } else if !line.trim().is_empty() {
            header = Some(line.trim());
            break;
        }
    }
    if header != Some(PROFILE_HEADER) {
        return Err(parse_err(format!("expected header `{PROFILE_HEADER}`")));
    }
    let get = |sec: &str, key: &str| -> Result<&str> {
        sections
            .get(sec)
            .and_then(|s| s.get(key))
            .map(String::as_str)
            .ok_or_else(|| parse_err(format!("missing `{key}` in `# {sec}` line")))
    };
    let num = |sec: &str, key: &str| -> Result<f64> {
        let s = get(sec, key)?;
        parse_f64(s).ok_or_else(|| parse_err(format!("bad number `{s}` for {key}")))
    };
    let n: usize = get("grid", "n")?.parse().map_err(|_| parse_err("bad node count"))?;
    let grid = Grid::new(num("grid", "t_min")?, num("grid", "t_max")?, n)?;

    let mut phi = Vec::with_capacity(n);
    let mut comp = Vec::with_capacity(n);
    for (k, line) in lines.filter(|l| !l.trim().is_empty()).enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(parse_err(format!("data row {} has {} columns", k + 1, cols.len())));
        }
        let v = |j: usize| parse_f64(cols[j]).ok_or_else(|| parse_err(format!("bad number in row {}", k + 1)));
        phi.push(v(1)?);
        comp.push(v(4)?);
    }
    if phi.len() != n {
        return Err(parse_err(format!("expected {n} rows, found {}", phi.len())));
    }
    let mut p = Profile::from_parts(grid, phi, comp)?;
    p.tails = TailExtension { left: num("tails", "left")?, right: num("tails", "right")? };
    p.left_rate = num("fit", "left_rate")?;
    p.right_rate = num("fit", "right_rate")?;
    p.left_degree = get("fit", "left_degree")?.parse().map_err(|_| parse_err("bad left_degree"))?;
    p.right_degree = get("fit", "right_degree")?.parse().map_err(|_| parse_err("bad right_degree"))?;
    if sections.contains_key("kernel") {
        let kernel = KernelSpec::new(get("kernel", "family")?.parse()?, num("kernel", "tau")?)?;
        let params = ModelParams::new(num("params", "c")?, num("params", "gamma")?, num("params", "d")?)?;
        p.meta = Some(FrontMeta { kernel, params });
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelFamily;

    #[test]
    fn round_trip_is_exact() {
        let g = Grid::with_zero_node(-30.0, 30.0, 600).unwrap();
        let meta = FrontMeta {
            kernel: KernelSpec::new(KernelFamily::NonlocalWeakGeneric, 0.3).unwrap(),
            params: ModelParams::new(2.5, 1.0, 1.0).unwrap(),
        };
        let mut p = Profile::from_fn(g, |t| {
            let s = 1.0 / (1.0 + (-t).exp());
            (s, 1.0 / (1.0 + t.exp()))
        })
        .unwrap()
        .with_tails(TailExtension { left: 0.5, right: -0.25 })
        .with_meta(meta);
        p.fit_tails();
        let text = write_profile_csv(&p).unwrap();
        let q = read_profile_csv(&text).unwrap();
        assert_eq!(p, q);
        assert_eq!(text, write_profile_csv(&q).unwrap());
    }

    #[test]
    fn rejects_bad_header() {
        assert!(matches!(read_profile_csv("# grid t_min=-1 t_max=1 n=512\nt,phi\n"), Err(Error::Parse(_))));
    }
}
