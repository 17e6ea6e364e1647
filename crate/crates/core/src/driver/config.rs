//! `key = value` text configuration for parameter sweeps.
//!
//! Blank lines and `#` comments are ignored. Coefficient keys take a comma
//! separated list; the sweep is the Cartesian product in the order
//! `beta, lambda, theta, K, a0, c0, b0, mu, alpha, dt`.

use std::collections::BTreeMap;

use crate::assembly::ParameterSet;
use crate::error::{Error, Result};

const COEFF_KEYS: [&str; 10] = ["beta", "lambda", "theta", "K", "a0", "c0", "b0", "mu", "alpha", "dt"];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub case: String,
    pub levels: Vec<u32>,
    pub base: ParameterSet,
    /// Swept values per coefficient key, in product order.
    pub axes: Vec<(String, Vec<f64>)>,
    /// Estimate extreme eigenvalues of the preconditioned operator.
    pub spectrum: bool,
    /// Ties `a0` and `c0` (`c0` follows `a0`) instead of crossing them.
    pub tie_a0_c0: bool,
}

impl SweepConfig {
    /// Full beta/lambda/theta/K grid at `mu = 0.5, c0 = a0 = 2, b0 = alpha = 1`.
    pub fn robust() -> Self {
        SweepConfig {
            case: "robust".into(),
            levels: vec![1, 4],
            base: ParameterSet::sweep_base(),
            axes: vec![
                ("beta".into(), vec![1e-4, 1e-2, 1.0]),
                ("lambda".into(), vec![1.0, 1e3, 1e6]),
                ("theta".into(), vec![1e-6, 1e-3, 1.0]),
                ("K".into(), vec![1e-9, 1e-6, 1e-3, 1.0]),
            ],
            spectrum: false,
            tie_a0_c0: false,
        }
    }

    /// `a0, c0` in `{10, 1e3, 1e9}`, everything else one.
    pub fn storage() -> Self {
        SweepConfig {
            case: "storage".into(),
            levels: vec![3, 4, 5, 6],
            base: ParameterSet::unit(),
            axes: vec![("a0".into(), vec![1e1, 1e3, 1e9]), ("c0".into(), vec![1e1, 1e3, 1e9])],
            spectrum: false,
            tie_a0_c0: false,
        }
    }

    /// `a0 = b0 = c0 = 0`, lambda in `{1e6, 1e3, 1}`, everything else one.
    pub fn degenerate() -> Self {
        SweepConfig {
            case: "degenerate".into(),
            levels: vec![3, 4, 5, 6],
            base: ParameterSet { a0: 0.0, b0: 0.0, c0: 0.0, ..ParameterSet::unit() },
            axes: vec![("lambda".into(), vec![1e6, 1e3, 1.0])],
            spectrum: false,
            tie_a0_c0: false,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "robust" => Ok(Self::robust()),
            "storage" => Ok(Self::storage()),
            "degenerate" => Ok(Self::degenerate()),
            _ => Err(Error::Config(format!("unknown preset '{name}' (robust|storage|degenerate)"))),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            let k = k.trim();
            if map.insert(k.to_string(), v.trim().to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key '{k}'", n + 1)));
            }
        }
        let mut cfg = match map.remove("preset") {
            Some(p) => Self::preset(&p)?,
            None => SweepConfig {
                case: "sweep".into(),
                levels: vec![1],
                base: ParameterSet::sweep_base(),
                axes: vec![],
                spectrum: false,
                tie_a0_c0: false,
            },
        };
        if let Some(c) = map.remove("case") {
            cfg.case = c;
        }
        if let Some(l) = map.remove("levels") {
            cfg.levels = parse_levels(&l)?;
        }
        if let Some(s) = map.remove("spectrum") {
            cfg.spectrum = parse_bool(&s)?;
        }
        if let Some(s) = map.remove("tie_a0_c0") {
            cfg.tie_a0_c0 = parse_bool(&s)?;
        }
        for key in COEFF_KEYS {
            if let Some(v) = map.remove(key) {
                let vals = parse_list(key, &v)?;
                cfg.axes.retain(|(k, _)| k != key);
                if vals.len() == 1 {
                    set(&mut cfg.base, key, vals[0]);
                } else {
                    cfg.axes.push((key.to_string(), vals));
                }
            }
        }
        if let Some(k) = map.keys().next() {
            return Err(Error::Config(format!("unknown key '{k}'")));
        }
        cfg.axes.sort_by_key(|(k, _)| COEFF_KEYS.iter().position(|c| c == k));
        Ok(cfg)
    }

    /// Parameter points in deterministic product order.
    pub fn points(&self) -> Vec<ParameterSet> {
        let mut out = vec![self.base.clone()];
        for (key, vals) in &self.axes {
            if self.tie_a0_c0 && key == "c0" {
                continue;
            }
            let mut next = Vec::with_capacity(out.len() * vals.len());
            for p in &out {
                for &v in vals {
                    let mut q = p.clone();
                    set(&mut q, key, v);
                    if self.tie_a0_c0 && key == "a0" {
                        q.c0 = v;
                    }
                    next.push(q);
                }
            }
            out = next;
        }
        out
    }
}

fn set(p: &mut ParameterSet, key: &str, v: f64) {
    match key {
        "beta" => p.beta = v,
        "lambda" => p.lambda = v.into(),
        "theta" => p.theta = v.into(),
        "K" => p.k = v.into(),
        "a0" => p.a0 = v,
        "c0" => p.c0 = v,
        "b0" => p.b0 = v,
        "mu" => p.mu = v.into(),
        "alpha" => p.alpha = v,
        "dt" => p.dt = v,
        _ => unreachable!("checked against COEFF_KEYS"),
    }
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    let vals = v
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Config(format!("{key}: '{s}': {e}"))))
        .collect::<Result<Vec<_>>>()?;
    if vals.is_empty() {
        return Err(Error::Config(format!("{key}: empty list")));
    }
    Ok(vals)
}

fn parse_bool(s: &str) -> Result<bool> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("expected a boolean, got '{s}'"))),
    }
}

/// `3`, `3..6` (inclusive) or `1,4`.
pub fn parse_levels(s: &str) -> Result<Vec<u32>> {
    let bad = |e: std::num::ParseIntError| Error::Config(format!("levels '{s}': {e}"));
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (a.trim().parse::<u32>().map_err(bad)?, b.trim().parse::<u32>().map_err(bad)?);
        if a > b {
            return Err(Error::Config(format!("empty level range '{s}'")));
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|x| x.trim().parse::<u32>().map_err(bad)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn robust_grid_size_and_order() {
        let pts = SweepConfig::robust().points();
        assert_eq!(pts.len(), 3 * 3 * 3 * 4);
        assert_eq!(pts[0].beta, 1e-4);
        assert_eq!(pts[0].k.as_constant(), Some(1e-9));
        assert_eq!(pts[1].k.as_constant(), Some(1e-6));
        assert_eq!(pts.last().unwrap().beta, 1.0);
    }

    #[test]
    fn parses_text() {
        let cfg = SweepConfig::parse(
            "# comment\npreset = degenerate\nlevels = 3..4\nlambda = 1e6, 1\nmu = 2 # inline\nspectrum = yes\n",
        )
        .unwrap();
        assert_eq!(cfg.levels, vec![3, 4]);
        assert!(cfg.spectrum);
        let pts = cfg.points();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[1].lambda.as_constant(), Some(1.0));
        assert_eq!(pts[0].mu.as_constant(), Some(2.0));
        assert_eq!(pts[0].a0, 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SweepConfig::parse("lambda 3").is_err());
        assert!(SweepConfig::parse("nonsense = 1").is_err());
        assert!(SweepConfig::parse("K = x").is_err());
        assert!(SweepConfig::parse("K = 1\nK = 2").is_err());
        assert!(parse_levels("4..2").is_err());
        assert_eq!(parse_levels("1,4").unwrap(), vec![1, 4]);
    }

    #[test]
    fn tied_storage_coefficients() {
        let mut cfg = SweepConfig::storage();
        cfg.tie_a0_c0 = true;
        let pts = cfg.points();
        assert_eq!(pts.len(), 3);
        assert!(pts.iter().all(|p| p.a0 == p.c0));
    }
}
