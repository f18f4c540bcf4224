//! Run configuration: flat `key = value` lines with dotted sections.
//!
//! ```text
//! schema_version = 1
//! seed = 42
//! system.name = det-2d
//! lp.cutoff_radius = certified
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::PathBuf;

use randcm_core::systems::{build_benchmark, Params, CATALOG};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    /// 1-based line, 0 when the problem is not tied to a line.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: {}", self.line, self.message)
        } else {
            f.write_str(&self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

fn err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError { line, message: message.into() }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetSettings {
    /// Top-k exponents for the spectrum export; `None` means all.
    pub k: Option<usize>,
    pub steps: usize,
    pub gap_threshold: f64,
    pub orbit_half_width: usize,
    pub growth_horizon: usize,
    pub safety_factor: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSettings {
    pub nu: f64,
    pub epsilon: Option<f64>,
    pub half_width: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// `None` uses the certified radius.
    pub cutoff_radius: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSettings {
    /// `None` uses min{ρ(ω), ρ(θω)}/2.
    pub radius: Option<f64>,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifySettings {
    pub steps: usize,
    pub tolerance: f64,
    pub pairs: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub schema_version: u32,
    pub seed: u64,
    pub system: String,
    pub params: Params,
    pub met: MetSettings,
    pub lp: LpSettings,
    pub grid: GridSettings,
    pub verify: VerifySettings,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            seed: 0,
            system: String::new(),
            params: Params::new(),
            met: MetSettings {
                k: None,
                steps: 10_000,
                gap_threshold: 0.05,
                orbit_half_width: 100,
                growth_horizon: 40,
                safety_factor: 1.25,
            },
            lp: LpSettings {
                nu: 0.2,
                epsilon: None,
                half_width: 40,
                tolerance: 1e-12,
                max_iterations: 200,
                cutoff_radius: None,
            },
            grid: GridSettings { radius: None, points: 21 },
            verify: VerifySettings { steps: 5, tolerance: 1e-6, pairs: 100 },
            output_dir: PathBuf::from("out"),
        }
    }
}

fn unquote(v: &str) -> &str {
    v.strip_prefix('"').and_then(|s| s.strip_suffix('"')).unwrap_or(v)
}

fn real(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = v.parse().map_err(|_| err(line, format!("{key}: expected a number, got '{v}'")))?;
    if !x.is_finite() {
        return Err(err(line, format!("{key}: must be finite")));
    }
    Ok(x)
}

fn positive(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    let x = real(line, key, v)?;
    if x <= 0.0 {
        return Err(err(line, format!("{key}: must be > 0")));
    }
    Ok(x)
}

fn count(line: usize, key: &str, v: &str, min: usize) -> Result<usize, ConfigError> {
    let n: usize = v.parse().map_err(|_| err(line, format!("{key}: expected a non-negative integer, got '{v}'")))?;
    if n < min {
        return Err(err(line, format!("{key}: must be >= {min}")));
    }
    Ok(n)
}

fn keyword_or<T>(
    v: &str,
    keyword: &str,
    parse: impl FnOnce() -> Result<T, ConfigError>,
) -> Result<Option<T>, ConfigError> {
    if v == keyword {
        Ok(None)
    } else {
        parse().map(Some)
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut seen = BTreeSet::new();
        let mut version = None;
        let mut param_lines = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| err(ln, "expected 'key = value'"))?;
            let (key, v) = (key.trim(), unquote(value.trim()));
            if key.is_empty() || v.is_empty() {
                return Err(err(ln, "empty key or value"));
            }
            if !seen.insert(key.to_string()) {
                return Err(err(ln, format!("duplicate key '{key}'")));
            }
            match key {
                "schema_version" => {
                    let n: u32 = v.parse().map_err(|_| err(ln, "schema_version must be an integer"))?;
                    if n != SCHEMA_VERSION {
                        return Err(err(ln, format!("unsupported schema_version {n} (expected {SCHEMA_VERSION})")));
                    }
                    version = Some(n);
                }
                "seed" => cfg.seed = v.parse().map_err(|_| err(ln, format!("seed: expected an unsigned integer, got '{v}'")))?,
                "system.name" => {
                    if !CATALOG.contains(&v) {
                        return Err(err(ln, format!("unknown system '{v}' (see `randcm catalog`)")));
                    }
                    cfg.system = v.to_string();
                }
                "met.k" => cfg.met.k = Some(count(ln, key, v, 1)?),
                "met.steps" => cfg.met.steps = count(ln, key, v, 1)?,
                "met.gap_threshold" => cfg.met.gap_threshold = positive(ln, key, v)?,
                "met.orbit_half_width" => cfg.met.orbit_half_width = count(ln, key, v, 1)?,
                "met.growth_horizon" => cfg.met.growth_horizon = count(ln, key, v, 1)?,
                "met.safety_factor" => {
                    cfg.met.safety_factor = real(ln, key, v)?;
                    if cfg.met.safety_factor < 1.0 {
                        return Err(err(ln, "met.safety_factor must be >= 1"));
                    }
                }
                "lp.nu" => cfg.lp.nu = positive(ln, key, v)?,
                "lp.epsilon" => cfg.lp.epsilon = keyword_or(v, "auto", || positive(ln, key, v))?,
                "lp.half_width" => cfg.lp.half_width = count(ln, key, v, 1)?,
                "lp.tolerance" => cfg.lp.tolerance = positive(ln, key, v)?,
                "lp.max_iterations" => cfg.lp.max_iterations = count(ln, key, v, 1)?,
                "lp.cutoff_radius" => cfg.lp.cutoff_radius = keyword_or(v, "certified", || positive(ln, key, v))?,
                "grid.radius" => cfg.grid.radius = keyword_or(v, "auto", || positive(ln, key, v))?,
                "grid.points" => cfg.grid.points = count(ln, key, v, 1)?,
                "verify.steps" => cfg.verify.steps = count(ln, key, v, 1)?,
                "verify.tolerance" => cfg.verify.tolerance = positive(ln, key, v)?,
                "verify.pairs" => cfg.verify.pairs = count(ln, key, v, 1)?,
                "output.dir" => cfg.output_dir = PathBuf::from(v),
                _ => match key.strip_prefix("system.") {
                    Some(param) if !param.is_empty() && !param.contains('.') => {
                        cfg.params.insert(param.to_string(), real(ln, key, v)?);
                        param_lines.insert(param.to_string(), ln);
                    }
                    _ => return Err(err(ln, format!("unknown key '{key}'"))),
                },
            }
        }
        if version.is_none() {
            return Err(err(0, "missing schema_version"));
        }
        if cfg.system.is_empty() {
            return Err(err(0, "missing system.name"));
        }
        if let Err(e) = build_benchmark(&cfg.system, &cfg.params, cfg.seed) {
            let msg = e.to_string();
            let line = param_lines.iter().find(|(k, _)| msg.contains(&format!("'{k}'"))).map_or(0, |(_, l)| *l);
            return Err(err(line, format!("system.{}: {msg}", cfg.system)));
        }
        if let Some(e) = cfg.lp.epsilon {
            if e >= cfg.lp.nu {
                return Err(err(0, "lp.epsilon must be smaller than lp.nu"));
            }
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal() {
        let c = RunConfig::parse("schema_version = 1\nsystem.name = det-2d\n").unwrap();
        assert_eq!(c.system, "det-2d");
        assert_eq!(c.lp.cutoff_radius, None);
        assert_eq!(c.grid.points, 21);
    }

    #[test]
    fn full() {
        let text = "\
# comment
schema_version = 1
seed = 7
system.name = \"additive-noise\"
system.sigma = 0.25   # trailing comment
met.steps = 500
lp.epsilon = 0.04
lp.cutoff_radius = 0.05
grid.radius = auto
output.dir = results
";
        let c = RunConfig::parse(text).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.params.get("sigma"), Some(&0.25));
        assert_eq!(c.lp.epsilon, Some(0.04));
        assert_eq!(c.lp.cutoff_radius, Some(0.05));
        assert_eq!(c.grid.radius, None);
        assert_eq!(c.output_dir, PathBuf::from("results"));
    }

    #[test]
    fn errors_carry_lines() {
        let e = RunConfig::parse("schema_version = 1\nsystem.name = det-2d\nlp.nuu = 0.1\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.message.contains("lp.nuu"));
        assert_eq!(RunConfig::parse("system.name = det-2d\n").unwrap_err().line, 0);
        assert_eq!(RunConfig::parse("schema_version = 2\n").unwrap_err().line, 1);
        assert_eq!(RunConfig::parse("schema_version = 1\nseed 3\n").unwrap_err().line, 2);
        assert_eq!(RunConfig::parse("schema_version = 1\nseed = 1\nseed = 2\n").unwrap_err().line, 3);
        assert_eq!(RunConfig::parse("schema_version = 1\nsystem.name = lorenz\n").unwrap_err().line, 2);
        assert!(RunConfig::parse("schema_version = 1\nsystem.name = det-2d\nlp.nu = -1\n").is_err());
        let e = RunConfig::parse("schema_version = 1\nsystem.sigmaa = 1\nsystem.name = additive-noise\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(RunConfig::parse("schema_version = 1\nsystem.name = det-2d\nlp.epsilon = 0.3\n").is_err());
    }
}
