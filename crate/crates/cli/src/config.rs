//! Flat `key=value` run configuration. Values come from the config file first
//! and are then overridden by command-line flags of the same name.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dephasing_qfi::schemes::DEFAULT_ALPHA_GRID;
use dephasing_qfi::verify::log_grid;
use dephasing_qfi::{NoiseParams, ProbeFamily, ProbeSpec, SchemeKind};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: expected `key = value`, got `{text}`")]
    Syntax {
        path: PathBuf,
        line: usize,
        text: String,
    },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    Value {
        key: String,
        value: String,
        reason: String,
    },
    #[error("{0}")]
    Invalid(String),
}

type Result<T> = std::result::Result<T, ConfigError>;

/// Every recognised key. Each one is also a command-line flag.
pub const KEYS: &[&str] = &[
    "scheme",
    "family",
    "n",
    "n1",
    "k1",
    "k2",
    "alpha",
    "alpha_opt",
    "alpha_grid",
    "alpha_min",
    "alpha_max",
    "alpha_count",
    "gamma_delta_b",
    "tau_c",
    "times",
    "t_min",
    "t_max",
    "t_count",
    "t_spacing",
    "out",
    "format",
    "threads",
];

/// Raw key/value pairs after merging file and flags.
#[derive(Debug, Default, Clone)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse_str(text: &str, origin: &Path) -> Result<Self> {
        let mut raw = Self::default();
        for (i, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| ConfigError::Syntax {
                path: origin.to_path_buf(),
                line: i + 1,
                text: line.to_string(),
            })?;
            raw.set(key.trim(), value.trim())?;
        }
        Ok(raw)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse_str(&text, path)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey(key.to_string()));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>().map_err(|e| ConfigError::Value {
                    key: key.to_string(),
                    value: v.to_string(),
                    reason: e.to_string(),
                })
            })
            .transpose()
    }

    fn parse_or<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.parse(key)?.unwrap_or(default))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            _ => Err("expected csv or jsonl".into()),
        }
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(ConfigError::Value {
            key: key.into(),
            value: v.into(),
            reason: "expected true or false".into(),
        }),
    }
}

/// Parses a float, also accepting `inf` and multiples of `pi` such as `pi/2`.
fn parse_real(key: &str, v: &str) -> Result<f64> {
    let bad = |reason: &str| ConfigError::Value {
        key: key.into(),
        value: v.into(),
        reason: reason.into(),
    };
    let s = v.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim().parse::<f64>().map_err(|_| bad("bad divisor"))?),
        None => (s, 1.0),
    };
    let x = match num.strip_suffix("pi") {
        Some("") => PI,
        Some(m) => {
            m.trim_end_matches('*')
                .parse::<f64>()
                .map_err(|_| bad("not a number"))?
                * PI
        }
        None => num.parse::<f64>().map_err(|_| bad("not a number"))?,
    };
    Ok(x / den)
}

fn real_key(raw: &RawConfig, key: &str, default: f64) -> Result<f64> {
    raw.get(key).map_or(Ok(default), |v| parse_real(key, v))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spacing {
    Lin,
    Log,
}

/// Fully validated run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub scheme: SchemeKind,
    pub families: Vec<ProbeFamily>,
    pub n: usize,
    pub n1: Option<usize>,
    pub k1: Option<usize>,
    pub k2: Option<usize>,
    pub alpha: f64,
    pub alpha_opt: bool,
    pub alpha_grid: usize,
    pub alphas: Vec<f64>,
    pub noise: NoiseParams,
    /// Interrogation times in seconds; `inf` selects the steady state.
    pub times: Vec<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub threads: usize,
}

fn grid(lo: f64, hi: f64, count: usize, spacing: Spacing) -> Vec<f64> {
    match (count, spacing) {
        (0, _) => Vec::new(),
        (1, _) => vec![lo],
        (_, Spacing::Log) => log_grid(lo, hi, count),
        (_, Spacing::Lin) => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

fn value_err(key: &str, value: impl ToString, reason: impl ToString) -> ConfigError {
    ConfigError::Value {
        key: key.into(),
        value: value.to_string(),
        reason: reason.to_string(),
    }
}

impl RunConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let scheme = raw
            .get("scheme")
            .map_or(Ok(SchemeKind::Standard), |v| v.parse::<SchemeKind>())
            .map_err(|e| value_err("scheme", raw.get("scheme").unwrap_or(""), e))?;
        let families = raw
            .get("family")
            .unwrap_or("GHZ")
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<ProbeFamily>()
                    .map_err(|e| value_err("family", f, e))
            })
            .collect::<Result<Vec<_>>>()?;

        let noise = NoiseParams::new(
            real_key(raw, "gamma_delta_b", NoiseParams::default().gamma_delta_b())?,
            real_key(raw, "tau_c", NoiseParams::default().tau_c())?,
        )
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;

        let times = match raw.get("times") {
            Some(list) => list
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| parse_real("times", s))
                .collect::<Result<Vec<_>>>()?,
            None => {
                let spacing = match raw.get("t_spacing").unwrap_or("log") {
                    "log" => Spacing::Log,
                    "lin" => Spacing::Lin,
                    other => return Err(value_err("t_spacing", other, "expected lin or log")),
                };
                let lo = real_key(raw, "t_min", 1e-5 * noise.tau_c())?;
                let hi = real_key(raw, "t_max", 10.0 * noise.tau_c())?;
                if spacing == Spacing::Log && lo <= 0.0 {
                    return Err(value_err("t_min", lo, "log spacing needs t_min > 0"));
                }
                grid(lo, hi, raw.parse_or("t_count", 50)?, spacing)
            }
        };
        if times.is_empty() {
            return Err(ConfigError::Invalid("time grid is empty".into()));
        }
        if let Some(&t) = times.iter().find(|t| t.is_nan() || **t < 0.0) {
            return Err(value_err("times", t, "times must be nonnegative"));
        }

        let alphas = grid(
            real_key(raw, "alpha_min", 0.0)?,
            real_key(raw, "alpha_max", PI)?,
            raw.parse_or("alpha_count", 181)?,
            Spacing::Lin,
        );

        let cfg = Self {
            scheme,
            families,
            n: raw.parse_or("n", 8)?,
            n1: raw.parse("n1")?,
            k1: raw.parse("k1")?,
            k2: raw.parse("k2")?,
            alpha: real_key(raw, "alpha", 0.0)?,
            alpha_opt: raw
                .get("alpha_opt")
                .map_or(Ok(false), |v| parse_bool("alpha_opt", v))?,
            alpha_grid: raw.parse_or("alpha_grid", DEFAULT_ALPHA_GRID)?,
            alphas,
            noise,
            times,
            out: raw.get("out").map(PathBuf::from),
            format: raw.parse_or("format", Format::Csv)?,
            threads: raw.parse_or("threads", 0)?,
        };
        if cfg.alpha_opt && cfg.alpha_grid < 2 {
            return Err(value_err("alpha_grid", cfg.alpha_grid, "need at least 2 points"));
        }
        cfg.probes()?;
        Ok(cfg)
    }

    /// One probe per configured family, with the split parameters that family
    /// takes. Checked against the scheme.
    pub fn probes(&self) -> Result<Vec<ProbeSpec>> {
        let n = self.n;
        let n1 = self.n1.unwrap_or(n / 2);
        let n2 = n.saturating_sub(n1);
        let mut out = Vec::with_capacity(self.families.len());
        for &family in &self.families {
            let p = match family {
                ProbeFamily::Ghz => ProbeSpec::ghz(n),
                ProbeFamily::DickeSymmetric => ProbeSpec::dicke(n),
                ProbeFamily::ProductPlus if self.scheme.is_differential() => ProbeSpec::product_split(n, n1),
                ProbeFamily::ProductPlus => ProbeSpec::product(n),
                ProbeFamily::Bsd => {
                    ProbeSpec::bsd(n, n1, self.k1.unwrap_or(n1 / 2), self.k2.unwrap_or(n2 / 2))
                }
                ProbeFamily::GhzBipartite => ProbeSpec::ghz_pair(n, n1),
                ProbeFamily::DfsOptimal => ProbeSpec::dfs_optimal(n),
            };
            let p = if family.supports_rotation() {
                p.with_alpha(self.alpha)
            } else {
                p
            };
            p.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
            if self.scheme.is_differential() && !p.is_bipartite() {
                return Err(ConfigError::Invalid(format!(
                    "scheme {} needs a bipartite probe family, got {family}",
                    self.scheme
                )));
            }
            if self.alpha_opt && !family.supports_rotation() {
                return Err(ConfigError::Invalid(format!(
                    "alpha_opt is set but {family} has no rotation angle"
                )));
            }
            out.push(p);
        }
        Ok(out)
    }
}
