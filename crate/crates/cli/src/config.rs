//! Parameter values from flags and an optional `key = value` config file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use benney_core::Family;
use clap::{Args, ValueEnum};

use crate::Failure;

pub const DEFAULT_GRID_SIZE: usize = 256;
pub const MIN_GRID_SIZE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Flags shared by every subcommand. Numeric parameters accept a single value,
/// a comma list (`0.2,0.5,0.8`) or `start:stop:count`.
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// dnoidal (dn) or snoidal (sn)
    #[arg(long)]
    pub family: Option<String>,
    /// Wave speed c (nonzero)
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<String>,
    /// Only shifts ψ by a constant; no spectral quantity depends on it [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<String>,
    /// Elliptic modulus in (0, 1)
    #[arg(long)]
    pub kappa: Option<String>,
    /// Grid points per period, even and at least 64 [default: 256]
    #[arg(long)]
    pub grid_size: Option<String>,
    /// Output file (directory for `figures`); standard output if absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// File of `key = value` lines using the flag names; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Merged settings with every value still in text form.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

const KEYS: [&str; 10] = ["family", "c", "beta", "sigma", "omega", "kappa", "grid-size", "out", "format", "operator"];

impl Settings {
    pub fn from_args(args: &ParamArgs, extra: &[(&str, Option<String>)]) -> Result<Self, Failure> {
        let mut s = match &args.config {
            Some(path) => Self::read_config(path)?,
            None => Self::default(),
        };
        let flags = [
            ("family", &args.family),
            ("c", &args.c),
            ("beta", &args.beta),
            ("sigma", &args.sigma),
            ("omega", &args.omega),
            ("kappa", &args.kappa),
            ("grid-size", &args.grid_size),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                s.values.insert(k.to_string(), v.clone());
            }
        }
        for (k, v) in extra {
            if let Some(v) = v {
                s.values.insert(k.to_string(), v.clone());
            }
        }
        if let Some(out) = &args.out {
            s.out = Some(out.clone());
        }
        if let Some(f) = args.format {
            s.format = Some(f);
        }
        Ok(s)
    }

    fn read_config(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut s = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Failure::Usage(format!("{}:{}: expected key = value", path.display(), i + 1)))?;
            let key = k.trim().trim_start_matches("--").replace('_', "-");
            let value = v.trim().to_string();
            if !KEYS.contains(&key.as_str()) {
                return Err(Failure::Usage(format!("{}:{}: unknown key '{key}'", path.display(), i + 1)));
            }
            match key.as_str() {
                "out" => s.out = Some(PathBuf::from(value)),
                "format" => {
                    s.format = Some(
                        Format::from_str(&value, true)
                            .map_err(|_| Failure::Usage(format!("unknown format '{value}'")))?,
                    )
                }
                _ => {
                    s.values.insert(key, value);
                }
            }
        }
        Ok(s)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Json)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn grid_size(&self) -> Result<usize, Failure> {
        let n = match self.raw("grid-size") {
            None => return Ok(DEFAULT_GRID_SIZE),
            Some(v) => v
                .parse::<usize>()
                .map_err(|_| Failure::Usage(format!("grid-size must be a positive integer, got '{v}'")))?,
        };
        if n < MIN_GRID_SIZE || !n.is_multiple_of(2) {
            return Err(Failure::Usage(format!("grid-size must be even and at least {MIN_GRID_SIZE}, got {n}")));
        }
        Ok(n)
    }

    pub fn families(&self) -> Result<Vec<Family>, Failure> {
        let raw = self.raw("family").ok_or_else(|| Failure::Usage("missing --family".into()))?;
        raw.split(',')
            .map(|f| f.trim().parse::<Family>().map_err(|e| Failure::Usage(e.to_string())))
            .collect()
    }

    pub fn range(&self, key: &str) -> Result<Vec<f64>, Failure> {
        match self.raw(key) {
            Some(v) => parse_range(key, v),
            None if key == "omega" => Ok(vec![0.0]),
            None => Err(Failure::Usage(format!("missing --{key}"))),
        }
    }

    /// A parameter that must hold exactly one value.
    pub fn single(&self, key: &str) -> Result<f64, Failure> {
        match self.range(key)?.as_slice() {
            [v] => Ok(*v),
            vs => Err(Failure::Usage(format!("--{key} takes a single value here, got {} values", vs.len()))),
        }
    }

    pub fn single_family(&self) -> Result<Family, Failure> {
        match self.families()?.as_slice() {
            [f] => Ok(*f),
            fs => Err(Failure::Usage(format!("--family takes a single value here, got {}", fs.len()))),
        }
    }
}

/// `v`, `v1,v2,...` or `start:stop:count` (count ≥ 1, endpoints included).
pub fn parse_range(key: &str, text: &str) -> Result<Vec<f64>, Failure> {
    let bad = |what: &str| Failure::Usage(format!("--{key}: {what} in '{text}'"));
    let number = |s: &str| -> Result<f64, Failure> {
        let v: f64 = s.trim().parse().map_err(|_| bad("not a number"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad("non-finite value"))
        }
    };
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:stop:count"));
        }
        let (start, stop) = (number(parts[0])?, number(parts[1])?);
        let count: usize = parts[2].trim().parse().map_err(|_| bad("count is not a positive integer"))?;
        if count == 0 {
            return Err(bad("count must be at least 1"));
        }
        if count == 1 {
            return Ok(vec![start]);
        }
        let step = (stop - start) / (count - 1) as f64;
        return Ok((0..count).map(|i| if i + 1 == count { stop } else { start + step * i as f64 }).collect());
    }
    text.split(',').map(number).collect()
}
