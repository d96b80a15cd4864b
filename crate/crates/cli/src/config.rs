//! Run configuration: flat `key = value` files merged with command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use fracstiff::benchmarks::{catalog, Formulation, Ordering};
use fracstiff::LinalgMode;

use crate::Failure;

/// Keys accepted in config files and as flags.
pub const KEYS: [&str; 14] = [
    "problem",
    "alpha",
    "beta",
    "ordering",
    "tol",
    "eps",
    "t_end",
    "grid_d",
    "linalg",
    "formulation",
    "outputs",
    "out_csv",
    "out_stats",
    "max_error",
];

/// Raw key/value settings before validation. Later insertions win.
#[derive(Debug, Clone, Default)]
pub struct Settings(BTreeMap<String, String>);

impl Settings {
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), Failure> {
        if !KEYS.contains(&key) {
            return Err(Failure::Input(format!("unknown key '{key}'; expected one of {}", KEYS.join(", "))));
        }
        self.0.insert(key.to_string(), value.into());
        Ok(())
    }

    pub fn remove(&mut self, key: &str) {
        self.0.remove(key);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Settings, Failure> {
        let mut s = Settings::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Failure::Input(format!("config line {}: expected key = value", n + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if value.is_empty() {
                return Err(Failure::Input(format!("config line {}: empty value for '{key}'", n + 1)));
            }
            s.set(key, value).map_err(|e| Failure::Input(format!("config line {}: {}", n + 1, e.message())))?;
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Settings, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("cannot read config {}: {e}", path.display())))?;
        Settings::parse(&text)
    }

    /// `self` overridden by every key present in `over`.
    pub fn merged(mut self, over: &Settings) -> Settings {
        for (k, v) in &over.0 {
            self.0.insert(k.clone(), v.clone());
        }
        self
    }
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: String,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub ordering: Option<Ordering>,
    pub tol: f64,
    /// Kernel accuracy; defaults to `tol`.
    pub eps: f64,
    /// Horizon; the problem's default when `None`.
    pub t_end: Option<f64>,
    pub grid_d: Option<usize>,
    /// Chosen from the problem structure when `None`.
    pub linalg: Option<LinalgMode>,
    pub formulation: Formulation,
    pub outputs: usize,
    pub out_csv: Option<PathBuf>,
    pub out_stats: Option<PathBuf>,
    pub max_error: Option<f64>,
}

fn real(s: &Settings, key: &str) -> Result<Option<f64>, Failure> {
    s.get(key)
        .map(|v| {
            parse_real(v).ok_or_else(|| Failure::Input(format!("{key}: expected a real number, got '{v}'")))
        })
        .transpose()
}

/// Reals, optionally written as a fraction such as `1/3`.
fn parse_real(v: &str) -> Option<f64> {
    match v.split_once('/') {
        Some((a, b)) => Some(a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?),
        None => v.parse().ok(),
    }
    .filter(|x: &f64| x.is_finite())
}

fn integer(s: &Settings, key: &str) -> Result<Option<usize>, Failure> {
    s.get(key)
        .map(|v| v.parse().map_err(|_| Failure::Input(format!("{key}: expected a non-negative integer, got '{v}'"))))
        .transpose()
}

pub fn parse_linalg(v: &str) -> Result<LinalgMode, Failure> {
    match v {
        "dense" => Ok(LinalgMode::FullDense),
        "structured" => Ok(LinalgMode::DenseHead),
        "banded" => Ok(LinalgMode::BandedHead),
        _ => Err(Failure::Input(format!("linalg: expected dense, structured or banded, got '{v}'"))),
    }
}

fn parse_formulation(v: &str) -> Result<Formulation, Failure> {
    match v {
        "volt1" => Ok(Formulation::Volt1),
        "volt2" => Ok(Formulation::Volt2),
        "auto" => Ok(Formulation::Auto),
        _ => Err(Failure::Input(format!("formulation: expected volt1, volt2 or auto, got '{v}'"))),
    }
}

fn parse_ordering(v: &str) -> Result<Ordering, Failure> {
    match v {
        "by-species" => Ok(Ordering::BySpecies),
        "by-gridpoint" => Ok(Ordering::ByGridpoint),
        _ => Err(Failure::Input(format!("ordering: expected by-species or by-gridpoint, got '{v}'"))),
    }
}

impl RunConfig {
    pub fn from_settings(s: &Settings) -> Result<RunConfig, Failure> {
        let problem = s.get("problem").ok_or_else(|| Failure::Input("no problem given".into()))?.to_string();
        let spec = catalog()
            .into_iter()
            .find(|c| c.name == problem)
            .ok_or_else(|| Failure::Input(format!("unknown problem '{problem}'; see `fracstiff list`")))?;
        for key in ["alpha", "beta", "ordering", "grid_d", "formulation"] {
            if s.get(key).is_some() && !spec.parameters.iter().any(|p| p.0 == key) {
                return Err(Failure::Input(format!("{problem} has no parameter '{key}'")));
            }
        }
        let tol = real(s, "tol")?.unwrap_or(1e-6);
        let eps = real(s, "eps")?.unwrap_or(tol);
        for (key, v) in [("tol", tol), ("eps", eps)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Failure::Input(format!("{key} must lie in (0,1), got {v}")));
            }
        }
        let t_end = real(s, "t_end")?;
        if let Some(t) = t_end {
            if t <= 0.0 {
                return Err(Failure::Input(format!("t_end must be positive, got {t}")));
            }
        }
        let outputs = integer(s, "outputs")?.unwrap_or(1);
        if outputs == 0 {
            return Err(Failure::Input("outputs must be at least 1".into()));
        }
        Ok(RunConfig {
            problem,
            alpha: real(s, "alpha")?,
            beta: real(s, "beta")?,
            ordering: s.get("ordering").map(parse_ordering).transpose()?,
            tol,
            eps,
            t_end,
            grid_d: integer(s, "grid_d")?,
            linalg: s.get("linalg").map(parse_linalg).transpose()?,
            formulation: s.get("formulation").map(parse_formulation).transpose()?.unwrap_or(Formulation::Auto),
            outputs,
            out_csv: s.get("out_csv").map(PathBuf::from),
            out_stats: s.get("out_stats").map(PathBuf::from),
            max_error: real(s, "max_error")?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_fractions() {
        let s = Settings::parse("# run\nproblem = pde1d\nalpha = 1/3  # order\n\ntol=1e-6\n").unwrap();
        let cfg = RunConfig::from_settings(&s).unwrap();
        assert_eq!(cfg.problem, "pde1d");
        assert_eq!(cfg.alpha, Some(1.0 / 3.0));
        assert_eq!(cfg.eps, 1e-6);
        assert_eq!(cfg.outputs, 1);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(Settings::parse("problem = decay\ncolour = red\n").is_err());
        assert!(Settings::parse("problem decay\n").is_err());
        let bad = |text: &str| RunConfig::from_settings(&Settings::parse(text).unwrap()).is_err();
        assert!(bad("problem = decay\ntol = 2\n"));
        assert!(bad("problem = decay\nalpha = 0.5\n"));
        assert!(bad("problem = nonsense\n"));
        assert!(bad("problem = example1\noutputs = 0\n"));
        assert!(bad("problem = example1\nlinalg = sparse\n"));
        assert!(bad("problem = example1\nalpha = abc\n"));
    }

    #[test]
    fn later_settings_win() {
        let file = Settings::parse("problem = example1\ntol = 1e-4\n").unwrap();
        let mut flags = Settings::default();
        flags.set("tol", "1e-8").unwrap();
        let cfg = RunConfig::from_settings(&file.merged(&flags)).unwrap();
        assert_eq!((cfg.tol, cfg.eps), (1e-8, 1e-8));
    }
}
