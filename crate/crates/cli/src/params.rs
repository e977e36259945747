//! Typed access to the key-value parameters of a run, recording every value
//! actually used (defaults included) so it can be echoed into the output.

use std::collections::BTreeMap;
use std::str::FromStr;

use betagamma::grid::RangeSpec;

use crate::CliError;

/// Environment variable that replaces the built-in default tolerance.
pub const TOL_ENV: &str = "BETAGAMMA_TOL";

pub struct Params<'a> {
    raw: &'a BTreeMap<String, String>,
    used: BTreeMap<String, String>,
}

impl<'a> Params<'a> {
    pub fn new(raw: &'a BTreeMap<String, String>) -> Self {
        Self {
            raw,
            used: BTreeMap::new(),
        }
    }

    pub fn text(&mut self, key: &str, default: Option<&str>) -> Result<String, CliError> {
        let v = match (self.raw.get(key), default) {
            (Some(v), _) => v.clone(),
            (None, Some(d)) => d.to_string(),
            (None, None) => {
                return Err(CliError::config(format!(
                    "missing required parameter --{key}"
                )))
            }
        };
        self.used.insert(key.to_string(), v.clone());
        Ok(v)
    }

    pub fn parse<T: FromStr>(&mut self, key: &str, default: Option<&str>) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        let v = self.text(key, default)?;
        v.parse()
            .map_err(|e| CliError::config(format!("--{key} = {v:?}: {e}")))
    }

    pub fn f64(&mut self, key: &str, default: Option<&str>) -> Result<f64, CliError> {
        let v: f64 = self.parse(key, default)?;
        if !v.is_finite() {
            return Err(CliError::config(format!("--{key} must be finite")));
        }
        Ok(v)
    }

    pub fn positive(&mut self, key: &str, default: Option<&str>) -> Result<f64, CliError> {
        let v = self.f64(key, default)?;
        if v <= 0.0 {
            return Err(CliError::config(format!(
                "--{key} must be positive, got {v}"
            )));
        }
        Ok(v)
    }

    pub fn optional_positive(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        if self.raw.contains_key(key) {
            self.positive(key, None).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn range(&mut self, key: &str, default: Option<&str>) -> Result<Vec<f64>, CliError> {
        let spec: RangeSpec = self.parse(key, default)?;
        Ok(spec.points())
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&mut self, key: &str, default: Option<&str>) -> Result<Vec<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        let v = self.text(key, default)?;
        v.split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|e| CliError::config(format!("--{key} entry {s:?}: {e}")))
            })
            .collect()
    }

    /// `--tol`, else the environment override, else `default`.
    pub fn tol(&mut self, default: f64) -> Result<f64, CliError> {
        if self.raw.contains_key("tol") {
            return self.positive("tol", None);
        }
        let fallback = match std::env::var(TOL_ENV) {
            Ok(v) => v,
            Err(_) => format!("{default:e}"),
        };
        let v: f64 = fallback
            .parse()
            .map_err(|e| CliError::config(format!("{TOL_ENV} = {fallback:?}: {e}")))?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(CliError::config(format!(
                "tolerance must be positive, got {v}"
            )));
        }
        self.used.insert("tol".into(), fallback);
        Ok(v)
    }

    /// Fails on any key that no command consumed.
    pub fn finish(self) -> Result<BTreeMap<String, String>, CliError> {
        if let Some(k) = self.raw.keys().find(|k| !self.used.contains_key(*k)) {
            return Err(CliError::config(format!("unknown parameter --{k}")));
        }
        Ok(self.used)
    }
}
