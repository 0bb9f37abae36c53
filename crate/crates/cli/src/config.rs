//! Plain-text `key = value` configuration.
//!
//! One entry per line; `#` starts a comment; blank lines are ignored. Keys
//! are lower-case identifiers. Later entries (and `--set key=value` flags)
//! override earlier ones. Every subcommand declares the keys it accepts and
//! rejects the rest.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::str::FromStr;

use num_rational::Rational64;
use rieszlab::inequality::parse_exact;

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

fn parse_entry(line: &str) -> Result<Option<(String, String)>, String> {
    let line = line.split('#').next().unwrap_or("").trim();
    if line.is_empty() {
        return Ok(None);
    }
    let (key, value) = line.split_once('=').ok_or_else(|| format!("expected key = value, got {line:?}"))?;
    let key = key.trim();
    if key.is_empty() || !key.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_') {
        return Err(format!("invalid key {key:?}"));
    }
    Ok(Some((key.to_string(), value.trim().to_string())))
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Config::default();
        for (n, line) in text.lines().enumerate() {
            if let Some((k, v)) = parse_entry(line).map_err(|e| CliError::Usage(format!("line {}: {e}", n + 1)))? {
                cfg.entries.insert(k, v);
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn apply_overrides(&mut self, overrides: &[String]) -> Result<(), CliError> {
        for o in overrides {
            match parse_entry(o) {
                Ok(Some((k, v))) => {
                    self.entries.insert(k, v);
                }
                _ => return Err(CliError::Usage(format!("bad override {o:?}, expected key=value"))),
            }
        }
        Ok(())
    }

    pub fn set_default(&mut self, key: &str, value: &str) {
        self.entries.entry(key.to_string()).or_insert_with(|| value.to_string());
    }

    /// Fails on keys outside `allowed`.
    pub fn restrict(&self, allowed: &[&str]) -> Result<(), CliError> {
        match self.entries.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(CliError::Usage(format!("unknown key {k:?}; accepted: {}", allowed.join(", ")))),
            None => Ok(()),
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.raw(key).unwrap_or(default)
    }

    pub fn parse_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| bad(key, v)),
        }
    }

    /// Floats also accept `pi` and `2pi`.
    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => parse_f64(v).ok_or_else(|| bad(key, v)),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(v) => Err(bad(key, v)),
        }
    }

    /// Comma-separated floats.
    pub fn f64_list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        match self.raw(key) {
            None => Ok(default.to_vec()),
            Some(v) => v.split(',').map(|s| parse_f64(s.trim()).ok_or_else(|| bad(key, v))).collect(),
        }
    }

    pub fn rational_list(&self, key: &str) -> Result<Option<Vec<Rational64>>, CliError> {
        self.raw(key)
            .map(|v| v.split(',').map(|s| parse_exact(s).map_err(|_| bad(key, v))).collect())
            .transpose()
    }

    pub fn rational_or(&self, key: &str, default: Rational64) -> Result<Rational64, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => parse_exact(v).map_err(|_| bad(key, v)),
        }
    }
}

fn bad(key: &str, value: &str) -> CliError {
    CliError::Usage(format!("invalid value {value:?} for {key}"))
}

fn parse_f64(s: &str) -> Option<f64> {
    match s {
        "pi" => Some(PI),
        "2pi" => Some(2.0 * PI),
        _ => s.parse().ok().filter(|v: &f64| v.is_finite()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_overrides() {
        let mut c = Config::parse("# header\ndim = 3\n\n delta=2 # trailing\n").unwrap();
        assert_eq!(c.raw("dim"), Some("3"));
        assert_eq!(c.f64_or("delta", 0.0).unwrap(), 2.0);
        c.apply_overrides(&["delta=1.5".into()]).unwrap();
        assert_eq!(c.f64_or("delta", 0.0).unwrap(), 1.5);
        assert_eq!(c.f64_or("missing", 7.0).unwrap(), 7.0);
        assert!(c.restrict(&["dim", "delta"]).is_ok());
        assert!(c.restrict(&["dim"]).is_err());
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(Config::parse("no equals sign").is_err());
        assert!(Config::parse("Bad Key = 1").is_err());
        let c = Config::parse("n = seven\nlength = 2pi\nr = 3/2, 1.2").unwrap();
        assert!(c.parse_or::<usize>("n", 0).is_err());
        assert_eq!(c.f64_or("length", 0.0).unwrap(), 2.0 * PI);
        assert_eq!(c.rational_list("r").unwrap().unwrap(), vec![Rational64::new(3, 2), Rational64::new(6, 5)]);
        assert!(Config::default().apply_overrides(&["x".into()]).is_err());
    }
}
