//! Flat key = value configuration files.
//!
//! Lines are `key = value`, `#` starts a comment, blank lines are ignored.
//! The CLI documents the keys each subcommand reads; this module only
//! provides parsing and typed access with line-accurate errors.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "config: {}", self.message)
        } else {
            write!(f, "config line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, (usize, String)>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError { line, message: format!("expected key = value, got {content:?}") });
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(ConfigError { line, message: "empty key".into() });
            }
            if values.insert(key.clone(), (line, value)).is_some() {
                return Err(ConfigError { line, message: format!("duplicate key {key:?}") });
            }
        }
        Ok(Config { values })
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(|s| s.as_str())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str, ConfigError> {
        self.get(key).ok_or_else(|| ConfigError { line: 0, message: format!("missing key {key:?}") })
    }

    fn typed<T: std::str::FromStr>(&self, key: &str, what: &str) -> Result<T, ConfigError> {
        let (line, raw) = self
            .values
            .get(key)
            .ok_or_else(|| ConfigError { line: 0, message: format!("missing key {key:?}") })?;
        raw.parse().map_err(|_| ConfigError {
            line: *line,
            message: format!("key {key:?}: expected {what}, got {raw:?}"),
        })
    }

    pub fn get_u64(&self, key: &str) -> Result<u64, ConfigError> {
        self.typed(key, "an unsigned integer")
    }

    pub fn get_u64_or(&self, key: &str, default: u64) -> Result<u64, ConfigError> {
        if self.get(key).is_none() {
            return Ok(default);
        }
        self.get_u64(key)
    }

    pub fn get_usize(&self, key: &str) -> Result<usize, ConfigError> {
        self.typed(key, "an unsigned integer")
    }

    pub fn get_f64(&self, key: &str) -> Result<f64, ConfigError> {
        self.typed(key, "a number")
    }

    pub fn get_f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        if self.get(key).is_none() {
            return Ok(default);
        }
        self.get_f64(key)
    }

    fn list<T: std::str::FromStr>(&self, key: &str, what: &str) -> Result<Vec<T>, ConfigError> {
        let (line, raw) = self
            .values
            .get(key)
            .ok_or_else(|| ConfigError { line: 0, message: format!("missing key {key:?}") })?;
        raw.split(',')
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse().map_err(|_| ConfigError {
                    line: *line,
                    message: format!("key {key:?}: expected a comma list of {what}, got {s:?}"),
                })
            })
            .collect()
    }

    pub fn get_f64_list(&self, key: &str) -> Result<Vec<f64>, ConfigError> {
        self.list(key, "numbers")
    }

    pub fn get_usize_list(&self, key: &str) -> Result<Vec<usize>, ConfigError> {
        self.list(key, "unsigned integers")
    }
}
