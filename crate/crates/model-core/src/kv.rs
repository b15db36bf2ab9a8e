//! Flat `key = value` config files.
//!
//! One assignment per line. `#` starts a comment anywhere on a line; blank
//! lines are ignored. Keys are identifiers (`[A-Za-z0-9_]`), values are
//! whatever remains after trimming, and all quantities are SI units. Keys
//! mirror the config struct field names, e.g.:
//!
//! ```text
//! # nylon guitar string tuned to B3
//! length_m        = 0.65
//! tension_n       = 60.0
//! linear_density  = 5.82e-4
//! ```
//!
//! Duplicate keys are rejected so a typo cannot silently override an
//! earlier value. Readers mark the keys they consume; whatever remains
//! afterwards is reported by [`KvFile::unused`] so callers can reject
//! misspelled keys.

use crate::error::ConfigError;

#[derive(Debug, Clone)]
struct Entry {
    key: String,
    value: String,
    line: usize,
    consumed: bool,
}

/// A parsed config file: ordered key/value pairs with line provenance.
#[derive(Debug, Clone, Default)]
pub struct KvFile {
    entries: Vec<Entry>,
}

impl KvFile {
    /// Parses config text. Fails on syntax errors (a line with no `=`, an
    /// empty or non-identifier key, an empty value) and on duplicate keys,
    /// reporting 1-based line numbers.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries: Vec<Entry> = Vec::new();
        for (index, raw_line) in text.lines().enumerate() {
            let line = index + 1;
            let content = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            let content = content.trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Parse {
                    line,
                    message: format!("expected `key = value`, got {content:?}"),
                });
            };
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(ConfigError::Parse {
                    line,
                    message: format!("invalid key {key:?}"),
                });
            }
            if value.is_empty() {
                return Err(ConfigError::Parse {
                    line,
                    message: format!("key {key:?} has no value"),
                });
            }
            if let Some(previous) = entries.iter().find(|e| e.key == key) {
                return Err(ConfigError::Parse {
                    line,
                    message: format!(
                        "duplicate key {key:?} (first set on line {})",
                        previous.line
                    ),
                });
            }
            entries.push(Entry {
                key: key.to_owned(),
                value: value.to_owned(),
                line,
                consumed: false,
            });
        }
        Ok(Self { entries })
    }

    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        let entry = self.entries.iter_mut().find(|e| e.key == key)?;
        entry.consumed = true;
        Some((entry.value.clone(), entry.line))
    }

    fn parse_f64(key: &str, value: &str, line: usize) -> Result<f64, ConfigError> {
        value.parse::<f64>().map_err(|_| ConfigError::Parse {
            line,
            message: format!("key {key:?}: {value:?} is not a number"),
        })
    }

    fn parse_usize(key: &str, value: &str, line: usize) -> Result<usize, ConfigError> {
        value.parse::<usize>().map_err(|_| ConfigError::Parse {
            line,
            message: format!("key {key:?}: {value:?} is not a nonnegative integer"),
        })
    }

    pub fn require_f64(&mut self, key: &'static str) -> Result<f64, ConfigError> {
        let (value, line) = self.take(key).ok_or(ConfigError::MissingKey(key))?;
        Self::parse_f64(key, &value, line)
    }

    pub fn f64_or(&mut self, key: &'static str, default: f64) -> Result<f64, ConfigError> {
        match self.take(key) {
            Some((value, line)) => Self::parse_f64(key, &value, line),
            None => Ok(default),
        }
    }

    pub fn require_usize(&mut self, key: &'static str) -> Result<usize, ConfigError> {
        let (value, line) = self.take(key).ok_or(ConfigError::MissingKey(key))?;
        Self::parse_usize(key, &value, line)
    }

    pub fn usize_or(&mut self, key: &'static str, default: usize) -> Result<usize, ConfigError> {
        match self.take(key) {
            Some((value, line)) => Self::parse_usize(key, &value, line),
            None => Ok(default),
        }
    }

    /// Keys no reader consumed, in file order.
    pub fn unused(&self) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| !e.consumed)
            .map(|e| e.key.as_str())
            .collect()
    }

    /// Fails with [`ConfigError::UnknownKey`] if any key was never consumed.
    pub fn reject_unused(&self) -> Result<(), ConfigError> {
        match self.unused().first() {
            Some(key) => Err(ConfigError::UnknownKey((*key).to_owned())),
            None => Ok(()),
        }
    }
}
