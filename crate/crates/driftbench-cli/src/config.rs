//! `key=value` configuration files.
//!
//! Every subcommand accepts `--config FILE`; the file supplies defaults and
//! explicit flags always win. One shared key vocabulary covers all
//! subcommands so a single file can drive a whole generate/run/analyze
//! pipeline; each command simply ignores keys it has no use for. Blank
//! lines and `#` comments are skipped.

use crate::{usage, Failure};
use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

/// Keys any subcommand understands.
const KNOWN_KEYS: &[&str] = &[
    "agent",
    "baseline_method",
    "corpus",
    "count_per_domain",
    "domains",
    "endpoint",
    "k",
    "methods",
    "mock_policy",
    "model",
    "out",
    "out_dir",
    "paper_scale",
    "replicates",
    "rounds",
    "seed",
    "split",
    "workers",
];

pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn empty() -> Self {
        FileConfig { values: BTreeMap::new() }
    }

    /// Load a config file, or an empty config when no path was given.
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        match path {
            Some(p) => Self::parse_file(p, KNOWN_KEYS),
            None => Ok(Self::empty()),
        }
    }

    /// Load a file against a caller-chosen key set (mock policies).
    pub fn load_with(path: &Path, allowed: &[&str]) -> Result<Self, Failure> {
        Self::parse_file(path, allowed)
    }

    fn parse_file(path: &Path, allowed: &[&str]) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(usage(format!(
                    "{}:{}: expected key=value, got `{line}`",
                    path.display(),
                    i + 1
                )));
            };
            let key = key.trim().to_string();
            if !allowed.contains(&key.as_str()) {
                return Err(usage(format!(
                    "{}:{}: unknown key `{key}`",
                    path.display(),
                    i + 1
                )));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(FileConfig { values })
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>, Failure>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| usage(format!("config key `{key}`: {e}"))),
        }
    }

    pub fn get_raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

/// Flag value if given, else the config file's, else the default.
pub fn resolve<T>(flag: Option<T>, file: &FileConfig, key: &str, default: T) -> Result<T, Failure>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    Ok(resolve_opt(flag, file, key)?.unwrap_or(default))
}

pub fn resolve_opt<T>(flag: Option<T>, file: &FileConfig, key: &str) -> Result<Option<T>, Failure>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => file.get(key),
    }
}

/// Like [`resolve_opt`] but the value must come from somewhere.
pub fn resolve_required<T>(flag: Option<T>, file: &FileConfig, key: &str) -> Result<T, Failure>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    resolve_opt(flag, file, key)?
        .ok_or_else(|| usage(format!("--{} is required", key.replace('_', "-"))))
}
