//! `key=value` config files and their merge with command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

/// Keys accepted in a config file, named like the long flags.
pub const KEYS: [&str; 9] = [
    "phi-min", "phi-max", "steps", "n-list", "out", "seed", "level", "model", "phi",
];

/// Parsed config file. Blank lines and lines starting with `#` are skipped.
#[derive(Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config line {}: expected key=value, got {line:?}", k + 1);
            };
            let key = key.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                bail!("config line {}: unknown key {key:?}", k + 1);
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn load_opt(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// The flag if given, else the file entry parsed with `parse`, else `None`.
    pub fn pick<T>(
        &self,
        flag: Option<T>,
        key: &str,
        parse: impl FnOnce(&str) -> Result<T>,
    ) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|v| parse(v).with_context(|| format!("config key {key}")))
            .transpose()
    }

    pub fn pick_path(&self, flag: Option<PathBuf>) -> Result<Option<PathBuf>> {
        self.pick(flag, "out", |v| Ok(PathBuf::from(v)))
    }
}

pub fn parse_f64(text: &str) -> Result<f64> {
    let x: f64 = text.trim().parse().with_context(|| format!("not a number: {text:?}"))?;
    if !x.is_finite() {
        bail!("not a finite number: {text:?}");
    }
    Ok(x)
}

pub fn parse_usize(text: &str) -> Result<usize> {
    text.trim().parse().with_context(|| format!("not a non-negative integer: {text:?}"))
}

pub fn parse_u64(text: &str) -> Result<u64> {
    text.trim().parse().with_context(|| format!("not a non-negative integer: {text:?}"))
}

/// Comma-separated sizes; `a:b` expands to the inclusive range.
pub fn parse_n_list(text: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.split_once(':') {
            Some((a, b)) => {
                let (a, b) = (parse_usize(a)?, parse_usize(b)?);
                if a > b {
                    bail!("empty range {item:?}");
                }
                out.extend(a..=b);
            }
            None => out.push(parse_usize(item)?),
        }
    }
    if out.is_empty() {
        bail!("empty size list");
    }
    if out.contains(&0) {
        bail!("chain sizes must be positive");
    }
    Ok(out)
}
