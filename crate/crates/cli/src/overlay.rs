use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{Context, Result};

use crate::UsageError;

/// Keys accepted in a config overlay file.
pub const KEYS: [&str; 13] = [
    "kind",
    "N",
    "window",
    "lattice_step",
    "padding",
    "encoding",
    "center",
    "sigma",
    "sigma_grid",
    "C",
    "seed",
    "ratio",
    "trials",
];

/// `key=value` settings read from a config file.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Overlay {
    values: BTreeMap<String, String>,
}

impl Overlay {
    pub fn load(path: Option<&Path>) -> Result<Overlay> {
        let Some(path) = path else {
            return Ok(Overlay::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Overlay::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Overlay> {
        let mut values = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| UsageError(format!("config line {}: expected key=value", no + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(
                    UsageError(format!("config line {}: unknown key `{k}`", no + 1)).into(),
                );
            }
            values.insert(k.to_string(), v.to_string());
        }
        Ok(Overlay { values })
    }

    /// `flag`, else the overlay value for `key`, parsed.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| UsageError(format!("config key `{key}`: cannot parse `{v}`")).into()),
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}
