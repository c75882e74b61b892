//! Config-file layer and shared parameter resolution.
//!
//! A config file is flat `key = value` text, one entry per line, `#` comments
//! allowed, lists comma-separated. Keys are spelled exactly like the long
//! flags they stand in for (`L`, `K`, `burn-in`, …). Resolution consumes keys
//! as it goes; anything left over at the end is an unknown key and rejects
//! the run, so a typo can never silently fall back to a default.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use torus_ising::lattice::{BoundaryCondition, CouplingParams};

use crate::{CliError, CliResult};

#[derive(Debug)]
pub struct FileConfig {
    map: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(FileConfig {
                map: BTreeMap::new(),
            });
        };
        let text = std::fs::read_to_string(path)?;
        let mut map = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "config line {}: expected 'key = value', got {line:?}",
                    idx + 1
                )));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(CliError::Usage(format!(
                    "config line {}: empty key",
                    idx + 1
                )));
            }
            if map.insert(key.clone(), value).is_some() {
                return Err(CliError::Usage(format!("duplicate config key '{key}'")));
            }
        }
        Ok(FileConfig { map })
    }

    /// The flag value if given, else the config-file value parsed as `T`.
    /// The key is consumed either way: a flag overrides its file entry.
    pub fn resolve<T>(&mut self, flag: Option<T>, key: &str) -> CliResult<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        let file_value = self.map.remove(key);
        if flag.is_some() {
            return Ok(flag);
        }
        match file_value {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|e| {
                CliError::Usage(format!("config key '{key}': cannot parse {raw:?}: {e}"))
            }),
        }
    }

    /// String-carried flag parsed into a domain type.
    pub fn resolve_parse<T>(&mut self, flag: Option<String>, key: &str) -> CliResult<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.resolve(flag, key)? {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| CliError::Usage(format!("--{key}: {e}"))),
        }
    }

    /// Comma-separated list from the flag or the file.
    pub fn resolve_list<T>(&mut self, flag: Option<String>, key: &str) -> CliResult<Option<Vec<T>>>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.resolve(flag, key)? {
            None => Ok(None),
            Some(raw) => parse_list(&raw, key).map(Some),
        }
    }

    /// Presence flag, which a file entry may set as `true`/`false`.
    pub fn resolve_flag(&mut self, flag: bool, key: &str) -> CliResult<bool> {
        let file_value = self.map.remove(key);
        if flag {
            return Ok(true);
        }
        match file_value.as_deref() {
            None => Ok(false),
            Some("true") => Ok(true),
            Some("false") => Ok(false),
            Some(other) => Err(CliError::Usage(format!(
                "config key '{key}' must be true or false, got {other:?}"
            ))),
        }
    }

    /// Rejects any keys that no flag consumed.
    pub fn finish(self) -> CliResult<()> {
        if let Some(key) = self.map.keys().next() {
            return Err(CliError::Usage(format!("unknown config key '{key}'")));
        }
        Ok(())
    }
}

pub fn parse_list<T>(raw: &str, what: &str) -> CliResult<Vec<T>>
where
    T: FromStr,
    T::Err: Display,
{
    let items: CliResult<Vec<T>> = raw
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|e| CliError::Usage(format!("{what}: cannot parse '{s}': {e}")))
        })
        .collect();
    let items = items?;
    if items.is_empty() {
        return Err(CliError::Usage(format!("{what}: empty list")));
    }
    Ok(items)
}

pub fn require<T>(value: Option<T>, what: &str) -> CliResult<T> {
    value.ok_or_else(|| {
        CliError::Usage(format!(
            "missing required parameter {what} (give the flag or a config-file entry)"
        ))
    })
}

/// Resolves the coupling list from exactly one of `--K` and `--T`
/// (`K = J/(k_B·T)` with `J = k_B = 1`). Physics parameters have no
/// defaults: omitting both is an error.
pub fn couplings_from(ks: Option<Vec<f64>>, ts: Option<Vec<f64>>) -> CliResult<Vec<f64>> {
    match (ks, ts) {
        (Some(_), Some(_)) => Err(CliError::Usage(
            "give exactly one of --K and --T, not both".into(),
        )),
        (None, None) => Err(CliError::Usage("a coupling is required: --K or --T".into())),
        (Some(ks), None) => Ok(ks),
        (None, Some(ts)) => ts
            .into_iter()
            .map(|t| {
                CouplingParams::<f64>::new(1.0, t, 1.0)
                    .map(|p| p.k())
                    .map_err(CliError::from)
            })
            .collect(),
    }
}

/// Single-valued version of [`couplings_from`].
pub fn coupling_from(k: Option<f64>, t: Option<f64>) -> CliResult<f64> {
    let ks = couplings_from(k.map(|v| vec![v]), t.map(|v| vec![v]))?;
    Ok(ks[0])
}

/// Parses a boundary-condition list, accepting the shorthand `both`.
pub fn bc_list(raw: Option<String>) -> CliResult<Vec<BoundaryCondition>> {
    let raw = raw.unwrap_or_else(|| "both".into());
    if raw.trim().eq_ignore_ascii_case("both") {
        return Ok(vec![BoundaryCondition::Open, BoundaryCondition::Torus]);
    }
    parse_list::<BoundaryCondition>(&raw, "bc").map_err(|e| match e {
        CliError::Usage(m) => CliError::Usage(format!("{m} (expected open, torus, or both)")),
        other => other,
    })
}

/// Joins list values for the header echo.
pub fn echo_list<T: Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}
