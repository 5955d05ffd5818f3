//! Plain-text `key=value` configuration files, merged under explicit
//! flags.  The format is deliberately line-oriented and diffable; `#`
//! starts a comment, blank lines are ignored, keys use the long flag
//! spelling (`n-modes=64`).

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

/// Parsed config file: key -> (line number, raw value).
#[derive(Debug, Default)]
pub struct FileConfig {
    entries: BTreeMap<String, (usize, String)>,
}

impl FileConfig {
    pub fn empty() -> Self {
        FileConfig::default()
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config file {}: {e}", path.display()))
        })?;
        let mut entries = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "line {line_no}: expected key=value, got '{raw_line}'"
                )));
            };
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(CliError::Config(format!("line {line_no}: empty key")));
            }
            if entries.contains_key(&key) {
                return Err(CliError::Config(format!(
                    "line {line_no}: duplicate key '{key}'"
                )));
            }
            entries.insert(key, (line_no, value.trim().to_string()));
        }
        Ok(FileConfig { entries })
    }

    /// Typed lookup.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, raw)) => raw.parse::<T>().map(Some).map_err(|_| {
                CliError::Config(format!(
                    "line {line}: cannot parse value '{raw}' for key '{key}'"
                ))
            }),
        }
    }

    /// Reject keys outside the subcommand's vocabulary, naming the line.
    pub fn check_known(&self, known: &[&str]) -> Result<(), CliError> {
        for (key, (line, _)) in &self.entries {
            if !known.contains(&key.as_str()) {
                return Err(CliError::Config(format!(
                    "line {line}: unknown key '{key}'"
                )));
            }
        }
        Ok(())
    }
}

/// Flag value if given, else config value, else default.
pub fn resolve<T: FromStr + Clone>(
    flag: Option<T>,
    cfg: &FileConfig,
    key: &str,
    default: Option<T>,
) -> Result<T, CliError> {
    if let Some(v) = flag {
        return Ok(v);
    }
    if let Some(v) = cfg.get::<T>(key)? {
        return Ok(v);
    }
    default.ok_or_else(|| {
        CliError::Config(format!(
            "missing required value '{key}' (flag --{key} or config key {key})"
        ))
    })
}

/// Comma-separated list of floats (for ray angles, radii, time grids).
pub fn parse_f64_list(raw: &str) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for part in raw.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        out.push(part.parse::<f64>().map_err(|_| {
            CliError::Config(format!("cannot parse '{part}' as a number in list '{raw}'"))
        })?);
    }
    if out.is_empty() {
        return Err(CliError::Config(format!("empty number list '{raw}'")));
    }
    Ok(out)
}
