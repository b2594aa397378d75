//! Flat `key = value` experiment files and flag/file/default resolution.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::CliError;

/// Keys a config file may set. Names match the long flags.
pub const KEYS: &[&str] = &[
    "r1",
    "sigma1",
    "r2",
    "f",
    "n",
    "dr",
    "delta",
    "seed",
    "seeds",
    "alpha",
    "tau",
    "sigma-init",
    "format",
    "out",
    "pin-center",
    "fd-check",
    "bracket",
    "r1-min",
    "r1-max",
    "r1-steps",
    "sigma1-min",
    "sigma1-max",
    "sigma1-steps",
    "log-sigma",
];

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    source: String,
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config file {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Blank lines and `#` comments are skipped; keys may repeat, the last
    /// one wins. Underscores in keys are read as dashes.
    pub fn parse(text: &str, source: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::BadInput(format!("{source}:{}: expected key = value", i + 1)))?;
            let key = key.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::BadInput(format!("{source}:{}: unknown key '{key}'", i + 1)));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Self {
            source: source.to_string(),
            values,
        })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| {
                CliError::BadInput(format!("{}: cannot parse {key} = '{v}'", self.source))
            }),
        }
    }
}

/// Flags take precedence over the file, the file over built-in defaults.
#[derive(Debug, Default, Clone)]
pub struct Resolver {
    file: Option<ConfigFile>,
}

impl Resolver {
    pub fn new(file: Option<ConfigFile>) -> Self {
        Self { file }
    }

    pub fn get<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match &self.file {
            Some(file) => file.parsed(key),
            None => Ok(None),
        }
    }

    pub fn or<T: FromStr>(&self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError> {
        Ok(self.get(key, flag)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<T, CliError> {
        self.get(key, flag)?
            .ok_or_else(|| CliError::BadInput(format!("missing required parameter --{key}")))
    }

    pub fn flag(&self, key: &str, flag: bool) -> Result<bool, CliError> {
        if flag {
            return Ok(true);
        }
        Ok(self.get::<bool>(key, None)?.unwrap_or(false))
    }
}

/// Comma-separated list such as `100,200,400`.
pub fn parse_list<T: FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| CliError::BadInput(format!("cannot parse {what} entry '{s}'"))))
        .collect()
}
