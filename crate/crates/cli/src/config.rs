//! Run configuration: `key=value` files merged under command-line flags.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::CliError;

/// Keys every subcommand accepts.
pub const COMMON_KEYS: &[&str] = &["output", "format", "threads"];

/// Parameter values for one run, with the resolved set kept for the
/// provenance line of the output.
pub struct Settings {
    command: &'static str,
    file: BTreeMap<String, String>,
    allowed: BTreeSet<&'static str>,
    resolved: BTreeMap<String, String>,
}

fn normalize_key(key: &str) -> String {
    key.trim().replace('_', "-")
}

impl Settings {
    pub fn new(command: &'static str, config: Option<&Path>, keys: &[&'static str]) -> Result<Self, CliError> {
        let allowed: BTreeSet<&'static str> = keys.iter().chain(COMMON_KEYS).copied().collect();
        let mut file = BTreeMap::new();
        if let Some(path) = config {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read config file {}: {e}", path.display())))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    CliError::Config(format!("{}:{}: expected key=value, got '{line}'", path.display(), lineno + 1))
                })?;
                let key = normalize_key(key);
                if !allowed.contains(key.as_str()) {
                    return Err(CliError::Config(format!(
                        "{}:{}: unknown key '{key}' for {command}",
                        path.display(),
                        lineno + 1
                    )));
                }
                file.insert(key, value.trim().to_string());
            }
        }
        Ok(Settings {
            command,
            file,
            allowed,
            resolved: BTreeMap::new(),
        })
    }

    pub fn command(&self) -> &'static str {
        self.command
    }

    fn raw(&self, key: &'static str, flag: Option<String>) -> Option<String> {
        debug_assert!(self.allowed.contains(key), "{key} not declared");
        flag.or_else(|| self.file.get(key).cloned())
    }

    /// Value from the flag, else the file, else `default`; recorded for provenance.
    pub fn get<T>(
        &mut self,
        key: &'static str,
        flag: Option<String>,
        default: &str,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<T, CliError> {
        let raw = self.raw(key, flag).unwrap_or_else(|| default.to_string());
        let value = parse(&raw).map_err(|e| CliError::Config(format!("invalid value '{raw}' for key '{key}': {e}")))?;
        self.resolved.insert(key.to_string(), raw);
        Ok(value)
    }

    /// Like [`Settings::get`] without a default.
    pub fn optional<T>(
        &mut self,
        key: &'static str,
        flag: Option<String>,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<Option<T>, CliError> {
        match self.raw(key, flag) {
            None => Ok(None),
            Some(raw) => {
                let value =
                    parse(&raw).map_err(|e| CliError::Config(format!("invalid value '{raw}' for key '{key}': {e}")))?;
                self.resolved.insert(key.to_string(), raw);
                Ok(Some(value))
            }
        }
    }

    /// Like [`Settings::optional`] but missing values are a config error.
    pub fn required<T>(
        &mut self,
        key: &'static str,
        flag: Option<String>,
        why: &str,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<T, CliError> {
        self.optional(key, flag, parse)?
            .ok_or_else(|| CliError::Config(format!("missing required key '{key}' ({why})")))
    }

    /// Output-affecting settings as `key=value` pairs in key order.
    /// `output` and `threads` do not change the data and are left out.
    pub fn provenance(&self) -> String {
        let mut parts = vec![format!("command={}", self.command)];
        parts.extend(
            self.resolved
                .iter()
                .filter(|(k, _)| k.as_str() != "output" && k.as_str() != "threads")
                .map(|(k, v)| format!("{k}={v}")),
        );
        parts.join(" ")
    }

    pub fn resolved(&self) -> &BTreeMap<String, String> {
        &self.resolved
    }
}

pub fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| "not a number".to_string())?;
    if !v.is_finite() {
        return Err("must be finite".into());
    }
    Ok(v)
}

pub fn parse_nonneg(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v < 0.0 {
        return Err("must be >= 0".into());
    }
    Ok(v)
}

pub fn parse_positive(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v <= 0.0 {
        return Err("must be > 0".into());
    }
    Ok(v)
}

pub fn parse_count(s: &str) -> Result<usize, String> {
    let v: usize = s.trim().parse().map_err(|_| "not a non-negative integer".to_string())?;
    if v == 0 {
        return Err("must be >= 1".into());
    }
    Ok(v)
}

pub fn parse_seed(s: &str) -> Result<u64, String> {
    s.trim().parse().map_err(|_| "not a 64-bit unsigned integer".to_string())
}

/// Radians as a decimal number or one of `pi`, `pi/2`, `pi/4`, optionally negated.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t),
    };
    let magnitude = match body {
        "pi" => PI,
        "pi/2" => PI / 2.0,
        "pi/4" => PI / 4.0,
        _ => return parse_f64(t),
    };
    Ok(sign * magnitude)
}

pub fn parse_tail_epsilon(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if !(v > 0.0 && v < 1.0) {
        return Err("must lie in (0, 1)".into());
    }
    Ok(v)
}

/// Comma-separated list.
pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    let items: Vec<T> = s
        .split(',')
        .map(|item| item.trim().parse::<T>().map_err(|e| format!("'{}': {e}", item.trim())))
        .collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err("empty list".into());
    }
    Ok(items)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

pub fn parse_format(s: &str) -> Result<Format, String> {
    match s.trim() {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        _ => Err("expected csv or json".into()),
    }
}
