//! Flat `key = value` configuration files and flag/file merging.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut entries = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected `key = value`, found `{line}`"),
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Parse {
                line: i + 1,
                message: "empty key".into(),
            });
        }
        if entries.insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("duplicate key `{key}`"),
            });
        }
    }
    Ok(entries)
}

/// Resolves each setting from its flag, then the config file, then the
/// default, and remembers the resolved values in order.
#[derive(Debug, Default)]
pub struct Settings {
    file: BTreeMap<String, String>,
    resolved: Vec<(String, String)>,
}

impl Settings {
    pub fn new(file: BTreeMap<String, String>) -> Self {
        Self {
            file,
            resolved: Vec::new(),
        }
    }

    fn from_file<T: FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        match self.file.remove(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| Error::InvalidParameter(format!("config key `{key}`: {e}"))),
        }
    }

    pub fn get<T: FromStr + fmt::Display>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        let file = self.from_file(key)?;
        let value = flag.or(file).unwrap_or(default);
        self.record(key, &value);
        Ok(value)
    }

    /// Like [`Settings::get`] without a default; absent values are not recorded.
    pub fn get_optional<T: FromStr + fmt::Display>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        let file = self.from_file(key)?;
        Ok(flag.or(file))
    }

    pub fn record(&mut self, key: &str, value: &dyn fmt::Display) {
        self.resolved.push((key.to_string(), value.to_string()));
    }

    /// Fails on config keys that no setting consumed.
    pub fn finish(self) -> Result<Vec<(String, String)>> {
        if let Some(key) = self.file.keys().next() {
            return Err(Error::InvalidParameter(format!("unknown config key `{key}`")));
        }
        Ok(self.resolved)
    }
}

/// Comma-separated integers, with `a-b` for inclusive runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntList(pub Vec<u32>);

impl FromStr for IntList {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let bad = || Error::InvalidParameter(format!("bad integer list item `{part}`"));
            match part.split_once('-') {
                Some((a, b)) => {
                    let a: u32 = a.trim().parse().map_err(|_| bad())?;
                    let b: u32 = b.trim().parse().map_err(|_| bad())?;
                    if a > b {
                        return Err(bad());
                    }
                    out.extend(a..=b);
                }
                None => out.push(part.parse().map_err(|_| bad())?),
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidParameter("empty integer list".into()));
        }
        Ok(IntList(out))
    }
}

impl fmt::Display for IntList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = &self.0;
        let contiguous = v.len() > 1 && v.windows(2).all(|w| w[1] == w[0] + 1);
        if contiguous {
            write!(f, "{}-{}", v[0], v[v.len() - 1])
        } else {
            let parts: Vec<String> = v.iter().map(u32::to_string).collect();
            f.write_str(&parts.join(","))
        }
    }
}

/// Inclusive integer range written `a-b` (or a single `a`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntRange {
    pub start: u32,
    pub end: u32,
}

impl FromStr for IntRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("bad range `{s}`, expected `a-b`"));
        let (a, b) = s.split_once('-').unwrap_or((s, s));
        let start: u32 = a.trim().parse().map_err(|_| bad())?;
        let end: u32 = b.trim().parse().map_err(|_| bad())?;
        if start > end {
            return Err(bad());
        }
        Ok(IntRange { start, end })
    }
}

impl fmt::Display for IntRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start, self.end)
    }
}

/// Comma-separated reals.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatList(pub Vec<f64>);

impl FromStr for FloatList {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| {
                p.parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("bad number `{p}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if values.is_empty() {
            return Err(Error::InvalidParameter("empty number list".into()));
        }
        Ok(FloatList(values))
    }
}

impl fmt::Display for FloatList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(f64::to_string).collect();
        f.write_str(&parts.join(","))
    }
}
