//! Flat `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Recognised keys:
//! `alpha`, `k`, `l`, `n`, `start`, `end`, `last`, `k_range`, `l_range`
//! (written `lo..hi` or `lo-hi`, inclusive), `ar_mode`, `baseline`, `seed`.

use std::ops::RangeInclusive;
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{GvarError, Result};
use crate::pipeline::engine::{ArMode, EngineConfig};

/// Partial engine settings; unset fields leave the target untouched.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub alpha: Option<f64>,
    pub k: Option<usize>,
    pub l: Option<usize>,
    pub n: Option<usize>,
    pub start: Option<NaiveDate>,
    pub end: Option<NaiveDate>,
    pub last: Option<usize>,
    pub k_range: Option<RangeInclusive<usize>>,
    pub l_range: Option<RangeInclusive<usize>>,
    pub ar_mode: Option<ArMode>,
    pub baseline: Option<bool>,
    pub seed: Option<u64>,
}

fn bad(line: usize, key: &str, value: &str) -> GvarError {
    GvarError::Config(format!("line {line}: invalid value `{value}` for `{key}`"))
}

pub fn parse_range(text: &str) -> Option<RangeInclusive<usize>> {
    let (lo, hi) = text.split_once("..").or_else(|| text.split_once('-'))?;
    let lo = lo.trim().parse().ok()?;
    let hi = hi.trim().trim_start_matches('=').parse().ok()?;
    Some(lo..=hi)
}

pub fn parse_date(text: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(text.trim(), "%Y-%m-%d").ok()
}

impl ConfigOverrides {
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = ConfigOverrides::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed
                .split_once('=')
                .ok_or_else(|| GvarError::Config(format!("line {line}: expected `key = value`")))?;
            let (key, value) = (key.trim(), value.trim());
            let err = || bad(line, key, value);
            match key {
                "alpha" => out.alpha = Some(value.parse().map_err(|_| err())?),
                "k" => out.k = Some(value.parse().map_err(|_| err())?),
                "l" => out.l = Some(value.parse().map_err(|_| err())?),
                "n" => out.n = Some(value.parse().map_err(|_| err())?),
                "last" => out.last = Some(value.parse().map_err(|_| err())?),
                "seed" => out.seed = Some(value.parse().map_err(|_| err())?),
                "baseline" => out.baseline = Some(value.parse().map_err(|_| err())?),
                "start" => out.start = Some(parse_date(value).ok_or_else(err)?),
                "end" => out.end = Some(parse_date(value).ok_or_else(err)?),
                "k_range" => out.k_range = Some(parse_range(value).ok_or_else(err)?),
                "l_range" => out.l_range = Some(parse_range(value).ok_or_else(err)?),
                "ar_mode" => out.ar_mode = Some(value.parse()?),
                other => {
                    return Err(GvarError::Config(format!(
                        "line {line}: unknown key `{other}`"
                    )))
                }
            }
        }
        Ok(out)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| GvarError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Fields set in `other` win.
    pub fn merged_with(self, other: ConfigOverrides) -> Self {
        ConfigOverrides {
            alpha: other.alpha.or(self.alpha),
            k: other.k.or(self.k),
            l: other.l.or(self.l),
            n: other.n.or(self.n),
            start: other.start.or(self.start),
            end: other.end.or(self.end),
            last: other.last.or(self.last),
            k_range: other.k_range.or(self.k_range),
            l_range: other.l_range.or(self.l_range),
            ar_mode: other.ar_mode.or(self.ar_mode),
            baseline: other.baseline.or(self.baseline),
            seed: other.seed.or(self.seed),
        }
    }

    pub fn apply(&self, base: EngineConfig) -> Result<EngineConfig> {
        let mut cfg = base;
        if let Some(v) = self.alpha {
            cfg.alpha = v;
        }
        if let Some(v) = self.k {
            cfg.window.windows = v;
        }
        if let Some(v) = self.l {
            cfg.window.width = v;
        }
        if let Some(v) = self.n {
            cfg.window.history = v;
        }
        cfg.start = self.start.or(cfg.start);
        cfg.end = self.end.or(cfg.end);
        cfg.last = self.last.or(cfg.last);
        if let Some(r) = &self.k_range {
            cfg.k_range = r.clone();
        }
        if let Some(r) = &self.l_range {
            cfg.l_range = r.clone();
        }
        if let Some(v) = self.ar_mode {
            cfg.ar_mode = v;
        }
        if let Some(v) = self.baseline {
            cfg.baseline = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
