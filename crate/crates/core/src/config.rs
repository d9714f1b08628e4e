//! Pipeline parameters and the flat `key = value` config file format.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Every tunable of the pipeline. Defaults match the full-scale SAT and
/// noun-modifier runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LraConfig {
    /// Thesaurus neighbors tried per pair member when finding alternates.
    pub num_sim: usize,
    /// Longest phrase, endpoints included, counted when filtering alternates.
    pub max_phrase: usize,
    /// Alternates kept per original pair.
    pub num_filter: usize,
    pub min_inter: usize,
    pub max_inter: usize,
    pub num_patterns: usize,
    /// Retained SVD rank; clamped to the matrix rank.
    pub k: usize,
    /// Relative residual accepted for a converged singular triplet.
    pub svd_tolerance: f64,
}

impl Default for LraConfig {
    fn default() -> Self {
        LraConfig {
            num_sim: 10,
            max_phrase: 5,
            num_filter: 3,
            min_inter: 1,
            max_inter: 3,
            num_patterns: 4000,
            k: 300,
            svd_tolerance: 1e-10,
        }
    }
}

impl LraConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("num_sim", self.num_sim),
            ("max_phrase", self.max_phrase),
            ("num_filter", self.num_filter),
            ("min_inter", self.min_inter),
            ("max_inter", self.max_inter),
            ("num_patterns", self.num_patterns),
            ("k", self.k),
        ];
        for (name, value) in counts {
            if value < 1 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        if self.max_phrase < 2 || self.max_inter != self.max_phrase - 2 {
            return Err(Error::Config(format!(
                "max_inter ({}) must equal max_phrase - 2 (max_phrase = {})",
                self.max_inter, self.max_phrase
            )));
        }
        if self.min_inter > self.max_inter {
            return Err(Error::Config(format!(
                "min_inter ({}) exceeds max_inter ({})",
                self.min_inter, self.max_inter
            )));
        }
        if !(self.svd_tolerance > 0.0 && self.svd_tolerance < 1.0) {
            return Err(Error::Config("svd_tolerance must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// Parses `key = value` lines over the defaults. Blank lines and lines
    /// starting with `#` are ignored. Setting `max_phrase` without
    /// `max_inter` moves `max_inter` along with it.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut config = LraConfig::default();
        let mut saw_max_inter = false;
        let mut saw_max_phrase = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lineno = idx + 1;
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(source_name, lineno, "expected key = value"))?;
            let key = key.trim();
            let value = value.trim();
            let count = || {
                value
                    .parse::<usize>()
                    .map_err(|_| Error::parse(source_name, lineno, format!("{key}: not a count: {value:?}")))
            };
            match key {
                "num_sim" => config.num_sim = count()?,
                "max_phrase" => {
                    config.max_phrase = count()?;
                    saw_max_phrase = true;
                }
                "num_filter" => config.num_filter = count()?,
                "min_inter" => config.min_inter = count()?,
                "max_inter" => {
                    config.max_inter = count()?;
                    saw_max_inter = true;
                }
                "num_patterns" => config.num_patterns = count()?,
                "k" => config.k = count()?,
                "svd_tolerance" => {
                    config.svd_tolerance = value.parse().map_err(|_| {
                        Error::parse(source_name, lineno, format!("svd_tolerance: not a number: {value:?}"))
                    })?
                }
                other => return Err(Error::parse(source_name, lineno, format!("unknown key {other:?}"))),
            }
        }
        if saw_max_phrase && !saw_max_inter {
            config.max_inter = config.max_phrase.saturating_sub(2);
        }
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }
}

impl fmt::Display for LraConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "num_sim = {}", self.num_sim)?;
        writeln!(f, "max_phrase = {}", self.max_phrase)?;
        writeln!(f, "num_filter = {}", self.num_filter)?;
        writeln!(f, "min_inter = {}", self.min_inter)?;
        writeln!(f, "max_inter = {}", self.max_inter)?;
        writeln!(f, "num_patterns = {}", self.num_patterns)?;
        writeln!(f, "k = {}", self.k)?;
        writeln!(f, "svd_tolerance = {:e}", self.svd_tolerance)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = LraConfig::default();
        c.validate().unwrap();
        assert_eq!((c.num_sim, c.max_phrase, c.num_filter), (10, 5, 3));
        assert_eq!((c.min_inter, c.max_inter, c.num_patterns, c.k), (1, 3, 4000, 300));
    }

    #[test]
    fn parse_overrides_and_roundtrips() {
        let c = LraConfig::parse("# comment\nnum_filter = 1\nk=20\n", "t").unwrap();
        assert_eq!(c.num_filter, 1);
        assert_eq!(c.k, 20);
        assert_eq!(LraConfig::parse(&c.to_string(), "t").unwrap(), c);
    }

    #[test]
    fn max_phrase_drags_max_inter() {
        let c = LraConfig::parse("max_phrase = 4", "t").unwrap();
        assert_eq!(c.max_inter, 2);
        assert!(LraConfig::parse("max_phrase = 4\nmax_inter = 3", "t").is_err());
    }

    #[test]
    fn rejects_bad_lines() {
        let err = LraConfig::parse("num_sim = 3\nbogus = 1", "cfg").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(LraConfig::parse("num_sim = -1", "cfg").is_err());
        assert!(LraConfig::parse("k = 0", "cfg").is_err());
        assert!(LraConfig::parse("min_inter = 4", "cfg").is_err());
    }
}
