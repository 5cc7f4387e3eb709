//! Hard caps on exhaustive enumeration.
//!
//! Defaults can be raised with `DPCALC_MAX_ENUM`, either a bare integer (max
//! users in a shuffle audit) or a comma list such as
//! `users=80,outputs=8,records=4,dataset=8`.

use crate::error::{invalid, Result};

pub const ENV_VAR: &str = "DPCALC_MAX_ENUM";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumLimits {
    /// Users `n` in a shuffle audit.
    pub max_users: usize,
    /// Output alphabet size of a shuffled randomizer.
    pub max_outputs: usize,
    /// Record alphabet size for subsampling datasets.
    pub max_record_alphabet: usize,
    /// Records per dataset for subsampling.
    pub max_dataset_size: usize,
}

impl Default for EnumLimits {
    fn default() -> Self {
        Self {
            max_users: 60,
            max_outputs: 6,
            max_record_alphabet: 3,
            max_dataset_size: 6,
        }
    }
}

impl EnumLimits {
    /// Defaults overridden by the environment. Unparseable values are ignored.
    pub fn current() -> Self {
        std::env::var(ENV_VAR)
            .ok()
            .and_then(|s| Self::parse(&s).ok())
            .unwrap_or_default()
    }

    /// Like [`EnumLimits::current`] but reports a malformed value.
    pub fn from_env() -> Result<Self> {
        match std::env::var(ENV_VAR) {
            Ok(s) => Self::parse(&s),
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn parse(spec: &str) -> Result<Self> {
        let mut limits = Self::default();
        let spec = spec.trim();
        if let Ok(n) = spec.parse::<usize>() {
            limits.max_users = n;
            return Ok(limits);
        }
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| invalid("DPCALC_MAX_ENUM", format!("`{part}` is not key=value")))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| invalid("DPCALC_MAX_ENUM", format!("`{value}` is not an integer")))?;
            match key.trim() {
                "users" => limits.max_users = value,
                "outputs" => limits.max_outputs = value,
                "records" => limits.max_record_alphabet = value,
                "dataset" => limits.max_dataset_size = value,
                other => {
                    return Err(invalid("DPCALC_MAX_ENUM", format!("unknown key `{other}`")));
                }
            }
        }
        Ok(limits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(EnumLimits::parse("120").unwrap().max_users, 120);
        let l = EnumLimits::parse("outputs=8, dataset=7").unwrap();
        assert_eq!((l.max_users, l.max_outputs, l.max_dataset_size), (60, 8, 7));
        assert!(EnumLimits::parse("bogus=1").is_err());
        assert!(EnumLimits::parse("users").is_err());
    }
}
