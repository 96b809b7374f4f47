//! Optional TOML defaults:
//!
//! ```toml
//! tol = 1e-10
//! oracle_tol = 1e-12
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Relative tolerance for contour integrals and route selection.
    pub tol: f64,
    /// Relative tolerance for the quadrature oracle.
    pub oracle_tol: f64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            oracle_tol: 1e-12,
        }
    }
}

fn check(name: &str, v: f64) -> Result<(), String> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(format!("{name} must lie in (0, 1), got {v}"))
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, String> {
        let c: Config = toml::from_str(text).map_err(|e| e.to_string())?;
        check("tol", c.tol)?;
        check("oracle_tol", c.oracle_tol)?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let err = |message: String| CliError::Config {
            path: path.display().to_string(),
            message,
        };
        let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        Self::parse(&text).map_err(err)
    }

    /// `--config`, else `$LEVYKERNEL_CONFIG`, else built-in defaults.
    pub fn resolve(explicit: Option<&Path>) -> Result<Self, CliError> {
        if let Some(p) = explicit {
            return Self::load(p);
        }
        match std::env::var_os("LEVYKERNEL_CONFIG") {
            Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
            _ => Ok(Self::default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_files_keep_defaults() {
        let c = Config::parse("tol = 1e-8").unwrap();
        assert_eq!(c.tol, 1e-8);
        assert_eq!(c.oracle_tol, Config::default().oracle_tol);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(Config::parse("tolerance = 1e-8").is_err());
        assert!(Config::parse("tol = 2.0").is_err());
        assert!(Config::parse("tol = -1e-3").is_err());
    }
}
