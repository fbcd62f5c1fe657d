//! Versioned tolerances for the statistical campaigns.
//!
//! The built-in file is compiled in; `SRRW_EXPECTATIONS` points at a
//! replacement.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ENV_VAR: &str = "SRRW_EXPECTATIONS";
pub const BUILTIN: &str = include_str!("../expectations/expectations.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    pub version: u32,
    pub z: f64,
    pub alpha: f64,
    pub endpoint_law: EndpointLaw,
    pub local_clt: LocalClt,
    pub tail_bounds: TailBounds,
    pub inverse_time: InverseTime,
    pub kernel: Kernel,
    pub rk_equivalence: RkEquivalence,
    pub lclt: Lclt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndpointLaw {
    /// Ladder point where `ks_max` applies.
    pub reference_n: u64,
    pub ks_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalClt {
    pub floor: f64,
    pub ceiling: f64,
    /// Cells with `|x| <= reach * n` are checked.
    pub reach: f64,
    /// Cells with fewer hits are flagged rather than judged.
    pub min_hits: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailBounds {
    pub top_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InverseTime {
    pub band_lo: f64,
    pub band_hi: f64,
    pub riemann_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Kernel {
    pub tv_max: f64,
    pub min_transitions: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RkEquivalence {
    pub tv_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lclt {
    pub bivariate_sup_max: f64,
    pub conditional_sup_max: f64,
}

impl Expectations {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("expectations: {e}")))
    }

    pub fn builtin() -> Self {
        Self::parse(BUILTIN).expect("built-in expectations parse")
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The file named by `SRRW_EXPECTATIONS` if set, else the built-in one.
    pub fn load() -> Result<Self> {
        match std::env::var_os(ENV_VAR) {
            Some(p) => Self::from_file(Path::new(&p)),
            None => Ok(Self::builtin()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_parses() {
        let e = Expectations::builtin();
        assert_eq!(e.version, 1);
        assert_eq!(e.endpoint_law.ks_max, 0.03);
        assert!(e.inverse_time.band_lo < 1.0 && 1.0 < e.inverse_time.band_hi);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("{BUILTIN}\nsurprise = 1\n");
        assert!(Expectations::parse(&text).is_err());
    }
}
