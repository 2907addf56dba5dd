//! Resource caps shared by the exhaustive procedures.

use thiserror::Error;

use crate::closure::DEFAULT_PRODUCT_CAP;
use crate::eqlogic::{TheoryCaps, DEFAULT_ENV_CAP};
use crate::free::{FreeCaps, DEFAULT_MAX_CARRIER, DEFAULT_MAX_CELLS};
use crate::homs::DEFAULT_SEARCH_CAP;
use crate::terms::DEFAULT_TERM_CAP;

/// Number of algebras an exhaustive pool may contain.
pub const DEFAULT_POOL_CAP: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Free algebra carrier size.
    pub carrier: usize,
    /// Free algebra carrier size times tuple width.
    pub cells: usize,
    /// Search nodes for homomorphism and proof search.
    pub search: usize,
    pub product: usize,
    pub envs: usize,
    pub terms: usize,
    pub pool: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            carrier: DEFAULT_MAX_CARRIER,
            cells: DEFAULT_MAX_CELLS,
            search: DEFAULT_SEARCH_CAP,
            product: DEFAULT_PRODUCT_CAP,
            envs: DEFAULT_ENV_CAP,
            terms: DEFAULT_TERM_CAP,
            pool: DEFAULT_POOL_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CapsError {
    #[error("cap override `{0}`: expected key=value")]
    Syntax(String),
    #[error("unknown cap `{0}` (expected carrier, cells or search)")]
    UnknownKey(String),
    #[error("cap `{key}`: `{value}` is not a positive integer")]
    BadValue { key: String, value: String },
}

impl Caps {
    /// Applies overrides of the form `carrier=N,cells=M,search=P`; any
    /// subset of keys may appear.
    pub fn with_overrides(mut self, overrides: &str) -> Result<Self, CapsError> {
        for item in overrides.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| CapsError::Syntax(item.to_string()))?;
            let (key, value) = (key.trim(), value.trim());
            let n: usize = value
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| CapsError::BadValue {
                    key: key.to_string(),
                    value: value.to_string(),
                })?;
            match key {
                "carrier" => self.carrier = n,
                "cells" => self.cells = n,
                "search" => self.search = n,
                _ => return Err(CapsError::UnknownKey(key.to_string())),
            }
        }
        Ok(self)
    }

    pub fn free(&self) -> FreeCaps {
        FreeCaps {
            max_carrier: self.carrier,
            max_cells: self.cells,
        }
    }

    pub fn theory(&self) -> TheoryCaps {
        TheoryCaps {
            terms: self.terms,
            envs: self.envs,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides() {
        let c = Caps::default().with_overrides("carrier=10, search=5").unwrap();
        assert_eq!((c.carrier, c.search, c.cells), (10, 5, DEFAULT_MAX_CELLS));
        assert_eq!(Caps::default().with_overrides(""), Ok(Caps::default()));
        assert!(matches!(
            Caps::default().with_overrides("cells"),
            Err(CapsError::Syntax(_))
        ));
        assert!(matches!(
            Caps::default().with_overrides("depth=3"),
            Err(CapsError::UnknownKey(_))
        ));
        assert!(matches!(
            Caps::default().with_overrides("cells=0"),
            Err(CapsError::BadValue { .. })
        ));
    }
}
