//! Numerical tolerance policy shared by every module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unit-norm tolerance for kets.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Upper bound on the total Hilbert-space dimension of a layout.
pub const MAX_TOTAL_DIM: usize = 1 << 14;

/// Centralized tolerances. Every checker takes its thresholds from here
/// unless an explicit tolerance is passed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub unitarity: f64,
    pub hermiticity: f64,
    pub rank: f64,
    pub equality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unitarity: 1e-10,
            hermiticity: 1e-10,
            rank: 1e-10,
            equality: 1e-9,
        }
    }
}

impl Tolerances {
    /// Override a single tolerance by name.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::BadParameters(format!(
                "tolerance `{name}` must be positive, got {value}"
            )));
        }
        match name {
            "unitarity" => self.unitarity = value,
            "hermiticity" => self.hermiticity = value,
            "rank" => self.rank = value,
            "equality" => self.equality = value,
            other => {
                return Err(Error::BadParameters(format!(
                    "unknown tolerance `{other}` (expected unitarity, hermiticity, rank, equality)"
                )))
            }
        }
        Ok(())
    }

    pub fn as_pairs(&self) -> Vec<(String, f64)> {
        vec![
            ("unitarity".into(), self.unitarity),
            ("hermiticity".into(), self.hermiticity),
            ("rank".into(), self.rank),
            ("equality".into(), self.equality),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_policy() {
        let t = Tolerances::default();
        assert_eq!(t.unitarity, 1e-10);
        assert_eq!(t.hermiticity, 1e-10);
        assert_eq!(t.rank, 1e-10);
        assert_eq!(t.equality, 1e-9);
    }

    #[test]
    fn override_rejects_unknown_and_nonpositive() {
        let mut t = Tolerances::default();
        t.set("equality", 1e-6).unwrap();
        assert_eq!(t.equality, 1e-6);
        assert!(t.set("bogus", 1.0).is_err());
        assert!(t.set("rank", 0.0).is_err());
        assert!(t.set("rank", f64::NAN).is_err());
    }
}
