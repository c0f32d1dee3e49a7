//! Numerical tolerances used throughout the crate.
//!
//! All thresholds live in one [`Tolerances`] profile so that a caller (or the
//! CLI, through an environment variable) can override them consistently.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Allowed deviation of a character value from modulus one.
    pub unit: f64,
    /// Character sums below this magnitude count as zero (X-membership,
    /// spoke partitions).
    pub zero: f64,
    /// Closed-form structural identities (coefficient sums, products).
    pub structural: f64,
    /// Comparisons against a dense eigensolver.
    pub eigensolver: f64,
    /// Two unit complex numbers are equal when they differ by at most this.
    pub phase: f64,
    /// Distance to the nearest integer for an eigenvalue to count as integral.
    pub integrality: f64,
    /// Max-abs deviation of a transition row from `alpha e_u + beta e_v`.
    pub residual: f64,
    /// `| |alpha|^2 + |beta|^2 - 1 |` for a revival pair.
    pub normalization: f64,
    /// Below this magnitude an amplitude is treated as zero when classifying
    /// revival kinds (PST when alpha vanishes, periodic when beta does).
    pub amplitude: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unit: 1e-12,
            zero: 1e-9,
            structural: 1e-10,
            eigensolver: 1e-8,
            phase: 1e-9,
            integrality: 1e-9,
            residual: 1e-8,
            normalization: 1e-10,
            amplitude: 1e-9,
        }
    }
}

impl Tolerances {
    /// Applies overrides written as `key=value` pairs separated by commas,
    /// e.g. `phase=1e-10,zero=1e-8`.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("tolerance override `{item}` lacks `=`")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("tolerance `{key}` has non-numeric value")))?;
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Parse(format!("tolerance `{key}` must be positive")));
            }
            let slot = match key.trim() {
                "unit" => &mut self.unit,
                "zero" => &mut self.zero,
                "structural" => &mut self.structural,
                "eigensolver" => &mut self.eigensolver,
                "phase" => &mut self.phase,
                "integrality" => &mut self.integrality,
                "residual" => &mut self.residual,
                "normalization" => &mut self.normalization,
                "amplitude" => &mut self.amplitude,
                other => return Err(Error::Parse(format!("unknown tolerance `{other}`"))),
            };
            *slot = value;
        }
        Ok(self)
    }
}
