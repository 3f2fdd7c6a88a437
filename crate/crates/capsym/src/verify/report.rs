//! Machine-readable verification reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Outcome of one inequality experiment: `lhs >= rhs - tolerance` passes.
/// Ordered maps keep report lines bit-identical across reruns.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub experiment: String,
    pub params: BTreeMap<String, f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl VerificationReport {
    pub fn new(experiment: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        VerificationReport {
            experiment: experiment.to_string(),
            params: BTreeMap::new(),
            lhs,
            rhs,
            margin: lhs - rhs,
            tolerance,
            passed: lhs - rhs >= -tolerance,
            metadata: BTreeMap::new(),
        }
    }

    /// Equality-style check: `mismatch <= allowed` passes. Encoded so that
    /// the usual `lhs >= rhs - tolerance` reading still holds.
    pub fn equality(experiment: &str, mismatch: f64, allowed: f64) -> Self {
        Self::new(experiment, allowed, mismatch, 0.0)
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn with_meta(mut self, key: &str, value: serde_json::Value) -> Self {
        self.metadata.insert(key.to_string(), value);
        self
    }

    /// Near-equality within the rigidity threshold (five tolerances).
    pub fn rigidity_candidate(&self) -> bool {
        self.margin.abs() < 5.0 * self.tolerance
    }

    /// One JSON line, the on-disk report format.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Default inequality tolerance: `max(1e-8, C_GRID * h * scale)` where
/// `scale` is the magnitude of the compared quantities. `C_GRID` was
/// calibrated on the cap equality cases of the symmetrization suite.
pub fn inequality_tol(h: f64, scale: f64) -> f64 {
    const C_GRID: f64 = 2.0;
    (C_GRID * h * scale.abs()).max(1e-8)
}
