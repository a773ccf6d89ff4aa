use super::{write_atomic, ErrorSummary};
use crate::error::Result;
use crate::recon::Diagnostics;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSummary {
    pub degree: usize,
    pub mu: f64,
    pub cross_talk: f64,
    pub flagged: bool,
}

/// Run summary written next to reconstruction and comparison outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Report {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backend: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub banner: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_resolution: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_nodes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_resolution: Option<usize>,
    pub band: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_floor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub errors: Option<ErrorSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_residual: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub odd_energy: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reassembly_error: Option<f64>,
    pub clamped_nodes: Vec<usize>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub probes: Vec<ProbeSummary>,
    pub wall_clock_seconds: f64,
}

impl Report {
    /// Copies the reconstruction diagnostics into the report.
    pub fn absorb(&mut self, d: &Diagnostics) {
        self.backend = Some(d.backend.clone());
        self.l_max = Some(d.l_max);
        self.band = d.band;
        self.fit_residual = Some(d.fit_residual);
        self.odd_energy = Some(d.odd_energy);
        if d.reassembly_error > 0.0 || !d.filled.is_empty() {
            self.reassembly_error = Some(d.reassembly_error);
        }
        self.clamped_nodes = d.clamped.clone();
        self.warnings.extend(d.warnings.iter().cloned());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports hold finite values");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_json().as_bytes())
    }
}
