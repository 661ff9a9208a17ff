//! Completion constructions and their certificate trail.

pub mod chordal;
pub mod cycle;
pub mod factor;
pub mod fold;
pub mod pipeline;
pub mod unique;

use crate::linalg::{numerical_rank, Configuration};
use crate::partial::PartialMatrix;
use serde::{Deserialize, Serialize};

/// Default relative tolerance for numerical rank.
pub const RANK_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrailStep {
    pub step: String,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stress: Option<Vec<Vec<f64>>>,
}

impl TrailStep {
    pub fn new(step: &str, detail: impl Into<String>) -> Self {
        TrailStep { step: step.to_string(), detail: detail.into(), stress: None }
    }

    pub fn with_stress(mut self, m: &crate::linalg::Mat) -> Self {
        self.stress = Some((0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompletionResult {
    #[serde(rename = "factor")]
    pub configuration: Configuration,
    pub rank: usize,
    pub residual: f64,
    pub trail: Vec<TrailStep>,
}

impl CompletionResult {
    /// Wrap a configuration, compressing it to its numerical rank.
    pub fn from_configuration(a: &PartialMatrix, c: Configuration, trail: Vec<TrailStep>) -> Self {
        let c = c.compress(RANK_TOL);
        let rank = numerical_rank(&c.gram(), RANK_TOL);
        let residual = a.residual_config(&c);
        CompletionResult { configuration: c, rank, residual, trail }
    }
}
