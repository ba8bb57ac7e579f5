use serde::{Deserialize, Serialize};

use super::{analyze, Analysis, BugRecord, PipelineConfig};
use crate::error::{ConfigError, Error};
use crate::model::{ModelHandle, ProgramInput};
use crate::partition::{
    build_bipartite, default_k, select_explanation, spectral_coclusters, ExplanationGraph,
};
use crate::perturb::Perturber;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExplainConfig {
    /// Co-cluster count; `None` picks one from the graph size.
    pub k: Option<usize>,
    /// Clusters kept in the explanation.
    pub select: usize,
    /// Quantile of positive weights below which edges are dropped.
    pub tau: f64,
}

impl Default for ExplainConfig {
    fn default() -> Self {
        Self {
            k: None,
            select: 3,
            tau: 0.75,
        }
    }
}

impl ExplainConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.select == 0 {
            return Err(ConfigError::Invalid {
                name: "select",
                message: "must be at least 1".into(),
            });
        }
        if self.k == Some(0) {
            return Err(ConfigError::Invalid {
                name: "k",
                message: "must be at least 1".into(),
            });
        }
        if !(0.0..1.0).contains(&self.tau) {
            return Err(ConfigError::OutOfRange {
                name: "tau",
                range: "[0, 1)",
                value: self.tau,
            });
        }
        Ok(())
    }
}

pub struct Explanation {
    pub analysis: Analysis,
    /// Thresholded graph with cluster labels, before selection.
    pub pre_selection: ExplanationGraph,
    pub graph: ExplanationGraph,
    pub k: usize,
}

impl std::fmt::Debug for Explanation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Explanation")
            .field("k", &self.k)
            .field("graph", &self.graph)
            .finish_non_exhaustive()
    }
}

pub fn explain_input(
    input: &ProgramInput,
    model: &ModelHandle,
    perturber: &Perturber,
    cfg: &PipelineConfig,
    ex: &ExplainConfig,
) -> Result<Explanation, Error> {
    ex.validate()?;
    let analysis = analyze(input, model, perturber, cfg)?;
    let g = build_bipartite(&analysis.dependencies, ex.tau)?;
    if g.is_empty() {
        let graph = ExplanationGraph::unselected(&g, None);
        return Ok(Explanation {
            analysis,
            pre_selection: graph.clone(),
            graph,
            k: 0,
        });
    }
    let k = ex
        .k
        .unwrap_or_else(|| default_k(&g))
        .min(g.left.len() + g.right.len());
    let cc = spectral_coclusters(&g, k, cfg.perturb.seed)?;
    Ok(Explanation {
        pre_selection: ExplanationGraph::unselected(&g, Some(&cc)),
        graph: select_explanation(&cc, &g, ex.select),
        analysis,
        k,
    })
}

/// Explains the model's top-1 answer for one corpus bug.
pub fn explain_bug(
    bug: &BugRecord,
    model: &ModelHandle,
    perturber: &Perturber,
    cfg: &PipelineConfig,
    ex: &ExplainConfig,
) -> Result<Explanation, Error> {
    explain_input(&bug.input()?, model, perturber, cfg, ex)
}
