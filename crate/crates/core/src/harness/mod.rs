//! End-to-end pipeline over a corpus of bugs.

mod corpus;
mod eval;
mod explain;

use serde::{Deserialize, Serialize};

pub use corpus::{
    load_corpus, parse_corpus, BugRecord, Corpus, CorpusMetadata, BUNDLED_CORPUS, BUNDLED_METADATA,
};
pub use eval::{evaluate, sweep, BugResult, EvalReport, SweepReport};
pub use explain::{explain_bug, explain_input, Explanation, ExplainConfig};

use crate::causal::{build_design_matrix, estimate_dependencies, DependencyMatrix, EstimatorConfig};
use crate::error::{ConfigError, Error};
use crate::model::{ModelHandle, ProgramInput, RepairOutput};
use crate::perturb::{PerturbationConfig, PerturbedSample, Perturber};
use crate::rerank::{gather_evidence, rerank, RerankConfig, Reranked};

/// Environment variable that overrides the perturbation seed.
pub const SEED_ENV: &str = "CPR_SEED";

/// Everything one pipeline run depends on besides the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub perturb: PerturbationConfig,
    pub estimator: EstimatorConfig,
    pub rerank: RerankConfig,
    /// Candidates requested per query.
    pub beam: usize,
    /// Bugs processed at once; 0 uses every core.
    #[serde(skip)]
    pub workers: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            perturb: PerturbationConfig::default(),
            estimator: EstimatorConfig::default(),
            rerank: RerankConfig::default(),
            beam: 5,
            workers: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.perturb.validate()?;
        self.rerank.validate()?;
        if self.beam == 0 {
            return Err(ConfigError::Invalid {
                name: "beam",
                message: "must be at least 1".into(),
            });
        }
        Ok(())
    }

    /// Applies `CPR_SEED` when it is set.
    pub fn with_env_seed(mut self) -> Result<Self, ConfigError> {
        if let Ok(raw) = std::env::var(SEED_ENV) {
            self.perturb.seed = raw.trim().parse().map_err(|_| ConfigError::Invalid {
                name: "CPR_SEED",
                message: format!("{raw:?} is not an unsigned integer"),
            })?;
        }
        Ok(self)
    }
}

/// Intermediate products of the pipeline for one input.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub input: ProgramInput,
    pub baseline: RepairOutput,
    pub samples: Vec<PerturbedSample>,
    pub perturbed_outputs: Vec<RepairOutput>,
    pub dependencies: DependencyMatrix,
    pub reranked: Reranked,
}

/// Baseline query, perturbation, batch query, dependency fit and rerank.
pub fn analyze(
    input: &ProgramInput,
    model: &ModelHandle,
    perturber: &Perturber,
    cfg: &PipelineConfig,
) -> Result<Analysis, Error> {
    cfg.validate()?;
    let baseline = model.query(input, cfg.beam)?;
    let samples = perturber.generate(input, &cfg.perturb)?;
    let inputs: Vec<ProgramInput> = samples.iter().map(PerturbedSample::to_input).collect();
    let perturbed_outputs = model
        .query_batch(&inputs, cfg.beam)
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let design = build_design_matrix(input, &samples, &perturbed_outputs, &baseline)?;
    let dependencies = estimate_dependencies(&design, &cfg.estimator)?;
    let evidence = gather_evidence(
        &baseline,
        input.code(),
        &perturbed_outputs,
        &dependencies,
        &cfg.rerank,
    );
    let reranked = rerank(&baseline, &evidence, &cfg.rerank);
    Ok(Analysis {
        input: input.clone(),
        baseline,
        samples,
        perturbed_outputs,
        dependencies,
        reranked,
    })
}
