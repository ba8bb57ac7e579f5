//! Rescoring candidate patches by how they behave under perturbation.
//!
//! A candidate earns stability when perturbed queries keep returning it as
//! their top answer, and relevance when the tokens it changes are strongly
//! explained by some input token.

use serde::{Deserialize, Serialize};

use crate::align::{lcs_pairs, similarity};
use crate::causal::DependencyMatrix;
use crate::error::ConfigError;
use crate::model::{RepairCandidate, RepairOutput};
use crate::tokenizer::TokenSequence;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RerankConfig {
    /// 0 keeps the model's order, 1 ranks by causal evidence alone.
    pub lambda_mix: f64,
    /// Minimum similarity for a perturbed answer to count as a match.
    pub delta: f64,
}

impl Default for RerankConfig {
    fn default() -> Self {
        Self {
            lambda_mix: 0.5,
            delta: 1.0,
        }
    }
}

impl RerankConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, value) in [("lambda_mix", self.lambda_mix), ("delta", self.delta)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ConfigError::OutOfRange {
                    name,
                    range: "[0, 1]",
                    value,
                });
            }
        }
        Ok(())
    }
}

/// Share of `perturbed` whose top candidate is at least `delta`-similar to
/// `candidate`. Returns 0 when there are no perturbed outputs.
pub fn stability_score(candidate: &RepairCandidate, perturbed: &[RepairOutput], delta: f64) -> f64 {
    if perturbed.is_empty() {
        return 0.0;
    }
    let mine = candidate.tokens.texts();
    let hits = perturbed
        .iter()
        .filter(|o| similarity(&mine, &o.top().tokens.texts()) >= delta)
        .count();
    hits as f64 / perturbed.len() as f64
}

/// Positions in `candidate` not covered by its LCS alignment with `buggy`.
pub fn changed_positions(buggy: &TokenSequence, candidate: &TokenSequence) -> Vec<usize> {
    let kept = lcs_pairs(&buggy.texts(), &candidate.texts());
    let mut covered = vec![false; candidate.len()];
    for (_, j) in kept {
        covered[j] = true;
    }
    (0..candidate.len()).filter(|&j| !covered[j]).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relevance {
    pub score: f64,
    /// Changed tokens that never appeared in any top-1 output.
    pub missing: Vec<String>,
}

/// Mean over `changed` positions of the largest positive weight into that
/// output token. Tokens outside the output vocabulary contribute 0.
pub fn relevance_score(candidate: &RepairCandidate, deps: &DependencyMatrix, changed: &[usize]) -> Relevance {
    if changed.is_empty() {
        return Relevance {
            score: 0.0,
            missing: Vec::new(),
        };
    }
    let tokens = candidate.tokens.tokens();
    let mut total = 0.0;
    let mut missing = Vec::new();
    for &p in changed {
        let text = &tokens[p].text;
        match deps.output_index(text) {
            Some(j) => total += deps.max_positive_incoming(j),
            None => missing.push(text.clone()),
        }
    }
    Relevance {
        score: total / changed.len() as f64,
        missing,
    }
}

/// Causal evidence for one candidate, aligned with the model's list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub stability: f64,
    pub relevance: f64,
    pub missing_tokens: Vec<String>,
}

/// Stability and relevance for every candidate of `output`.
pub fn gather_evidence(
    output: &RepairOutput,
    buggy: &TokenSequence,
    perturbed: &[RepairOutput],
    deps: &DependencyMatrix,
    cfg: &RerankConfig,
) -> Vec<Evidence> {
    output
        .candidates()
        .iter()
        .map(|c| {
            let changed = changed_positions(buggy, &c.tokens);
            let rel = relevance_score(c, deps, &changed);
            Evidence {
                stability: stability_score(c, perturbed, cfg.delta),
                relevance: rel.score,
                missing_tokens: rel.missing,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredCandidate {
    pub candidate: RepairCandidate,
    /// 1-based position in the model's list.
    pub model_rank: usize,
    pub normalized_model_score: f64,
    pub stability: f64,
    pub relevance: f64,
    pub normalized_relevance: f64,
    pub final_score: f64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub missing_tokens: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reranked {
    pub output: RepairOutput,
    /// In the new order.
    pub scored: Vec<ScoredCandidate>,
}

impl Reranked {
    /// Per-candidate breakdown for display.
    pub fn diagnostics(&self) -> serde_json::Value {
        serde_json::json!({
            "candidates": self.scored.iter().enumerate().map(|(i, s)| serde_json::json!({
                "rank": i + 1,
                "model_rank": s.model_rank,
                "tokens": s.candidate.tokens.texts(),
                "model_score": s.candidate.model_score,
                "normalized_model_score": s.normalized_model_score,
                "stability": s.stability,
                "relevance": s.relevance,
                "normalized_relevance": s.normalized_relevance,
                "final_score": s.final_score,
                "missing_tokens": s.missing_tokens,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Blends normalized model score with causal evidence and re-sorts.
///
/// `final = (1-λ)·model + λ·(stability + relevance)/2`, where model scores
/// are min-max scaled within the list and relevance is divided by the list
/// maximum. Ties keep the model's order.
pub fn rerank(output: &RepairOutput, evidence: &[Evidence], cfg: &RerankConfig) -> Reranked {
    assert_eq!(
        output.len(),
        evidence.len(),
        "evidence must be aligned with candidates"
    );
    let candidates = output.candidates();
    let (lo, hi) = candidates
        .iter()
        .map(|c| c.model_score)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s), hi.max(s)));
    let rel_max = evidence.iter().map(|e| e.relevance).fold(0.0, f64::max);
    let lambda = cfg.lambda_mix;

    let mut scored: Vec<ScoredCandidate> = candidates
        .iter()
        .zip(evidence)
        .enumerate()
        .map(|(i, (c, e))| {
            let model = if hi > lo { (c.model_score - lo) / (hi - lo) } else { 1.0 };
            let relevance = if rel_max > 0.0 { e.relevance / rel_max } else { 0.0 };
            ScoredCandidate {
                candidate: c.clone(),
                model_rank: i + 1,
                normalized_model_score: model,
                stability: e.stability,
                relevance: e.relevance,
                normalized_relevance: relevance,
                final_score: (1.0 - lambda) * model + lambda * (e.stability + relevance) / 2.0,
                missing_tokens: e.missing_tokens.clone(),
            }
        })
        .collect();
    scored.sort_by(|a, b| {
        b.final_score
            .total_cmp(&a.final_score)
            .then(a.model_rank.cmp(&b.model_rank))
    });
    Reranked {
        output: RepairOutput::from_ordered(scored.iter().map(|s| s.candidate.clone()).collect()),
        scored,
    }
}
