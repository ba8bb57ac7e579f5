//! A deterministic rule-based repairer standing in for a trained model.
//!
//! Each rule rewrites the first occurrence of a code token pattern and is
//! gated on the comment: either on a concept (any of a set of synonymous
//! words) or on one literal surface word. Word-gated rules carry higher
//! scores than the concept rules they compete with, so on inputs that
//! trigger both the wrong patch wins at rank 1. The table is versioned and
//! shipped next to the synthetic corpus.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{ProgramInput, RepairCandidate, RepairModel, RepairOutput};
use crate::error::{ModelError, ResourceError};
use crate::tokenizer::{Language, TokenSequence};

pub const DEFAULT_TOY_RULES: &str = include_str!("../../resources/toy_rules.json");

/// Score of the unchanged-input fallback candidate.
pub const IDENTITY_SCORE: f64 = -5.0;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleGate {
    /// Any word of the named concept appears in the comment.
    Concept(String),
    /// This exact word appears in the comment.
    Word(String),
    Always,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyRule {
    pub id: String,
    pub gate: RuleGate,
    pub find: Vec<String>,
    pub replace: Vec<String>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyRuleTable {
    pub version: u32,
    pub max_candidates: usize,
    pub concepts: BTreeMap<String, Vec<String>>,
    pub rules: Vec<ToyRule>,
}

impl ToyRuleTable {
    pub fn parse(text: &str) -> Result<Self, ResourceError> {
        let table: ToyRuleTable =
            serde_json::from_str(text).map_err(|e| ResourceError::Json(e.to_string()))?;
        for rule in &table.rules {
            if let RuleGate::Concept(c) = &rule.gate {
                if !table.concepts.contains_key(c) {
                    return Err(ResourceError::Json(format!(
                        "rule {} names unknown concept {c:?}",
                        rule.id
                    )));
                }
            }
            if rule.find.is_empty() || !rule.score.is_finite() {
                return Err(ResourceError::Json(format!("rule {} is malformed", rule.id)));
            }
        }
        Ok(table)
    }
}

#[derive(Debug, Clone)]
pub struct ToyModel {
    table: ToyRuleTable,
}

impl ToyModel {
    pub fn new(table: ToyRuleTable) -> Self {
        Self { table }
    }

    pub fn bundled() -> Self {
        Self::new(ToyRuleTable::parse(DEFAULT_TOY_RULES).expect("bundled toy rules are well-formed"))
    }

    pub fn table(&self) -> &ToyRuleTable {
        &self.table
    }

    fn gate_open(&self, gate: &RuleGate, words: &HashSet<&str>) -> bool {
        match gate {
            RuleGate::Always => true,
            RuleGate::Word(w) => words.contains(w.as_str()),
            RuleGate::Concept(c) => self.table.concepts[c]
                .iter()
                .any(|w| words.contains(w.as_str())),
        }
    }

    /// Rules that fire on `input`, in table order, with the patched code.
    pub fn fired(&self, input: &ProgramInput) -> Vec<(&ToyRule, Vec<String>)> {
        let words: HashSet<&str> = input.comment().texts().into_iter().collect();
        let code = input.code().texts();
        self.table
            .rules
            .iter()
            .filter(|r| self.gate_open(&r.gate, &words))
            .filter_map(|r| {
                let at = code
                    .windows(r.find.len())
                    .position(|w| w.iter().zip(&r.find).all(|(a, b)| *a == b))?;
                let mut patched: Vec<String> = code[..at].iter().map(|s| s.to_string()).collect();
                patched.extend(r.replace.iter().cloned());
                patched.extend(code[at + r.find.len()..].iter().map(|s| s.to_string()));
                Some((r, patched))
            })
            .collect()
    }
}

impl RepairModel for ToyModel {
    fn name(&self) -> &str {
        "toy"
    }

    fn repair(&self, input: &ProgramInput, beam: usize) -> Result<RepairOutput, ModelError> {
        let mut candidates = Vec::new();
        for (rule, patched) in self.fired(input) {
            let tokens = TokenSequence::code_from_texts(&patched, Language::Other);
            if let Ok(c) = RepairCandidate::new(tokens, rule.score) {
                candidates.push(c);
            }
        }
        if !input.code().is_empty() {
            candidates.push(RepairCandidate::new(input.code().clone(), IDENTITY_SCORE)?);
        }
        if candidates.is_empty() {
            return Err(ModelError::Input("toy model needs code to repair".into()));
        }
        RepairOutput::new(candidates, beam.min(self.table.max_candidates))
    }
}
