use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CorpusError, ModelError};
use crate::model::ProgramInput;
use crate::tokenizer::{tokenize_code_in, tokenize_comment, Language, Stopwords, TokenSequence};

pub const BUNDLED_CORPUS: &str = include_str!("../../resources/corpus/synthetic40.jsonl");
pub const BUNDLED_METADATA: &str = include_str!("../../resources/corpus/synthetic40.meta.json");

/// One buggy program with its comment and the reference fix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BugRecord {
    pub id: String,
    pub language: String,
    pub buggy: String,
    pub comment: String,
    pub fixed: String,
}

impl BugRecord {
    pub fn language(&self) -> Language {
        Language::from_name(&self.language)
    }

    pub fn input(&self) -> Result<ProgramInput, ModelError> {
        ProgramInput::new(
            tokenize_code_in(&self.buggy, self.language()),
            tokenize_comment(&self.comment, Stopwords::bundled()),
        )
    }

    pub fn fixed_tokens(&self) -> TokenSequence {
        tokenize_code_in(&self.fixed, self.language())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub name: String,
    pub bugs: Vec<BugRecord>,
}

impl Corpus {
    pub fn bundled() -> Self {
        Self {
            name: "synthetic40".into(),
            bugs: parse_corpus(BUNDLED_CORPUS).expect("bundled corpus is valid"),
        }
    }

    /// Reads a JSON Lines file; the corpus is named after the file stem.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, CorpusError> {
        let path = path.as_ref();
        Ok(Self {
            name: path
                .file_stem()
                .map_or_else(|| "corpus".into(), |s| s.to_string_lossy().into_owned()),
            bugs: load_corpus(path)?,
        })
    }

    pub fn get(&self, id: &str) -> Result<&BugRecord, CorpusError> {
        self.bugs
            .iter()
            .find(|b| b.id == id)
            .ok_or_else(|| CorpusError::UnknownBug(id.into()))
    }

    pub fn len(&self) -> usize {
        self.bugs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bugs.is_empty()
    }
}

/// Counts published alongside the bundled corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusMetadata {
    pub name: String,
    pub bug_count: usize,
    pub rules_version: u32,
    /// Bugs fixed by the toy model's unperturbed top-1, default settings.
    pub fixed_baseline: usize,
    /// Bugs fixed after reranking, default settings.
    pub fixed_with_ci: usize,
    /// Bugs whose correct fix the toy model ranks second.
    pub mis_prioritized: Vec<String>,
}

impl CorpusMetadata {
    pub fn bundled() -> Self {
        serde_json::from_str(BUNDLED_METADATA).expect("bundled metadata is valid")
    }
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<BugRecord>, CorpusError> {
    parse_corpus(&std::fs::read_to_string(path)?)
}

/// Parses JSON Lines; blank lines are skipped, line numbers are 1-based.
pub fn parse_corpus(text: &str) -> Result<Vec<BugRecord>, CorpusError> {
    let mut seen = HashSet::new();
    let mut bugs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let bug: BugRecord = serde_json::from_str(line).map_err(|e| CorpusError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        for (field, value) in [("id", &bug.id), ("buggy", &bug.buggy), ("fixed", &bug.fixed)] {
            if value.trim().is_empty() {
                return Err(CorpusError::Parse {
                    line: line_no,
                    message: format!("field `{field}` is empty"),
                });
            }
        }
        if !seen.insert(bug.id.clone()) {
            return Err(CorpusError::DuplicateId {
                line: line_no,
                id: bug.id,
            });
        }
        bugs.push(bug);
    }
    Ok(bugs)
}
