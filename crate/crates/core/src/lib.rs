//! Perturbation-based explanation and reranking for black-box program
//! repair models.
//!
//! The pipeline: tokenize a buggy program and its comment, perturb the
//! comment (or code) with text augmentation, query the model on every
//! variant, fit which input tokens drive which output tokens, co-cluster
//! that dependency graph into an explanation, and use the same evidence to
//! rerank the model's candidate patches.

pub mod align;
pub mod causal;
pub mod error;
pub mod harness;
pub mod model;
pub mod partition;
pub mod perturb;
pub mod rerank;
pub mod tokenizer;

pub use error::{Error, Result};
pub use harness::{analyze, evaluate, explain_bug, Corpus, PipelineConfig};
pub use model::{ModelHandle, ProgramInput, RepairCandidate, RepairOutput};
pub use perturb::{AugmentOp, PerturbationConfig, Perturber};
pub use tokenizer::{tokenize_code, tokenize_comment, Stopwords, TokenSequence};
