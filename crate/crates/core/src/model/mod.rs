//! The repair model as a black box: a [`ProgramInput`] goes in, a ranked
//! [`RepairOutput`] comes out.
//!
//! A [`ModelHandle`] wraps one transport (in-process, subprocess or HTTP),
//! performs the protocol handshake once, and memoizes every response.

mod cache;
pub mod protocol;
mod reference;
mod toy;
mod transport;

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use cache::{CacheKey, ResponseCache};
pub use reference::{ConstantModel, CopyModel};
pub use toy::{RuleGate, ToyModel, ToyRule, ToyRuleTable, DEFAULT_TOY_RULES, IDENTITY_SCORE};
pub use transport::{HttpTransport, InProcess, SubprocessTransport, Transport};

use crate::error::ModelError;
use crate::tokenizer::{classify_code_token, Language, Stream, Token, TokenKind, TokenSequence};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);
pub const DEFAULT_HTTP_INFLIGHT: usize = 4;

/// The program handed to the model: buggy code plus its comment.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProgramInput {
    code: TokenSequence,
    comment: TokenSequence,
}

impl ProgramInput {
    pub fn new(code: TokenSequence, comment: TokenSequence) -> Result<Self, ModelError> {
        if code.stream() != Stream::Code || comment.stream() != Stream::Comment {
            return Err(ModelError::Input("stream tags do not match their slots".into()));
        }
        if code.is_empty() && comment.is_empty() {
            return Err(ModelError::Input("code and comment are both empty".into()));
        }
        Ok(Self { code, comment })
    }

    pub(crate) fn from_parts_unchecked(code: TokenSequence, comment: TokenSequence) -> Self {
        Self { code, comment }
    }

    pub fn code(&self) -> &TokenSequence {
        &self.code
    }

    pub fn comment(&self) -> &TokenSequence {
        &self.comment
    }

    /// Total token count, code then comment.
    pub fn len(&self) -> usize {
        self.code.len() + self.comment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Canonical serialization used for cache keys.
    pub fn canonical(&self) -> String {
        serde_json::json!({
            "code": self.code.texts(),
            "comment": self.comment.texts(),
        })
        .to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairCandidate {
    pub tokens: TokenSequence,
    /// Higher is better (log-probability scale).
    pub model_score: f64,
}

impl RepairCandidate {
    pub fn new(tokens: TokenSequence, model_score: f64) -> Result<Self, ModelError> {
        if tokens.is_empty() {
            return Err(ModelError::Protocol("candidate has no tokens".into()));
        }
        if !model_score.is_finite() {
            return Err(ModelError::Protocol(format!("non-finite score {model_score}")));
        }
        Ok(Self {
            tokens,
            model_score,
        })
    }
}

/// Candidates sorted by score, best first, without duplicate token sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairOutput {
    candidates: Vec<RepairCandidate>,
}

impl RepairOutput {
    /// Sorts by descending score (stable on arrival order), drops later
    /// duplicates and keeps at most `beam` candidates.
    pub fn new(mut candidates: Vec<RepairCandidate>, beam: usize) -> Result<Self, ModelError> {
        candidates.sort_by(|a, b| b.model_score.total_cmp(&a.model_score));
        let mut out: Vec<RepairCandidate> = Vec::with_capacity(candidates.len());
        for c in candidates {
            if !out.iter().any(|o| o.tokens.same_texts(&c.tokens)) {
                out.push(c);
            }
        }
        out.truncate(beam.max(1));
        if out.is_empty() {
            return Err(ModelError::Protocol("model returned no candidates".into()));
        }
        Ok(Self { candidates: out })
    }

    /// Keeps the given order as-is; used after reranking.
    pub(crate) fn from_ordered(candidates: Vec<RepairCandidate>) -> Self {
        debug_assert!(!candidates.is_empty());
        Self { candidates }
    }

    /// Re-derives token kinds: a token takes the kind of the first input
    /// code token with the same text, otherwise the language-neutral
    /// classification. The wire carries only texts, so this keeps outputs
    /// identical across transports.
    fn with_kinds_from(self, code: &TokenSequence) -> Self {
        let mut known: HashMap<&str, TokenKind> = HashMap::new();
        for t in code.tokens() {
            known.entry(t.text.as_str()).or_insert(t.kind);
        }
        let candidates = self
            .candidates
            .into_iter()
            .map(|c| {
                let tokens = c.tokens.into_tokens().into_iter().map(|t| Token {
                    kind: known
                        .get(t.text.as_str())
                        .copied()
                        .unwrap_or_else(|| classify_code_token(&t.text, Language::Other)),
                    ..t
                });
                RepairCandidate {
                    tokens: TokenSequence::from_tokens(Stream::Code, tokens),
                    model_score: c.model_score,
                }
            })
            .collect();
        Self { candidates }
    }

    pub fn candidates(&self) -> &[RepairCandidate] {
        &self.candidates
    }

    pub fn top(&self) -> &RepairCandidate {
        &self.candidates[0]
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// 1-based rank of the first candidate whose tokens equal `target`.
    pub fn rank_of(&self, target: &TokenSequence) -> Option<usize> {
        self.candidates
            .iter()
            .position(|c| c.tokens.same_texts(target))
            .map(|i| i + 1)
    }
}

/// A repair model that runs inside this process.
pub trait RepairModel: Send + Sync {
    fn name(&self) -> &str;
    fn repair(&self, input: &ProgramInput, beam: usize) -> Result<RepairOutput, ModelError>;
}

/// A connected model: transport + handshake result + response cache.
pub struct ModelHandle {
    transport: Box<dyn Transport>,
    name: String,
    identity: String,
    cache: ResponseCache,
    round_trips: AtomicUsize,
}

impl std::fmt::Debug for ModelHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModelHandle")
            .field("identity", &self.identity)
            .field("round_trips", &self.round_trips())
            .finish_non_exhaustive()
    }
}

impl ModelHandle {
    /// Connects through `transport`, performing the handshake.
    pub fn connect(transport: Box<dyn Transport>) -> Result<Self, ModelError> {
        let name = transport.handshake()?;
        let identity = format!("{}#{}", transport.describe(), name);
        Ok(Self {
            transport,
            name,
            identity,
            cache: ResponseCache::in_memory(),
            round_trips: AtomicUsize::new(0),
        })
    }

    pub fn in_process(model: Arc<dyn RepairModel>) -> Self {
        Self::connect(Box::new(InProcess::new(model))).expect("in-process handshake cannot fail")
    }

    /// The bundled rule-based toy repairer.
    pub fn toy() -> Self {
        Self::in_process(Arc::new(ToyModel::bundled()))
    }

    pub fn subprocess(command: &str, timeout: Duration) -> Result<Self, ModelError> {
        Self::connect(Box::new(SubprocessTransport::spawn(command, timeout)?))
    }

    pub fn http(base_url: &str, max_inflight: usize, timeout: Duration) -> Result<Self, ModelError> {
        Self::connect(Box::new(HttpTransport::new(base_url, max_inflight, timeout)))
    }

    /// Parses `toy`, `copy`, `cmd:<shell command>` or `http:<base url>`.
    pub fn from_spec(spec: &str, timeout: Duration) -> Result<Self, ModelError> {
        if spec == "toy" {
            Ok(Self::toy())
        } else if spec == "copy" {
            Ok(Self::in_process(Arc::new(CopyModel)))
        } else if let Some(cmd) = spec.strip_prefix("cmd:") {
            Self::subprocess(cmd, timeout)
        } else if let Some(url) = spec.strip_prefix("http:") {
            let url = if url.starts_with("//") {
                format!("http:{url}")
            } else {
                url.to_string()
            };
            Self::http(&url, DEFAULT_HTTP_INFLIGHT, timeout)
        } else {
            Err(ModelError::Handshake(format!(
                "unknown model spec {spec:?}; expected toy, copy, cmd:<command> or http:<url>"
            )))
        }
    }

    /// Spill cached responses to `dir`, content-addressed by key hash.
    pub fn with_spill_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.cache = ResponseCache::with_spill(dir);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn identity(&self) -> &str {
        &self.identity
    }

    pub fn max_inflight(&self) -> usize {
        self.transport.max_inflight().max(1)
    }

    /// Number of requests that actually reached the transport.
    pub fn round_trips(&self) -> usize {
        self.round_trips.load(Ordering::Relaxed)
    }

    pub fn cache(&self) -> &ResponseCache {
        &self.cache
    }

    fn key(&self, input: &ProgramInput, beam: usize) -> CacheKey {
        CacheKey::new(&self.identity, input, beam)
    }

    fn fetch(&self, key: &CacheKey, input: &ProgramInput, beam: usize) -> Result<RepairOutput, ModelError> {
        if let Some(hit) = self.cache.get(key) {
            return Ok(hit);
        }
        self.round_trips.fetch_add(1, Ordering::Relaxed);
        let out = self.transport.request(input, beam)?.with_kinds_from(input.code());
        self.cache.insert(key, &out);
        Ok(out)
    }

    pub fn query(&self, input: &ProgramInput, beam: usize) -> Result<RepairOutput, ModelError> {
        if beam == 0 {
            return Err(ModelError::Input("beam must be at least 1".into()));
        }
        self.fetch(&self.key(input, beam), input, beam)
    }

    /// Queries every input; element `i` is exactly `query(inputs[i])`.
    /// Duplicate inputs share one request, and up to `max_inflight`
    /// requests run at once. Errors stay in their slot.
    pub fn query_batch(
        &self,
        inputs: &[ProgramInput],
        beam: usize,
    ) -> Vec<Result<RepairOutput, ModelError>> {
        if beam == 0 {
            return inputs
                .iter()
                .map(|_| Err(ModelError::Input("beam must be at least 1".into())))
                .collect();
        }
        let keys: Vec<CacheKey> = inputs.iter().map(|x| self.key(x, beam)).collect();
        let mut first_of: HashMap<&CacheKey, usize> = HashMap::new();
        let mut distinct = Vec::new();
        for (i, k) in keys.iter().enumerate() {
            first_of.entry(k).or_insert_with(|| {
                distinct.push(i);
                i
            });
        }

        let workers = self.max_inflight().min(distinct.len()).max(1);
        let mut results: Vec<Option<Result<RepairOutput, ModelError>>> = vec![None; inputs.len()];
        if workers == 1 {
            for &i in &distinct {
                results[i] = Some(self.fetch(&keys[i], &inputs[i], beam));
            }
        } else {
            let next = AtomicUsize::new(0);
            let done: Vec<(usize, Result<RepairOutput, ModelError>)> = std::thread::scope(|s| {
                let handles: Vec<_> = (0..workers)
                    .map(|_| {
                        s.spawn(|| {
                            let mut local = Vec::new();
                            loop {
                                let n = next.fetch_add(1, Ordering::Relaxed);
                                let Some(&i) = distinct.get(n) else { break };
                                local.push((i, self.fetch(&keys[i], &inputs[i], beam)));
                            }
                            local
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .flat_map(|h| h.join().expect("query worker panicked"))
                    .collect()
            });
            for (i, r) in done {
                results[i] = Some(r);
            }
        }
        (0..inputs.len())
            .map(|i| {
                let src = first_of[&keys[i]];
                results[src].clone().expect("every distinct input was queried")
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenizer::{tokenize_code, tokenize_comment, Stopwords};

    fn input(code: &str, comment: &str) -> ProgramInput {
        ProgramInput::new(tokenize_code(code), tokenize_comment(comment, Stopwords::bundled())).unwrap()
    }

    fn cand(code: &str, score: f64) -> RepairCandidate {
        RepairCandidate::new(tokenize_code(code), score).unwrap()
    }

    #[test]
    fn input_invariants() {
        assert!(ProgramInput::new(tokenize_code(""), tokenize_comment("", Stopwords::bundled())).is_err());
        assert!(ProgramInput::new(tokenize_code(""), tokenize_comment("only words", Stopwords::bundled())).is_ok());
        assert!(ProgramInput::new(tokenize_comment("x", Stopwords::bundled()), tokenize_comment("y", Stopwords::bundled())).is_err());
    }

    #[test]
    fn output_sorting_dedup_and_beam() {
        let out = RepairOutput::new(
            vec![cand("a", -2.0), cand("b", -1.0), cand("c", -1.0), cand("b", -0.5), cand("d", -9.0)],
            3,
        )
        .unwrap();
        let tops: Vec<String> = out.candidates().iter().map(|c| c.tokens.to_string()).collect();
        // "b" at -0.5 wins and its later duplicate is dropped; c keeps arrival order vs b@-1.0
        assert_eq!(tops, ["b", "c", "a"]);
        assert!(RepairOutput::new(vec![], 3).is_err());
        assert!(RepairCandidate::new(tokenize_code("x"), f64::NAN).is_err());
        assert!(RepairCandidate::new(tokenize_code(""), 0.0).is_err());
    }

    #[test]
    fn cache_bypasses_transport() {
        let model = ModelHandle::toy();
        let x = input("for ( i = 0 ; i <= n ; i ++ )", "loop exclusive of n");
        let a = model.query(&x, 5).unwrap();
        let b = model.query(&x, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(model.round_trips(), 1);
        // a different beam is a different key
        model.query(&x, 1).unwrap();
        assert_eq!(model.round_trips(), 2);
    }

    #[test]
    fn batch_dedups_and_preserves_order() {
        let model = ModelHandle::toy();
        let x = input("for ( i = 0 ; i <= n ; i ++ )", "loop exclusive of n");
        let y = input("while ( a != b )", "stop when they are equal");
        let single = model.query(&y, 5).unwrap();
        let out = model.query_batch(&[x.clone(), y.clone(), x.clone()], 5);
        assert_eq!(out.len(), 3);
        assert_eq!(out[0], out[2]);
        assert_eq!(out[1].as_ref().unwrap(), &single);
        assert_eq!(model.round_trips(), 2);
        assert!(model.query(&x, 0).is_err());
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(ModelHandle::from_spec("toy", DEFAULT_TIMEOUT).unwrap().name(), "toy");
        assert_eq!(ModelHandle::from_spec("copy", DEFAULT_TIMEOUT).unwrap().name(), "copy");
        assert!(ModelHandle::from_spec("bogus", DEFAULT_TIMEOUT).is_err());
    }
}
