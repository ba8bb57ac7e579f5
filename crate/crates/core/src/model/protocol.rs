//! Wire protocol version 1, shared by the subprocess and HTTP transports.
//!
//! Subprocess: one JSON object per line over stdin/stdout. HTTP: `GET
//! /v1/hello` for the handshake and `POST /v1/repair` with the same
//! request/response bodies.

use serde::{Deserialize, Serialize};

use super::{ProgramInput, RepairCandidate, RepairOutput};
use crate::error::ModelError;
use crate::tokenizer::{Language, TokenSequence};

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HelloBody {
    pub protocol: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hello {
    pub hello: HelloBody,
}

impl Hello {
    /// The adapter's opening line: `{"hello":{"protocol":1}}`.
    pub fn request() -> Self {
        Self {
            hello: HelloBody {
                protocol: PROTOCOL_VERSION,
                name: None,
            },
        }
    }

    pub fn reply(name: impl Into<String>) -> Self {
        Self {
            hello: HelloBody {
                protocol: PROTOCOL_VERSION,
                name: Some(name.into()),
            },
        }
    }

    /// Validates a model's handshake reply and returns the model name.
    pub fn accept(line: &str) -> Result<String, ModelError> {
        let hello: Hello = serde_json::from_str(line.trim())
            .map_err(|e| ModelError::Handshake(format!("bad hello {line:?}: {e}")))?;
        if hello.hello.protocol != PROTOCOL_VERSION {
            return Err(ModelError::Handshake(format!(
                "model speaks protocol {}, expected {PROTOCOL_VERSION}",
                hello.hello.protocol
            )));
        }
        hello
            .hello
            .name
            .ok_or_else(|| ModelError::Handshake("hello reply without a name".into()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairRequest {
    pub id: String,
    pub code_tokens: Vec<String>,
    pub comment_tokens: Vec<String>,
    pub beam: usize,
}

impl RepairRequest {
    pub fn new(id: impl Into<String>, input: &ProgramInput, beam: usize) -> Self {
        Self {
            id: id.into(),
            code_tokens: input.code().owned_texts(),
            comment_tokens: input.comment().owned_texts(),
            beam,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireCandidate {
    pub tokens: Vec<String>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairResponse {
    #[serde(default)]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub candidates: Vec<WireCandidate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RepairResponse {
    pub fn from_output(id: impl Into<String>, output: &RepairOutput) -> Self {
        Self {
            id: Some(id.into()),
            candidates: output
                .candidates()
                .iter()
                .map(|c| WireCandidate {
                    tokens: c.tokens.owned_texts(),
                    score: c.model_score,
                })
                .collect(),
            error: None,
        }
    }

    /// Checks the echoed id and converts to a sorted, deduplicated output.
    pub fn into_output(self, expected_id: &str, beam: usize) -> Result<RepairOutput, ModelError> {
        match self.id.as_deref() {
            Some(id) if id == expected_id => {}
            Some(id) => {
                return Err(ModelError::Protocol(format!(
                    "response id {id:?} does not match request id {expected_id:?}"
                )))
            }
            None => return Err(ModelError::Protocol("response without \"id\"".into())),
        }
        if let Some(err) = self.error {
            return Err(ModelError::Remote(err));
        }
        let candidates = self
            .candidates
            .into_iter()
            .map(|c| RepairCandidate::new(TokenSequence::code_from_texts(&c.tokens, Language::Other), c.score))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ModelError::Protocol(e.to_string()))?;
        RepairOutput::new(candidates, beam).map_err(|e| ModelError::Protocol(e.to_string()))
    }
}
