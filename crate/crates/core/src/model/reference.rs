//! Trivial black boxes with known dependency structure.

use super::{ProgramInput, RepairCandidate, RepairModel, RepairOutput};
use crate::error::ModelError;
use crate::tokenizer::{Language, TokenSequence};

/// Returns the input code unchanged, so every output token depends exactly
/// on the input token with the same text.
#[derive(Debug, Clone, Copy, Default)]
pub struct CopyModel;

impl RepairModel for CopyModel {
    fn name(&self) -> &str {
        "copy"
    }

    fn repair(&self, input: &ProgramInput, beam: usize) -> Result<RepairOutput, ModelError> {
        let candidate = RepairCandidate::new(input.code().clone(), 0.0)
            .map_err(|_| ModelError::Input("copy model needs non-empty code".into()))?;
        RepairOutput::new(vec![candidate], beam)
    }
}

/// Emits the same patch no matter what it is given.
#[derive(Debug, Clone)]
pub struct ConstantModel {
    patch: TokenSequence,
}

impl ConstantModel {
    pub fn new<S: AsRef<str>>(tokens: &[S]) -> Self {
        Self {
            patch: TokenSequence::code_from_texts(tokens, Language::Other),
        }
    }
}

impl RepairModel for ConstantModel {
    fn name(&self) -> &str {
        "constant"
    }

    fn repair(&self, _input: &ProgramInput, beam: usize) -> Result<RepairOutput, ModelError> {
        RepairOutput::new(vec![RepairCandidate::new(self.patch.clone(), 0.0)?], beam)
    }
}
