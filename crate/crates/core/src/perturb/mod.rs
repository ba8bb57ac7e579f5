//! Input perturbation by text data augmentation.
//!
//! Word-level operators (SR, RI, RS, RD) change `m = ⌊alpha·l⌋` tokens of
//! each enabled stream; back-translation (BT) paraphrases the whole stream.
//! Every sample records which original tokens it kept, which later becomes
//! the feature row of the causal design matrix.

mod lexicon;
mod ops;
mod translate;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use lexicon::{IdentifierRenamer, Lexicon, SynonymProvider, DEFAULT_LEXICON};
pub use ops::{back_translate, random_delete, random_insert, random_swap, synonym_replace, Perturbed};
pub use translate::{StubTranslator, Translator, DEFAULT_PHRASES};

use crate::error::{ConfigError, PerturbError};
use crate::model::ProgramInput;
use crate::tokenizer::TokenSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AugmentOp {
    /// Synonym replacement.
    SR,
    /// Random insertion.
    RI,
    /// Random swap.
    RS,
    /// Random deletion.
    RD,
    /// Back-translation.
    BT,
}

impl AugmentOp {
    pub const ALL: [AugmentOp; 5] = [
        AugmentOp::SR,
        AugmentOp::RI,
        AugmentOp::RS,
        AugmentOp::RD,
        AugmentOp::BT,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AugmentOp::SR => "SR",
            AugmentOp::RI => "RI",
            AugmentOp::RS => "RS",
            AugmentOp::RD => "RD",
            AugmentOp::BT => "BT",
        }
    }
}

impl fmt::Display for AugmentOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AugmentOp {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "SR" => Ok(AugmentOp::SR),
            "RI" => Ok(AugmentOp::RI),
            "RS" => Ok(AugmentOp::RS),
            "RD" => Ok(AugmentOp::RD),
            "BT" => Ok(AugmentOp::BT),
            other => Err(ConfigError::Invalid {
                name: "op",
                message: format!("unknown augmentation {other:?}, expected SR|RI|RS|RD|BT"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationConfig {
    /// Fraction of words changed per stream; also the deletion probability for RD.
    pub alpha: f64,
    /// Number of perturbed samples per input.
    pub m_dist: usize,
    pub op: AugmentOp,
    pub seed: u64,
    pub perturb_code: bool,
    pub perturb_comment: bool,
}

impl Default for PerturbationConfig {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            m_dist: 100,
            op: AugmentOp::SR,
            seed: 0x5eed,
            perturb_code: false,
            perturb_comment: true,
        }
    }
}

impl PerturbationConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(ConfigError::Alpha(self.alpha));
        }
        if self.m_dist == 0 {
            return Err(ConfigError::ZeroSamples);
        }
        if !self.perturb_code && !self.perturb_comment {
            return Err(ConfigError::NoStreams);
        }
        Ok(())
    }
}

/// `⌊alpha·l⌋`.
///
/// A relative slack of 1e-9 is added before flooring so that decimal
/// fractions land on the intended integer (0.29 · 100 is 29, although the
/// nearest double to 0.29 is slightly smaller).
pub fn perturbation_count(alpha: f64, l: usize) -> Result<usize, ConfigError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(ConfigError::Alpha(alpha));
    }
    let exact = alpha * l as f64;
    let m = (exact + 1e-9 * exact.max(1.0)).floor() as usize;
    Ok(m.min(l))
}

/// One perturbed variant of a [`ProgramInput`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbedSample {
    pub index: usize,
    pub code: TokenSequence,
    pub comment: TokenSequence,
    /// Over the original tokens, code stream first then comment stream.
    pub retained_mask: Vec<bool>,
    pub op: AugmentOp,
}

impl PerturbedSample {
    pub fn to_input(&self) -> ProgramInput {
        ProgramInput::from_parts_unchecked(self.code.clone(), self.comment.clone())
    }
}

/// Holds the lexical resources the operators draw from.
#[derive(Clone)]
pub struct Perturber {
    comment_synonyms: Arc<dyn SynonymProvider>,
    code_synonyms: Arc<dyn SynonymProvider>,
    translator: Arc<dyn Translator>,
}

impl fmt::Debug for Perturber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Perturber").finish_non_exhaustive()
    }
}

impl Default for Perturber {
    fn default() -> Self {
        Self::bundled()
    }
}

impl Perturber {
    /// Bundled lexicon and phrase table; identifier renaming on code.
    pub fn bundled() -> Self {
        Self {
            comment_synonyms: Arc::new(Lexicon::bundled().clone()),
            code_synonyms: Arc::new(IdentifierRenamer),
            translator: Arc::new(StubTranslator::bundled().clone()),
        }
    }

    pub fn new(
        comment_synonyms: Arc<dyn SynonymProvider>,
        code_synonyms: Arc<dyn SynonymProvider>,
        translator: Arc<dyn Translator>,
    ) -> Self {
        Self {
            comment_synonyms,
            code_synonyms,
            translator,
        }
    }

    pub fn with_translator(mut self, translator: Arc<dyn Translator>) -> Self {
        self.translator = translator;
        self
    }

    pub fn with_comment_synonyms(mut self, synonyms: Arc<dyn SynonymProvider>) -> Self {
        self.comment_synonyms = synonyms;
        self
    }

    fn apply(
        &self,
        seq: &TokenSequence,
        synonyms: &dyn SynonymProvider,
        cfg: &PerturbationConfig,
        rng: &mut ChaCha8Rng,
    ) -> Result<Perturbed, crate::error::TranslateError> {
        let m = perturbation_count(cfg.alpha, seq.len()).unwrap_or(0);
        Ok(match cfg.op {
            AugmentOp::SR => synonym_replace(seq, m, synonyms, rng),
            AugmentOp::RI => random_insert(seq, m, synonyms, rng),
            AugmentOp::RS => random_swap(seq, m, rng),
            AugmentOp::RD => random_delete(seq, cfg.alpha, rng),
            AugmentOp::BT => back_translate(seq, self.translator.as_ref())?,
        })
    }

    /// Builds sample `index` from its own RNG stream, so samples can be
    /// produced in any order or in parallel.
    pub fn sample(
        &self,
        input: &ProgramInput,
        cfg: &PerturbationConfig,
        index: usize,
    ) -> Result<PerturbedSample, PerturbError> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(index as u64);
        let wrap = |source| PerturbError::Translator { index, source };

        let code = if cfg.perturb_code {
            self.apply(input.code(), self.code_synonyms.as_ref(), cfg, &mut rng)
                .map_err(wrap)?
        } else {
            Perturbed {
                seq: input.code().clone(),
                retained: vec![true; input.code().len()],
            }
        };
        let comment = if cfg.perturb_comment {
            self.apply(input.comment(), self.comment_synonyms.as_ref(), cfg, &mut rng)
                .map_err(wrap)?
        } else {
            Perturbed {
                seq: input.comment().clone(),
                retained: vec![true; input.comment().len()],
            }
        };
        let mut retained_mask = code.retained;
        retained_mask.extend(comment.retained);
        Ok(PerturbedSample {
            index,
            code: code.seq,
            comment: comment.seq,
            retained_mask,
            op: cfg.op,
        })
    }

    /// Produces exactly `cfg.m_dist` samples.
    pub fn generate(
        &self,
        input: &ProgramInput,
        cfg: &PerturbationConfig,
    ) -> Result<Vec<PerturbedSample>, PerturbError> {
        cfg.validate()?;
        (0..cfg.m_dist)
            .into_par_iter()
            .map(|i| self.sample(input, cfg, i))
            .collect()
    }
}

/// [`Perturber::generate`] with the bundled resources.
pub fn generate_perturbations(
    input: &ProgramInput,
    cfg: &PerturbationConfig,
) -> Result<Vec<PerturbedSample>, PerturbError> {
    Perturber::bundled().generate(input, cfg)
}
