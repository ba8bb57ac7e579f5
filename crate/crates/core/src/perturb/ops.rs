//! The five augmentation operators. Each returns the perturbed sequence and
//! a retention mask over the positions of the original sequence.

use rand::seq::index;
use rand::Rng;

use super::lexicon::SynonymProvider;
use super::translate::Translator;
use crate::align::lcs_pairs;
use crate::error::TranslateError;
use crate::tokenizer::{Token, TokenSequence};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Perturbed {
    pub seq: TokenSequence,
    /// `retained[i]` is true when original token `i` survives unreplaced and undeleted.
    pub retained: Vec<bool>,
}

impl Perturbed {
    fn identity(seq: &TokenSequence) -> Self {
        Self {
            seq: seq.clone(),
            retained: vec![true; seq.len()],
        }
    }
}

fn retext(template: &Token, text: String) -> Token {
    Token {
        text,
        ..template.clone()
    }
}

/// Replaces `min(m, eligible)` distinct eligible tokens with a uniformly
/// chosen synonym. A token is eligible when the provider offers at least
/// one synonym for it.
pub fn synonym_replace<R: Rng + ?Sized>(
    seq: &TokenSequence,
    m: usize,
    lexicon: &dyn SynonymProvider,
    rng: &mut R,
) -> Perturbed {
    let candidates: Vec<(usize, Vec<String>)> = seq
        .tokens()
        .iter()
        .enumerate()
        .map(|(i, t)| (i, lexicon.synonyms(t)))
        .filter(|(_, syns)| !syns.is_empty())
        .collect();
    let picks = m.min(candidates.len());
    if picks == 0 {
        return Perturbed::identity(seq);
    }
    let mut tokens = seq.tokens().to_vec();
    let mut retained = vec![true; seq.len()];
    for chosen in index::sample(rng, candidates.len(), picks).into_iter() {
        let (pos, syns) = &candidates[chosen];
        let syn = syns[rng.gen_range(0..syns.len())].clone();
        tokens[*pos] = retext(&tokens[*pos], syn);
        retained[*pos] = false;
    }
    Perturbed {
        seq: TokenSequence::from_tokens(seq.stream(), tokens),
        retained,
    }
}

/// `m` times: take a random eligible original token and insert one of its
/// synonyms at a uniformly random slot of the growing sequence.
pub fn random_insert<R: Rng + ?Sized>(
    seq: &TokenSequence,
    m: usize,
    lexicon: &dyn SynonymProvider,
    rng: &mut R,
) -> Perturbed {
    let sources: Vec<(usize, Vec<String>)> = seq
        .tokens()
        .iter()
        .enumerate()
        .map(|(i, t)| (i, lexicon.synonyms(t)))
        .filter(|(_, syns)| !syns.is_empty())
        .collect();
    if m == 0 || sources.is_empty() {
        return Perturbed::identity(seq);
    }
    let mut tokens = seq.tokens().to_vec();
    for _ in 0..m {
        let (src, syns) = &sources[rng.gen_range(0..sources.len())];
        let syn = syns[rng.gen_range(0..syns.len())].clone();
        let slot = rng.gen_range(0..=tokens.len());
        let new = retext(&seq.tokens()[*src], syn);
        tokens.insert(slot, new);
    }
    Perturbed {
        seq: TokenSequence::from_tokens(seq.stream(), tokens),
        retained: vec![true; seq.len()],
    }
}

/// `m` independent swaps of two distinct uniformly chosen positions.
pub fn random_swap<R: Rng + ?Sized>(seq: &TokenSequence, m: usize, rng: &mut R) -> Perturbed {
    let n = seq.len();
    if n < 2 || m == 0 {
        return Perturbed::identity(seq);
    }
    let mut tokens = seq.tokens().to_vec();
    for _ in 0..m {
        let a = rng.gen_range(0..n);
        let mut b = rng.gen_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        tokens.swap(a, b);
    }
    Perturbed {
        seq: TokenSequence::from_tokens(seq.stream(), tokens),
        retained: vec![true; n],
    }
}

/// Deletes each token independently with probability `p`. A non-empty input
/// never becomes empty: if every token was deleted, one uniformly chosen
/// token is kept.
pub fn random_delete<R: Rng + ?Sized>(seq: &TokenSequence, p: f64, rng: &mut R) -> Perturbed {
    let n = seq.len();
    if n == 0 {
        return Perturbed::identity(seq);
    }
    let p = p.clamp(0.0, 1.0);
    let mut retained: Vec<bool> = (0..n).map(|_| !rng.gen_bool(p)).collect();
    if !retained.iter().any(|&r| r) {
        retained[rng.gen_range(0..n)] = true;
    }
    let tokens = seq
        .tokens()
        .iter()
        .zip(&retained)
        .filter(|(_, &keep)| keep)
        .map(|(t, _)| t.clone());
    Perturbed {
        seq: TokenSequence::from_tokens(seq.stream(), tokens),
        retained,
    }
}

/// Round-trips the sequence through `translator`. Retention is the set of
/// original positions matched by a leftmost LCS alignment with the output.
pub fn back_translate(
    seq: &TokenSequence,
    translator: &dyn Translator,
) -> Result<Perturbed, TranslateError> {
    if seq.is_empty() {
        return Ok(Perturbed::identity(seq));
    }
    let words = seq.owned_texts();
    let output = translator.round_trip(&words)?;
    let pairs = lcs_pairs(&words, &output);
    let mut retained = vec![false; seq.len()];
    let mut source_of = vec![None; output.len()];
    for &(i, j) in &pairs {
        retained[i] = true;
        source_of[j] = Some(i);
    }
    // New words borrow kind metadata from the nearest preceding original token.
    let mut last = &seq.tokens()[0];
    let tokens: Vec<Token> = output
        .into_iter()
        .enumerate()
        .map(|(j, text)| match source_of[j] {
            Some(i) => {
                last = &seq.tokens()[i];
                last.clone()
            }
            None => retext(last, text),
        })
        .collect();
    Ok(Perturbed {
        seq: TokenSequence::from_tokens(seq.stream(), tokens),
        retained,
    })
}
