use std::collections::HashMap;
use std::sync::OnceLock;

use crate::error::{ResourceError, TranslateError};

pub const DEFAULT_PHRASES: &str = include_str!("../../resources/phrases.tsv");

/// Pivot translation `A -> B -> A`. Both directions work on token texts.
pub trait Translator: Send + Sync {
    fn to_pivot(&self, words: &[String]) -> Result<Vec<String>, TranslateError>;
    fn from_pivot(&self, words: &[String]) -> Result<Vec<String>, TranslateError>;

    fn round_trip(&self, words: &[String]) -> Result<Vec<String>, TranslateError> {
        let pivot = self.to_pivot(words)?;
        self.from_pivot(&pivot)
    }
}

const PIVOT_PREFIX: &str = "\u{27e8}p";

/// Deterministic stand-in for a translation backend. The forward direction
/// maps every phrase-table headword to an opaque pivot symbol; the inverse
/// direction renders each pivot symbol as the headword's first paraphrase.
/// Words outside the table pass through both directions untouched.
#[derive(Debug, Clone, Default)]
pub struct StubTranslator {
    headwords: Vec<String>,
    index: HashMap<String, usize>,
    paraphrases: Vec<Vec<String>>,
}

impl StubTranslator {
    /// A translator whose table is empty: the round trip is the identity.
    pub fn identity() -> Self {
        Self::default()
    }

    /// Same `word<TAB>para1,para2` format as the synonym lexicon. Only the
    /// first paraphrase is used; a paraphrase may span several words.
    pub fn parse(text: &str) -> Result<Self, ResourceError> {
        let mut table = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, paras) = line.split_once('\t').ok_or_else(|| ResourceError::Format {
                line: idx + 1,
                message: "expected `word<TAB>paraphrase,...`".into(),
            })?;
            let first = paras
                .split(',')
                .map(str::trim)
                .find(|p| !p.is_empty())
                .ok_or_else(|| ResourceError::Format {
                    line: idx + 1,
                    message: "missing paraphrase".into(),
                })?;
            table.insert(word.trim(), first);
        }
        Ok(table)
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        let mut table = Self::default();
        for (w, p) in pairs {
            table.insert(w, p);
        }
        table
    }

    pub fn bundled() -> &'static StubTranslator {
        static BT: OnceLock<StubTranslator> = OnceLock::new();
        BT.get_or_init(|| StubTranslator::parse(DEFAULT_PHRASES).expect("bundled phrase table is well-formed"))
    }

    fn insert(&mut self, word: &str, paraphrase: &str) {
        let word = word.to_lowercase();
        let para: Vec<String> = paraphrase.split_whitespace().map(str::to_lowercase).collect();
        if word.is_empty() || para.is_empty() {
            return;
        }
        match self.index.get(&word) {
            Some(&i) => self.paraphrases[i] = para,
            None => {
                self.index.insert(word.clone(), self.headwords.len());
                self.headwords.push(word);
                self.paraphrases.push(para);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.headwords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.headwords.is_empty()
    }
}

impl Translator for StubTranslator {
    fn to_pivot(&self, words: &[String]) -> Result<Vec<String>, TranslateError> {
        Ok(words
            .iter()
            .map(|w| match self.index.get(w) {
                Some(i) => format!("{PIVOT_PREFIX}{i}"),
                None => w.clone(),
            })
            .collect())
    }

    fn from_pivot(&self, words: &[String]) -> Result<Vec<String>, TranslateError> {
        let mut out = Vec::with_capacity(words.len());
        for w in words {
            match w.strip_prefix(PIVOT_PREFIX) {
                Some(id) => {
                    let para = id
                        .parse::<usize>()
                        .ok()
                        .and_then(|i| self.paraphrases.get(i))
                        .ok_or_else(|| TranslateError(format!("unknown pivot symbol {w:?}")))?;
                    out.extend(para.iter().cloned());
                }
                None => out.push(w.clone()),
            }
        }
        Ok(out)
    }
}
