use std::collections::HashMap;
use std::sync::OnceLock;

use crate::error::ResourceError;
use crate::tokenizer::{Token, TokenKind};

pub const DEFAULT_LEXICON: &str = include_str!("../../resources/lexicon.tsv");

/// Supplies replacement candidates for a token. Implementations decide which
/// tokens are eligible at all.
pub trait SynonymProvider: Send + Sync {
    fn synonyms(&self, token: &Token) -> Vec<String>;
}

/// Word → synonym list, loaded from `word<TAB>syn1,syn2,...` lines.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: HashMap<String, Vec<String>>,
}

impl Lexicon {
    pub fn parse(text: &str) -> Result<Self, ResourceError> {
        let mut entries: HashMap<String, Vec<String>> = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, syns) = line.split_once('\t').ok_or_else(|| ResourceError::Format {
                line: idx + 1,
                message: "expected `word<TAB>syn1,syn2,...`".into(),
            })?;
            let word = word.trim().to_lowercase();
            if word.is_empty() {
                return Err(ResourceError::Format {
                    line: idx + 1,
                    message: "empty headword".into(),
                });
            }
            let list = entries.entry(word.clone()).or_default();
            for syn in syns.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let syn = syn.to_lowercase();
                if syn != word && !list.contains(&syn) {
                    list.push(syn);
                }
            }
        }
        entries.retain(|_, v| !v.is_empty());
        Ok(Self { entries })
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a [&'a str])>) -> Self {
        let entries = pairs
            .into_iter()
            .map(|(w, syns)| (w.to_string(), syns.iter().map(|s| s.to_string()).collect()))
            .collect();
        Self { entries }
    }

    pub fn bundled() -> &'static Lexicon {
        static LEX: OnceLock<Lexicon> = OnceLock::new();
        LEX.get_or_init(|| Lexicon::parse(DEFAULT_LEXICON).expect("bundled lexicon is well-formed"))
    }

    pub fn get(&self, word: &str) -> &[String] {
        self.entries.get(word).map_or(&[], Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

impl SynonymProvider for Lexicon {
    fn synonyms(&self, token: &Token) -> Vec<String> {
        match token.kind {
            TokenKind::Word => self.get(&token.text).to_vec(),
            _ => Vec::new(),
        }
    }
}

/// Code-safe substitution for the code stream: only identifiers are
/// eligible, and the only substitute is a renamed identifier. Operators,
/// keywords and literals never change.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentifierRenamer;

impl SynonymProvider for IdentifierRenamer {
    fn synonyms(&self, token: &Token) -> Vec<String> {
        match token.kind {
            TokenKind::Identifier => vec![format!("{}_v", token.text)],
            _ => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenizer::Stream;

    fn word(text: &str, kind: TokenKind) -> Token {
        Token {
            text: text.into(),
            kind,
            stream: Stream::Comment,
            position: 0,
        }
    }

    #[test]
    fn parses_tab_separated_lines() {
        let lex = Lexicon::parse("# header\nlarge\tbig, huge\nfast\tquick\n\n").unwrap();
        assert_eq!(lex.get("large"), ["big", "huge"]);
        assert_eq!(lex.get("fast"), ["quick"]);
        assert!(lex.get("slow").is_empty());
    }

    #[test]
    fn rejects_lines_without_tab() {
        let err = Lexicon::parse("large big").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn stopwords_are_never_eligible() {
        let lex = Lexicon::from_pairs([("the", &["a"][..])]);
        assert!(lex.synonyms(&word("the", TokenKind::Stopword)).is_empty());
        assert_eq!(lex.synonyms(&word("the", TokenKind::Word)), ["a"]);
    }

    #[test]
    fn renamer_touches_identifiers_only() {
        let mut t = word("count", TokenKind::Identifier);
        t.stream = Stream::Code;
        assert_eq!(IdentifierRenamer.synonyms(&t), ["count_v"]);
        t.kind = TokenKind::Symbol;
        assert!(IdentifierRenamer.synonyms(&t).is_empty());
    }

    #[test]
    fn bundled_lexicon_has_no_stopword_headwords() {
        let sw = crate::tokenizer::Stopwords::bundled();
        let lex = Lexicon::bundled();
        assert!(!lex.is_empty());
        for w in lex.words() {
            assert!(!sw.contains(w), "{w} is a stopword");
        }
    }
}
