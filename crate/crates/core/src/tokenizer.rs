//! Word/symbol level tokenization for code and natural-language comments.
//!
//! Code keeps its case and treats programming symbols as first-class tokens.
//! Comments are lowercased, split on anything that is not a word character,
//! and each word is flagged against a stopword set.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use std::sync::OnceLock;

/// Multi-character operators, longest first so the scanner can do maximal munch.
const OPERATORS: &[&str] = &[
    "==", "<=", ">=", "!=", "&&", "||", "->", "++", "--", "+=", "-=",
];

const SHARED_KEYWORDS: &[&str] = &[
    "if", "else", "for", "while", "do", "return", "break", "continue", "switch", "case",
    "default", "true", "false", "null", "new", "class", "import", "try", "catch", "finally",
    "throw", "in", "not", "and", "or", "def", "int", "void",
];

const JAVA_KEYWORDS: &[&str] = &[
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally",
    "float", "for", "goto", "if", "implements", "import", "instanceof", "int", "interface",
    "long", "native", "new", "package", "private", "protected", "public", "return", "short",
    "static", "strictfp", "super", "switch", "synchronized", "this", "throw", "throws",
    "transient", "try", "void", "volatile", "while", "true", "false", "null", "var",
];

const PYTHON_KEYWORDS: &[&str] = &[
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class",
    "continue", "def", "del", "elif", "else", "except", "finally", "for", "from", "global",
    "if", "import", "in", "is", "lambda", "nonlocal", "not", "or", "pass", "raise", "return",
    "try", "while", "with", "yield",
];

const C_KEYWORDS: &[&str] = &[
    "auto", "break", "case", "char", "const", "continue", "default", "do", "double", "else",
    "enum", "extern", "float", "for", "goto", "if", "inline", "int", "long", "register",
    "restrict", "return", "short", "signed", "sizeof", "static", "struct", "switch", "typedef",
    "union", "unsigned", "void", "volatile", "while",
];

const JAVASCRIPT_KEYWORDS: &[&str] = &[
    "break", "case", "catch", "class", "const", "continue", "debugger", "default", "delete",
    "do", "else", "export", "extends", "false", "finally", "for", "function", "if", "import",
    "in", "instanceof", "let", "new", "null", "return", "super", "switch", "this", "throw",
    "true", "try", "typeof", "var", "void", "while", "with", "yield", "await",
];

/// Default English stopword list, one word per line.
pub const DEFAULT_STOPWORDS: &str = include_str!("../resources/stopwords.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Identifier,
    Symbol,
    Literal,
    Keyword,
    Word,
    Stopword,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stream {
    Code,
    Comment,
}

/// Source language, used only to pick a keyword table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Language {
    Java,
    Python,
    C,
    JavaScript,
    #[default]
    Other,
}

impl Language {
    /// Parses a language name; anything unrecognised maps to [`Language::Other`].
    pub fn from_name(name: &str) -> Self {
        match name.trim().to_ascii_lowercase().as_str() {
            "java" => Language::Java,
            "python" | "py" => Language::Python,
            "c" => Language::C,
            "javascript" | "js" => Language::JavaScript,
            _ => Language::Other,
        }
    }

    fn keywords(self) -> &'static HashSet<&'static str> {
        static TABLES: OnceLock<[HashSet<&'static str>; 5]> = OnceLock::new();
        let tables = TABLES.get_or_init(|| {
            [
                JAVA_KEYWORDS.iter().copied().collect(),
                PYTHON_KEYWORDS.iter().copied().collect(),
                C_KEYWORDS.iter().copied().collect(),
                JAVASCRIPT_KEYWORDS.iter().copied().collect(),
                SHARED_KEYWORDS.iter().copied().collect(),
            ]
        });
        match self {
            Language::Java => &tables[0],
            Language::Python => &tables[1],
            Language::C => &tables[2],
            Language::JavaScript => &tables[3],
            Language::Other => &tables[4],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub kind: TokenKind,
    pub stream: Stream,
    pub position: usize,
}

/// An ordered run of tokens from a single stream. Positions are always
/// `0..len()`; constructors renumber.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TokenSequence {
    tokens: Vec<Token>,
    stream: Stream,
}

impl TokenSequence {
    pub fn empty(stream: Stream) -> Self {
        Self {
            tokens: Vec::new(),
            stream,
        }
    }

    /// Builds a sequence from tokens, forcing the stream tag and renumbering.
    pub fn from_tokens(stream: Stream, tokens: impl IntoIterator<Item = Token>) -> Self {
        let tokens = tokens
            .into_iter()
            .enumerate()
            .map(|(position, mut t)| {
                t.position = position;
                t.stream = stream;
                t
            })
            .collect();
        Self { tokens, stream }
    }

    /// Code tokens from already-split texts (e.g. a model response). Each text
    /// is classified on its own; texts are not re-split.
    pub fn code_from_texts<S: AsRef<str>>(texts: &[S], language: Language) -> Self {
        Self::from_tokens(
            Stream::Code,
            texts
                .iter()
                .filter(|t| !t.as_ref().is_empty())
                .map(|t| Token {
                    text: t.as_ref().to_string(),
                    kind: classify_code_token(t.as_ref(), language),
                    stream: Stream::Code,
                    position: 0,
                }),
        )
    }

    /// Comment tokens from already-split texts, flagged against `stopwords`.
    pub fn comment_from_texts<S: AsRef<str>>(texts: &[S], stopwords: &Stopwords) -> Self {
        Self::from_tokens(
            Stream::Comment,
            texts
                .iter()
                .filter(|t| !t.as_ref().is_empty())
                .map(|t| comment_token(t.as_ref().to_lowercase(), stopwords)),
        )
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn stream(&self) -> Stream {
        self.stream
    }

    /// Sentence length `l`.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn texts(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.text.as_str()).collect()
    }

    pub fn owned_texts(&self) -> Vec<String> {
        self.tokens.iter().map(|t| t.text.clone()).collect()
    }

    /// True when both sequences carry the same token texts in the same order.
    pub fn same_texts(&self, other: &TokenSequence) -> bool {
        self.tokens.len() == other.tokens.len()
            && self
                .tokens
                .iter()
                .zip(&other.tokens)
                .all(|(a, b)| a.text == b.text)
    }

    pub fn into_tokens(self) -> Vec<Token> {
        self.tokens
    }
}

impl fmt::Display for TokenSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&detokenize(self))
    }
}

/// A case-insensitive stopword set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self(
            words
                .into_iter()
                .map(|w| w.as_ref().trim().to_lowercase())
                .filter(|w| !w.is_empty())
                .collect(),
        )
    }

    /// Parses the plain-text resource format: one word per line, `#` comments allowed.
    pub fn parse(text: &str) -> Self {
        Self::new(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    /// The bundled English list.
    pub fn bundled() -> &'static Stopwords {
        static DEFAULT: OnceLock<Stopwords> = OnceLock::new();
        DEFAULT.get_or_init(|| Stopwords::parse(DEFAULT_STOPWORDS))
    }

    pub fn contains(&self, word: &str) -> bool {
        if word.chars().any(|c| c.is_uppercase()) {
            self.0.contains(&word.to_lowercase())
        } else {
            self.0.contains(word)
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Tokenizes code using the shared keyword table.
pub fn tokenize_code(source: &str) -> TokenSequence {
    tokenize_code_in(source, Language::Other)
}

/// Tokenizes code: whitespace splits chunks, then each chunk is scanned for
/// identifiers, numbers, quoted literals and (maximal-munch) operators.
pub fn tokenize_code_in(source: &str, language: Language) -> TokenSequence {
    let mut tokens = Vec::new();
    for chunk in source.split_whitespace() {
        scan_chunk(chunk, language, &mut tokens);
    }
    TokenSequence::from_tokens(Stream::Code, tokens)
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphabetic()
}

fn is_ident_continue(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphanumeric()
}

fn scan_chunk(chunk: &str, language: Language, out: &mut Vec<Token>) {
    let chars: Vec<(usize, char)> = chunk.char_indices().collect();
    let end_of = |i: usize| chars.get(i).map_or(chunk.len(), |&(b, _)| b);
    let mut i = 0;
    while i < chars.len() {
        let (start, c) = chars[i];
        let (kind, next) = if c == '"' || c == '\'' || c == '`' {
            // Quoted literal runs to the matching quote inside this chunk.
            let mut j = i + 1;
            while j < chars.len() {
                match chars[j].1 {
                    '\\' => j += 2,
                    q if q == c => {
                        j += 1;
                        break;
                    }
                    _ => j += 1,
                }
            }
            (TokenKind::Literal, j.min(chars.len()))
        } else if c.is_ascii_digit() {
            let mut j = i + 1;
            while j < chars.len() {
                let d = chars[j].1;
                let fraction = d == '.' && chars.get(j + 1).is_some_and(|n| n.1.is_ascii_digit());
                if is_ident_continue(d) || fraction {
                    j += 1;
                } else {
                    break;
                }
            }
            (TokenKind::Literal, j)
        } else if is_ident_start(c) {
            let mut j = i + 1;
            while j < chars.len() && is_ident_continue(chars[j].1) {
                j += 1;
            }
            let word = &chunk[start..end_of(j)];
            let kind = if language.keywords().contains(word) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            };
            (kind, j)
        } else {
            let rest = &chunk[start..];
            let width = OPERATORS
                .iter()
                .find(|op| rest.starts_with(*op))
                .map_or(1, |op| op.chars().count());
            (TokenKind::Symbol, i + width)
        };
        out.push(Token {
            text: chunk[start..end_of(next)].to_string(),
            kind,
            stream: Stream::Code,
            position: 0,
        });
        i = next;
    }
}

/// Classifies a single code token text without splitting it.
pub fn classify_code_token(text: &str, language: Language) -> TokenKind {
    let Some(first) = text.chars().next() else {
        return TokenKind::Symbol;
    };
    if first == '"' || first == '\'' || first == '`' || first.is_ascii_digit() {
        TokenKind::Literal
    } else if is_ident_start(first) {
        if language.keywords().contains(text) {
            TokenKind::Keyword
        } else {
            TokenKind::Identifier
        }
    } else {
        TokenKind::Symbol
    }
}

fn comment_token(text: String, stopwords: &Stopwords) -> Token {
    let kind = if stopwords.contains(&text) {
        TokenKind::Stopword
    } else {
        TokenKind::Word
    };
    Token {
        text,
        kind,
        stream: Stream::Comment,
        position: 0,
    }
}

/// Lowercases and splits a comment on every non-word character.
pub fn tokenize_comment(text: &str, stopwords: &Stopwords) -> TokenSequence {
    let lowered = text.to_lowercase();
    TokenSequence::from_tokens(
        Stream::Comment,
        lowered
            .split(|c: char| !(c.is_alphanumeric() || c == '_'))
            .filter(|w| !w.is_empty())
            .map(|w| comment_token(w.to_string(), stopwords)),
    )
}

/// Joins token texts with single spaces.
pub fn detokenize(seq: &TokenSequence) -> String {
    seq.texts().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(seq: &TokenSequence) -> Vec<TokenKind> {
        seq.tokens().iter().map(|t| t.kind).collect()
    }

    #[test]
    fn splits_symbols_out_of_code() {
        let seq = tokenize_code("if(x==1){");
        assert_eq!(seq.texts(), ["if", "(", "x", "==", "1", ")", "{"]);
        use TokenKind::*;
        assert_eq!(
            kinds(&seq),
            [Keyword, Symbol, Identifier, Symbol, Literal, Symbol, Symbol]
        );
    }

    #[test]
    fn empty_source() {
        let seq = tokenize_code("");
        assert!(seq.is_empty());
        assert_eq!(seq.len(), 0);
        assert_eq!(detokenize(&seq), "");
    }

    #[test]
    fn maximal_munch() {
        assert_eq!(tokenize_code("a<=b").texts(), ["a", "<=", "b"]);
        assert_eq!(tokenize_code("i+++j").texts(), ["i", "++", "+", "j"]);
        assert_eq!(tokenize_code("p->next").texts(), ["p", "->", "next"]);
    }

    #[test]
    fn literals_stay_whole() {
        let seq = tokenize_code(r#"s="a+b";x=1.5;"#);
        assert_eq!(seq.texts(), ["s", "=", "\"a+b\"", ";", "x", "=", "1.5", ";"]);
        assert_eq!(seq.tokens()[2].kind, TokenKind::Literal);
        assert_eq!(tokenize_code("a.b").texts(), ["a", ".", "b"]);
    }

    #[test]
    fn keyword_tables_differ_by_language() {
        let java = tokenize_code_in("def x", Language::Java);
        assert_eq!(java.tokens()[0].kind, TokenKind::Identifier);
        let py = tokenize_code_in("def x", Language::Python);
        assert_eq!(py.tokens()[0].kind, TokenKind::Keyword);
        assert_eq!(Language::from_name("Python"), Language::Python);
        assert_eq!(Language::from_name("cobol"), Language::Other);
    }

    #[test]
    fn positions_are_consecutive() {
        let seq = tokenize_code("for ( i = 0 ; i < n ; i ++ )");
        for (i, t) in seq.tokens().iter().enumerate() {
            assert_eq!(t.position, i);
            assert_eq!(t.stream, Stream::Code);
        }
    }

    #[test]
    fn comment_words_and_stopwords() {
        let sw = Stopwords::new(["the"]);
        let seq = tokenize_comment("returns the maximum value", &sw);
        assert_eq!(seq.texts(), ["returns", "the", "maximum", "value"]);
        assert_eq!(
            kinds(&seq),
            [
                TokenKind::Word,
                TokenKind::Stopword,
                TokenKind::Word,
                TokenKind::Word
            ]
        );
        assert!(tokenize_comment("", &sw).is_empty());
        let the = tokenize_comment("The THE the", &sw);
        assert_eq!(the.texts(), ["the", "the", "the"]);
        assert!(the.tokens().iter().all(|t| t.kind == TokenKind::Stopword));
    }

    #[test]
    fn comment_splits_on_punctuation() {
        let seq = tokenize_comment("Sum of a[i], (inclusive)!", Stopwords::bundled());
        assert_eq!(seq.texts(), ["sum", "of", "a", "i", "inclusive"]);
    }

    #[test]
    fn detokenize_joins_with_spaces() {
        let seq = tokenize_code("if(x)");
        assert_eq!(detokenize(&seq), "if ( x )");
    }

    #[test]
    fn bundled_stopwords_load() {
        let sw = Stopwords::bundled();
        assert!(sw.contains("the"));
        assert!(sw.contains("The"));
        assert!(!sw.contains("maximum"));
    }
}
