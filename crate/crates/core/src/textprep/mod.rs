//! Tokenization, stemming and n-gram extraction.
//!
//! Inputs arrive pre-split into sentences. Each sentence is lowercased,
//! split on whitespace and trimmed of punctuation at token edges. Its word
//! length is recorded at that point, before stopwords are dropped and the
//! remaining tokens are stemmed.

mod porter;

pub use porter::porter_stem;

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use unicode_general_category::{get_general_category, GeneralCategory};

use crate::rouge::{NGram, NGramMultiset};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TextError {
    #[error("n-gram order must be at least 1")]
    ZeroOrder,
    #[error("sentence {0} has no words")]
    EmptySentence(usize),
    #[error("reference {0} has no tokens after preprocessing")]
    EmptyReference(usize),
}

/// A single word unit: non-empty and free of whitespace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token(String);

impl Token {
    /// Returns `None` for empty strings or strings containing whitespace.
    pub fn new(surface: impl Into<String>) -> Option<Self> {
        let surface = surface.into();
        if surface.is_empty() || surface.chars().any(char::is_whitespace) {
            None
        } else {
            Some(Token(surface))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// A source sentence after preprocessing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub id: usize,
    pub tokens: Vec<Token>,
    /// Word count before stopword removal.
    pub raw_word_count: usize,
}

impl Sentence {
    pub fn length(&self, mode: LengthMode) -> usize {
        match mode {
            LengthMode::RawWords => self.raw_word_count,
            LengthMode::RetainedTokens => self.tokens.len(),
        }
    }
}

/// Source sentences, with ids `0..len` in order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DocumentSet {
    sentences: Vec<Sentence>,
}

impl DocumentSet {
    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn lengths(&self, mode: LengthMode) -> Vec<usize> {
        self.sentences.iter().map(|s| s.length(mode)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceSummary {
    pub id: usize,
    pub sentences: Vec<Vec<Token>>,
}

/// How the word length of a sentence is measured for the budget.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum LengthMode {
    /// Words as emitted, stopwords included.
    #[default]
    RawWords,
    /// Tokens that survive stopword removal.
    RetainedTokens,
}

/// Whether reference n-grams may span the reference's sentence breaks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ReferenceScope {
    #[default]
    PerSentence,
    WholeSummary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreprocessConfig {
    pub n: usize,
    pub stemming: bool,
    pub stopword_removal: bool,
    /// Matched after lowercasing and before stemming.
    pub stopwords: BTreeSet<String>,
    pub lowercase: bool,
    pub length_mode: LengthMode,
    pub reference_scope: ReferenceScope,
}

impl PreprocessConfig {
    /// Defaults for order `n`: stemming on, stopwords removed for unigrams
    /// and kept for every higher order.
    pub fn for_order(n: usize) -> Self {
        PreprocessConfig {
            n,
            stemming: true,
            stopword_removal: n == 1,
            stopwords: BTreeSet::new(),
            lowercase: true,
            length_mode: LengthMode::RawWords,
            reference_scope: ReferenceScope::PerSentence,
        }
    }

    pub fn with_stopwords<I, S>(mut self, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.stopwords = words.into_iter().map(Into::into).collect();
        self
    }
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self::for_order(1)
    }
}

fn is_punctuation(c: char) -> bool {
    matches!(
        get_general_category(c),
        GeneralCategory::ConnectorPunctuation
            | GeneralCategory::DashPunctuation
            | GeneralCategory::OpenPunctuation
            | GeneralCategory::ClosePunctuation
            | GeneralCategory::InitialPunctuation
            | GeneralCategory::FinalPunctuation
            | GeneralCategory::OtherPunctuation
    )
}

/// Splits one sentence into tokens: optional lowercasing, whitespace split,
/// punctuation trimmed from both edges of every token, empty tokens dropped.
pub fn tokenize(raw: &str, lowercase: bool) -> Vec<Token> {
    raw.split_whitespace()
        .filter_map(|word| {
            let trimmed = word.trim_matches(is_punctuation);
            if trimmed.is_empty() {
                return None;
            }
            let surface = if lowercase {
                trimmed.to_lowercase()
            } else {
                String::from(trimmed)
            };
            Token::new(surface)
        })
        .collect()
}

/// Counts every contiguous window of `n` tokens.
pub fn extract_ngrams(tokens: &[Token], n: usize) -> NGramMultiset {
    let mut grams = NGramMultiset::new();
    if n == 0 {
        return grams;
    }
    for window in tokens.windows(n) {
        grams.insert(NGram::new(window.to_vec()), 1);
    }
    grams
}

/// Applies a [`PreprocessConfig`] to raw sentences.
#[derive(Debug, Clone)]
pub struct Preprocessor {
    config: PreprocessConfig,
}

impl Preprocessor {
    pub fn new(config: PreprocessConfig) -> Result<Self, TextError> {
        if config.n == 0 {
            return Err(TextError::ZeroOrder);
        }
        Ok(Preprocessor { config })
    }

    pub fn config(&self) -> &PreprocessConfig {
        &self.config
    }

    /// Returns the retained (stemmed) tokens and the raw word count.
    pub fn process(&self, raw: &str) -> (Vec<Token>, usize) {
        let words = tokenize(raw, self.config.lowercase);
        let raw_word_count = words.len();
        let tokens = words
            .into_iter()
            .filter(|t| !(self.config.stopword_removal && self.config.stopwords.contains(t.as_str())))
            .map(|t| {
                if self.config.stemming {
                    Token::new(porter_stem(t.as_str())).unwrap_or(t)
                } else {
                    t
                }
            })
            .collect();
        (tokens, raw_word_count)
    }

    pub fn sentence(&self, id: usize, raw: &str) -> Result<Sentence, TextError> {
        let (tokens, raw_word_count) = self.process(raw);
        if raw_word_count == 0 {
            return Err(TextError::EmptySentence(id));
        }
        Ok(Sentence {
            id,
            tokens,
            raw_word_count,
        })
    }

    /// Builds a document set; sentence ids follow iteration order.
    pub fn documents<'a, I>(&self, raw_sentences: I) -> Result<DocumentSet, TextError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let sentences = raw_sentences
            .into_iter()
            .enumerate()
            .map(|(id, raw)| self.sentence(id, raw))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DocumentSet { sentences })
    }

    pub fn reference<'a, I>(&self, id: usize, raw_sentences: I) -> Result<ReferenceSummary, TextError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let sentences: Vec<Vec<Token>> = raw_sentences
            .into_iter()
            .map(|raw| self.process(raw).0)
            .filter(|tokens| !tokens.is_empty())
            .collect();
        if sentences.is_empty() {
            return Err(TextError::EmptyReference(id));
        }
        Ok(ReferenceSummary { id, sentences })
    }

    pub fn sentence_ngrams(&self, sentence: &Sentence) -> NGramMultiset {
        extract_ngrams(&sentence.tokens, self.config.n)
    }

    pub fn reference_ngrams(&self, reference: &ReferenceSummary) -> NGramMultiset {
        match self.config.reference_scope {
            ReferenceScope::PerSentence => {
                let mut grams = NGramMultiset::new();
                for sentence in &reference.sentences {
                    grams.add_all(&extract_ngrams(sentence, self.config.n));
                }
                grams
            }
            ReferenceScope::WholeSummary => {
                let joined: Vec<Token> = reference.sentences.iter().flatten().cloned().collect();
                extract_ngrams(&joined, self.config.n)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn toks(words: &[&str]) -> Vec<Token> {
        words.iter().map(|w| Token::new(*w).unwrap()).collect()
    }

    fn surfaces(tokens: &[Token]) -> Vec<&str> {
        tokens.iter().map(Token::as_str).collect()
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(surfaces(&tokenize("The cat sat.", true)), ["the", "cat", "sat"]);
        assert!(tokenize("", true).is_empty());
        assert_eq!(surfaces(&tokenize("A  b", true)), ["a", "b"]);
    }

    #[test]
    fn tokenize_keeps_internal_punctuation() {
        let t = tokenize("«Well-known» don't -- (x).", true);
        assert_eq!(surfaces(&t), ["well-known", "don't", "x"]);
        assert_eq!(surfaces(&tokenize("Mixed Case", false)), ["Mixed", "Case"]);
        // symbols are not punctuation
        assert_eq!(surfaces(&tokenize("$5 +", true)), ["$5", "+"]);
    }

    #[test]
    fn token_rejects_whitespace() {
        assert!(Token::new("").is_none());
        assert!(Token::new("a b").is_none());
        assert!(Token::new("ab").is_some());
    }

    #[test]
    fn ngram_examples() {
        let t = toks(&["a", "b", "a"]);
        let uni = extract_ngrams(&t, 1);
        assert_eq!(uni.count(&NGram::from_words(&["a"])), 2);
        assert_eq!(uni.count(&NGram::from_words(&["b"])), 1);
        assert_eq!(uni.distinct(), 2);
        let bi = extract_ngrams(&t, 2);
        assert_eq!(bi.count(&NGram::from_words(&["a", "b"])), 1);
        assert_eq!(bi.count(&NGram::from_words(&["b", "a"])), 1);
        assert_eq!(bi.total(), 2);
        assert!(extract_ngrams(&toks(&["a"]), 2).is_empty());
    }

    #[test]
    fn stopwords_and_lengths() {
        let mut config = PreprocessConfig::for_order(1).with_stopwords(["the", "on"]);
        let pre = Preprocessor::new(config.clone()).unwrap();
        let s = pre.sentence(0, "The cats sat on the mats").unwrap();
        assert_eq!(surfaces(&s.tokens), ["cat", "sat", "mat"]);
        assert_eq!(s.raw_word_count, 6);
        assert_eq!(s.length(LengthMode::RawWords), 6);
        assert_eq!(s.length(LengthMode::RetainedTokens), 3);

        config.stopword_removal = false;
        let kept = Preprocessor::new(config)
            .unwrap()
            .sentence(0, "The cats sat on the mats")
            .unwrap();
        assert_eq!(kept.raw_word_count, 6);
        assert_eq!(kept.tokens.len(), 6);
    }

    #[test]
    fn bigram_defaults_keep_stopwords() {
        let config = PreprocessConfig::for_order(2).with_stopwords(["the"]);
        assert!(!config.stopword_removal);
        let pre = Preprocessor::new(config).unwrap();
        let s = pre.sentence(3, "the dog").unwrap();
        assert_eq!(pre.sentence_ngrams(&s).total(), 1);
    }

    #[test]
    fn validation_errors() {
        assert_eq!(
            Preprocessor::new(PreprocessConfig::for_order(0)).unwrap_err(),
            TextError::ZeroOrder
        );
        let pre = Preprocessor::new(PreprocessConfig::for_order(1)).unwrap();
        assert_eq!(pre.sentence(4, " ... ").unwrap_err(), TextError::EmptySentence(4));
        assert_eq!(
            pre.reference(1, vec!["", "!"]).unwrap_err(),
            TextError::EmptyReference(1)
        );
        let docs = pre.documents(["one two", "three"]).unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs.sentences()[1].id, 1);
        assert_eq!(docs.lengths(LengthMode::RawWords), [2, 1]);
    }

    #[test]
    fn reference_scope() {
        let mut config = PreprocessConfig::for_order(2);
        config.stemming = false;
        let per = Preprocessor::new(config.clone()).unwrap();
        let r = per.reference(0, ["a b", "c d"]).unwrap();
        assert_eq!(per.reference_ngrams(&r).total(), 2);
        config.reference_scope = ReferenceScope::WholeSummary;
        let whole = Preprocessor::new(config).unwrap();
        let grams = whole.reference_ngrams(&r);
        assert_eq!(grams.total(), 3);
        assert_eq!(grams.count(&NGram::from_words(&["b", "c"])), 1);
    }
}
