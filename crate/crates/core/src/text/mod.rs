//! Spam-side text preprocessing: lowercase, tokenize, stem, vectorize.

mod porter;
mod vocab;

use serde::{Deserialize, Serialize};

pub use porter::porter_stem;
pub use vocab::{build_vocabulary, vectorize, TermCountVector, Vocabulary, VocabularyError};

/// Lowercase word tokens in text order. Never contains empty tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenList(Vec<String>);

impl TokenList {
    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Single-space join, for display.
    pub fn joined(&self) -> String {
        self.0.join(" ")
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

impl<S: Into<String>> FromIterator<S> for TokenList {
    /// Builds a list from already-normalized tokens, skipping empty ones.
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        TokenList(
            iter.into_iter()
                .map(Into::into)
                .filter(|t: &String| !t.is_empty())
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextStats {
    pub num_characters: usize,
    pub num_words: usize,
    pub num_sentences: usize,
}

/// Maximal runs of alphanumeric characters of the lowercased text.
pub fn normalize_and_tokenize(text: &str) -> TokenList {
    TokenList(
        text.to_lowercase()
            .split(|c: char| !c.is_alphanumeric())
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect(),
    )
}

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

/// Character, word and sentence counts.
///
/// A sentence is a maximal segment ended by a run of `.`, `!` or `?` (or by
/// the end of the text) that contains at least one word.
pub fn compute_text_stats(text: &str) -> TextStats {
    let num_words = normalize_and_tokenize(text).len();
    let mut num_sentences = 0;
    let mut segment_has_word = false;
    for c in text.chars() {
        if is_terminator(c) {
            if segment_has_word {
                num_sentences += 1;
            }
            segment_has_word = false;
        } else if c.is_alphanumeric() {
            segment_has_word = true;
        }
    }
    if segment_has_word {
        num_sentences += 1;
    }
    TextStats {
        num_characters: text.chars().count(),
        num_words,
        num_sentences,
    }
}

/// Tokenize then stem every token.
pub fn preprocess(text: &str) -> TokenList {
    TokenList(
        normalize_and_tokenize(text)
            .0
            .iter()
            .map(|t| porter_stem(t))
            .collect(),
    )
}
