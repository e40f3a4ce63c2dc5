use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::TokenList;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VocabularyError {
    #[error("no term reaches the minimum count of {0}")]
    EmptyVocabulary(usize),
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("duplicate vocabulary term {0:?}")]
    DuplicateTerm(String),
}

/// Ordered term list with its inverse index. Serialized as the term list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn from_terms(terms: Vec<String>) -> Result<Self, VocabularyError> {
        let mut index = HashMap::with_capacity(terms.len());
        for (i, t) in terms.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(VocabularyError::DuplicateTerm(t.clone()));
            }
        }
        Ok(Self { terms, index })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn term(&self, index: usize) -> Option<&str> {
        self.terms.get(index).map(String::as_str)
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }
}

impl Serialize for Vocabulary {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Vocabulary {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let terms = Vec::<String>::deserialize(d)?;
        Vocabulary::from_terms(terms).map_err(serde::de::Error::custom)
    }
}

/// Sparse term counts against a vocabulary of size `vocab_size`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermCountVector {
    vocab_size: usize,
    counts: BTreeMap<usize, u32>,
}

impl TermCountVector {
    pub fn new(vocab_size: usize) -> Self {
        Self {
            vocab_size,
            counts: BTreeMap::new(),
        }
    }

    /// Panics if `index` is outside the vocabulary.
    pub fn add(&mut self, index: usize, count: u32) {
        assert!(index < self.vocab_size, "term index {index} out of range");
        if count > 0 {
            *self.counts.entry(index).or_insert(0) += count;
        }
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn get(&self, index: usize) -> u32 {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.counts.iter().map(|(&i, &c)| (i, c))
    }

    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| c as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Terms with total corpus count `>= min_count`, in order of first
/// occurrence.
pub fn build_vocabulary(
    corpus: &[TokenList],
    min_count: usize,
) -> Result<Vocabulary, VocabularyError> {
    if corpus.is_empty() {
        return Err(VocabularyError::EmptyCorpus);
    }
    let min_count = min_count.max(1);
    let mut order: Vec<&str> = Vec::new();
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for doc in corpus {
        for tok in doc.iter() {
            let c = counts.entry(tok).or_insert(0);
            if *c == 0 {
                order.push(tok);
            }
            *c += 1;
        }
    }
    let terms: Vec<String> = order
        .into_iter()
        .filter(|t| counts[t] >= min_count)
        .map(str::to_string)
        .collect();
    if terms.is_empty() {
        return Err(VocabularyError::EmptyVocabulary(min_count));
    }
    Vocabulary::from_terms(terms)
}

/// Count in-vocabulary tokens; out-of-vocabulary tokens are dropped.
pub fn vectorize(tokens: &TokenList, vocab: &Vocabulary) -> TermCountVector {
    let mut v = TermCountVector::new(vocab.len());
    for tok in tokens.iter() {
        if let Some(i) = vocab.index_of(tok) {
            v.add(i, 1);
        }
    }
    v
}
