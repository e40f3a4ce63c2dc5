use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::SpamLabel;
use crate::text::{TermCountVector, Vocabulary};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NbError {
    #[error("training data must contain both ham and spam")]
    SingleClassDataset,
    #[error("smoothing constant must be positive, got {0}")]
    NonPositiveAlpha(f64),
    #[error("vector has vocabulary size {found}, model expects {expected}")]
    VocabularySizeMismatch { expected: usize, found: usize },
}

/// Class order is fixed to `[ham, spam]`.
pub const NB_CLASSES: [SpamLabel; 2] = [SpamLabel::Ham, SpamLabel::Spam];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbModel {
    pub classes: Vec<SpamLabel>,
    pub log_priors: Vec<f64>,
    /// `log_likelihoods[c][t]` for class `c` and vocabulary index `t`.
    pub log_likelihoods: Vec<Vec<f64>>,
    pub vocabulary: Vocabulary,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NbPrediction {
    pub label: SpamLabel,
    /// Unnormalized log posterior per class, in `NB_CLASSES` order.
    pub log_scores: [f64; 2],
}

impl NbPrediction {
    /// Posterior probability of spam.
    pub fn spam_probability(&self) -> f64 {
        let [ham, spam] = self.log_scores;
        1.0 / (1.0 + (ham - spam).exp())
    }
}

/// Relative slack under which two class scores count as tied. Scores that
/// are equal in exact arithmetic can differ by an ulp once summed in a
/// different order.
pub const SCORE_TIE_TOLERANCE: f64 = 1e-12;

/// Spam only when its score beats ham beyond the tie tolerance.
pub fn spam_wins(ham: f64, spam: f64) -> bool {
    spam - ham > SCORE_TIE_TOLERANCE * ham.abs().max(spam.abs()).max(1.0)
}

fn class_index(label: SpamLabel) -> usize {
    match label {
        SpamLabel::Ham => 0,
        SpamLabel::Spam => 1,
    }
}

pub fn train_multinomial_nb(
    train: &[(TermCountVector, SpamLabel)],
    vocab: &Vocabulary,
    alpha: f64,
) -> Result<NbModel, NbError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(NbError::NonPositiveAlpha(alpha));
    }
    let v = vocab.len();
    let mut doc_counts = [0u64; 2];
    let mut term_counts = vec![vec![0u64; v]; 2];
    for (vec, label) in train {
        if vec.vocab_size() != v {
            return Err(NbError::VocabularySizeMismatch {
                expected: v,
                found: vec.vocab_size(),
            });
        }
        let c = class_index(*label);
        doc_counts[c] += 1;
        for (t, n) in vec.iter() {
            term_counts[c][t] += n as u64;
        }
    }
    if doc_counts.contains(&0) {
        return Err(NbError::SingleClassDataset);
    }
    let n = (doc_counts[0] + doc_counts[1]) as f64;
    let log_priors = doc_counts.iter().map(|&d| (d as f64 / n).ln()).collect();
    let log_likelihoods = term_counts
        .iter()
        .map(|counts| {
            let total: u64 = counts.iter().sum();
            let denom = total as f64 + alpha * v as f64;
            counts
                .iter()
                .map(|&t| ((t as f64 + alpha) / denom).ln())
                .collect()
        })
        .collect();
    Ok(NbModel {
        classes: NB_CLASSES.to_vec(),
        log_priors,
        log_likelihoods,
        vocabulary: vocab.clone(),
        alpha,
    })
}

/// Argmax of the class scores; an exact tie goes to ham.
pub fn nb_predict(model: &NbModel, vector: &TermCountVector) -> Result<NbPrediction, NbError> {
    let v = model.vocabulary.len();
    if vector.vocab_size() != v {
        return Err(NbError::VocabularySizeMismatch {
            expected: v,
            found: vector.vocab_size(),
        });
    }
    let mut log_scores = [0.0; 2];
    for (c, score) in log_scores.iter_mut().enumerate() {
        *score = model.log_priors[c];
        for (t, n) in vector.iter() {
            *score += n as f64 * model.log_likelihoods[c][t];
        }
    }
    let label = if spam_wins(log_scores[0], log_scores[1]) {
        SpamLabel::Spam
    } else {
        SpamLabel::Ham
    };
    Ok(NbPrediction { label, log_scores })
}
