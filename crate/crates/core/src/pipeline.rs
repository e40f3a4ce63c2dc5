//! Train/evaluate orchestration shared by the CLI and the acceptance suite:
//! deterministic split, fit on the training part, metrics on the held-out
//! part.

use thiserror::Error;

use crate::dataset::{LabeledFeatureDataset, LabeledTextDataset, SpamLabel, UrlLabel};
use crate::learners::{
    evaluate, gbdt_predict, nb_predict, split_indices, train_gbdt, train_multinomial_nb,
    GbdtConfig, GbdtError, GbdtModel, MetricsError, MetricsReport, NbError, NbModel, SplitError,
};
use crate::text::{build_vocabulary, preprocess, vectorize, TokenList, VocabularyError};

pub const DEFAULT_TRAIN_FRACTION: f64 = 0.8;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_ALPHA: f64 = 1.0;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    Vocabulary(#[from] VocabularyError),
    #[error(transparent)]
    Nb(#[from] NbError),
    #[error(transparent)]
    Gbdt(#[from] GbdtError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("held-out split is empty")]
    EmptyTestSplit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSizes {
    pub train: usize,
    pub test: usize,
}

pub struct SpamOutcome {
    pub model: NbModel,
    pub metrics: MetricsReport,
    pub sizes: SplitSizes,
}

pub struct PhishingOutcome {
    pub model: GbdtModel,
    pub metrics: MetricsReport,
    pub sizes: SplitSizes,
}

pub fn train_spam(
    data: &LabeledTextDataset,
    train_fraction: f64,
    seed: u64,
    alpha: f64,
) -> Result<SpamOutcome, PipelineError> {
    let (train, test) = split_indices(data.rows.len(), train_fraction, seed)?;
    let tokens: Vec<TokenList> = data.rows.iter().map(|r| preprocess(&r.text)).collect();
    let train_tokens: Vec<TokenList> = train.iter().map(|&i| tokens[i].clone()).collect();
    let vocab = build_vocabulary(&train_tokens, 1)?;
    let rows: Vec<_> = train
        .iter()
        .map(|&i| (vectorize(&tokens[i], &vocab), data.rows[i].label))
        .collect();
    let model = train_multinomial_nb(&rows, &vocab, alpha)?;
    let metrics = spam_metrics(&model, data, &test, &tokens)?;
    Ok(SpamOutcome {
        model,
        metrics,
        sizes: SplitSizes {
            train: train.len(),
            test: test.len(),
        },
    })
}

fn spam_metrics(
    model: &NbModel,
    data: &LabeledTextDataset,
    test: &[usize],
    tokens: &[TokenList],
) -> Result<MetricsReport, PipelineError> {
    if test.is_empty() {
        return Err(PipelineError::EmptyTestSplit);
    }
    let mut scores = Vec::with_capacity(test.len());
    let mut preds = Vec::with_capacity(test.len());
    let mut labels = Vec::with_capacity(test.len());
    for &i in test {
        let p = nb_predict(model, &vectorize(&tokens[i], &model.vocabulary))?;
        scores.push(p.log_scores[1] - p.log_scores[0]);
        preds.push(p.label);
        labels.push(data.rows[i].label);
    }
    Ok(evaluate(&scores, &preds, &labels, &SpamLabel::Spam)?)
}

/// Held-out metrics of an existing model on the same deterministic split.
pub fn evaluate_spam(
    model: &NbModel,
    data: &LabeledTextDataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(MetricsReport, SplitSizes), PipelineError> {
    let (train, test) = split_indices(data.rows.len(), train_fraction, seed)?;
    let tokens: Vec<TokenList> = data.rows.iter().map(|r| preprocess(&r.text)).collect();
    let metrics = spam_metrics(model, data, &test, &tokens)?;
    Ok((
        metrics,
        SplitSizes {
            train: train.len(),
            test: test.len(),
        },
    ))
}

pub fn train_phishing(
    data: &LabeledFeatureDataset,
    train_fraction: f64,
    seed: u64,
    config: &GbdtConfig,
) -> Result<PhishingOutcome, PipelineError> {
    let (train, test) = split_indices(data.rows.len(), train_fraction, seed)?;
    let model = train_gbdt(&data.select(&train), config)?;
    let metrics = phishing_metrics(&model, data, &test)?;
    Ok(PhishingOutcome {
        model,
        metrics,
        sizes: SplitSizes {
            train: train.len(),
            test: test.len(),
        },
    })
}

fn phishing_metrics(
    model: &GbdtModel,
    data: &LabeledFeatureDataset,
    test: &[usize],
) -> Result<MetricsReport, PipelineError> {
    if test.is_empty() {
        return Err(PipelineError::EmptyTestSplit);
    }
    let mut scores = Vec::with_capacity(test.len());
    let mut preds = Vec::with_capacity(test.len());
    let mut labels = Vec::with_capacity(test.len());
    for &i in test {
        let row = &data.rows[i];
        let p = gbdt_predict(model, &row.vector)?;
        scores.push(p);
        preds.push(if p >= 0.5 {
            UrlLabel::Phishing
        } else {
            UrlLabel::Legitimate
        });
        labels.push(row.label);
    }
    Ok(evaluate(&scores, &preds, &labels, &UrlLabel::Phishing)?)
}

pub fn evaluate_phishing(
    model: &GbdtModel,
    data: &LabeledFeatureDataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(MetricsReport, SplitSizes), PipelineError> {
    if data.schema != model.schema {
        return Err(GbdtError::SchemaMismatch {
            expected: model.schema.version.clone(),
            found: data.schema.version.clone(),
        }
        .into());
    }
    let (train, test) = split_indices(data.rows.len(), train_fraction, seed)?;
    let metrics = phishing_metrics(model, data, &test)?;
    Ok((
        metrics,
        SplitSizes {
            train: train.len(),
            test: test.len(),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::read_spam_csv;

    #[test]
    fn spam_train_then_evaluate_agree() {
        let csv = "label,text\n\
            spam,WIN cash now\nham,see you at lunch\nspam,free prize claim now\n\
            ham,are we meeting today\nspam,cash prize waiting\nham,lunch at noon ok\n\
            spam,claim your free cash\nham,call me when home\nspam,win win win\nham,ok see you\n";
        let data = read_spam_csv(csv.as_bytes()).unwrap();
        let out = train_spam(&data, 0.8, 42, 1.0).unwrap();
        assert_eq!(out.sizes, SplitSizes { train: 8, test: 2 });
        let (again, _) = evaluate_spam(&out.model, &data, 0.8, 42).unwrap();
        assert_eq!(again, out.metrics);
    }
}
