use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("length mismatch: {scores} scores, {predictions} predictions, {labels} labels")]
    LengthMismatch {
        scores: usize,
        predictions: usize,
        labels: usize,
    },
    #[error("no rows to evaluate")]
    Empty,
    #[error("ROC AUC needs both classes")]
    DegenerateLabels,
    #[error("scores must be finite")]
    NonFiniteScore,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub roc_auc: f64,
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl MetricsReport {
    /// Derive every ratio from confusion counts. Conventions: precision is 1
    /// with no predicted positives, recall is 1 with no actual positives, F1
    /// is 0 when precision and recall are both 0.
    pub fn from_counts(tp: u64, fp: u64, tn: u64, fn_: u64, roc_auc: f64) -> Self {
        let total = tp + fp + tn + fn_;
        let accuracy = if total == 0 {
            0.0
        } else {
            (tp + tn) as f64 / total as f64
        };
        let precision = if tp + fp == 0 {
            1.0
        } else {
            tp as f64 / (tp + fp) as f64
        };
        let recall = if tp + fn_ == 0 {
            1.0
        } else {
            tp as f64 / (tp + fn_) as f64
        };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Self {
            accuracy,
            precision,
            recall,
            f1,
            roc_auc,
            tp,
            fp,
            tn,
            fn_,
        }
    }
}

/// Confusion counts and ratios with `positive` as the positive class. AUC is
/// computed from `scores`; when the labels hold a single class it is 0.5.
pub fn evaluate<L: PartialEq>(
    scores: &[f64],
    predictions: &[L],
    labels: &[L],
    positive: &L,
) -> Result<MetricsReport, MetricsError> {
    if scores.len() != labels.len() || predictions.len() != labels.len() {
        return Err(MetricsError::LengthMismatch {
            scores: scores.len(),
            predictions: predictions.len(),
            labels: labels.len(),
        });
    }
    if labels.is_empty() {
        return Err(MetricsError::Empty);
    }
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    for (p, l) in predictions.iter().zip(labels) {
        match (p == positive, l == positive) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    let binary: Vec<bool> = labels.iter().map(|l| l == positive).collect();
    let auc = match roc_auc(scores, &binary) {
        Ok(a) => a,
        Err(MetricsError::DegenerateLabels) => 0.5,
        Err(e) => return Err(e),
    };
    Ok(MetricsReport::from_counts(tp, fp, tn, fn_, auc))
}

/// Mann–Whitney form of the ROC AUC: average ranks over the pooled scores,
/// so ties contribute one half.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<f64, MetricsError> {
    if scores.len() != labels.len() {
        return Err(MetricsError::LengthMismatch {
            scores: scores.len(),
            predictions: labels.len(),
            labels: labels.len(),
        });
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(MetricsError::NonFiniteScore);
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(MetricsError::DegenerateLabels);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Ranks are kept doubled so tied groups stay integral.
    let mut pos_rank_sum2: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // 1-based ranks i+1..=j+1, doubled average = i + j + 2.
        let avg2 = (i + j + 2) as u128;
        for &k in &order[i..=j] {
            if labels[k] {
                pos_rank_sum2 += avg2;
            }
        }
        i = j + 1;
    }
    let p = n_pos as u128;
    let u2 = pos_rank_sum2 - p * (p + 1);
    Ok(u2 as f64 / (2.0 * n_pos as f64 * n_neg as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn confusion_example() {
        let m = evaluate(&[0.9, 0.8, 0.2, 0.1], &[1, 1, 0, 0], &[1, 0, 0, 1], &1).unwrap();
        assert_eq!((m.tp, m.fp, m.tn, m.fn_), (1, 1, 1, 1));
        assert_eq!(m.accuracy, 0.5);
        assert_eq!(m.precision, 0.5);
        assert_eq!(m.recall, 0.5);
        assert_eq!(m.f1, 0.5);
    }

    #[test]
    fn perfect_and_no_positive_predictions() {
        let m = evaluate(&[0.9, 0.1], &[1, 0], &[1, 0], &1).unwrap();
        assert_eq!(
            (m.accuracy, m.precision, m.recall, m.f1, m.roc_auc),
            (1.0, 1.0, 1.0, 1.0, 1.0)
        );
        let m = evaluate(&[0.4, 0.1], &[0, 0], &[1, 0], &1).unwrap();
        assert_eq!(m.precision, 1.0);
        assert_eq!(m.recall, 0.0);
    }

    #[test]
    fn auc_examples() {
        assert_eq!(
            roc_auc(&[0.9, 0.8, 0.3, 0.1], &[true, true, false, false]),
            Ok(1.0)
        );
        assert_eq!(roc_auc(&[0.9, 0.4, 0.3], &[true, false, true]), Ok(0.5));
        assert_eq!(roc_auc(&[0.5; 6], &[true, false, true, false, false, true]), Ok(0.5));
        assert_eq!(
            roc_auc(&[0.1, 0.2], &[true, true]),
            Err(MetricsError::DegenerateLabels)
        );
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            evaluate(&[0.1], &[1, 0], &[1, 0], &1),
            Err(MetricsError::LengthMismatch { .. })
        ));
    }
}
