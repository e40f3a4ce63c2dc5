//! Dataset splitting, the two classifiers and evaluation metrics.

mod gbdt;
mod metrics;
mod nb;
mod split;

pub use gbdt::{
    gain_improves, gbdt_predict, is_missing, sigmoid, train_gbdt, GbdtConfig, GbdtError,
    GbdtModel, Node, Tree, GAIN_TIE_TOLERANCE,
};
pub use metrics::{evaluate, roc_auc, MetricsError, MetricsReport};
pub use nb::{
    nb_predict, spam_wins, train_multinomial_nb, NbError, NbModel, NbPrediction, NB_CLASSES,
    SCORE_TIE_TOLERANCE,
};
pub use split::{split_dataset, split_indices, SplitError};
