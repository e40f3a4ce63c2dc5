//! Gradient-boosted decision trees for binary logistic loss.
//!
//! Each round fits one tree by Newton steps: gradients `p - y`, hessians
//! `p (1 - p)`, exact split search over presorted feature values and
//! leaf-wise growth up to `max_leaves`. Values equal to the missing sentinel
//! are routed to a per-node default direction.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{LabeledFeatureDataset, UrlLabel};
use crate::enrichment::{FeatureSchema, FeatureVector, MISSING_SENTINEL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GbdtError {
    #[error("training set is empty")]
    EmptyDataset,
    #[error("training data must contain both classes")]
    SingleClassDataset,
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("schema mismatch: model expects {expected}, got {found}")]
    SchemaMismatch { expected: String, found: String },
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GbdtConfig {
    pub n_trees: usize,
    pub learning_rate: f64,
    pub max_leaves: usize,
    pub min_samples_leaf: usize,
    pub l2_lambda: f64,
    /// Fraction of rows drawn per tree; 1 uses every row.
    pub subsample: f64,
    /// Fraction of features considered per tree; 1 uses every feature.
    pub colsample: f64,
    pub seed: u64,
}

impl Default for GbdtConfig {
    fn default() -> Self {
        Self {
            n_trees: 100,
            learning_rate: 0.1,
            max_leaves: 31,
            min_samples_leaf: 20,
            l2_lambda: 1.0,
            subsample: 1.0,
            colsample: 1.0,
            seed: 42,
        }
    }
}

impl GbdtConfig {
    pub fn validate(&self) -> Result<(), GbdtError> {
        let bad = |m: &str| Err(GbdtError::InvalidConfig(m.to_string()));
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return bad("learning_rate must be in (0, 1]");
        }
        if self.max_leaves < 2 {
            return bad("max_leaves must be at least 2");
        }
        if self.min_samples_leaf == 0 {
            return bad("min_samples_leaf must be positive");
        }
        if !(self.l2_lambda > 0.0 && self.l2_lambda.is_finite()) {
            return bad("l2_lambda must be positive");
        }
        if !(self.subsample > 0.0 && self.subsample <= 1.0) {
            return bad("subsample must be in (0, 1]");
        }
        if !(self.colsample > 0.0 && self.colsample <= 1.0) {
            return bad("colsample must be in (0, 1]");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        /// Direction taken by missing values.
        default_left: bool,
    },
    Leaf {
        value: f64,
    },
}

/// Nodes in creation order; the root is node 0 and children always come
/// after their parent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

pub fn is_missing(v: f64) -> bool {
    v.is_nan() || v == MISSING_SENTINEL
}

impl Tree {
    fn leaf_index_by(&self, value: impl Fn(usize) -> f64) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { .. } => return i,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    default_left,
                } => {
                    let v = value(feature);
                    let go_left = if is_missing(v) {
                        default_left
                    } else {
                        v <= threshold
                    };
                    i = if go_left { left } else { right };
                }
            }
        }
    }

    pub fn leaf_index(&self, x: &[f64]) -> usize {
        self.leaf_index_by(|f| x[f])
    }

    pub fn leaf_value(&self, x: &[f64]) -> f64 {
        match self.nodes[self.leaf_index(x)] {
            Node::Leaf { value } => value,
            Node::Split { .. } => unreachable!("routing ends at a leaf"),
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbdtModel {
    pub schema: FeatureSchema,
    pub base_score: f64,
    pub learning_rate: f64,
    pub trees: Vec<Tree>,
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl GbdtModel {
    /// `base_score + learning_rate * sum of leaf values`.
    pub fn raw_score(&self, x: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.leaf_value(x)).sum();
        self.base_score + self.learning_rate * sum
    }

    pub fn predict_values(&self, x: &[f64]) -> f64 {
        sigmoid(self.raw_score(x))
    }

    /// Structural checks used after deserialization: feature indices in
    /// range and child links pointing forward, which makes routing total.
    pub fn validate(&self) -> Result<(), GbdtError> {
        let bad = |m: String| Err(GbdtError::InvalidModel(m));
        if !self.base_score.is_finite() || !self.learning_rate.is_finite() {
            return bad("non-finite base score or learning rate".into());
        }
        for (t, tree) in self.trees.iter().enumerate() {
            if tree.nodes.is_empty() {
                return bad(format!("tree {t} is empty"));
            }
            for (i, node) in tree.nodes.iter().enumerate() {
                match *node {
                    Node::Split {
                        feature,
                        threshold,
                        left,
                        right,
                        ..
                    } => {
                        if feature >= self.schema.len() {
                            return bad(format!("tree {t} node {i}: feature {feature} out of range"));
                        }
                        if threshold.is_nan() {
                            return bad(format!("tree {t} node {i}: NaN threshold"));
                        }
                        let n = tree.nodes.len();
                        if left <= i || right <= i || left >= n || right >= n {
                            return bad(format!("tree {t} node {i}: bad child link"));
                        }
                    }
                    Node::Leaf { value } => {
                        if !value.is_finite() {
                            return bad(format!("tree {t} node {i}: non-finite leaf"));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Probability of the phishing class.
pub fn gbdt_predict(model: &GbdtModel, vector: &FeatureVector) -> Result<f64, GbdtError> {
    if vector.schema_version != model.schema.version || vector.len() != model.schema.len() {
        return Err(GbdtError::SchemaMismatch {
            expected: model.schema.version.clone(),
            found: vector.schema_version.clone(),
        });
    }
    Ok(model.predict_values(&vector.values))
}

/// Relative slack when comparing gains, so that splits whose gains differ
/// only by rounding resolve to the earlier candidate.
pub const GAIN_TIE_TOLERANCE: f64 = 1e-12;

pub fn gain_improves(gain: f64, best: f64) -> bool {
    gain > best + GAIN_TIE_TOLERANCE * best.abs().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    feature: usize,
    threshold: f64,
    gain: f64,
    default_left: bool,
}

struct Leaf {
    node: usize,
    rows: Vec<u32>,
    /// Per active feature: non-missing rows of this leaf sorted by value.
    sorted: Vec<Vec<u32>>,
    g: f64,
    h: f64,
    best: Option<Candidate>,
}

struct Grower<'a> {
    columns: &'a [Vec<f64>],
    features: &'a [usize],
    grad: &'a [f64],
    hess: &'a [f64],
    cfg: &'a GbdtConfig,
}

fn score(g: f64, h: f64, lambda: f64) -> f64 {
    g * g / (h + lambda)
}

impl Grower<'_> {
    fn sums(&self, rows: &[u32]) -> (f64, f64) {
        rows.iter().fold((0.0, 0.0), |(g, h), &r| {
            (g + self.grad[r as usize], h + self.hess[r as usize])
        })
    }

    fn best_for_feature(&self, leaf: &Leaf, k: usize) -> Option<Candidate> {
        let list = &leaf.sorted[k];
        let feature = self.features[k];
        let x = &self.columns[feature];
        let lambda = self.cfg.l2_lambda;
        let msl = self.cfg.min_samples_leaf;
        if list.len() < 2 {
            return None;
        }
        let (g_nm, h_nm) = self.sums(list);
        let n_m = leaf.rows.len() - list.len();
        let (g_m, h_m) = if n_m == 0 {
            (0.0, 0.0)
        } else {
            (leaf.g - g_nm, leaf.h - h_nm)
        };
        let parent = score(leaf.g, leaf.h, lambda);
        let (mut gl, mut hl) = (0.0, 0.0);
        let mut best: Option<Candidate> = None;
        for i in 0..list.len() - 1 {
            let r = list[i] as usize;
            gl += self.grad[r];
            hl += self.hess[r];
            let (v, vn) = (x[r], x[list[i + 1] as usize]);
            if v == vn {
                continue;
            }
            let n_l = i + 1;
            let n_r = list.len() - n_l;
            let (gr, hr) = (g_nm - gl, h_nm - hl);
            let default_left = hl >= hr;
            let (gl2, hl2, nl2, gr2, hr2, nr2) = if default_left {
                (gl + g_m, hl + h_m, n_l + n_m, gr, hr, n_r)
            } else {
                (gl, hl, n_l, gr + g_m, hr + h_m, n_r + n_m)
            };
            if nl2 < msl || nr2 < msl {
                continue;
            }
            let gain = 0.5 * (score(gl2, hl2, lambda) + score(gr2, hr2, lambda) - parent);
            if !(gain > 0.0) {
                continue;
            }
            if best.is_none_or(|b| gain_improves(gain, b.gain)) {
                let mut threshold = v / 2.0 + vn / 2.0;
                if !(threshold >= v && threshold < vn) {
                    threshold = v;
                }
                best = Some(Candidate {
                    feature,
                    threshold,
                    gain,
                    default_left,
                });
            }
        }
        best
    }

    fn best_split(&self, leaf: &Leaf) -> Option<Candidate> {
        let per_feature: Vec<Option<Candidate>> = if leaf.rows.len() >= 2048 {
            (0..self.features.len())
                .into_par_iter()
                .map(|k| self.best_for_feature(leaf, k))
                .collect()
        } else {
            (0..self.features.len())
                .map(|k| self.best_for_feature(leaf, k))
                .collect()
        };
        // Sequential reduction in feature order keeps ties deterministic.
        let mut best: Option<Candidate> = None;
        for c in per_feature.into_iter().flatten() {
            if best.is_none_or(|b| gain_improves(c.gain, b.gain)) {
                best = Some(c);
            }
        }
        best
    }

    fn make_leaf(&self, node: usize, rows: Vec<u32>, sorted: Vec<Vec<u32>>) -> Leaf {
        let (g, h) = self.sums(&rows);
        let mut leaf = Leaf {
            node,
            rows,
            sorted,
            g,
            h,
            best: None,
        };
        if leaf.rows.len() >= 2 * self.cfg.min_samples_leaf {
            leaf.best = self.best_split(&leaf);
        }
        leaf
    }

    fn grow(&self, rows: Vec<u32>, sorted: Vec<Vec<u32>>, go_left: &mut [bool]) -> Tree {
        let mut nodes = vec![Node::Leaf { value: 0.0 }];
        let mut leaves = vec![self.make_leaf(0, rows, sorted)];
        while leaves.len() < self.cfg.max_leaves {
            let mut pick: Option<(usize, f64)> = None;
            for (i, l) in leaves.iter().enumerate() {
                if let Some(c) = l.best {
                    if pick.is_none_or(|(_, g)| gain_improves(c.gain, g)) {
                        pick = Some((i, c.gain));
                    }
                }
            }
            let Some((idx, _)) = pick else { break };
            let leaf = leaves.swap_remove(idx);
            let c = leaf.best.expect("picked leaf has a split");
            let x = &self.columns[c.feature];
            for &r in &leaf.rows {
                let v = x[r as usize];
                go_left[r as usize] = if is_missing(v) {
                    c.default_left
                } else {
                    v <= c.threshold
                };
            }
            let (lrows, rrows): (Vec<u32>, Vec<u32>) =
                leaf.rows.iter().partition(|&&r| go_left[r as usize]);
            let mut lsorted = Vec::with_capacity(leaf.sorted.len());
            let mut rsorted = Vec::with_capacity(leaf.sorted.len());
            for list in leaf.sorted {
                let (l, r): (Vec<u32>, Vec<u32>) = list.iter().partition(|&&r| go_left[r as usize]);
                lsorted.push(l);
                rsorted.push(r);
            }
            let left = nodes.len();
            nodes.push(Node::Leaf { value: 0.0 });
            nodes.push(Node::Leaf { value: 0.0 });
            nodes[leaf.node] = Node::Split {
                feature: c.feature,
                threshold: c.threshold,
                left,
                right: left + 1,
                default_left: c.default_left,
            };
            leaves.push(self.make_leaf(left, lrows, lsorted));
            leaves.push(self.make_leaf(left + 1, rrows, rsorted));
        }
        for l in &leaves {
            nodes[l.node] = Node::Leaf {
                value: -l.g / (l.h + self.cfg.l2_lambda),
            };
        }
        Tree { nodes }
    }
}

pub fn train_gbdt(
    train: &LabeledFeatureDataset,
    config: &GbdtConfig,
) -> Result<GbdtModel, GbdtError> {
    config.validate()?;
    let n = train.rows.len();
    if n == 0 {
        return Err(GbdtError::EmptyDataset);
    }
    let n_features = train.schema.len();
    for row in &train.rows {
        if row.vector.len() != n_features || row.vector.schema_version != train.schema.version {
            return Err(GbdtError::SchemaMismatch {
                expected: train.schema.version.clone(),
                found: row.vector.schema_version.clone(),
            });
        }
    }
    let y: Vec<f64> = train
        .rows
        .iter()
        .map(|r| if r.label == UrlLabel::Phishing { 1.0 } else { 0.0 })
        .collect();
    let n_pos = y.iter().filter(|&&v| v == 1.0).count();
    if n_pos == 0 || n_pos == n {
        return Err(GbdtError::SingleClassDataset);
    }
    let base_score = (n_pos as f64 / (n - n_pos) as f64).ln();

    let columns: Vec<Vec<f64>> = (0..n_features)
        .map(|f| train.rows.iter().map(|r| r.vector.values[f]).collect())
        .collect();
    let presorted: Vec<Vec<u32>> = columns
        .par_iter()
        .map(|col| {
            let mut idx: Vec<u32> = (0..n as u32)
                .filter(|&r| !is_missing(col[r as usize]))
                .collect();
            idx.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]).then(a.cmp(&b)));
            idx
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut raw = vec![base_score; n];
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n];
    let mut go_left = vec![false; n];
    let mut in_bag = vec![true; n];
    let mut trees = Vec::with_capacity(config.n_trees);
    let all_features: Vec<usize> = (0..n_features).collect();

    for _ in 0..config.n_trees {
        for i in 0..n {
            let p = sigmoid(raw[i]);
            grad[i] = p - y[i];
            hess[i] = p * (1.0 - p);
        }
        if config.subsample < 1.0 {
            for b in in_bag.iter_mut() {
                *b = rng.random::<f64>() < config.subsample;
            }
        }
        let features: Vec<usize> = if config.colsample < 1.0 {
            let k = ((config.colsample * n_features as f64).round() as usize).clamp(1, n_features);
            let mut f = sample(&mut rng, n_features, k).into_vec();
            f.sort_unstable();
            f
        } else {
            all_features.clone()
        };
        let rows: Vec<u32> = (0..n as u32).filter(|&r| in_bag[r as usize]).collect();
        let sorted: Vec<Vec<u32>> = features
            .iter()
            .map(|&f| {
                if config.subsample < 1.0 {
                    presorted[f]
                        .iter()
                        .copied()
                        .filter(|&r| in_bag[r as usize])
                        .collect()
                } else {
                    presorted[f].clone()
                }
            })
            .collect();
        let grower = Grower {
            columns: &columns,
            features: &features,
            grad: &grad,
            hess: &hess,
            cfg: config,
        };
        let tree = grower.grow(rows, sorted, &mut go_left);
        for (i, r) in raw.iter_mut().enumerate() {
            let leaf = tree.leaf_index_by(|f| columns[f][i]);
            if let Node::Leaf { value } = tree.nodes[leaf] {
                *r += config.learning_rate * value;
            }
        }
        trees.push(tree);
    }

    Ok(GbdtModel {
        schema: train.schema.clone(),
        base_score,
        learning_rate: config.learning_rate,
        trees,
    })
}
