//! Random forest of Gini-split classification trees.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::stats::FeatureMatrix;
use crate::error::{Error, Result};
use crate::{derive_seed, par};

#[derive(Debug, Clone, PartialEq)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Features tried per split; `None` means `ceil(sqrt(s))`.
    pub max_features: Option<usize>,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: 16,
            min_leaf: 2,
            max_features: None,
            bootstrap: true,
        }
    }
}

impl ForestParams {
    pub fn features_per_split(&self, n_features: usize) -> usize {
        self.max_features
            .unwrap_or_else(|| (n_features as f64).sqrt().ceil() as usize)
            .clamp(1, n_features.max(1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// `x[feature] <= threshold` goes left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf { class: usize },
}

/// Nodes are stored in pre-order; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { class } => return class,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(t: &DecisionTree, at: usize) -> usize {
            match t.nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(t, left).max(go(t, right)),
            }
        }
        go(self, 0)
    }

    /// Rebuilds a tree from pre-order `(feature, threshold)` splits and leaves.
    pub fn from_preorder(items: &[PreorderItem]) -> Result<Self> {
        fn go(items: &[PreorderItem], pos: &mut usize, nodes: &mut Vec<Node>) -> Result<usize> {
            let item = items
                .get(*pos)
                .ok_or_else(|| Error::Model("truncated tree".into()))?;
            *pos += 1;
            let at = nodes.len();
            match *item {
                PreorderItem::Leaf(class) => {
                    nodes.push(Node::Leaf { class });
                }
                PreorderItem::Split(feature, threshold) => {
                    nodes.push(Node::Leaf { class: 0 });
                    let left = go(items, pos, nodes)?;
                    let right = go(items, pos, nodes)?;
                    nodes[at] = Node::Split {
                        feature,
                        threshold,
                        left,
                        right,
                    };
                }
            }
            Ok(at)
        }
        let mut nodes = Vec::with_capacity(items.len());
        let mut pos = 0;
        go(items, &mut pos, &mut nodes)?;
        if pos != items.len() {
            return Err(Error::Model("trailing nodes after tree".into()));
        }
        Ok(DecisionTree { nodes })
    }

    pub fn preorder(&self) -> Vec<PreorderItem> {
        fn go(t: &DecisionTree, at: usize, out: &mut Vec<PreorderItem>) {
            match t.nodes[at] {
                Node::Leaf { class } => out.push(PreorderItem::Leaf(class)),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    out.push(PreorderItem::Split(feature, threshold));
                    go(t, left, out);
                    go(t, right, out);
                }
            }
        }
        let mut out = Vec::with_capacity(self.nodes.len());
        go(self, 0, &mut out);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PreorderItem {
    Split(usize, f64),
    Leaf(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    pub trees: Vec<DecisionTree>,
    pub labels: Vec<String>,
    pub n_features: usize,
    pub seeds: Vec<u64>,
}

impl Forest {
    /// Vote count per label.
    pub fn votes(&self, x: &[f64]) -> Result<Vec<usize>> {
        if x.len() != self.n_features {
            return Err(Error::Dimension {
                expected: self.n_features,
                got: x.len(),
            });
        }
        let mut votes = vec![0usize; self.labels.len()];
        for t in &self.trees {
            votes[t.predict(x)] += 1;
        }
        Ok(votes)
    }

    /// Majority vote; ties go to the lowest label index.
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        Ok(argmax_first(&self.votes(x)?))
    }

    pub fn predict_label(&self, x: &[f64]) -> Result<&str> {
        Ok(&self.labels[self.predict(x)?])
    }
}

/// Index of the maximum, first one on ties.
pub fn argmax_first<T: PartialOrd + Copy>(xs: &[T]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Trains `params.n_trees` trees; tree `t` uses seed `derive_seed(seed, t)`.
/// Trees are built concurrently and the result does not depend on scheduling.
pub fn train_forest(
    f: &FeatureMatrix,
    labels: &[usize],
    label_names: &[String],
    params: &ForestParams,
    seed: u64,
) -> Result<Forest> {
    let n = f.n_rows();
    if labels.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: labels.len(),
        });
    }
    if n < 2 {
        return Err(Error::InvalidInput("forest needs at least two rows".into()));
    }
    if params.n_trees == 0 {
        return Err(Error::InvalidInput("forest needs at least one tree".into()));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= label_names.len()) {
        return Err(Error::InvalidInput(format!("label index {bad} out of range")));
    }
    let seeds: Vec<u64> = (0..params.n_trees as u64).map(|t| derive_seed(seed, t)).collect();
    let trees = par::map(&seeds, |&s| {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let sample: Vec<usize> = if params.bootstrap {
            (0..n).map(|_| rng.gen_range(0..n)).collect()
        } else {
            (0..n).collect()
        };
        TreeBuilder {
            f,
            labels,
            n_classes: label_names.len(),
            params,
            mtry: params.features_per_split(f.n_cols()),
            nodes: Vec::new(),
        }
        .build(sample, &mut rng)
    });
    Ok(Forest {
        trees,
        labels: label_names.to_vec(),
        n_features: f.n_cols(),
        seeds,
    })
}

struct TreeBuilder<'a> {
    f: &'a FeatureMatrix,
    labels: &'a [usize],
    n_classes: usize,
    params: &'a ForestParams,
    mtry: usize,
    nodes: Vec<Node>,
}

struct SplitChoice {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

fn gini(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / t).powi(2)).sum::<f64>()
}

impl TreeBuilder<'_> {
    fn build(mut self, sample: Vec<usize>, rng: &mut ChaCha8Rng) -> DecisionTree {
        self.grow(sample, 0, rng);
        DecisionTree { nodes: self.nodes }
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize, rng: &mut ChaCha8Rng) -> usize {
        let mut counts = vec![0usize; self.n_classes];
        for &i in &idx {
            counts[self.labels[i]] += 1;
        }
        let majority = argmax_first(&counts);
        let at = self.nodes.len();
        self.nodes.push(Node::Leaf { class: majority });

        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || depth >= self.params.max_depth || idx.len() < 2 * self.params.min_leaf.max(1) {
            return at;
        }
        let Some(choice) = self.best_split(&idx, &counts, rng) else {
            return at;
        };
        let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| self.f.values[(i, choice.feature)] <= choice.threshold);
        let left = self.grow(left_idx, depth + 1, rng);
        let right = self.grow(right_idx, depth + 1, rng);
        self.nodes[at] = Node::Split {
            feature: choice.feature,
            threshold: choice.threshold,
            left,
            right,
        };
        at
    }

    /// Tries `mtry` random features; keeps drawing past `mtry` only while no
    /// valid split has been found.
    fn best_split(&self, idx: &[usize], counts: &[usize], rng: &mut ChaCha8Rng) -> Option<SplitChoice> {
        let mut features: Vec<usize> = (0..self.f.n_cols()).collect();
        features.shuffle(rng);
        let mut best: Option<SplitChoice> = None;
        for (tried, &feat) in features.iter().enumerate() {
            if tried >= self.mtry && best.is_some() {
                break;
            }
            if let Some(c) = best_threshold(self.f, self.labels, idx, counts, feat, self.params.min_leaf) {
                if best.as_ref().is_none_or(|b| c.impurity < b.impurity) {
                    best = Some(c);
                }
            }
        }
        best
    }
}

/// Best Gini threshold on one feature (midpoints between distinct sorted
/// values, both sides holding at least `min_leaf` rows). Ties keep the
/// lowest threshold.
fn best_threshold(
    f: &FeatureMatrix,
    labels: &[usize],
    idx: &[usize],
    counts: &[usize],
    feature: usize,
    min_leaf: usize,
) -> Option<SplitChoice> {
    let mut order: Vec<(f64, usize)> = idx.iter().map(|&i| (f.values[(i, feature)], labels[i])).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = order.len();
    let mut left = vec![0usize; counts.len()];
    let mut best: Option<SplitChoice> = None;
    for k in 1..n {
        left[order[k - 1].1] += 1;
        let (lo, hi) = (order[k - 1].0, order[k].0);
        if lo == hi || k < min_leaf || n - k < min_leaf {
            continue;
        }
        let right: Vec<usize> = counts.iter().zip(&left).map(|(c, l)| c - l).collect();
        let impurity = (k as f64 * gini(&left, k) + (n - k) as f64 * gini(&right, n - k)) / n as f64;
        if best.as_ref().is_none_or(|b| impurity < b.impurity) {
            let mid = lo + (hi - lo) / 2.0;
            let threshold = if mid < hi { mid } else { lo };
            best = Some(SplitChoice {
                feature,
                threshold,
                impurity,
            });
        }
    }
    best
}
