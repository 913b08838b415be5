//! CART decision trees (Gini impurity) and bagged random forests.
//!
//! Split quality is compared in exact integer arithmetic: for a split with
//! class counts (a, b) left and (c, d) right, minimizing the weighted Gini
//! impurity is the same as maximizing `(a²+b²)/nL + (c²+d²)/nR`, which is
//! compared by cross-multiplication in `u128`. Ties therefore resolve
//! deterministically to the lower feature index, then the lower threshold.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Algorithm, ModelError, ModelParams, TrainedModel, TrainingSet};
use crate::features::FeatureVector;
use crate::par::{self, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeConfig {
    pub max_depth: usize,
    /// Minimum (weighted) samples on each side of a split.
    pub min_leaf: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self {
            max_depth: 30,
            min_leaf: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// Fraction of features examined per split; `None` means sqrt(dim).
    pub feature_frac: Option<f64>,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: 100,
            feature_frac: None,
            max_depth: 30,
            min_leaf: 1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        useful: u64,
        not_useful: u64,
    },
    /// `x[feature] <= threshold` goes left.
    Split {
        feature: u32,
        threshold: f64,
        left: u32,
        right: u32,
    },
}

/// Nodes in pre-order; the root is node 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

impl Tree {
    fn leaf_for(&self, x: &FeatureVector) -> (u64, u64) {
        let mut i = 0usize;
        loop {
            match &self.nodes[i] {
                TreeNode::Leaf { useful, not_useful } => return (*useful, *not_useful),
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if value_at(x, *feature) <= *threshold {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
            }
        }
    }

    /// Useful fraction at the reached leaf minus one half.
    pub fn score(&self, x: &FeatureVector) -> f64 {
        let (u, n) = self.leaf_for(x);
        if u + n == 0 {
            return 0.0;
        }
        u as f64 / (u + n) as f64 - 0.5
    }

    pub fn depth(&self) -> usize {
        fn go(t: &Tree, i: usize) -> usize {
            match &t.nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => {
                    1 + go(t, *left as usize).max(go(t, *right as usize))
                }
            }
        }
        go(self, 0)
    }
}

fn value_at(x: &FeatureVector, feature: u32) -> f64 {
    match x.indices.binary_search(&feature) {
        Ok(k) => x.values[k],
        Err(_) => 0.0,
    }
}

/// Gini impurity `1 - sum p_i^2` of a (not useful, useful) count pair.
pub fn gini(counts: [u64; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p0 = counts[0] as f64 / n;
    let p1 = counts[1] as f64 / n;
    1.0 - p0 * p0 - p1 * p1
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    /// Class counts indexed by label.
    pub left: [u64; 2],
    pub right: [u64; 2],
}

impl Split {
    pub fn impurity_decrease(&self) -> f64 {
        let parent = [self.left[0] + self.right[0], self.left[1] + self.right[1]];
        let n = (parent[0] + parent[1]) as f64;
        let nl = (self.left[0] + self.left[1]) as f64;
        let nr = (self.right[0] + self.right[1]) as f64;
        gini(parent) - nl / n * gini(self.left) - nr / n * gini(self.right)
    }
}

fn sq(c: [u64; 2]) -> u128 {
    (c[0] as u128).pow(2) + (c[1] as u128).pow(2)
}

fn total(c: [u64; 2]) -> u128 {
    (c[0] + c[1]) as u128
}

/// Numerator/denominator of `q_l/n_l + q_r/n_r`.
fn purity(left: [u64; 2], right: [u64; 2]) -> (u128, u128) {
    let (nl, nr) = (total(left), total(right));
    (sq(left) * nr + sq(right) * nl, nl * nr)
}

fn better(a: (u128, u128), b: (u128, u128)) -> bool {
    a.0 * b.1 > b.0 * a.1
}

/// Best Gini split of `samples` (with multiplicities `weights`), restricted
/// to `allowed` features when given (sorted). Returns `None` when no split
/// strictly lowers impurity while keeping `min_leaf` on both sides.
pub fn best_split(
    data: &TrainingSet<'_>,
    weights: &[u64],
    samples: &[usize],
    allowed: Option<&[usize]>,
    min_leaf: usize,
) -> Option<Split> {
    let mut node = [0u64; 2];
    let mut entries: Vec<(u32, f64, usize, u64)> = Vec::new();
    for &s in samples {
        let w = weights[s];
        let y = data.labels[s].as_u8() as usize;
        node[y] += w;
        for (f, v) in data.vectors[s].iter() {
            if allowed.is_none_or(|a| a.binary_search(&f).is_ok()) {
                entries.push((f as u32, v, y, w));
            }
        }
    }
    let node_n = node[0] + node[1];
    let parent = (sq(node), node_n as u128);
    entries.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let min_leaf = min_leaf.max(1) as u64;
    let mut best: Option<(Split, (u128, u128))> = None;
    let mut start = 0;
    while start < entries.len() {
        let f = entries[start].0;
        let end = start + entries[start..].iter().take_while(|e| e.0 == f).count();
        let group = &entries[start..end];
        start = end;

        let mut nonzero = [0u64; 2];
        for e in group {
            nonzero[e.2] += e.3;
        }
        let zeros = [node[0] - nonzero[0], node[1] - nonzero[1]];
        // sweep distinct values in ascending order, zeros first
        let mut left = zeros;
        let mut prev = 0.0;
        let mut have_prev = zeros[0] + zeros[1] > 0;
        let mut k = 0;
        while k < group.len() {
            let v = group[k].1;
            if have_prev {
                let right = [node[0] - left[0], node[1] - left[1]];
                let (nl, nr) = (left[0] + left[1], right[0] + right[1]);
                if nl >= min_leaf && nr >= min_leaf {
                    let cand = purity(left, right);
                    if better(cand, parent) && best.as_ref().is_none_or(|(_, b)| better(cand, *b)) {
                        let mut threshold = prev + (v - prev) / 2.0;
                        if threshold >= v {
                            threshold = prev;
                        }
                        best = Some((
                            Split {
                                feature: f as usize,
                                threshold,
                                left,
                                right,
                            },
                            cand,
                        ));
                    }
                }
            }
            while k < group.len() && group[k].1 == v {
                left[group[k].2] += group[k].3;
                k += 1;
            }
            prev = v;
            have_prev = true;
        }
    }
    best.map(|(s, _)| s)
}

struct Builder<'a, 'd, R: Rng> {
    data: &'a TrainingSet<'d>,
    weights: &'a [u64],
    max_depth: usize,
    min_leaf: usize,
    /// Features sampled per split (forest); `None` examines all.
    per_split: Option<(usize, &'a mut R)>,
    nodes: Vec<TreeNode>,
}

impl<R: Rng> Builder<'_, '_, R> {
    fn build(&mut self, samples: Vec<usize>, depth: usize) -> u32 {
        let mut counts = [0u64; 2];
        for &s in &samples {
            counts[self.data.labels[s].as_u8() as usize] += self.weights[s];
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(TreeNode::Leaf {
            useful: counts[1],
            not_useful: counts[0],
        });
        let n = counts[0] + counts[1];
        if counts[0] == 0
            || counts[1] == 0
            || depth >= self.max_depth
            || n < 2 * self.min_leaf.max(1) as u64
        {
            return id;
        }
        let allowed: Option<Vec<usize>> = match &mut self.per_split {
            Some((m, rng)) => {
                let mut v = sample(*rng, self.data.dim, (*m).min(self.data.dim)).into_vec();
                v.sort_unstable();
                Some(v)
            }
            None => None,
        };
        let Some(split) = best_split(
            self.data,
            self.weights,
            &samples,
            allowed.as_deref(),
            self.min_leaf,
        ) else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = samples.into_iter().partition(|&s| {
            value_at(&self.data.vectors[s], split.feature as u32) <= split.threshold
        });
        let left = self.build(l, depth + 1);
        let right = self.build(r, depth + 1);
        self.nodes[id as usize] = TreeNode::Split {
            feature: split.feature as u32,
            threshold: split.threshold,
            left,
            right,
        };
        id
    }
}

fn fit_tree<R: Rng>(
    data: &TrainingSet<'_>,
    weights: &[u64],
    max_depth: usize,
    min_leaf: usize,
    per_split: Option<(usize, &mut R)>,
) -> Tree {
    let samples: Vec<usize> = (0..data.len()).filter(|&i| weights[i] > 0).collect();
    let mut b = Builder {
        data,
        weights,
        max_depth,
        min_leaf,
        per_split,
        nodes: Vec::new(),
    };
    b.build(samples, 0);
    Tree { nodes: b.nodes }
}

pub fn train_tree(data: &TrainingSet<'_>, cfg: &TreeConfig) -> Result<TrainedModel, ModelError> {
    if data.is_empty() {
        return Err(ModelError::SingleClassTrainingSet {
            useful: 0,
            not_useful: 0,
        });
    }
    let weights = vec![1u64; data.len()];
    let tree = fit_tree::<ChaCha8Rng>(data, &weights, cfg.max_depth, cfg.min_leaf, None);
    Ok(TrainedModel {
        algorithm: Algorithm::DecisionTree,
        vocab_digest: None,
        train_config: None,
        parameters: ModelParams::Tree(tree),
    })
}

/// Independent generator for tree `index` of a forest seeded with `seed`.
fn tree_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Bagged trees over bootstrap samples with per-split feature subsampling.
/// Trees are fitted in parallel when `exec` allows; each tree draws from its
/// own stream derived from (seed, tree index), so the result does not depend
/// on scheduling.
pub fn train_forest(
    data: &TrainingSet<'_>,
    cfg: &ForestConfig,
    exec: Execution,
) -> Result<TrainedModel, ModelError> {
    data.require_both_classes()?;
    if cfg.n_trees == 0 {
        return Err(ModelError::InvalidConfig("n_trees must be >= 1".into()));
    }
    let per_split = match cfg.feature_frac {
        Some(f) if f > 0.0 && f <= 1.0 => ((f * data.dim as f64).round() as usize).max(1),
        Some(f) => {
            return Err(ModelError::InvalidConfig(format!(
                "feature_frac must be in (0, 1], got {f}"
            )))
        }
        None => ((data.dim as f64).sqrt().round() as usize).max(1),
    };
    let n = data.len();
    let trees = par::map_range(exec, cfg.n_trees, |t| {
        let mut rng = tree_rng(cfg.seed, t);
        let mut weights = vec![0u64; n];
        for _ in 0..n {
            weights[rng.random_range(0..n)] += 1;
        }
        fit_tree(
            data,
            &weights,
            cfg.max_depth,
            cfg.min_leaf,
            Some((per_split, &mut rng)),
        )
    });
    Ok(TrainedModel {
        algorithm: Algorithm::RandomForest,
        vocab_digest: None,
        train_config: None,
        parameters: ModelParams::Forest { trees },
    })
}

/// (useful votes - not-useful votes) / n_trees; each tree votes by its leaf
/// majority, ties counting as not useful.
pub(crate) fn forest_score(trees: &[Tree], x: &FeatureVector) -> f64 {
    if trees.is_empty() {
        return 0.0;
    }
    let votes: f64 = trees
        .iter()
        .map(|t| if t.score(x) > 0.0 { 1.0 } else { -1.0 })
        .sum();
    votes / trees.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Label;

    fn set(rows: &[(&[f64], Label)]) -> (Vec<FeatureVector>, Vec<Label>) {
        (
            rows.iter()
                .map(|r| FeatureVector::from_dense(r.0))
                .collect(),
            rows.iter().map(|r| r.1).collect(),
        )
    }

    #[test]
    fn gini_values() {
        assert_eq!(gini([0, 3]), 0.0);
        assert_eq!(gini([2, 2]), 0.5);
    }

    #[test]
    fn separable_four_points_depth_one() {
        use Label::*;
        let (xs, ys) = set(&[
            (&[0.0, 1.0], NotUseful),
            (&[1.0, 1.0], NotUseful),
            (&[3.0, 1.0], Useful),
            (&[4.0, 0.0], Useful),
        ]);
        let data = TrainingSet::new(&xs, &ys, 2);
        let m = train_tree(&data, &TreeConfig::default()).unwrap();
        let ModelParams::Tree(t) = &m.parameters else {
            unreachable!()
        };
        assert_eq!(t.depth(), 1);
        match &t.nodes[0] {
            TreeNode::Split {
                feature, threshold, ..
            } => {
                assert_eq!(*feature, 0);
                assert_eq!(*threshold, 2.0);
            }
            n => panic!("expected split, got {n:?}"),
        }
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(m.predict("", x).unwrap().label, *y);
        }
    }

    #[test]
    fn tie_prefers_lower_feature() {
        use Label::*;
        let (xs, ys) = set(&[(&[0.0, 0.0], NotUseful), (&[1.0, 1.0], Useful)]);
        let data = TrainingSet::new(&xs, &ys, 2);
        let s = best_split(&data, &[1, 1], &[0, 1], None, 1).unwrap();
        assert_eq!(s.feature, 0);
        assert_eq!(s.threshold, 0.5);
        assert!((s.impurity_decrease() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn min_leaf_and_depth_limits() {
        use Label::*;
        let (xs, ys) = set(&[(&[0.0], NotUseful), (&[1.0], Useful), (&[2.0], Useful)]);
        let data = TrainingSet::new(&xs, &ys, 1);
        assert!(best_split(&data, &[1, 1, 1], &[0, 1, 2], None, 2).is_none());
        let m = train_tree(
            &data,
            &TreeConfig {
                max_depth: 0,
                min_leaf: 1,
            },
        )
        .unwrap();
        let ModelParams::Tree(t) = &m.parameters else {
            unreachable!()
        };
        assert_eq!(t.nodes.len(), 1);
        // leaf 2 useful / 1 not
        assert!((t.score(&xs[0]) - (2.0 / 3.0 - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn single_class_is_a_leaf() {
        let (xs, ys) = set(&[(&[1.0], Label::Useful), (&[2.0], Label::Useful)]);
        let m = train_tree(&TrainingSet::new(&xs, &ys, 1), &TreeConfig::default()).unwrap();
        assert_eq!(m.predict("", &xs[0]).unwrap().label, Label::Useful);
    }

    #[test]
    fn forest_is_seed_deterministic_across_strategies() {
        let xs: Vec<FeatureVector> = (0..60)
            .map(|i| FeatureVector::from_dense(&[(i % 5) as f64, (i % 7) as f64, (i % 3) as f64]))
            .collect();
        let ys: Vec<Label> = (0..60)
            .map(|i| Label::from_bool((i % 5) + (i % 3) > 3))
            .collect();
        let data = TrainingSet::new(&xs, &ys, 3);
        let cfg = ForestConfig {
            n_trees: 15,
            seed: 3,
            ..ForestConfig::default()
        };
        let a = train_forest(&data, &cfg, Execution::Parallel).unwrap();
        let b = train_forest(&data, &cfg, Execution::Sequential).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let acc = xs
            .iter()
            .zip(&ys)
            .filter(|(x, y)| a.predict("", x).unwrap().label == **y)
            .count();
        assert!(acc >= 50, "train accuracy {acc}/60");
    }
}
