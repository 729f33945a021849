use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

/// Binary split: rows with `x[feature] >= threshold` go right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Split<T> {
    pub feature: usize,
    pub threshold: T,
    pub left: usize,
    pub right: usize,
}

/// Tree node. Every node keeps the mean and squared error of the training
/// targets routed to it, which is what pruning needs; leaves have no split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Node<T> {
    pub prediction: T,
    pub n_train: usize,
    pub sse: T,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Split<T>>,
}

impl<T> Node<T> {
    pub fn is_leaf(&self) -> bool {
        self.split.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RegressionTree<T> {
    pub root: usize,
    pub n_features: usize,
    pub nodes: Vec<Node<T>>,
}

impl<T: Scalar> RegressionTree<T> {
    /// Single-leaf tree.
    pub fn constant(prediction: T, n_train: usize, sse: T, n_features: usize) -> Self {
        RegressionTree { root: 0, n_features, nodes: vec![Node { prediction, n_train, sse, split: None }] }
    }

    pub fn predict(&self, x: &[T]) -> Result<T> {
        Ok(self.nodes[self.leaf_index(x)?].prediction)
    }

    /// Index of the leaf `x` is routed to.
    pub fn leaf_index(&self, x: &[T]) -> Result<usize> {
        let mut at = self.root;
        while let Some(split) = &self.nodes[at].split {
            let value = x.get(split.feature).ok_or(Error::MissingFeature { index: split.feature, len: x.len() })?;
            at = if *value >= split.threshold { split.right } else { split.left };
        }
        Ok(at)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    pub fn is_leaf_only(&self) -> bool {
        self.nodes[self.root].is_leaf()
    }

    /// Summed squared error of the leaves, i.e. the training error.
    pub fn leaf_sse(&self) -> T {
        self.nodes.iter().filter(|n| n.is_leaf()).map(|n| n.sse).sum()
    }

    /// Copy of the tree in which every node with `collapse[i]` becomes a
    /// leaf; unreachable nodes are dropped and indices renumbered.
    pub(crate) fn collapsed(&self, collapse: &[bool]) -> Self {
        fn copy<T: Scalar>(src: &RegressionTree<T>, at: usize, collapse: &[bool], out: &mut Vec<Node<T>>) -> usize {
            let node = &src.nodes[at];
            let idx = out.len();
            out.push(Node { prediction: node.prediction, n_train: node.n_train, sse: node.sse, split: None });
            if let (Some(split), false) = (&node.split, collapse[at]) {
                let left = copy(src, split.left, collapse, out);
                let right = copy(src, split.right, collapse, out);
                out[idx].split = Some(Split { feature: split.feature, threshold: split.threshold, left, right });
            }
            idx
        }
        let mut nodes = Vec::with_capacity(self.nodes.len());
        copy(self, self.root, collapse, &mut nodes);
        RegressionTree { root: 0, n_features: self.n_features, nodes }
    }
}

fn mean_of<T: Scalar>(y: &[T], idx: &[usize]) -> T {
    let first = y[idx[0]];
    if idx.iter().all(|&i| y[i] == first) {
        return first;
    }
    idx.iter().map(|&i| y[i]).sum::<T>() / T::from_count(idx.len())
}

fn sse_about<T: Scalar>(y: &[T], idx: &[usize], mean: T) -> T {
    idx.iter().map(|&i| (y[i] - mean) * (y[i] - mean)).sum()
}

struct Grower<'a, T> {
    x: &'a [Vec<T>],
    y: &'a [T],
    min_leaf: usize,
    nodes: Vec<Node<T>>,
}

struct Candidate<T> {
    feature: usize,
    threshold: T,
    sse: T,
}

impl<T: Scalar> Grower<'_, T> {
    fn grow(&mut self, idx: Vec<usize>) -> usize {
        let prediction = mean_of(self.y, &idx);
        let sse = sse_about(self.y, &idx, prediction);
        let at = self.nodes.len();
        self.nodes.push(Node { prediction, n_train: idx.len(), sse, split: None });
        let Some(best) = self.best_split(&idx, prediction, sse) else {
            return at;
        };
        let (left, right): (Vec<usize>, Vec<usize>) =
            idx.iter().partition(|&&i| self.x[i][best.feature] < best.threshold);
        let left = self.grow(left);
        let right = self.grow(right);
        self.nodes[at].split = Some(Split { feature: best.feature, threshold: best.threshold, left, right });
        at
    }

    /// Lowest-SSE admissible split; ties go to the lower feature index, then
    /// the lower threshold.
    fn best_split(&self, idx: &[usize], mean: T, node_sse: T) -> Option<Candidate<T>> {
        let n = idx.len();
        if n < self.min_leaf.saturating_mul(2) || node_sse <= T::zero() {
            return None;
        }
        let (lo, hi) = idx.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &i| {
            (lo.min(self.y[i]), hi.max(self.y[i]))
        });
        if lo == hi {
            return None;
        }
        // Scores are computed on centred targets to limit cancellation.
        let tol = T::epsilon() * T::lit(16.0) * node_sse;
        let n_t = T::from_count(n);
        let mut best: Option<Candidate<T>> = None;
        let mut order = idx.to_vec();
        for f in 0..self.x.first().map_or(0, Vec::len) {
            order.sort_by(|&a, &b| self.x[a][f].partial_cmp(&self.x[b][f]).unwrap_or(Ordering::Equal));
            let total: T = order.iter().map(|&i| self.y[i] - mean).sum();
            let total_sq: T = order.iter().map(|&i| (self.y[i] - mean) * (self.y[i] - mean)).sum();
            let (mut s, mut sq) = (T::zero(), T::zero());
            for k in 1..n {
                let c = self.y[order[k - 1]] - mean;
                s += c;
                sq += c * c;
                if k < self.min_leaf || n - k < self.min_leaf {
                    continue;
                }
                let (a, b) = (self.x[order[k - 1]][f], self.x[order[k]][f]);
                if a >= b {
                    continue;
                }
                let k_t = T::from_count(k);
                let left = (sq - s * s / k_t).max(T::zero());
                let rs = total - s;
                let right = ((total_sq - sq) - rs * rs / (n_t - k_t)).max(T::zero());
                let score = left + right;
                if best.as_ref().is_none_or(|b| score < b.sse - tol) {
                    let mut threshold = (a + b) / T::lit(2.0);
                    if threshold <= a {
                        threshold = b;
                    }
                    best = Some(Candidate { feature: f, threshold, sse: score });
                }
            }
        }
        best.filter(|b| node_sse - b.sse > tol)
    }
}

/// Grows a squared-error regression tree on row-major `x` (N rows of F
/// features). Thresholds sit at midpoints between consecutive distinct
/// feature values; a node stays a leaf when no split leaves at least
/// `min_samples_leaf` rows on each side or when no split reduces the error.
pub fn grow_tree<T: Scalar>(x: &[Vec<T>], y: &[T], min_samples_leaf: usize) -> Result<RegressionTree<T>> {
    if y.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if x.len() != y.len() {
        return Err(Error::InvalidParameter(format!("{} feature rows for {} targets", x.len(), y.len())));
    }
    let n_features = x[0].len();
    if x.iter().any(|row| row.len() != n_features) {
        return Err(Error::InvalidParameter("feature rows have different lengths".into()));
    }
    if x.iter().flatten().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("features and targets must be finite".into()));
    }
    let mut grower = Grower { x, y, min_leaf: min_samples_leaf.max(1), nodes: Vec::new() };
    grower.grow((0..y.len()).collect());
    Ok(RegressionTree { root: 0, n_features, nodes: grower.nodes })
}
