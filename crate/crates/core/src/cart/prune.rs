use super::RegressionTree;
use crate::Scalar;

/// Nested subtrees from minimal cost-complexity pruning.
///
/// `alphas[0] == 0` maps to the grown tree; the last entry is the root-only
/// tree. For any `alpha`, the optimal subtree is the one at the last index
/// whose alpha does not exceed it.
#[derive(Debug, Clone, PartialEq)]
pub struct PruningPath<T> {
    pub alphas: Vec<T>,
    pub trees: Vec<RegressionTree<T>>,
}

impl<T: Scalar> PruningPath<T> {
    pub fn subtree_for(&self, alpha: T) -> &RegressionTree<T> {
        let k = self.alphas.partition_point(|&a| a <= alpha).max(1);
        &self.trees[k - 1]
    }
}

/// Per-node weakest-link statistics: summed leaf error and leaf count of the
/// live subtree rooted at each node.
fn subtree_stats<T: Scalar>(tree: &RegressionTree<T>, collapsed: &[bool]) -> (Vec<T>, Vec<usize>) {
    let n = tree.nodes.len();
    let mut err = vec![T::zero(); n];
    let mut leaves = vec![0usize; n];
    // Children always have larger indices than their parent.
    for i in (0..n).rev() {
        let node = &tree.nodes[i];
        match (&node.split, collapsed[i]) {
            (Some(s), false) => {
                err[i] = err[s.left] + err[s.right];
                leaves[i] = leaves[s.left] + leaves[s.right];
            }
            _ => {
                err[i] = node.sse;
                leaves[i] = 1;
            }
        }
    }
    (err, leaves)
}

fn live_internal<T: Scalar>(tree: &RegressionTree<T>, collapsed: &[bool]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut stack = vec![tree.root];
    while let Some(i) = stack.pop() {
        if let (Some(s), false) = (&tree.nodes[i].split, collapsed[i]) {
            out.push(i);
            stack.push(s.left);
            stack.push(s.right);
        }
    }
    out
}

/// Weakest-link pruning: repeatedly collapse the internal node(s) with the
/// smallest `(sse(node) - sse(subtree)) / (leaves(subtree) - 1)` and record
/// that value as the next alpha. Nodes whose link strength ties the current
/// alpha are collapsed together so alphas strictly increase.
pub fn prune_path<T: Scalar>(tree: &RegressionTree<T>) -> PruningPath<T> {
    let mut collapsed = vec![false; tree.nodes.len()];
    let mut alphas = vec![T::zero()];
    let mut trees = vec![tree.clone()];
    let root_sse = tree.nodes[tree.root].sse;
    let tol = T::epsilon() * T::lit(64.0) * root_sse.max(T::one());

    loop {
        let internal = live_internal(tree, &collapsed);
        if internal.is_empty() {
            break;
        }
        let (err, leaves) = subtree_stats(tree, &collapsed);
        let strength = |i: usize| {
            let gain = (tree.nodes[i].sse - err[i]).max(T::zero());
            gain / T::from_count(leaves[i] - 1)
        };
        let weakest = internal.iter().map(|&i| strength(i)).fold(T::infinity(), T::min);
        let last = *alphas.last().expect("path starts at zero");
        let alpha = weakest.max(last);
        for &i in &internal {
            if strength(i) <= alpha + tol {
                collapsed[i] = true;
            }
        }
        let pruned = tree.collapsed(&collapsed);
        if alpha <= last + tol {
            *trees.last_mut().expect("non-empty") = pruned;
        } else {
            alphas.push(alpha);
            trees.push(pruned);
        }
    }
    PruningPath { alphas, trees }
}
