//! Binary decision-tree induction over numeric features.
//!
//! Splits are chosen the classic way: candidate thresholds are midpoints
//! between adjacent distinct observed values, the split must reach at least
//! the mean information gain of all candidates, and among those the highest
//! gain ratio wins. Recursion stops at purity and there is no pruning, so a
//! tree trained on noiseless data classifies its training set exactly. Ties
//! break toward the lowest variable index, then the lowest threshold.

use std::collections::BTreeSet;

use crate::setrep::{BoxSet, FilterBox, Interval};
use crate::{Error, Result};

const EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
pub enum Node {
    Leaf {
        positive: bool,
        /// Training positives routed to this leaf; the interval-hull lowering
        /// reads its bounds from these.
        positives: Vec<Vec<f64>>,
    },
    Split {
        var: usize,
        threshold: f64,
        /// Branch taken when `x[var] <= threshold`.
        le: Box<Node>,
        /// Branch taken when `x[var] > threshold`.
        gt: Box<Node>,
    },
}

#[derive(Debug, Clone)]
pub struct DecisionTree {
    pub root: Node,
    pub n_vars: usize,
}

/// Trains a tree separating `pos` from `neg`.
///
/// `pos` must be non-empty. An empty `neg` yields a single all-true leaf: with
/// nothing to discriminate against, the tree accepts everything.
pub fn train_tree<S: AsRef<[f64]>>(pos: &[S], neg: &[S], n_vars: usize) -> Result<DecisionTree> {
    if pos.is_empty() {
        return Err(Error::InvalidInput("cannot train a tree with no positive examples".into()));
    }
    for x in pos.iter().chain(neg.iter()) {
        if x.as_ref().len() != n_vars {
            return Err(Error::InvalidInput(format!(
                "training example has {} variables, expected {n_vars}",
                x.as_ref().len()
            )));
        }
    }
    let pos: Vec<Vec<f64>> = pos.iter().map(|x| x.as_ref().to_vec()).collect();
    let neg: Vec<Vec<f64>> = neg.iter().map(|x| x.as_ref().to_vec()).collect();
    let root = grow(pos, neg, n_vars)?;
    Ok(DecisionTree { root, n_vars })
}

fn grow(pos: Vec<Vec<f64>>, neg: Vec<Vec<f64>>, n_vars: usize) -> Result<Node> {
    if neg.is_empty() {
        return Ok(Node::Leaf { positive: true, positives: pos });
    }
    if pos.is_empty() {
        return Ok(Node::Leaf { positive: false, positives: Vec::new() });
    }
    let (var, threshold) = best_split(&pos, &neg, n_vars)?;
    let (pos_le, pos_gt): (Vec<_>, Vec<_>) = pos.into_iter().partition(|x| x[var] <= threshold);
    let (neg_le, neg_gt): (Vec<_>, Vec<_>) = neg.into_iter().partition(|x| x[var] <= threshold);
    Ok(Node::Split {
        var,
        threshold,
        le: Box::new(grow(pos_le, neg_le, n_vars)?),
        gt: Box::new(grow(pos_gt, neg_gt, n_vars)?),
    })
}

fn entropy(p: usize, n: usize) -> f64 {
    let total = (p + n) as f64;
    let mut h = 0.0;
    for &c in &[p, n] {
        if c > 0 {
            let q = c as f64 / total;
            h -= q * q.log2();
        }
    }
    h
}

struct Candidate {
    var: usize,
    threshold: f64,
    gain: f64,
    ratio: f64,
}

fn best_split(pos: &[Vec<f64>], neg: &[Vec<f64>], n_vars: usize) -> Result<(usize, f64)> {
    let total = pos.len() + neg.len();
    let base = entropy(pos.len(), neg.len());
    let mut candidates: Vec<Candidate> = Vec::new();
    for var in 0..n_vars {
        let mut values: Vec<f64> =
            pos.iter().chain(neg.iter()).map(|x| x[var]).collect();
        values.sort_by(|a, b| a.partial_cmp(b).expect("non-finite feature value"));
        values.dedup();
        for pair in values.windows(2) {
            let threshold = (pair[0] + pair[1]) / 2.0;
            let pl = pos.iter().filter(|x| x[var] <= threshold).count();
            let nl = neg.iter().filter(|x| x[var] <= threshold).count();
            let left = pl + nl;
            let right = total - left;
            if left == 0 || right == 0 {
                continue;
            }
            let wl = left as f64 / total as f64;
            let wr = right as f64 / total as f64;
            let gain = base
                - wl * entropy(pl, nl)
                - wr * entropy(pos.len() - pl, neg.len() - nl);
            let split_info = -(wl * wl.log2() + wr * wr.log2());
            candidates.push(Candidate { var, threshold, gain, ratio: gain / split_info });
        }
    }
    if candidates.is_empty() {
        return Err(Error::Inconsistency(
            "positive and negative examples are indistinguishable (no candidate split)".into(),
        ));
    }
    let mean_gain = candidates.iter().map(|c| c.gain).sum::<f64>() / candidates.len() as f64;
    let mut best: Option<&Candidate> = None;
    for c in &candidates {
        if c.gain + EPS < mean_gain {
            continue;
        }
        best = match best {
            None => Some(c),
            Some(b) => {
                if c.ratio > b.ratio + EPS {
                    Some(c)
                } else {
                    // Equal ratios fall through to the (var, threshold) order,
                    // which is how candidates were generated.
                    Some(b)
                }
            }
        };
    }
    let best = best.expect("mean gain is attained by at least one candidate");
    Ok((best.var, best.threshold))
}

impl DecisionTree {
    pub fn classify(&self, x: &[f64]) -> bool {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { positive, .. } => return *positive,
                Node::Split { var, threshold, le, gt } => {
                    node = if x[*var] <= *threshold { le } else { gt };
                }
            }
        }
    }

    pub fn true_leaf_count(&self) -> usize {
        let mut count = 0;
        self.walk_true_leaves(&mut |_, _| count += 1);
        count
    }

    /// Visits every true leaf with the accumulated path box and its positives.
    fn walk_true_leaves(&self, visit: &mut impl FnMut(&FilterBox, &[Vec<f64>])) {
        fn rec(node: &Node, path: FilterBox, visit: &mut impl FnMut(&FilterBox, &[Vec<f64>])) {
            match node {
                Node::Leaf { positive: true, positives } => visit(&path, positives),
                Node::Leaf { positive: false, .. } => {}
                Node::Split { var, threshold, le, gt } => {
                    let mut left = path.clone();
                    left.narrow(*var, Interval::at_most(*threshold));
                    rec(le, left, visit);
                    let mut right = path;
                    right.narrow(*var, Interval::above(*threshold));
                    rec(gt, right, visit);
                }
            }
        }
        rec(&self.root, FilterBox::universal(), visit);
    }
}

/// Lowers a tree to boxes by reading the filters off each true-leaf path.
///
/// In strict mode a tree with more than one true leaf is rejected: downstream
/// symbol generation assumes each characterizing set is one box.
pub fn c45_boxset(tree: &DecisionTree, strict: bool) -> Result<BoxSet> {
    let mut boxes = Vec::new();
    tree.walk_true_leaves(&mut |path, _| boxes.push(path.clone()));
    if strict && boxes.len() > 1 {
        return Err(Error::MultipleTrueLeaves(boxes.len()));
    }
    Ok(BoxSet::from_boxes(boxes))
}

/// Lowers a tree to boxes by taking per-variable `[min,max]` hulls over each
/// true leaf's positives.
///
/// `restrict_to` limits which variables receive filters (effect sets use the
/// option's mask); `None` filters every variable, full-range hulls included.
pub fn intm_boxset(
    tree: &DecisionTree,
    restrict_to: Option<&BTreeSet<usize>>,
    strict: bool,
) -> Result<BoxSet> {
    let scope: Vec<usize> = match restrict_to {
        Some(vars) => vars.iter().copied().collect(),
        None => (0..tree.n_vars).collect(),
    };
    let mut boxes = Vec::new();
    let mut empty_leaf = false;
    tree.walk_true_leaves(&mut |_, positives| {
        if positives.is_empty() {
            empty_leaf = true;
            return;
        }
        let mut b = FilterBox::universal();
        for &v in &scope {
            let lo = positives.iter().map(|x| x[v]).fold(f64::INFINITY, f64::min);
            let hi = positives.iter().map(|x| x[v]).fold(f64::NEG_INFINITY, f64::max);
            b.set_filter(v, Interval::closed(lo, hi));
        }
        boxes.push(b);
    });
    if empty_leaf {
        return Err(Error::InvalidInput("true leaf with no positive examples".into()));
    }
    if strict && boxes.len() > 1 {
        return Err(Error::MultipleTrueLeaves(boxes.len()));
    }
    Ok(BoxSet::from_boxes(boxes))
}
