//! C4.5-style decision tree with binary numeric splits. The threshold of each
//! feature maximizes information gain; the split feature maximizes gain
//! ratio. Pruning is pessimistic subtree replacement.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct C45Config {
    pub min_leaf: usize,
    /// Confidence factor for pruning; `None` disables pruning.
    pub confidence: Option<f64>,
}

impl Default for C45Config {
    fn default() -> Self {
        C45Config {
            min_leaf: 2,
            confidence: Some(0.25),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        label: bool,
        /// (positives, negatives) of training rows reaching the leaf.
        counts: (usize, usize),
    },
    Split {
        feature: usize,
        threshold: f64,
        counts: (usize, usize),
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    pub fn predict(&self, row: &[f64]) -> bool {
        match self {
            Node::Leaf { label, .. } => *label,
            Node::Split {
                feature,
                threshold,
                left,
                right,
                ..
            } => {
                if row[*feature] <= *threshold {
                    left.predict(row)
                } else {
                    right.predict(row)
                }
            }
        }
    }

    pub fn counts(&self) -> (usize, usize) {
        match self {
            Node::Leaf { counts, .. } | Node::Split { counts, .. } => *counts,
        }
    }

    pub fn leaves(&self) -> usize {
        match self {
            Node::Leaf { .. } => 1,
            Node::Split { left, right, .. } => left.leaves() + right.leaves(),
        }
    }
}

fn entropy(p: usize, q: usize) -> f64 {
    let n = (p + q) as f64;
    if n == 0.0 {
        return 0.0;
    }
    [p, q]
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let f = c as f64 / n;
            -f * f.log2()
        })
        .sum()
}

/// Candidate split of one feature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCandidate {
    pub feature: usize,
    pub threshold: f64,
    pub gain: f64,
    pub gain_ratio: f64,
}

/// The max-gain binary threshold of `feature` over `rows`, honouring the
/// minimum leaf size. Ties keep the lowest threshold.
pub fn best_threshold(x: &DMatrix<f64>, y: &[bool], rows: &[usize], feature: usize, min_leaf: usize) -> Option<SplitCandidate> {
    let mut idx = rows.to_vec();
    idx.sort_by(|&a, &b| x[(a, feature)].total_cmp(&x[(b, feature)]));
    let n = idx.len();
    let p_all = idx.iter().filter(|&&i| y[i]).count();
    let base = entropy(p_all, n - p_all);
    let mut best: Option<SplitCandidate> = None;
    let mut lp = 0;
    for k in 0..n.saturating_sub(1) {
        if y[idx[k]] {
            lp += 1;
        }
        let (a, b) = (x[(idx[k], feature)], x[(idx[k + 1], feature)]);
        let nl = k + 1;
        let nr = n - nl;
        if a == b || nl < min_leaf || nr < min_leaf {
            continue;
        }
        let rp = p_all - lp;
        let (fl, fr) = (nl as f64 / n as f64, nr as f64 / n as f64);
        let gain = base - fl * entropy(lp, nl - lp) - fr * entropy(rp, nr - rp);
        let split_info = -fl * fl.log2() - fr * fr.log2();
        if best.is_none_or(|c| gain > c.gain + 1e-12) {
            best = Some(SplitCandidate {
                feature,
                threshold: (a + b) / 2.0,
                gain,
                gain_ratio: gain / split_info,
            });
        }
    }
    best
}

/// Best split of a node: maximum gain ratio among positive-gain candidates;
/// without any, the first feature's zero-gain candidate is used so impure
/// nodes can still be divided.
pub fn choose_split(x: &DMatrix<f64>, y: &[bool], rows: &[usize], min_leaf: usize) -> Option<SplitCandidate> {
    let cands: Vec<SplitCandidate> = (0..x.ncols())
        .filter_map(|f| best_threshold(x, y, rows, f, min_leaf))
        .collect();
    let positive = cands
        .iter()
        .filter(|c| c.gain > 1e-12)
        .fold(None::<SplitCandidate>, |acc, c| match acc {
            Some(a) if a.gain_ratio >= c.gain_ratio - 1e-12 => Some(a),
            _ => Some(*c),
        });
    positive.or_else(|| cands.first().copied())
}

fn build(x: &DMatrix<f64>, y: &[bool], rows: &[usize], config: &C45Config, default: bool) -> Node {
    let p = rows.iter().filter(|&&i| y[i]).count();
    let q = rows.len() - p;
    let label = if p == q { default } else { p > q };
    if p == 0 || q == 0 {
        return Node::Leaf { label, counts: (p, q) };
    }
    let Some(split) = choose_split(x, y, rows, config.min_leaf) else {
        return Node::Leaf { label, counts: (p, q) };
    };
    let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| x[(i, split.feature)] <= split.threshold);
    Node::Split {
        feature: split.feature,
        threshold: split.threshold,
        counts: (p, q),
        left: Box::new(build(x, y, &l, config, label)),
        right: Box::new(build(x, y, &r, config, label)),
    }
}

/// Upper-confidence extra errors for `e` errors among `n` rows.
pub fn add_errs(n: f64, e: f64, cf: f64) -> f64 {
    if e < 1.0 {
        let base = n * (1.0 - cf.powf(1.0 / n));
        if e == 0.0 {
            return base;
        }
        return base + e * (add_errs(n, 1.0, cf) - base);
    }
    if e + 0.5 >= n {
        return (n - e).max(0.0);
    }
    let z = Normal::standard().inverse_cdf(1.0 - cf);
    let f = (e + 0.5) / n;
    let r = (f + z * z / (2.0 * n) + z * (f / n - f * f / n + z * z / (4.0 * n * n)).sqrt()) / (1.0 + z * z / n);
    r * n - e
}

fn leaf_error(counts: (usize, usize), cf: f64) -> f64 {
    let n = (counts.0 + counts.1) as f64;
    let e = counts.0.min(counts.1) as f64;
    e + add_errs(n, e, cf)
}

/// Prune bottom-up; returns the node and its estimated error.
fn prune(node: Node, cf: f64) -> (Node, f64) {
    match node {
        Node::Leaf { label, counts } => (Node::Leaf { label, counts }, leaf_error(counts, cf)),
        Node::Split {
            feature,
            threshold,
            counts,
            left,
            right,
        } => {
            let (l, el) = prune(*left, cf);
            let (r, er) = prune(*right, cf);
            let subtree = el + er;
            let as_leaf = leaf_error(counts, cf);
            if as_leaf <= subtree + 0.1 {
                let label = if counts.0 == counts.1 {
                    l.predict_majority()
                } else {
                    counts.0 > counts.1
                };
                (Node::Leaf { label, counts }, as_leaf)
            } else {
                (
                    Node::Split {
                        feature,
                        threshold,
                        counts,
                        left: Box::new(l),
                        right: Box::new(r),
                    },
                    subtree,
                )
            }
        }
    }
}

impl Node {
    fn predict_majority(&self) -> bool {
        let (p, q) = self.counts();
        p > q
    }
}

pub fn fit(x: &DMatrix<f64>, y: &[bool], config: &C45Config) -> Node {
    let rows: Vec<usize> = (0..y.len()).collect();
    let positives = y.iter().filter(|&&b| b).count();
    let tree = build(x, y, &rows, config, 2 * positives > y.len());
    match config.confidence {
        Some(cf) => prune(tree, cf).0,
        None => tree,
    }
}
