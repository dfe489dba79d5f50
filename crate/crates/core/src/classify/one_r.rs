//! OneR: the single feature whose bucketed majority rule fits the training
//! data best. Buckets are contiguous value ranges holding at least
//! `min_bucket` training rows; the partition maximizing training accuracy is
//! found exactly by dynamic programming over distinct-value boundaries.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub const MIN_BUCKET: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneRRule {
    pub feature: usize,
    /// Upper bounds between buckets (midpoints), ascending.
    pub cuts: Vec<f64>,
    /// Label of each bucket; `cuts.len() + 1` entries.
    pub labels: Vec<bool>,
    /// Training rows classified correctly.
    pub correct: usize,
}

impl OneRRule {
    pub fn predict(&self, row: &[f64]) -> bool {
        let v = row[self.feature];
        let b = self.cuts.iter().take_while(|&&c| v > c).count();
        self.labels[b]
    }
}

/// Best bucket rule of one feature.
pub fn best_rule_for_feature(values: &[f64], y: &[bool], min_bucket: usize, tie: bool) -> (Vec<f64>, Vec<bool>, usize) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    // distinct-value groups with their class counts
    let mut groups: Vec<(f64, usize, usize)> = Vec::new();
    for &i in &idx {
        let v = values[i];
        match groups.last_mut() {
            Some(g) if g.0 == v => {
                if y[i] {
                    g.1 += 1
                } else {
                    g.2 += 1
                }
            }
            _ => groups.push((v, y[i] as usize, (!y[i]) as usize)),
        }
    }
    let m = groups.len();
    let mut pre = vec![(0usize, 0usize); m + 1];
    for (g, &(_, p, q)) in groups.iter().enumerate() {
        pre[g + 1] = (pre[g].0 + p, pre[g].1 + q);
    }
    let span = |a: usize, b: usize| (pre[b].0 - pre[a].0, pre[b].1 - pre[a].1);
    let label_of = |p: usize, q: usize| if p == q { tie } else { p > q };
    let n = values.len();
    if n < 2 * min_bucket || m == 1 {
        let (p, q) = span(0, m);
        return (Vec::new(), vec![label_of(p, q)], p.max(q));
    }
    // dp[j]: best correct count covering groups 0..j; None if infeasible
    let mut dp: Vec<Option<(usize, usize)>> = vec![None; m + 1];
    dp[0] = Some((0, 0));
    for j in 1..=m {
        for i in 0..j {
            let Some((base, _)) = dp[i] else { continue };
            let (p, q) = span(i, j);
            if p + q < min_bucket && !(i == 0 && j == m) {
                continue;
            }
            let v = base + p.max(q);
            if dp[j].is_none_or(|(best, _)| v > best) {
                dp[j] = Some((v, i));
            }
        }
    }
    let (correct, _) = dp[m].expect("the full range is always a bucket");
    let mut bounds = vec![m];
    let mut j = m;
    while j > 0 {
        let (_, i) = dp[j].expect("reachable");
        bounds.push(i);
        j = i;
    }
    bounds.reverse();
    let mut cuts = Vec::new();
    let mut labels = Vec::new();
    for w in bounds.windows(2) {
        let (p, q) = span(w[0], w[1]);
        labels.push(label_of(p, q));
        if w[1] < m {
            cuts.push((groups[w[1] - 1].0 + groups[w[1]].0) / 2.0);
        }
    }
    (cuts, labels, correct)
}

pub fn fit(x: &DMatrix<f64>, y: &[bool], min_bucket: usize) -> OneRRule {
    let positives = y.iter().filter(|&&b| b).count();
    let tie = 2 * positives > y.len();
    let mut best: Option<OneRRule> = None;
    for f in 0..x.ncols() {
        let values: Vec<f64> = x.column(f).iter().copied().collect();
        let (cuts, labels, correct) = best_rule_for_feature(&values, y, min_bucket, tie);
        if best.as_ref().is_none_or(|b| correct > b.correct) {
            best = Some(OneRRule {
                feature: f,
                cuts,
                labels,
                correct,
            });
        }
    }
    best.expect("at least one feature")
}
