//! Weighted one-level decision tree on numeric features.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stump {
    /// `None` when no feature could be split; `left` is then predicted everywhere.
    pub feature: Option<usize>,
    pub threshold: f64,
    /// Prediction for `x[feature] <= threshold`.
    pub left: bool,
    pub right: bool,
}

impl Stump {
    pub fn predict(&self, row: &[f64]) -> bool {
        match self.feature {
            Some(f) if row[f] > self.threshold => self.right,
            _ => self.left,
        }
    }

    /// Row orderings by each feature, reusable across fits on the same data.
    pub fn presort(x: &DMatrix<f64>) -> Vec<Vec<usize>> {
        (0..x.ncols())
            .map(|f| {
                let mut idx: Vec<usize> = (0..x.nrows()).collect();
                idx.sort_by(|&a, &b| x[(a, f)].total_cmp(&x[(b, f)]).then(a.cmp(&b)));
                idx
            })
            .collect()
    }

    pub fn fit(x: &DMatrix<f64>, y: &[bool], w: &[f64]) -> Stump {
        Self::fit_presorted(x, y, w, &Self::presort(x))
    }

    /// Minimize weighted error over all features and midpoint thresholds.
    /// Ties keep the first feature and the lowest threshold.
    pub fn fit_presorted(x: &DMatrix<f64>, y: &[bool], w: &[f64], order: &[Vec<usize>]) -> Stump {
        let (mut pos_total, mut neg_total) = (0.0, 0.0);
        for (yi, wi) in y.iter().zip(w) {
            if *yi {
                pos_total += wi;
            } else {
                neg_total += wi;
            }
        }
        let majority = pos_total > neg_total;
        let mut best = Stump {
            feature: None,
            threshold: 0.0,
            left: majority,
            right: majority,
        };
        let mut best_err = pos_total.min(neg_total);
        for (f, idx) in order.iter().enumerate() {
            let (mut lp, mut ln) = (0.0, 0.0);
            for k in 0..idx.len().saturating_sub(1) {
                let i = idx[k];
                if y[i] {
                    lp += w[i];
                } else {
                    ln += w[i];
                }
                let (a, b) = (x[(i, f)], x[(idx[k + 1], f)]);
                if a == b {
                    continue;
                }
                let (rp, rn) = (pos_total - lp, neg_total - ln);
                let left = lp > ln;
                let right = rp > rn;
                let err = (if left { ln } else { lp }) + (if right { rn } else { rp });
                if err < best_err - 1e-12 {
                    best_err = err;
                    best = Stump {
                        feature: Some(f),
                        threshold: (a + b) / 2.0,
                        left,
                        right,
                    };
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_the_separating_threshold() {
        let x = DMatrix::from_row_slice(6, 2, &[5.0, 1.0, 4.0, 2.0, 3.0, 3.0, 2.0, 4.0, 1.0, 5.0, 0.0, 6.0]);
        let y = [false, false, false, true, true, true];
        let s = Stump::fit(&x, &y, &[1.0; 6]);
        assert_eq!(s.feature, Some(0));
        assert_eq!(s.threshold, 2.5);
        assert!(s.left && !s.right);
        assert!((0..6).all(|i| s.predict(&[x[(i, 0)], x[(i, 1)]]) == y[i]));
    }
}
