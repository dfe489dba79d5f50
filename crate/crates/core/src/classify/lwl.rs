//! Locally weighted learning: for each query a decision stump is fitted to
//! all training points weighted by a linear kernel of their distance.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::stump::Stump;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lwl {
    x: DMatrix<f64>,
    y: Vec<bool>,
    /// Per-feature minimum and range used to scale distances to [0, 1].
    mins: Vec<f64>,
    ranges: Vec<f64>,
    #[serde(skip)]
    order: Vec<Vec<usize>>,
}

impl Lwl {
    pub fn fit(x: &DMatrix<f64>, y: &[bool]) -> Self {
        let mut mins = Vec::with_capacity(x.ncols());
        let mut ranges = Vec::with_capacity(x.ncols());
        for f in 0..x.ncols() {
            let col = x.column(f);
            let (lo, hi) = (col.min(), col.max());
            mins.push(lo);
            ranges.push(if hi > lo { hi - lo } else { 1.0 });
        }
        Lwl {
            x: x.clone(),
            y: y.to_vec(),
            mins,
            ranges,
            order: Stump::presort(x),
        }
    }

    /// Kernel weights `1.0001 − d/d_max` of every training point.
    pub fn weights(&self, row: &[f64]) -> Vec<f64> {
        let d: Vec<f64> = (0..self.x.nrows())
            .map(|i| {
                (0..self.x.ncols())
                    .map(|f| ((self.x[(i, f)] - row[f]) / self.ranges[f]).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        let dmax = d.iter().copied().fold(0.0, f64::max);
        if dmax == 0.0 {
            return vec![1.0; d.len()];
        }
        d.iter().map(|v| 1.0001 - v / dmax).collect()
    }

    pub fn predict(&self, row: &[f64]) -> bool {
        let w = self.weights(row);
        let order;
        let order_ref = if self.order.is_empty() {
            order = Stump::presort(&self.x);
            &order
        } else {
            &self.order
        };
        Stump::fit_presorted(&self.x, &self.y, &w, order_ref).predict(row)
    }
}
