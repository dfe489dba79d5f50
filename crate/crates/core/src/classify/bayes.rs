//! Gaussian naive Bayes.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest per-class feature standard deviation, so constant features do
/// not produce infinite densities.
const MIN_SD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayes {
    /// Index 0 = negative class, 1 = positive class.
    pub log_prior: [f64; 2],
    pub means: [Vec<f64>; 2],
    pub sds: [Vec<f64>; 2],
}

impl NaiveBayes {
    pub fn fit(x: &DMatrix<f64>, y: &[bool]) -> Result<Self> {
        let n = y.len();
        let m = x.ncols();
        let mut counts = [0usize; 2];
        let mut means = [vec![0.0; m], vec![0.0; m]];
        for (i, &yi) in y.iter().enumerate() {
            let c = yi as usize;
            counts[c] += 1;
            for f in 0..m {
                means[c][f] += x[(i, f)];
            }
        }
        if counts[0] == 0 || counts[1] == 0 {
            return Err(Error::SingleClass);
        }
        for c in 0..2 {
            for v in means[c].iter_mut() {
                *v /= counts[c] as f64;
            }
        }
        let mut sds = [vec![0.0; m], vec![0.0; m]];
        for (i, &yi) in y.iter().enumerate() {
            let c = yi as usize;
            for f in 0..m {
                sds[c][f] += (x[(i, f)] - means[c][f]).powi(2);
            }
        }
        for c in 0..2 {
            let d = (counts[c].max(2) - 1) as f64;
            for v in sds[c].iter_mut() {
                *v = (*v / d).sqrt().max(MIN_SD);
            }
        }
        Ok(NaiveBayes {
            log_prior: [
                (counts[0] as f64 / n as f64).ln(),
                (counts[1] as f64 / n as f64).ln(),
            ],
            means,
            sds,
        })
    }

    pub fn log_posterior(&self, row: &[f64], class: usize) -> f64 {
        let mut s = self.log_prior[class];
        for (f, v) in row.iter().enumerate() {
            let sd = self.sds[class][f];
            let z = (v - self.means[class][f]) / sd;
            s += -0.5 * z * z - sd.ln();
        }
        s
    }

    pub fn predict(&self, row: &[f64]) -> bool {
        self.log_posterior(row, 1) > self.log_posterior(row, 0)
    }
}
