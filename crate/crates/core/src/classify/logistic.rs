//! Binary logistic regression fitted by iteratively reweighted least squares.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 100;
pub const RIDGE: f64 = 1e-8;
const TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Logistic {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub iterations: usize,
    /// False when the iteration cap was hit; the last iterate is kept.
    pub converged: bool,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl Logistic {
    pub fn fit(x: &DMatrix<f64>, y: &[bool]) -> Result<Self> {
        let (n, m) = (x.nrows(), x.ncols());
        let design = DMatrix::from_fn(n, m + 1, |i, j| if j == 0 { 1.0 } else { x[(i, j - 1)] });
        let yv = DVector::from_iterator(n, y.iter().map(|&b| if b { 1.0 } else { 0.0 }));
        let mut beta = DVector::zeros(m + 1);
        let mut converged = false;
        let mut iterations = 0;
        while iterations < MAX_ITERATIONS {
            iterations += 1;
            let eta = &design * &beta;
            let p = eta.map(sigmoid);
            let w = p.map(|v| (v * (1.0 - v)).max(1e-12));
            let mut h = DMatrix::zeros(m + 1, m + 1);
            for i in 0..n {
                let r = design.row(i);
                h += r.transpose() * r * w[i];
            }
            for j in 0..=m {
                h[(j, j)] += RIDGE;
            }
            let g = design.transpose() * (&yv - &p) - &beta * RIDGE;
            let step = h
                .cholesky()
                .ok_or_else(|| Error::Singular("logistic Hessian".into()))?
                .solve(&g);
            beta += &step;
            if step.amax() < TOLERANCE {
                converged = true;
                break;
            }
        }
        Ok(Logistic {
            intercept: beta[0],
            coefficients: beta.iter().skip(1).copied().collect(),
            iterations,
            converged,
        })
    }

    pub fn probability(&self, row: &[f64]) -> f64 {
        let z = self.intercept + row.iter().zip(&self.coefficients).map(|(a, b)| a * b).sum::<f64>();
        sigmoid(z)
    }

    pub fn predict(&self, row: &[f64]) -> bool {
        self.probability(row) >= 0.5
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_logit_of_grouped_data() {
        // x = 0: 1 of 4 positive; x = 1: 3 of 4 positive -> logit slope ln 9
        let x = DMatrix::from_row_slice(8, 1, &[0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0]);
        let y = [true, false, false, false, true, true, true, false];
        let m = Logistic::fit(&x, &y).unwrap();
        assert!(m.converged);
        assert!((m.intercept - (1.0f64 / 3.0).ln()).abs() < 1e-6);
        assert!((m.coefficients[0] - 9f64.ln()).abs() < 1e-6);
    }
}
