//! AdaBoost.M1 over decision stumps.

use nalgebra::DMatrix;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::stump::Stump;

pub const DEFAULT_ROUNDS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdaBoostConfig {
    pub rounds: usize,
    /// Train each stump on a weighted bootstrap draw instead of passing the
    /// weights to the stump.
    pub resample: bool,
}

impl Default for AdaBoostConfig {
    fn default() -> Self {
        AdaBoostConfig {
            rounds: DEFAULT_ROUNDS,
            resample: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaBoost {
    pub stumps: Vec<Stump>,
    /// Vote weight `ln((1 − ε)/ε)` of each stump.
    pub alphas: Vec<f64>,
}

impl AdaBoost {
    /// Stops early once a round's weighted error reaches 0.5 (that stump is
    /// discarded unless it is the first) or 0 (that stump is kept).
    pub fn fit(x: &DMatrix<f64>, y: &[bool], config: &AdaBoostConfig, seed: u64) -> Self {
        let n = y.len();
        let mut w = vec![1.0 / n as f64; n];
        let order = Stump::presort(x);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut stumps = Vec::new();
        let mut alphas = Vec::new();
        for _ in 0..config.rounds {
            let stump = if config.resample {
                let dist = WeightedIndex::new(&w).expect("positive weights");
                let rows: Vec<usize> = (0..n).map(|_| dist.sample(&mut rng)).collect();
                let xs = crate::linalg::select_rows(x, &rows);
                let ys: Vec<bool> = rows.iter().map(|&i| y[i]).collect();
                Stump::fit(&xs, &ys, &vec![1.0; n])
            } else {
                Stump::fit_presorted(x, y, &w, &order)
            };
            let miss: Vec<bool> = (0..n).map(|i| stump.predict(&row(x, i)) != y[i]).collect();
            let eps: f64 = (0..n).filter(|&i| miss[i]).map(|i| w[i]).sum();
            if eps >= 0.5 {
                if stumps.is_empty() {
                    stumps.push(stump);
                    alphas.push(1.0);
                }
                break;
            }
            if eps <= 0.0 {
                stumps.push(stump);
                alphas.push((1e10f64).ln());
                break;
            }
            let beta = eps / (1.0 - eps);
            for i in 0..n {
                if !miss[i] {
                    w[i] *= beta;
                }
            }
            let s: f64 = w.iter().sum();
            for v in w.iter_mut() {
                *v /= s;
            }
            stumps.push(stump);
            alphas.push((1.0 / beta).ln());
        }
        AdaBoost { stumps, alphas }
    }

    fn vote(&self, row: &[f64], upto: usize) -> bool {
        let mut score = 0.0;
        for (s, a) in self.stumps.iter().zip(&self.alphas).take(upto) {
            score += if s.predict(row) { *a } else { -*a };
        }
        score > 0.0
    }

    pub fn predict(&self, row: &[f64]) -> bool {
        self.vote(row, self.stumps.len())
    }

    /// Training error of the ensemble after each round.
    pub fn staged_errors(&self, x: &DMatrix<f64>, y: &[bool]) -> Vec<f64> {
        (1..=self.stumps.len())
            .map(|m| {
                let wrong = (0..y.len()).filter(|&i| self.vote(&row(x, i), m) != y[i]).count();
                wrong as f64 / y.len() as f64
            })
            .collect()
    }
}

pub(crate) fn row(x: &DMatrix<f64>, i: usize) -> Vec<f64> {
    x.row(i).iter().copied().collect()
}
