//! Cross-sample split test: fit on one sample, project another through the
//! trained transforms, and compare structural residual errors.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::mediation::percentage_difference;
use crate::pls::{apply, estimate_dataset, structural_fit, EstimationConfig};
use crate::spec::ModelSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitVerdict {
    /// Test error below train error.
    Drop,
    Spike,
    Tie,
}

impl SplitVerdict {
    fn of(train: f64, test: f64) -> Self {
        if test < train {
            SplitVerdict::Drop
        } else if test > train {
            SplitVerdict::Spike
        } else {
            SplitVerdict::Tie
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructErrors {
    pub construct: String,
    pub mse_train: f64,
    pub mse_test: f64,
    pub rmse_train: f64,
    pub rmse_test: f64,
    pub mse_difference_pct: Option<f64>,
    pub rmse_difference_pct: Option<f64>,
    pub mse_verdict: SplitVerdict,
    pub rmse_verdict: SplitVerdict,
}

fn mse(residuals: &[f64]) -> f64 {
    residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64
}

impl ConstructErrors {
    /// Error cells from train and test residuals; RMSE is `sqrt(MSE)`.
    pub fn from_residuals(construct: &str, train: &[f64], test: &[f64]) -> Result<Self> {
        if train.is_empty() || test.is_empty() {
            return Err(Error::InvalidArgument("empty residual vector".into()));
        }
        let (a, b) = (mse(train), mse(test));
        Ok(Self::from_reported(construct, a, b, a.sqrt(), b.sqrt()))
    }

    /// Error cells taken as given, e.g. from a published table.
    pub fn from_reported(construct: &str, mse_train: f64, mse_test: f64, rmse_train: f64, rmse_test: f64) -> Self {
        ConstructErrors {
            construct: construct.to_string(),
            mse_train,
            mse_test,
            rmse_train,
            rmse_test,
            mse_difference_pct: percentage_difference(mse_train, mse_test).ok(),
            rmse_difference_pct: percentage_difference(rmse_train, rmse_test).ok(),
            mse_verdict: SplitVerdict::of(mse_train, mse_test),
            rmse_verdict: SplitVerdict::of(rmse_train, rmse_test),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitTestReport {
    pub train: String,
    pub test: String,
    pub train_hash: String,
    pub test_hash: String,
    pub constructs: Vec<ConstructErrors>,
}

impl SplitTestReport {
    pub fn construct(&self, name: &str) -> Option<&ConstructErrors> {
        self.constructs.iter().find(|c| c.construct == name)
    }
}

/// Train on `train`, score both samples with the trained model and compare
/// the structural residuals of every endogenous construct of `common`.
pub fn split_test(
    train: &Dataset,
    test: &Dataset,
    common: &ModelSpec,
    config: &EstimationConfig,
    labels: (&str, &str),
) -> Result<SplitTestReport> {
    let est = estimate_dataset(train, common, config)?;
    // both samples go through the same transform, so identical samples
    // give identical errors
    let train_scores = apply(&est, train)?;
    let test_scores = apply(&est, test)?;
    let mut constructs = Vec::new();
    for target in common.endogenous() {
        let tr = structural_fit(&est, &train_scores, target)?;
        let te = structural_fit(&est, &test_scores, target)?;
        constructs.push(ConstructErrors::from_residuals(
            target,
            tr.residuals.as_slice(),
            te.residuals.as_slice(),
        )?);
    }
    Ok(SplitTestReport {
        train: labels.0.to_string(),
        test: labels.1.to_string(),
        train_hash: train.content_hash(),
        test_hash: test.content_hash(),
        constructs,
    })
}

/// Both directions, run concurrently: `(a → b, b → a)`.
pub fn split_test_both(
    a: &Dataset,
    b: &Dataset,
    common: &ModelSpec,
    config: &EstimationConfig,
    labels: (&str, &str),
) -> Result<(SplitTestReport, SplitTestReport)> {
    let (fwd, rev) = rayon::join(
        || split_test(a, b, common, config, labels),
        || split_test(b, a, common, config, (labels.1, labels.0)),
    );
    Ok((fwd?, rev?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn computed_cells_keep_rmse_as_root_of_mse() {
        let c = ConstructErrors::from_residuals("Y", &[1.0, -1.0, 2.0], &[0.5, 0.5]).unwrap();
        assert_eq!(c.rmse_train, c.mse_train.sqrt());
        assert_eq!(c.mse_verdict, SplitVerdict::Drop);
        let same = ConstructErrors::from_residuals("Y", &[1.0, 2.0], &[1.0, 2.0]).unwrap();
        assert_eq!(same.mse_difference_pct, Some(0.0));
        assert_eq!(same.mse_verdict, SplitVerdict::Tie);
    }
}
