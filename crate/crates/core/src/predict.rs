//! Out-of-sample prediction of endogenous indicators by repeated k-fold
//! cross-validation, benchmarked against a direct linear model.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::ValidatedSample;
use crate::error::{Error, Result};
use crate::linalg::{least_squares_with_intercept, select_columns, select_rows, skewness};
use crate::pls::{apply_matrix, estimate_matrix, EstimationConfig, PlsEstimate};
use crate::spec::ModelSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PredictConfig {
    pub folds: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub estimation: EstimationConfig,
}

impl Default for PredictConfig {
    fn default() -> Self {
        PredictConfig {
            folds: 10,
            repetitions: 30,
            seed: 0,
            estimation: EstimationConfig::default(),
        }
    }
}

/// Error sums of one (repetition, fold, indicator) cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorSums {
    pub count: usize,
    pub sse: f64,
    pub sae: f64,
    /// Sum of absolute percentage errors over cells with a nonzero true value.
    pub sape: f64,
    pub ape_count: usize,
}

impl ErrorSums {
    fn zero() -> Self {
        ErrorSums {
            count: 0,
            sse: 0.0,
            sae: 0.0,
            sape: 0.0,
            ape_count: 0,
        }
    }

    fn add(&mut self, truth: f64, pred: f64) {
        let e = truth - pred;
        self.count += 1;
        self.sse += e * e;
        self.sae += e.abs();
        if truth != 0.0 {
            self.sape += (e / truth).abs() * 100.0;
            self.ape_count += 1;
        }
    }

    fn merge(&mut self, other: &ErrorSums) {
        self.count += other.count;
        self.sse += other.sse;
        self.sae += other.sae;
        self.sape += other.sape;
        self.ape_count += other.ape_count;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldCell {
    pub repetition: usize,
    pub fold: usize,
    /// Per target indicator, in report order.
    pub pls: Vec<ErrorSums>,
    pub lm: Vec<ErrorSums>,
    /// Holdout sum of squares about the training mean, per indicator.
    pub tss: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorPrediction {
    pub indicator: String,
    pub construct: String,
    pub rmse_pls: f64,
    pub rmse_lm: f64,
    pub mae_pls: f64,
    pub mae_lm: f64,
    pub mape_pls: Option<f64>,
    pub mape_lm: Option<f64>,
    pub q2_predict_pls: f64,
    pub q2_predict_lm: f64,
    /// `(RMSE_LM − RMSE_PLS)/RMSE_LM × 100`.
    pub rmse_decrease_pct: Option<f64>,
    pub mae_decrease_pct: Option<f64>,
    pub mape_excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructDecrease {
    pub construct: String,
    pub mean_rmse_decrease_pct: Option<f64>,
    pub mean_mae_decrease_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictReport {
    pub folds: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub indicators: Vec<IndicatorPrediction>,
    pub constructs: Vec<ConstructDecrease>,
    /// Folds dropped because the LM design was singular or PLS failed.
    pub skipped_folds: usize,
    pub cells: Vec<FoldCell>,
    /// PLS holdout residuals per indicator (all repetitions).
    #[serde(skip)]
    pub residuals: BTreeMap<String, Vec<f64>>,
}

impl PredictReport {
    pub fn indicator(&self, name: &str) -> Option<&IndicatorPrediction> {
        self.indicators.iter().find(|i| i.indicator == name)
    }
}

/// Target indicators (blocks of endogenous constructs) with their construct,
/// and the distinct exogenous indicators.
fn layout(spec: &ModelSpec) -> (Vec<(String, String)>, Vec<String>) {
    let mut targets = Vec::new();
    for c in spec.endogenous() {
        for i in spec.block_indicators(c) {
            targets.push((i.to_string(), c.to_string()));
        }
    }
    let mut exo: Vec<String> = Vec::new();
    for c in spec.exogenous() {
        for i in spec.block_indicators(c) {
            if !exo.iter().any(|x| x == i) {
                exo.push(i.to_string());
            }
        }
    }
    (targets, exo)
}

/// Fold membership of every row for one repetition.
pub fn fold_assignment(n: usize, k: usize, seed: u64, repetition: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(repetition as u64);
    perm.shuffle(&mut rng);
    let mut fold = vec![0; n];
    for (pos, &row) in perm.iter().enumerate() {
        fold[row] = pos * k / n;
    }
    fold
}

/// Predicted standardized scores of all constructs for new rows: exogenous
/// scores from the trained weights, endogenous ones through the structural
/// equations in topological order.
pub fn predict_scores(estimate: &PlsEstimate, raw: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let scored = apply_matrix(estimate, raw)?;
    let spec = &estimate.spec;
    let mut out = scored.clone();
    for c in spec.topological_order() {
        let parents = spec.parents(c);
        if parents.is_empty() {
            continue;
        }
        let t = estimate.construct_index(c).expect("construct");
        let mut col = DVector::zeros(raw.nrows());
        for p in parents {
            let j = estimate.construct_index(p).expect("parent");
            col += out.column(j) * estimate.path(p, c).expect("path");
        }
        out.set_column(t, &col);
    }
    Ok(out)
}

/// Run the repeated k-fold protocol.
pub fn pls_predict(sample: &ValidatedSample, config: &PredictConfig) -> Result<PredictReport> {
    let spec = &sample.spec;
    let k = config.folds;
    let n = sample.n;
    if k < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 folds, got {k}")));
    }
    if k > n || n < 2 * k {
        return Err(Error::TooFewRows { needed: 2 * k, got: n });
    }
    if config.repetitions == 0 {
        return Err(Error::InvalidArgument("zero repetitions".into()));
    }
    let (targets, exo) = layout(spec);
    if exo.is_empty() || targets.is_empty() {
        return Err(Error::InvalidArgument("model needs exogenous and endogenous constructs".into()));
    }
    let indicators = spec.estimation_indicators();
    let raw = sample.dataset.matrix_for(&indicators)?;
    let col_of = |name: &str| indicators.iter().position(|x| *x == name).expect("indicator");
    let target_cols: Vec<usize> = targets.iter().map(|(i, _)| col_of(i)).collect();
    let exo_cols: Vec<usize> = exo.iter().map(|i| col_of(i)).collect();
    let target_constructs: Vec<&str> = targets.iter().map(|(_, c)| c.as_str()).collect();

    let jobs: Vec<(usize, usize)> = (0..config.repetitions)
        .flat_map(|r| (0..k).map(move |f| (r, f)))
        .collect();
    let assignments: Vec<Vec<usize>> = (0..config.repetitions)
        .map(|r| fold_assignment(n, k, config.seed, r))
        .collect();
    let results: Vec<Option<(FoldCell, Vec<Vec<f64>>)>> = jobs
        .par_iter()
        .map(|&(r, f)| {
            let assign = &assignments[r];
            let train: Vec<usize> = (0..n).filter(|&i| assign[i] != f).collect();
            let test: Vec<usize> = (0..n).filter(|&i| assign[i] == f).collect();
            run_fold(&raw, spec, &config.estimation, &train, &test, &target_cols, &target_constructs, &exo_cols)
                .map(|(cell, res)| {
                    (
                        FoldCell {
                            repetition: r,
                            fold: f,
                            ..cell
                        },
                        res,
                    )
                })
        })
        .collect();

    let mut cells = Vec::new();
    let mut residuals: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut skipped = 0;
    for r in results {
        match r {
            Some((cell, res)) => {
                for ((name, _), e) in targets.iter().zip(res) {
                    residuals.entry(name.clone()).or_default().extend(e);
                }
                cells.push(cell);
            }
            None => skipped += 1,
        }
    }
    if cells.is_empty() {
        return Err(Error::Singular("every fold failed".into()));
    }
    let indicators_out = aggregate(&cells, &targets, config.repetitions);
    let constructs = construct_decreases(&indicators_out);
    Ok(PredictReport {
        folds: k,
        repetitions: config.repetitions,
        seed: config.seed,
        indicators: indicators_out,
        constructs,
        skipped_folds: skipped,
        cells,
        residuals,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_fold(
    raw: &DMatrix<f64>,
    spec: &ModelSpec,
    estimation: &EstimationConfig,
    train: &[usize],
    test: &[usize],
    target_cols: &[usize],
    target_constructs: &[&str],
    exo_cols: &[usize],
) -> Option<(FoldCell, Vec<Vec<f64>>)> {
    let xtr = select_rows(raw, train);
    let xte = select_rows(raw, test);
    let est = estimate_matrix(&xtr, spec, estimation).ok()?;
    let pred = predict_scores(&est, &xte).ok()?;

    let exo_tr = select_columns(&xtr, exo_cols);
    let exo_te = select_columns(&xte, exo_cols);
    let mut pls = Vec::with_capacity(target_cols.len());
    let mut lm = Vec::with_capacity(target_cols.len());
    let mut tss = Vec::with_capacity(target_cols.len());
    let mut res = Vec::with_capacity(target_cols.len());
    for (&c, construct) in target_cols.iter().zip(target_constructs) {
        let ind = &est.indicators[c];
        let t = est.construct_index(construct)?;
        let k = est.blocks[t].iter().position(|x| x == ind)?;
        let lambda = est.loadings[t][k];
        let (m, s) = (est.indicator_means[c], est.indicator_sds[c]);
        let ytr = xtr.column(c).into_owned();
        let (a, b) = least_squares_with_intercept(&exo_tr, &ytr).ok()?;
        let lm_pred = (&exo_te * b).add_scalar(a);
        let mut ep = ErrorSums::zero();
        let mut el = ErrorSums::zero();
        let mut ts = 0.0;
        let mut r = Vec::with_capacity(test.len());
        for i in 0..test.len() {
            let truth = xte[(i, c)];
            let p = m + s * lambda * pred[(i, t)];
            ep.add(truth, p);
            el.add(truth, lm_pred[i]);
            ts += (truth - m).powi(2);
            r.push(truth - p);
        }
        pls.push(ep);
        lm.push(el);
        tss.push(ts);
        res.push(r);
    }
    Some((
        FoldCell {
            repetition: 0,
            fold: 0,
            pls,
            lm,
            tss,
        },
        res,
    ))
}

struct RepAgg {
    rmse: f64,
    mae: f64,
    mape: Option<f64>,
    q2: f64,
}

fn per_rep(sums: &ErrorSums, tss: f64) -> RepAgg {
    let c = sums.count as f64;
    RepAgg {
        rmse: (sums.sse / c).sqrt(),
        mae: sums.sae / c,
        mape: (sums.ape_count > 0).then(|| sums.sape / sums.ape_count as f64),
        q2: if tss > 0.0 { 1.0 - sums.sse / tss } else { f64::NAN },
    }
}

fn mean_of(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    v.iter().sum::<f64>() / v.len() as f64
}

/// Pool folds within each repetition, then average repetitions.
pub fn aggregate(cells: &[FoldCell], targets: &[(String, String)], repetitions: usize) -> Vec<IndicatorPrediction> {
    let mut out = Vec::with_capacity(targets.len());
    for (idx, (name, construct)) in targets.iter().enumerate() {
        let mut pls_reps = Vec::new();
        let mut lm_reps = Vec::new();
        let mut excluded = 0;
        for r in 0..repetitions {
            let mut p = ErrorSums::zero();
            let mut l = ErrorSums::zero();
            let mut tss = 0.0;
            for c in cells.iter().filter(|c| c.repetition == r) {
                p.merge(&c.pls[idx]);
                l.merge(&c.lm[idx]);
                tss += c.tss[idx];
            }
            if p.count == 0 {
                continue;
            }
            excluded += p.count - p.ape_count;
            pls_reps.push(per_rep(&p, tss));
            lm_reps.push(per_rep(&l, tss));
        }
        let mape = |reps: &[RepAgg]| -> Option<f64> {
            let v: Option<Vec<f64>> = reps.iter().map(|r| r.mape).collect();
            v.map(|v| mean_of(v.into_iter()))
        };
        let rmse_pls = mean_of(pls_reps.iter().map(|r| r.rmse));
        let rmse_lm = mean_of(lm_reps.iter().map(|r| r.rmse));
        let mae_pls = mean_of(pls_reps.iter().map(|r| r.mae));
        let mae_lm = mean_of(lm_reps.iter().map(|r| r.mae));
        let decrease = |lm: f64, pls: f64| (lm > 0.0).then(|| (lm - pls) / lm * 100.0);
        out.push(IndicatorPrediction {
            indicator: name.clone(),
            construct: construct.clone(),
            rmse_pls,
            rmse_lm,
            mae_pls,
            mae_lm,
            mape_pls: mape(&pls_reps),
            mape_lm: mape(&lm_reps),
            q2_predict_pls: mean_of(pls_reps.iter().map(|r| r.q2)),
            q2_predict_lm: mean_of(lm_reps.iter().map(|r| r.q2)),
            rmse_decrease_pct: decrease(rmse_lm, rmse_pls),
            mae_decrease_pct: decrease(mae_lm, mae_pls),
            mape_excluded: excluded / pls_reps.len().max(1),
        });
    }
    out
}

fn construct_decreases(indicators: &[IndicatorPrediction]) -> Vec<ConstructDecrease> {
    let mut names: Vec<&str> = Vec::new();
    for i in indicators {
        if !names.contains(&i.construct.as_str()) {
            names.push(&i.construct);
        }
    }
    names
        .into_iter()
        .map(|c| {
            let rows: Vec<&IndicatorPrediction> = indicators.iter().filter(|i| i.construct == c).collect();
            let avg = |f: &dyn Fn(&IndicatorPrediction) -> Option<f64>| -> Option<f64> {
                let v: Option<Vec<f64>> = rows.iter().map(|r| f(r)).collect();
                v.map(|v| mean_of(v.into_iter()))
            };
            ConstructDecrease {
                construct: c.to_string(),
                mean_rmse_decrease_pct: avg(&|r| r.rmse_decrease_pct),
                mean_mae_decrease_pct: avg(&|r| r.mae_decrease_pct),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorMetric {
    #[serde(rename = "RMSE")]
    Rmse,
    #[serde(rename = "MAE")]
    Mae,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymmetryCheck {
    pub construct: String,
    /// Residual skewness per indicator.
    pub skewness: Vec<(String, f64)>,
    pub recommendation: ErrorMetric,
}

/// Recommend MAE when any indicator of `target` has holdout residual
/// skewness above 1 in absolute value, else RMSE.
pub fn error_asymmetry_check(report: &PredictReport, target: &str) -> Result<AsymmetryCheck> {
    let rows: Vec<&IndicatorPrediction> = report.indicators.iter().filter(|i| i.construct == target).collect();
    if rows.is_empty() {
        return Err(Error::UnknownConstruct(target.to_string()));
    }
    let mut skew = Vec::new();
    for r in rows {
        let res = report
            .residuals
            .get(&r.indicator)
            .ok_or_else(|| Error::MissingMetric(format!("residuals of `{}`", r.indicator)))?;
        skew.push((r.indicator.clone(), skewness(res)));
    }
    let recommendation = if skew.iter().any(|(_, s)| s.abs() > 1.0) {
        ErrorMetric::Mae
    } else {
        ErrorMetric::Rmse
    };
    Ok(AsymmetryCheck {
        construct: target.to_string(),
        skewness: skew,
        recommendation,
    })
}
