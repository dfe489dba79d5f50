//! Predictive-accuracy validation: binarize an outcome at a decile
//! threshold, cross-validate six classifiers, score pooled confusion counts
//! and pick the best performer.

pub mod adaboost;
pub mod bayes;
pub mod c45;
pub mod cv;
pub mod logistic;
pub mod lwl;
pub mod metrics;
pub mod one_r;
pub mod stump;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{quantile_linear, select_rows};
use crate::pls::PlsEstimate;

use adaboost::{row, AdaBoost, AdaBoostConfig};
use bayes::NaiveBayes;
use c45::{C45Config, Node};
use logistic::Logistic;
use lwl::Lwl;
pub use metrics::{confusion_metrics, AccuracyBand, Confusion, ConfusionMetrics};
use one_r::OneRRule;

/// Recall a classifier must reach before precision decides.
pub const RECALL_FLOOR: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    Bayes,
    Logistic,
    Lwl,
    #[serde(rename = "adaboost_m1")]
    AdaBoostM1,
    #[serde(rename = "one_r")]
    OneR,
    C45,
}

/// All classifiers in roster order (the tie-break order).
pub const ROSTER: [ClassifierKind; 6] = [
    ClassifierKind::Bayes,
    ClassifierKind::Logistic,
    ClassifierKind::Lwl,
    ClassifierKind::AdaBoostM1,
    ClassifierKind::OneR,
    ClassifierKind::C45,
];

impl ClassifierKind {
    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::Bayes => "bayes",
            ClassifierKind::Logistic => "logistic",
            ClassifierKind::Lwl => "lwl",
            ClassifierKind::AdaBoostM1 => "adaboost_m1",
            ClassifierKind::OneR => "one_r",
            ClassifierKind::C45 => "c45",
        }
    }

    fn rank(self) -> usize {
        ROSTER.iter().position(|k| *k == self).expect("in roster")
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ROSTER
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownClassifier(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierSettings {
    pub adaboost: AdaBoostConfig,
    pub c45: C45Config,
    pub one_r_min_bucket: usize,
}

impl Default for ClassifierSettings {
    fn default() -> Self {
        ClassifierSettings {
            adaboost: AdaBoostConfig::default(),
            c45: C45Config::default(),
            one_r_min_bucket: one_r::MIN_BUCKET,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FittedModel {
    Bayes(NaiveBayes),
    Logistic(Logistic),
    Lwl(Lwl),
    AdaBoost(AdaBoost),
    OneR(OneRRule),
    C45(Node),
}

impl FittedModel {
    pub fn predict(&self, row: &[f64]) -> bool {
        match self {
            FittedModel::Bayes(m) => m.predict(row),
            FittedModel::Logistic(m) => m.predict(row),
            FittedModel::Lwl(m) => m.predict(row),
            FittedModel::AdaBoost(m) => m.predict(row),
            FittedModel::OneR(m) => m.predict(row),
            FittedModel::C45(m) => m.predict(row),
        }
    }

    /// False only for a logistic fit that hit its iteration cap.
    pub fn converged(&self) -> bool {
        match self {
            FittedModel::Logistic(m) => m.converged,
            _ => true,
        }
    }
}

pub fn fit_classifier(
    kind: ClassifierKind,
    x: &DMatrix<f64>,
    y: &[bool],
    settings: &ClassifierSettings,
    seed: u64,
) -> Result<FittedModel> {
    if y.is_empty() {
        return Err(Error::InvalidArgument("no training rows".into()));
    }
    Ok(match kind {
        ClassifierKind::Bayes => FittedModel::Bayes(NaiveBayes::fit(x, y)?),
        ClassifierKind::Logistic => FittedModel::Logistic(Logistic::fit(x, y)?),
        ClassifierKind::Lwl => FittedModel::Lwl(Lwl::fit(x, y)),
        ClassifierKind::AdaBoostM1 => FittedModel::AdaBoost(AdaBoost::fit(x, y, &settings.adaboost, seed)),
        ClassifierKind::OneR => FittedModel::OneR(one_r::fit(x, y, settings.one_r_min_bucket)),
        ClassifierKind::C45 => FittedModel::C45(c45::fit(x, y, &settings.c45)),
    })
}

/// `d`-th decile (linear interpolation) and the labels `score ≥ threshold`.
pub fn binarize_by_decile(scores: &[f64], decile: usize) -> Result<(f64, Vec<bool>)> {
    if !(1..=9).contains(&decile) {
        return Err(Error::InvalidArgument(format!("decile {decile} outside 1..9")));
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.is_empty() || sorted[0] == sorted[sorted.len() - 1] {
        return Err(Error::ZeroVariance("outcome scores".into()));
    }
    let threshold = quantile_linear(&sorted, decile as f64 / 10.0);
    let labels: Vec<bool> = scores.iter().map(|&s| s >= threshold).collect();
    if labels.iter().all(|&b| b) || labels.iter().all(|&b| !b) {
        return Err(Error::SingleClass);
    }
    Ok((threshold, labels))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryTask {
    pub feature_names: Vec<String>,
    pub features: DMatrix<f64>,
    pub labels: Vec<bool>,
    pub threshold_decile: usize,
    pub threshold_value: f64,
}

impl BinaryTask {
    pub fn new(feature_names: Vec<String>, features: DMatrix<f64>, outcome: &[f64], decile: usize) -> Result<Self> {
        if features.nrows() != outcome.len() || feature_names.len() != features.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} features, {} names, {} outcomes",
                features.nrows(),
                features.ncols(),
                feature_names.len(),
                outcome.len()
            )));
        }
        let (threshold_value, labels) = binarize_by_decile(outcome, decile)?;
        Ok(BinaryTask {
            feature_names,
            features,
            labels,
            threshold_decile: decile,
            threshold_value,
        })
    }

    /// Task with labels given directly.
    pub fn from_labels(feature_names: Vec<String>, features: DMatrix<f64>, labels: Vec<bool>) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(Error::DimensionMismatch("features and labels differ in length".into()));
        }
        if labels.iter().all(|&b| b) || labels.iter().all(|&b| !b) {
            return Err(Error::SingleClass);
        }
        Ok(BinaryTask {
            feature_names,
            features,
            labels,
            threshold_decile: 0,
            threshold_value: f64::NAN,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierResult {
    pub classifier: ClassifierKind,
    pub counts: Confusion,
    pub metrics: ConfusionMetrics,
    pub fold_counts: Vec<Confusion>,
    pub nonconverged_folds: usize,
}

/// Stratified k-fold cross-validation of one classifier; counts are pooled.
pub fn run_classifier(
    kind: ClassifierKind,
    task: &BinaryTask,
    folds: usize,
    seed: u64,
    settings: &ClassifierSettings,
) -> Result<ClassifierResult> {
    let assign = cv::stratified_folds(&task.labels, folds, seed)?;
    let mut fold_counts = Vec::with_capacity(folds);
    let mut nonconverged = 0;
    for f in 0..folds {
        let train: Vec<usize> = (0..assign.len()).filter(|&i| assign[i] != f).collect();
        let test: Vec<usize> = (0..assign.len()).filter(|&i| assign[i] == f).collect();
        let xtr = select_rows(&task.features, &train);
        let ytr: Vec<bool> = train.iter().map(|&i| task.labels[i]).collect();
        let model = fit_classifier(kind, &xtr, &ytr, settings, seed.wrapping_add(f as u64))?;
        if !model.converged() {
            nonconverged += 1;
        }
        let mut c = Confusion::default();
        for &i in &test {
            c.record(task.labels[i], model.predict(&row(&task.features, i)));
        }
        fold_counts.push(c);
    }
    let mut counts = Confusion::default();
    for c in &fold_counts {
        counts.add(c);
    }
    Ok(ClassifierResult {
        classifier: kind,
        metrics: confusion_metrics(&counts)?,
        counts,
        fold_counts,
        nonconverged_folds: nonconverged,
    })
}

/// Ordering key of the selection rule: qualifying recall first, then
/// precision (qualifying) or accuracy then precision (fallback).
fn selection_key(m: &ConfusionMetrics) -> (bool, f64, f64) {
    let precision = m.precision.unwrap_or(f64::NEG_INFINITY);
    if m.recall.is_some_and(|r| r >= RECALL_FLOOR) {
        (true, precision, 0.0)
    } else {
        (false, m.accuracy, precision)
    }
}

fn beats(a: &ConfusionMetrics, b: &ConfusionMetrics) -> Option<bool> {
    let (ka, kb) = (selection_key(a), selection_key(b));
    if ka == kb {
        return None;
    }
    Some(ka.0 & !kb.0 || (ka.0 == kb.0 && (ka.1, ka.2) > (kb.1, kb.2)))
}

/// Index of the winner; ties keep the earliest entry.
pub fn best_index(metrics: &[ConfusionMetrics]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, m) in metrics.iter().enumerate() {
        match best {
            None => best = Some(i),
            Some(b) if beats(m, &metrics[b]) == Some(true) => best = Some(i),
            _ => {}
        }
    }
    best
}

/// Among recall ≥ 0.75 the highest precision wins; otherwise the highest
/// accuracy, then precision. Remaining ties go to roster order.
pub fn best_performer(results: &[ClassifierResult]) -> Result<ClassifierKind> {
    let mut sorted: Vec<&ClassifierResult> = results.iter().collect();
    sorted.sort_by_key(|r| r.classifier.rank());
    let metrics: Vec<ConfusionMetrics> = sorted.iter().map(|r| r.metrics).collect();
    best_index(&metrics)
        .map(|i| sorted[i].classifier)
        .ok_or_else(|| Error::InvalidArgument("no classifier results".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub label: String,
    pub features: Vec<String>,
    pub decile: usize,
    pub threshold: f64,
    pub folds: usize,
    pub seed: u64,
    pub results: Vec<ClassifierResult>,
    pub best: ClassifierKind,
    pub best_accuracy_pct: f64,
    pub band: AccuracyBand,
}

impl ClassificationReport {
    pub fn best_result(&self) -> &ClassifierResult {
        self.results
            .iter()
            .find(|r| r.classifier == self.best)
            .expect("best is among results")
    }
}

/// Run every requested classifier on one task.
pub fn classify_task(
    label: &str,
    task: &BinaryTask,
    classifiers: &[ClassifierKind],
    folds: usize,
    seed: u64,
    settings: &ClassifierSettings,
) -> Result<ClassificationReport> {
    let results = classifiers
        .par_iter()
        .map(|&k| run_classifier(k, task, folds, seed, settings))
        .collect::<Result<Vec<_>>>()?;
    let best = best_performer(&results)?;
    let acc = results
        .iter()
        .find(|r| r.classifier == best)
        .expect("best")
        .metrics
        .accuracy
        * 100.0;
    Ok(ClassificationReport {
        label: label.to_string(),
        features: task.feature_names.clone(),
        decile: task.threshold_decile,
        threshold: task.threshold_value,
        folds,
        seed,
        results,
        best,
        best_accuracy_pct: acc,
        band: AccuracyBand::of(acc),
    })
}

/// Try every decile whose binarization gives a feasible two-class task and
/// keep the one whose best classifier wins the selection rule. Ties go to
/// the decile closest to 5, then the lower one.
#[allow(clippy::too_many_arguments)]
pub fn select_threshold(
    label: &str,
    outcome: &[f64],
    feature_names: &[String],
    features: &DMatrix<f64>,
    classifiers: &[ClassifierKind],
    folds: usize,
    seed: u64,
    settings: &ClassifierSettings,
) -> Result<ClassificationReport> {
    let reports: Vec<ClassificationReport> = (1..=9usize)
        .into_par_iter()
        .map(|d| {
            let task = BinaryTask::new(feature_names.to_vec(), features.clone(), outcome, d).ok()?;
            match classify_task(label, &task, classifiers, folds, seed, settings) {
                Ok(r) => Some(Ok(r)),
                Err(Error::StratificationInfeasible { .. } | Error::SingleClass) => None,
                Err(e) => Some(Err(e)),
            }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect::<Result<Vec<_>>>()?;
    let mut order: Vec<usize> = (0..reports.len()).collect();
    order.sort_by_key(|&i| {
        let d = reports[i].decile;
        (d.abs_diff(5), d)
    });
    let metrics: Vec<ConfusionMetrics> = order.iter().map(|&i| reports[i].best_result().metrics).collect();
    let winner = best_index(&metrics).ok_or(Error::NoFeasibleDecile)?;
    Ok(reports[order[winner]].clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSource {
    #[default]
    LatentScores,
    RawIndicators,
}

/// One prediction task per structural edge (predictor → target) and a full
/// model predicting the outcome from every other structural construct.
pub fn hypothesis_tasks(estimate: &PlsEstimate) -> Vec<(String, Vec<String>, String)> {
    let spec = &estimate.spec;
    let mut out: Vec<(String, Vec<String>, String)> = spec
        .edges()
        .iter()
        .map(|e| (e.to_string(), vec![e.source.clone()], e.target.clone()))
        .collect();
    let outcome = spec.outcome().to_string();
    let predictors: Vec<String> = spec
        .topological_order()
        .into_iter()
        .filter(|c| *c != outcome)
        .map(str::to_string)
        .collect();
    out.push((format!("full -> {outcome}"), predictors, outcome));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifyConfig {
    pub folds: usize,
    pub seed: u64,
    pub features: FeatureSource,
    pub settings: ClassifierSettings,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            folds: 10,
            seed: 0,
            features: FeatureSource::LatentScores,
            settings: ClassifierSettings::default(),
        }
    }
}

/// Threshold-selected classification report for every hypothesis task.
pub fn classification_suite(
    estimate: &PlsEstimate,
    dataset: &Dataset,
    classifiers: &[ClassifierKind],
    config: &ClassifyConfig,
) -> Result<Vec<ClassificationReport>> {
    hypothesis_tasks(estimate)
        .into_iter()
        .map(|(label, predictors, target)| {
            let outcome: Vec<f64> = estimate
                .score(&target)
                .ok_or_else(|| Error::UnknownConstruct(target.clone()))?
                .iter()
                .copied()
                .collect();
            let (names, x) = match config.features {
                FeatureSource::LatentScores => {
                    let cols: Vec<usize> = predictors
                        .iter()
                        .map(|p| estimate.construct_index(p).expect("construct"))
                        .collect();
                    (predictors.clone(), crate::linalg::select_columns(&estimate.scores, &cols))
                }
                FeatureSource::RawIndicators => {
                    let mut names: Vec<String> = Vec::new();
                    for p in &predictors {
                        for i in estimate.spec.block_indicators(p) {
                            if !names.iter().any(|n| n == i) {
                                names.push(i.to_string());
                            }
                        }
                    }
                    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                    let x = dataset.matrix_for(&refs)?;
                    (names, x)
                }
            };
            select_threshold(&label, &outcome, &names, &x, classifiers, config.folds, config.seed, &config.settings)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decile_binarization() {
        let s: Vec<f64> = (1..=10).map(f64::from).collect();
        let (t, l) = binarize_by_decile(&s, 5).unwrap();
        assert_eq!(t, 5.5);
        assert_eq!(l, vec![false, false, false, false, false, true, true, true, true, true]);
        assert!(binarize_by_decile(&[2.0; 5], 5).is_err());
        assert!(binarize_by_decile(&s, 0).is_err());
    }

    fn m(acc: f64, prec: f64, rec: f64) -> ConfusionMetrics {
        ConfusionMetrics {
            accuracy: acc,
            precision: Some(prec),
            recall: Some(rec),
            f_measure: None,
            tp_rate: Some(rec),
            fp_rate: None,
        }
    }

    #[test]
    fn selection_rule() {
        assert_eq!(best_index(&[m(0.8, 0.80, 0.70), m(0.7, 0.75, 0.80)]), Some(1));
        assert_eq!(best_index(&[m(0.64, 0.5, 0.5), m(0.70, 0.5, 0.5)]), Some(1));
        assert_eq!(best_index(&[m(0.7, 0.5, 0.5), m(0.7, 0.5, 0.5)]), Some(0));
    }

    #[test]
    fn classifier_names_round_trip() {
        for k in ROSTER {
            assert_eq!(k.name().parse::<ClassifierKind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.name()));
        }
        assert!("svm".parse::<ClassifierKind>().is_err());
    }
}
