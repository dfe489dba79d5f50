//! PLS path-model estimation with reflective (Mode A) outer weights, the
//! path weighting inner scheme, and second-order constructs measured by
//! repeated indicators.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, ValidatedSample};
use crate::error::{Error, Result};
use crate::linalg::{least_squares, standardize, standardize_vec, ColumnScaling};
use crate::spec::{Edge, ModelSpec};

pub const ESTIMATE_SCHEMA: &str = "pls-survey/estimate/1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimationConfig {
    /// Stop once the largest absolute outer-weight change falls below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        EstimationConfig {
            tolerance: 1e-7,
            max_iterations: 300,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathCoefficient {
    pub source: String,
    pub target: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderWeight {
    pub component: String,
    pub construct: String,
    pub value: f64,
}

/// A fitted path model. Scores are standardized (mean 0, unit sample
/// variance); weights are on the standardized-indicator scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlsEstimate {
    pub schema: String,
    pub spec: ModelSpec,
    /// Estimation constructs in canonical order; indexes `blocks`, `weights`,
    /// `loadings` and the columns of `scores`.
    pub constructs: Vec<String>,
    pub blocks: Vec<Vec<String>>,
    /// Distinct estimation indicators with their training location/scale.
    pub indicators: Vec<String>,
    pub indicator_means: Vec<f64>,
    pub indicator_sds: Vec<f64>,
    pub weights: Vec<Vec<f64>>,
    pub loadings: Vec<Vec<f64>>,
    pub scores: DMatrix<f64>,
    /// Observed correlations of `indicators`.
    pub indicator_corr: DMatrix<f64>,
    pub paths: Vec<PathCoefficient>,
    pub second_order_weights: Vec<SecondOrderWeight>,
    pub iterations: usize,
    pub converged: bool,
    pub tolerance_reached: f64,
}

impl PlsEstimate {
    pub fn construct_index(&self, name: &str) -> Option<usize> {
        self.constructs.iter().position(|c| c == name)
    }

    pub fn score(&self, name: &str) -> Option<DVector<f64>> {
        self.construct_index(name)
            .map(|j| self.scores.column(j).into_owned())
    }

    pub fn path(&self, source: &str, target: &str) -> Option<f64> {
        self.paths
            .iter()
            .find(|p| p.source == source && p.target == target)
            .map(|p| p.value)
    }

    pub fn loadings_of(&self, name: &str) -> Option<&[f64]> {
        self.construct_index(name).map(|j| self.loadings[j].as_slice())
    }

    pub fn n(&self) -> usize {
        self.scores.nrows()
    }

    /// Correlation matrix of the latent scores.
    pub fn latent_correlations(&self) -> DMatrix<f64> {
        let n = self.scores.nrows() as f64;
        let mut r = self.scores.transpose() * &self.scores / (n - 1.0);
        for i in 0..r.nrows() {
            r[(i, i)] = 1.0;
        }
        r
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let est: PlsEstimate = serde_json::from_str(text)?;
        if est.schema != ESTIMATE_SCHEMA {
            return Err(Error::Serialization(format!(
                "unsupported estimate schema `{}`",
                est.schema
            )));
        }
        Ok(est)
    }
}

/// Estimate the model on a validated sample.
pub fn estimate(sample: &ValidatedSample, config: &EstimationConfig) -> Result<PlsEstimate> {
    estimate_dataset(&sample.dataset, &sample.spec, config)
}

/// Estimate without the validation step (bootstrap replicates, folds).
pub fn estimate_dataset(
    dataset: &Dataset,
    spec: &ModelSpec,
    config: &EstimationConfig,
) -> Result<PlsEstimate> {
    let x = dataset.matrix_for(&spec.estimation_indicators())?;
    estimate_matrix(&x, spec, config)
}

/// Estimate from a raw matrix whose columns follow
/// `spec.estimation_indicators()`.
#[allow(clippy::needless_range_loop)]
pub fn estimate_matrix(
    raw: &DMatrix<f64>,
    spec: &ModelSpec,
    config: &EstimationConfig,
) -> Result<PlsEstimate> {
    let n = raw.nrows();
    if n < 3 {
        return Err(Error::TooFewRows { needed: 3, got: n });
    }
    let indicators: Vec<String> = spec
        .estimation_indicators()
        .iter()
        .map(|s| s.to_string())
        .collect();
    if raw.ncols() != indicators.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} columns for {} indicators",
            raw.ncols(),
            indicators.len()
        )));
    }
    let (x, scaling) = standardize(raw).map_err(|e| match e {
        Error::ZeroVariance(col) => {
            let j: usize = col.trim_start_matches("column ").parse().unwrap_or(0);
            Error::ConstantColumn(indicators[j].clone())
        }
        other => other,
    })?;
    let layout = Layout::new(spec, &indicators);
    let c = layout.constructs.len();
    let denom = (n - 1) as f64;

    let mut weights: Vec<DVector<f64>> = layout
        .blocks
        .iter()
        .map(|b| DVector::from_element(b.len(), 1.0))
        .collect();
    let mut scores = DMatrix::zeros(n, c);
    for j in 0..c {
        let y = normalize_block(&x, &layout.blocks[j], &mut weights[j])?;
        scores.set_column(j, &y);
    }

    let mut iterations = 0;
    let mut change = f64::INFINITY;
    let mut converged = false;
    while iterations < config.max_iterations {
        let inner = inner_proxies(&scores, &layout)?;
        let mut new_scores = DMatrix::zeros(n, c);
        change = 0.0f64;
        for j in 0..c {
            let xb = block_matrix(&x, &layout.blocks[j]);
            let mut w = xb.transpose() * inner.column(j) / denom;
            let y = normalize_block(&x, &layout.blocks[j], &mut w)?;
            for (a, b) in w.iter().zip(weights[j].iter()) {
                change = change.max((a - b).abs());
            }
            weights[j] = w;
            new_scores.set_column(j, &y);
        }
        scores = new_scores;
        iterations += 1;
        if change < config.tolerance {
            converged = true;
            break;
        }
    }

    let mut loadings: Vec<Vec<f64>> = Vec::with_capacity(c);
    for j in 0..c {
        let xb = block_matrix(&x, &layout.blocks[j]);
        let mut l: Vec<f64> = (xb.transpose() * scores.column(j) / denom)
            .iter()
            .copied()
            .collect();
        if l.iter().sum::<f64>() < 0.0 {
            for v in l.iter_mut() {
                *v = -*v;
            }
            weights[j].neg_mut();
            let flipped = -scores.column(j);
            scores.set_column(j, &flipped);
        }
        loadings.push(l);
    }

    let mut indicator_corr = x.transpose() * &x / denom;
    for i in 0..indicator_corr.nrows() {
        indicator_corr[(i, i)] = 1.0;
    }
    let paths = structural_paths(&scores, &layout, spec)?;
    let second_order_weights = second_order_regressions(&scores, &layout, spec)?;

    Ok(PlsEstimate {
        schema: ESTIMATE_SCHEMA.to_string(),
        spec: spec.clone(),
        constructs: layout.constructs.clone(),
        blocks: layout
            .blocks
            .iter()
            .map(|b| b.iter().map(|&i| indicators[i].clone()).collect())
            .collect(),
        indicators,
        indicator_means: scaling.means,
        indicator_sds: scaling.sds,
        weights: weights.iter().map(|w| w.iter().copied().collect()).collect(),
        loadings,
        scores,
        indicator_corr,
        paths,
        second_order_weights,
        iterations,
        converged,
        tolerance_reached: change,
    })
}

/// Construct order, block column indices and inner-model neighbourhoods.
struct Layout {
    constructs: Vec<String>,
    blocks: Vec<Vec<usize>>,
    /// Inner predecessors per construct (structural parents plus, for a
    /// second-order construct, its components).
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
}

impl Layout {
    fn new(spec: &ModelSpec, indicators: &[String]) -> Self {
        let constructs: Vec<String> = spec
            .estimation_constructs()
            .iter()
            .map(|s| s.to_string())
            .collect();
        let idx = |name: &str| constructs.iter().position(|c| c == name).expect("construct");
        let blocks = constructs
            .iter()
            .map(|c| {
                spec.block_indicators(c)
                    .iter()
                    .map(|i| indicators.iter().position(|x| x == i).expect("indicator"))
                    .collect()
            })
            .collect();
        let mut inner: Vec<(usize, usize)> = spec
            .edges()
            .iter()
            .map(|e| (idx(&e.source), idx(&e.target)))
            .collect();
        for so in spec.second_order() {
            for comp in &so.components {
                inner.push((idx(comp), idx(&so.name)));
            }
        }
        let c = constructs.len();
        let mut preds = vec![Vec::new(); c];
        let mut succs = vec![Vec::new(); c];
        for (s, t) in inner {
            preds[t].push(s);
            succs[s].push(t);
        }
        for v in preds.iter_mut().chain(succs.iter_mut()) {
            v.sort_unstable();
        }
        Layout {
            constructs,
            blocks,
            preds,
            succs,
        }
    }
}

fn block_matrix(x: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    crate::linalg::select_columns(x, cols)
}

/// Form the block composite for weights `w`, rescale `w` so the composite
/// has unit variance, and return the composite.
fn normalize_block(x: &DMatrix<f64>, cols: &[usize], w: &mut DVector<f64>) -> Result<DVector<f64>> {
    let xb = block_matrix(x, cols);
    let mut y = &xb * &*w;
    let n = y.len();
    let var = y.norm_squared() / (n - 1) as f64;
    if var < crate::linalg::VARIANCE_FLOOR {
        return Err(Error::ZeroVariance("composite score".into()));
    }
    let s = var.sqrt();
    *w /= s;
    y /= s;
    Ok(y)
}

/// Path weighting scheme: predecessors enter with their regression weights,
/// successors with their correlations. Isolated constructs keep their own
/// score as proxy.
fn inner_proxies(scores: &DMatrix<f64>, layout: &Layout) -> Result<DMatrix<f64>> {
    let n = scores.nrows();
    let denom = (n - 1) as f64;
    let mut out = DMatrix::zeros(n, scores.ncols());
    for j in 0..scores.ncols() {
        let mut z = DVector::zeros(n);
        let preds = &layout.preds[j];
        if !preds.is_empty() {
            let design = block_matrix(scores, preds);
            let b = least_squares(&design, &scores.column(j).into_owned()).map_err(|_| {
                Error::Singular(format!("inner regression of `{}`", layout.constructs[j]))
            })?;
            z += design * b;
        }
        for &s in &layout.succs[j] {
            let r = scores.column(j).dot(&scores.column(s)) / denom;
            z += scores.column(s) * r;
        }
        if preds.is_empty() && layout.succs[j].is_empty() {
            z.copy_from(&scores.column(j));
        }
        // Only direction matters for Mode A; keep the proxy well scaled.
        if standardize_vec(&mut z).is_err() {
            z.copy_from(&scores.column(j));
        }
        out.set_column(j, &z);
    }
    Ok(out)
}

fn structural_paths(
    scores: &DMatrix<f64>,
    layout: &Layout,
    spec: &ModelSpec,
) -> Result<Vec<PathCoefficient>> {
    let idx = |name: &str| layout.constructs.iter().position(|c| c == name).expect("construct");
    let mut out = Vec::new();
    for target in spec.endogenous() {
        let parents = spec.parents(target);
        let cols: Vec<usize> = parents.iter().map(|p| idx(p)).collect();
        let b = least_squares(
            &block_matrix(scores, &cols),
            &scores.column(idx(target)).into_owned(),
        )
        .map_err(|_| Error::Singular(format!("structural regression of `{target}`")))?;
        for (p, v) in parents.iter().zip(b.iter()) {
            out.push(PathCoefficient {
                source: p.to_string(),
                target: target.to_string(),
                value: *v,
            });
        }
    }
    // Report in the order the edges were declared.
    let order: Vec<&Edge> = spec.edges().iter().collect();
    out.sort_by_key(|p| {
        order
            .iter()
            .position(|e| e.source == p.source && e.target == p.target)
    });
    Ok(out)
}

fn second_order_regressions(
    scores: &DMatrix<f64>,
    layout: &Layout,
    spec: &ModelSpec,
) -> Result<Vec<SecondOrderWeight>> {
    let idx = |name: &str| layout.constructs.iter().position(|c| c == name).expect("construct");
    let mut out = Vec::new();
    for so in spec.second_order() {
        let cols: Vec<usize> = so.components.iter().map(|c| idx(c)).collect();
        let b = least_squares(
            &block_matrix(scores, &cols),
            &scores.column(idx(&so.name)).into_owned(),
        )
        .map_err(|_| Error::Singular(format!("second-order regression of `{}`", so.name)))?;
        for (comp, v) in so.components.iter().zip(b.iter()) {
            out.push(SecondOrderWeight {
                component: comp.clone(),
                construct: so.name.clone(),
                value: *v,
            });
        }
    }
    Ok(out)
}

/// Score new data with a trained model: standardize with the training
/// statistics, then apply the trained outer weights. No re-fitting.
pub fn apply(estimate: &PlsEstimate, dataset: &Dataset) -> Result<DMatrix<f64>> {
    let names: Vec<&str> = estimate.indicators.iter().map(String::as_str).collect();
    let raw = dataset.matrix_for(&names)?;
    apply_matrix(estimate, &raw)
}

/// [`apply`] on a raw matrix whose columns follow `estimate.indicators`.
pub fn apply_matrix(estimate: &PlsEstimate, raw: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if raw.ncols() != estimate.indicators.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} columns for {} indicators",
            raw.ncols(),
            estimate.indicators.len()
        )));
    }
    let scaling = ColumnScaling {
        means: estimate.indicator_means.clone(),
        sds: estimate.indicator_sds.clone(),
    };
    let x = scaling.apply(raw);
    let mut out = DMatrix::zeros(raw.nrows(), estimate.constructs.len());
    for (j, block) in estimate.blocks.iter().enumerate() {
        for (k, ind) in block.iter().enumerate() {
            let col = estimate
                .indicators
                .iter()
                .position(|i| i == ind)
                .expect("block indicator");
            let w = estimate.weights[j][k];
            for i in 0..raw.nrows() {
                out[(i, j)] += x[(i, col)] * w;
            }
        }
    }
    Ok(out)
}

/// Fitted values, residuals and sums of squares of one endogenous construct.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralFit {
    pub fitted: DVector<f64>,
    pub residuals: DVector<f64>,
    pub rss: f64,
    pub tss: f64,
}

/// Fitted scores of `target` from its parents' scores and path coefficients.
pub fn predicted_scores(estimate: &PlsEstimate, target: &str) -> Result<StructuralFit> {
    structural_fit(estimate, &estimate.scores, target)
}

/// Structural fit of `target` evaluated on an arbitrary score matrix
/// (columns in `estimate.constructs` order).
pub fn structural_fit(
    estimate: &PlsEstimate,
    scores: &DMatrix<f64>,
    target: &str,
) -> Result<StructuralFit> {
    let t = estimate
        .construct_index(target)
        .ok_or_else(|| Error::UnknownConstruct(target.to_string()))?;
    let parents = estimate.spec.parents(target);
    if parents.is_empty() {
        return Err(Error::NoParents(target.to_string()));
    }
    let mut fitted = DVector::zeros(scores.nrows());
    for p in parents {
        let j = estimate.construct_index(p).expect("parent");
        let b = estimate.path(p, target).expect("path");
        fitted += scores.column(j) * b;
    }
    let actual = scores.column(t).into_owned();
    let residuals = &actual - &fitted;
    let m = actual.mean();
    let tss = actual.iter().map(|v| (v - m).powi(2)).sum();
    Ok(StructuralFit {
        rss: residuals.norm_squared(),
        fitted,
        residuals,
        tss,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::parse_model_spec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn two_block_data(n: usize, beta: f64, seed: u64) -> (ModelSpec, DMatrix<f64>) {
        let spec = parse_model_spec(
            "plsspec 1\n[constructs]\nA = a1, a2, a3\nB = b1, b2, b3\n[edges]\nA -> B\n",
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = || -> f64 { StandardNormal.sample(&mut rng) };
        let mut x = DMatrix::zeros(n, 6);
        for i in 0..n {
            let a = g();
            let b = beta * a + (1.0 - beta * beta).sqrt() * g();
            for k in 0..3 {
                x[(i, k)] = 0.8 * a + 0.6 * g();
                x[(i, 3 + k)] = 0.8 * b + 0.6 * g();
            }
        }
        (spec, x)
    }

    #[test]
    fn scores_are_standardized_and_paths_are_ols() {
        let (spec, x) = two_block_data(400, 0.5, 1);
        let est = estimate_matrix(&x, &spec, &EstimationConfig::default()).unwrap();
        assert!(est.converged);
        assert!(est.tolerance_reached <= 1e-7);
        for j in 0..est.scores.ncols() {
            let col: Vec<f64> = est.scores.column(j).iter().copied().collect();
            assert!(crate::linalg::mean(&col).abs() < 1e-8);
            assert!((crate::linalg::variance(&col) - 1.0).abs() < 1e-8);
        }
        let a = est.score("A").unwrap();
        let b = est.score("B").unwrap();
        let r = a.dot(&b) / (a.len() - 1) as f64;
        assert!((est.path("A", "B").unwrap() - r).abs() < 1e-10);
    }

    #[test]
    fn duplicate_indicators_give_unit_loadings() {
        let spec = parse_model_spec(
            "plsspec 1\n[constructs]\nA = a1, a2, a3\nB = b1\n[edges]\nA -> B\n",
        )
        .unwrap();
        let mut x = DMatrix::zeros(50, 4);
        for i in 0..50 {
            let v = ((i * 7) % 11) as f64;
            x[(i, 0)] = v;
            x[(i, 1)] = v;
            x[(i, 2)] = v;
            x[(i, 3)] = ((i * 3) % 5) as f64 + v * 0.1;
        }
        let est = estimate_matrix(&x, &spec, &EstimationConfig::default()).unwrap();
        for l in &est.loadings[0] {
            assert!((l - 1.0).abs() < 1e-10);
        }
        let w = &est.weights[0];
        assert!((w[0] - w[1]).abs() < 1e-12 && (w[1] - w[2]).abs() < 1e-12);
        assert!(est.tolerance_reached < 1e-12);
    }

    #[test]
    fn apply_reproduces_training_scores() {
        let (spec, x) = two_block_data(200, 0.4, 3);
        let est = estimate_matrix(&x, &spec, &EstimationConfig::default()).unwrap();
        let again = apply_matrix(&est, &x).unwrap();
        assert!((again - &est.scores).abs().max() < 1e-8);
    }

    #[test]
    fn predicted_scores_requires_parents() {
        let (spec, x) = two_block_data(100, 0.4, 4);
        let est = estimate_matrix(&x, &spec, &EstimationConfig::default()).unwrap();
        assert_eq!(
            predicted_scores(&est, "A").unwrap_err(),
            Error::NoParents("A".into())
        );
        let fit = predicted_scores(&est, "B").unwrap();
        assert!(fit.rss <= fit.tss);
    }

    #[test]
    fn estimate_round_trips_through_json() {
        let (spec, x) = two_block_data(60, 0.4, 5);
        let est = estimate_matrix(&x, &spec, &EstimationConfig::default()).unwrap();
        let back = PlsEstimate::from_json(&est.to_json().unwrap()).unwrap();
        assert_eq!(back, est);
    }

    #[test]
    fn non_convergence_is_flagged_not_fatal() {
        let (spec, x) = two_block_data(100, 0.4, 6);
        let cfg = EstimationConfig {
            tolerance: 0.0,
            max_iterations: 2,
        };
        let est = estimate_matrix(&x, &spec, &cfg).unwrap();
        assert!(!est.converged);
        assert_eq!(est.iterations, 2);
    }
}
