//! Measurement-model reliability and validity: Cronbach's alpha, composite
//! reliability, AVE, Fornell–Larcker, HTMT, VIF, KMO, total variance
//! explained, block AIC and the marker-variable common-method check.
//!
//! All computations are correlation based (standardized).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, ValidatedSample};
use crate::error::{Error, Result};
use crate::linalg::{correlation_matrix, least_squares, sorted_eigenvalues, standardize, variance};
use crate::pls::{estimate_dataset, predicted_scores, EstimationConfig, PlsEstimate};
use crate::structural::{nfi, srmr};

/// Pass thresholds for the measurement model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    pub alpha: f64,
    pub cr: f64,
    pub ave: f64,
    pub htmt: f64,
    pub vif: f64,
    pub kmo: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            alpha: 0.70,
            cr: 0.70,
            ave: 0.50,
            htmt: 0.85,
            vif: 3.0,
            kmo: 0.70,
        }
    }
}

impl Thresholds {
    pub fn alpha_passes(&self, alpha: f64) -> bool {
        alpha >= self.alpha
    }

    pub fn cr_passes(&self, cr: f64) -> bool {
        cr >= self.cr
    }

    pub fn ave_passes(&self, ave: f64) -> bool {
        ave >= self.ave
    }

    /// HTMT passes strictly below the threshold.
    pub fn htmt_passes(&self, htmt: f64) -> bool {
        htmt < self.htmt
    }

    pub fn vif_passes(&self, vif: f64) -> bool {
        vif < self.vif
    }

    pub fn kmo_passes(&self, kmo: f64) -> bool {
        kmo >= self.kmo
    }
}

/// `α = k/(k−1) · (1 − Σ item variances / variance of row sums)`.
pub fn cronbach_alpha(items: &DMatrix<f64>) -> Result<f64> {
    let k = items.ncols();
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "alpha needs at least 2 items, got {k}"
        )));
    }
    let item_var: f64 = (0..k)
        .map(|j| variance(&crate::linalg::column_vec(items, j)))
        .sum();
    let sums: Vec<f64> = items.row_iter().map(|r| r.sum()).collect();
    let total = variance(&sums);
    if total <= 0.0 {
        return Err(Error::ZeroVariance("sum score".into()));
    }
    let k = k as f64;
    Ok(k / (k - 1.0) * (1.0 - item_var / total))
}

/// `CR = (Σλ)² / ((Σλ)² + Σθ)`.
pub fn composite_reliability(loadings: &[f64], error_vars: &[f64]) -> Result<f64> {
    if loadings.is_empty() {
        return Err(Error::InvalidArgument("no loadings".into()));
    }
    if loadings.len() != error_vars.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} loadings, {} error variances",
            loadings.len(),
            error_vars.len()
        )));
    }
    if error_vars.iter().any(|t| *t < 0.0) {
        return Err(Error::InvalidArgument("negative error variance".into()));
    }
    let s: f64 = loadings.iter().sum();
    let theta: f64 = error_vars.iter().sum();
    let num = s * s;
    if num + theta == 0.0 {
        return Err(Error::Undefined("composite reliability 0/0".into()));
    }
    Ok(num / (num + theta))
}

/// Composite reliability of standardized loadings, with `θ = 1 − λ²`.
pub fn composite_reliability_standardized(loadings: &[f64]) -> Result<f64> {
    if let Some(l) = loadings.iter().find(|l| l.abs() > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "standardized loading {l} outside [-1, 1]"
        )));
    }
    let theta: Vec<f64> = loadings.iter().map(|l| 1.0 - l * l).collect();
    composite_reliability(loadings, &theta)
}

/// Average variance extracted: mean squared standardized loading.
pub fn ave(loadings: &[f64]) -> Result<f64> {
    if loadings.is_empty() {
        return Err(Error::InvalidArgument("no loadings".into()));
    }
    Ok(loadings.iter().map(|l| l * l).sum::<f64>() / loadings.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FornellLarcker {
    pub constructs: Vec<String>,
    /// `sqrt(AVE)` on the diagonal, latent correlations elsewhere.
    pub matrix: Vec<Vec<f64>>,
    pub pass: Vec<bool>,
    pub all_pass: bool,
}

/// A construct passes when `sqrt(AVE)` strictly exceeds every absolute
/// correlation in its row. Ties fail.
pub fn fornell_larcker(
    constructs: &[String],
    aves: &[f64],
    latent_corr: &DMatrix<f64>,
) -> Result<FornellLarcker> {
    let c = aves.len();
    if constructs.len() != c || latent_corr.nrows() != c || latent_corr.ncols() != c {
        return Err(Error::DimensionMismatch(format!(
            "{} names, {c} AVEs, {}x{} correlation matrix",
            constructs.len(),
            latent_corr.nrows(),
            latent_corr.ncols()
        )));
    }
    let mut matrix = vec![vec![0.0; c]; c];
    let mut pass = vec![true; c];
    for i in 0..c {
        let root = aves[i].max(0.0).sqrt();
        for j in 0..c {
            matrix[i][j] = if i == j { root } else { latent_corr[(i, j)] };
            if i != j && latent_corr[(i, j)].abs() >= root {
                pass[i] = false;
            }
        }
    }
    Ok(FornellLarcker {
        constructs: constructs.to_vec(),
        matrix,
        all_pass: pass.iter().all(|p| *p),
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HtmtPair {
    pub a: String,
    pub b: String,
    pub value: f64,
    pub pass: bool,
}

fn mean_abs_monotrait(corr: &DMatrix<f64>, block: &[usize]) -> f64 {
    if block.len() < 2 {
        return 1.0;
    }
    let mut s = 0.0;
    let mut m = 0usize;
    for (a, &i) in block.iter().enumerate() {
        for &j in &block[a + 1..] {
            s += corr[(i, j)].abs();
            m += 1;
        }
    }
    s / m as f64
}

/// Heterotrait–monotrait ratio of one pair of blocks.
pub fn htmt_pair(corr: &DMatrix<f64>, a: &[usize], b: &[usize]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("empty block".into()));
    }
    // fixed summation order so that swapping the blocks is bit-exact
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    let hetero: f64 = a
        .iter()
        .flat_map(|&i| b.iter().map(move |&j| (i, j)))
        .map(|(i, j)| corr[(i, j)].abs())
        .sum::<f64>()
        / (a.len() * b.len()) as f64;
    let ma = mean_abs_monotrait(corr, a);
    let mb = mean_abs_monotrait(corr, b);
    if ma == 0.0 || mb == 0.0 {
        return Err(Error::Undefined("HTMT: monotrait mean is 0".into()));
    }
    Ok(hetero / (ma * mb).sqrt())
}

/// HTMT for every pair of blocks, `blocks` giving indicator indices into
/// `item_corr`.
pub fn htmt(
    item_corr: &DMatrix<f64>,
    blocks: &[(String, Vec<usize>)],
    threshold: f64,
) -> Result<Vec<HtmtPair>> {
    let mut out = Vec::new();
    for (x, (na, a)) in blocks.iter().enumerate() {
        for (nb, b) in &blocks[x + 1..] {
            let value = htmt_pair(item_corr, a, b)?;
            out.push(HtmtPair {
                a: na.clone(),
                b: nb.clone(),
                value,
                pass: value < threshold,
            });
        }
    }
    Ok(out)
}

/// `VIF_j = 1/(1 − R²_j)`, regressing each item on the other items of the
/// block. Perfect collinearity yields `f64::INFINITY`.
pub fn vif(items: &DMatrix<f64>) -> Result<Vec<f64>> {
    let k = items.ncols();
    if k < 2 {
        return Err(Error::InvalidArgument(format!("VIF needs at least 2 items, got {k}")));
    }
    let (z, _) = standardize(items)?;
    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        let others: Vec<usize> = (0..k).filter(|&c| c != j).collect();
        let x = crate::linalg::select_columns(&z, &others);
        let y = z.column(j).into_owned();
        let r2 = match least_squares(&x, &y) {
            Ok(b) => {
                let resid = &y - &x * b;
                1.0 - resid.norm_squared() / y.norm_squared()
            }
            Err(Error::Singular(_)) => r_squared_min_norm(&x, &y),
            Err(e) => return Err(e),
        };
        out.push(if r2 >= 1.0 - 1e-10 {
            f64::INFINITY
        } else {
            1.0 / (1.0 - r2)
        });
    }
    Ok(out)
}

/// R² of a rank-deficient regression via SVD pseudo-inverse.
fn r_squared_min_norm(x: &DMatrix<f64>, y: &DVector<f64>) -> f64 {
    let svd = x.clone().svd(true, true);
    let b = svd.solve(y, 1e-10).unwrap_or_else(|_| DVector::zeros(x.ncols()));
    let resid = y - x * b;
    1.0 - resid.norm_squared() / y.norm_squared()
}

/// Kaiser–Meyer–Olkin sampling adequacy from a correlation matrix.
pub fn kmo(corr: &DMatrix<f64>) -> Result<f64> {
    let p = corr.nrows();
    if p != corr.ncols() || p < 2 {
        return Err(Error::DimensionMismatch("KMO needs a square matrix of size >= 2".into()));
    }
    let inv = corr
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Singular("correlation matrix".into()))?
        .inverse();
    let mut r2 = 0.0;
    let mut q2 = 0.0;
    for i in 0..p {
        for j in 0..p {
            if i == j {
                continue;
            }
            r2 += corr[(i, j)].powi(2);
            let q = -inv[(i, j)] / (inv[(i, i)] * inv[(j, j)]).sqrt();
            q2 += q * q;
        }
    }
    if r2 + q2 == 0.0 || r2 == 0.0 {
        return Err(Error::Undefined("KMO: no shared variance".into()));
    }
    Ok(r2 / (r2 + q2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TotalVariance {
    /// Cumulative percentage captured by the first `components` principal components.
    pub cumulative_pct: f64,
    /// Percentage captured by each of those components, largest first.
    pub component_pcts: Vec<f64>,
    pub components: usize,
}

impl TotalVariance {
    /// Largest single-component share of the total variance (percent).
    pub fn max_single_pct(&self) -> f64 {
        self.component_pcts.first().copied().unwrap_or(0.0)
    }
}

/// Share of standardized indicator variance captured by the first
/// `components` principal components of the correlation matrix.
pub fn total_variance_explained(data: &DMatrix<f64>, components: usize) -> Result<TotalVariance> {
    let p = data.ncols();
    if p < 2 {
        return Err(Error::InvalidArgument("need at least 2 columns".into()));
    }
    if components == 0 || components > p {
        return Err(Error::InvalidArgument(format!(
            "{components} components requested from {p} indicators"
        )));
    }
    let corr = correlation_matrix(data)?;
    let eig = sorted_eigenvalues(&corr);
    let component_pcts: Vec<f64> = eig[..components]
        .iter()
        .map(|e| e / p as f64 * 100.0)
        .collect();
    Ok(TotalVariance {
        cumulative_pct: component_pcts.iter().sum(),
        component_pcts,
        components,
    })
}

/// Gaussian regression AIC, `n·ln(SSE/n) + 2k`. A zero SSE yields
/// `f64::NEG_INFINITY`.
pub fn aic_block(residual_sse: f64, n: usize, k: usize) -> Result<f64> {
    if k < 1 || n <= k {
        return Err(Error::InvalidArgument(format!("AIC needs n > k >= 1 (n={n}, k={k})")));
    }
    if residual_sse < 0.0 {
        return Err(Error::InvalidArgument("negative SSE".into()));
    }
    if residual_sse == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let n = n as f64;
    Ok(n * (residual_sse / n).ln() + 2.0 * k as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockAic {
    pub construct: String,
    pub value: f64,
}

/// AIC of every endogenous block's structural regression, plus their sum.
pub fn model_aic(estimate: &PlsEstimate) -> Result<(Vec<BlockAic>, f64)> {
    let mut blocks = Vec::new();
    for target in estimate.spec.endogenous() {
        let fit = predicted_scores(estimate, target)?;
        let k = estimate.spec.parents(target).len();
        blocks.push(BlockAic {
            construct: target.to_string(),
            value: aic_block(fit.rss, estimate.n(), k)?,
        });
    }
    let total = blocks.iter().map(|b| b.value).sum();
    Ok((blocks, total))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructReliability {
    pub construct: String,
    pub alpha: f64,
    pub cr: f64,
    pub ave: f64,
    pub alpha_pass: bool,
    pub cr_pass: bool,
    pub ave_pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorVif {
    pub construct: String,
    pub indicator: String,
    /// `None` marks perfect collinearity (infinite VIF).
    pub vif: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityReport {
    pub constructs: Vec<ConstructReliability>,
    pub vif: Vec<IndicatorVif>,
    pub kmo: f64,
    pub kmo_pass: bool,
    pub total_variance: TotalVariance,
    pub aic_per_block: Vec<BlockAic>,
    pub aic_total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub fornell_larcker: FornellLarcker,
    pub htmt: Vec<HtmtPair>,
    pub htmt_all_pass: bool,
}

/// Reliability metrics for every estimated construct. Second-order
/// constructs use their repeated indicators.
pub fn reliability_report(
    sample: &ValidatedSample,
    estimate: &PlsEstimate,
    thresholds: &Thresholds,
) -> Result<ReliabilityReport> {
    let spec = &sample.spec;
    let mut constructs = Vec::new();
    let mut vifs = Vec::new();
    for (j, name) in estimate.constructs.iter().enumerate() {
        let block: Vec<&str> = estimate.blocks[j].iter().map(String::as_str).collect();
        let items = sample.dataset.matrix_for(&block)?;
        let alpha = if block.len() >= 2 {
            cronbach_alpha(&items)?
        } else {
            1.0
        };
        let l = &estimate.loadings[j];
        let cr = composite_reliability_standardized(l)?;
        let a = ave(l)?;
        constructs.push(ConstructReliability {
            construct: name.clone(),
            alpha,
            cr,
            ave: a,
            alpha_pass: thresholds.alpha_passes(alpha),
            cr_pass: thresholds.cr_passes(cr),
            ave_pass: thresholds.ave_passes(a),
        });
        if !spec.is_second_order(name) && block.len() >= 2 {
            for (ind, v) in block.iter().zip(vif(&items)?) {
                vifs.push(IndicatorVif {
                    construct: name.clone(),
                    indicator: ind.to_string(),
                    vif: v.is_finite().then_some(v),
                    pass: v.is_finite() && thresholds.vif_passes(v),
                });
            }
        }
    }
    let all = sample.dataset.matrix_for(&spec.estimation_indicators())?;
    let corr = correlation_matrix(&all)?;
    let kmo_value = kmo(&corr)?;
    let total_variance = total_variance_explained(&all, spec.first_order_constructs().len())?;
    let (aic_per_block, aic_total) = model_aic(estimate)?;
    Ok(ReliabilityReport {
        constructs,
        vif: vifs,
        kmo: kmo_value,
        kmo_pass: thresholds.kmo_passes(kmo_value),
        total_variance,
        aic_per_block,
        aic_total,
    })
}

/// Fornell–Larcker and HTMT over the first-order constructs.
pub fn validity_report(
    sample: &ValidatedSample,
    estimate: &PlsEstimate,
    thresholds: &Thresholds,
) -> Result<ValidityReport> {
    let spec = &sample.spec;
    let first: Vec<String> = spec
        .first_order_constructs()
        .iter()
        .map(|s| s.to_string())
        .collect();
    let idx: Vec<usize> = first
        .iter()
        .map(|c| estimate.construct_index(c).expect("construct"))
        .collect();
    let lc = estimate.latent_correlations();
    let sub = DMatrix::from_fn(idx.len(), idx.len(), |i, j| lc[(idx[i], idx[j])]);
    let aves: Vec<f64> = idx
        .iter()
        .map(|&j| ave(&estimate.loadings[j]))
        .collect::<Result<_>>()?;
    let fl = fornell_larcker(&first, &aves, &sub)?;

    let indicators = spec.estimation_indicators();
    let all = sample.dataset.matrix_for(&indicators)?;
    let corr = correlation_matrix(&all)?;
    let blocks: Vec<(String, Vec<usize>)> = first
        .iter()
        .map(|c| {
            let cols = spec
                .block_indicators(c)
                .iter()
                .map(|i| indicators.iter().position(|x| x == i).expect("indicator"))
                .collect();
            (c.clone(), cols)
        })
        .collect();
    let pairs = htmt(&corr, &blocks, thresholds.htmt)?;
    Ok(ValidityReport {
        fornell_larcker: fl,
        htmt_all_pass: pairs.iter().all(|p| p.pass),
        htmt: pairs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CmbTolerances {
    pub srmr_delta: f64,
    pub nfi_delta: f64,
    /// Largest admissible single-component share of total variance (percent).
    pub max_single_share_pct: f64,
}

impl Default for CmbTolerances {
    fn default() -> Self {
        CmbTolerances {
            srmr_delta: 0.01,
            nfi_delta: 0.01,
            max_single_share_pct: 50.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CmbVerdict {
    NoConcern,
    Concern,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmbSummary {
    pub marker: String,
    pub srmr_base: f64,
    /// `None` when the marker-adjusted model could not be fitted (an
    /// indicator collapsed to a constant after partialling).
    pub srmr_marker: Option<f64>,
    pub nfi_base: f64,
    pub nfi_marker: Option<f64>,
    pub srmr_delta: Option<f64>,
    pub nfi_delta: Option<f64>,
    pub total_variance_pct: f64,
    pub max_single_share_pct: f64,
    pub verdict: CmbVerdict,
}

/// Nested-model marker check. The base model is fitted as is; the marker
/// model first regresses every substantive indicator on the marker
/// composite and refits on the residualized items. Fit-index deltas below
/// tolerance and no dominant single component mean no concern.
pub fn cmb_marker_check(
    sample: &ValidatedSample,
    marker: &str,
    config: &EstimationConfig,
    tolerances: &CmbTolerances,
) -> Result<CmbSummary> {
    let spec = &sample.spec;
    if spec.marker() != Some(marker) {
        return Err(Error::UnknownConstruct(format!("marker block `{marker}`")));
    }
    let marker_items = spec.marker_indicators();
    if marker_items.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "marker block `{marker}` needs at least 2 indicators"
        )));
    }
    let base = estimate_dataset(&sample.dataset, spec, config)?;
    let srmr_base = srmr(&base)?;
    let nfi_base = nfi(&base)?;

    let (mz, _) = standardize(&sample.dataset.matrix_for(&marker_items)?)?;
    let mut composite: DVector<f64> = mz.column_sum();
    crate::linalg::standardize_vec(&mut composite)?;
    let partialled = partial_out(&sample.dataset, &spec.estimation_indicators(), &composite)?;
    let adjusted = estimate_dataset(&partialled, spec, config)
        .and_then(|est| Ok((srmr(&est)?, nfi(&est)?)));
    let (srmr_marker, nfi_marker) = match adjusted {
        Ok((s, f)) => (Some(s), Some(f)),
        Err(Error::ConstantColumn(_) | Error::ZeroVariance(_) | Error::Singular(_)) => (None, None),
        Err(e) => return Err(e),
    };

    let all = sample.dataset.matrix_for(&spec.estimation_indicators())?;
    let tv = total_variance_explained(&all, spec.first_order_constructs().len())?;
    let srmr_delta = srmr_marker.map(|s| (s - srmr_base).abs());
    let nfi_delta = nfi_marker.map(|f| (f - nfi_base).abs());
    let max_single = tv.max_single_pct();
    let ok = srmr_delta.is_some_and(|d| d < tolerances.srmr_delta)
        && nfi_delta.is_some_and(|d| d < tolerances.nfi_delta)
        && max_single <= tolerances.max_single_share_pct;
    Ok(CmbSummary {
        marker: marker.to_string(),
        srmr_base,
        srmr_marker,
        nfi_base,
        nfi_marker,
        srmr_delta,
        nfi_delta,
        total_variance_pct: tv.cumulative_pct,
        max_single_share_pct: max_single,
        verdict: if ok {
            CmbVerdict::NoConcern
        } else {
            CmbVerdict::Concern
        },
    })
}

/// Replace each named column by its residual from an OLS regression on
/// `regressor` (with intercept). Scale checks are dropped on the result.
fn partial_out(dataset: &Dataset, columns: &[&str], regressor: &DVector<f64>) -> Result<Dataset> {
    let design = DMatrix::from_fn(regressor.len(), 1, |i, _| regressor[i]);
    let mut values = dataset.values().clone();
    for name in columns {
        let j = dataset
            .column_index(name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))?;
        let y = values.column(j).into_owned();
        let (a, b) = crate::linalg::least_squares_with_intercept(&design, &y)?;
        for i in 0..y.len() {
            values[(i, j)] = y[i] - a - b[0] * regressor[i];
        }
    }
    Dataset::new(dataset.column_names().to_vec(), values, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_columns_have_unit_alpha() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 1.0, 3.0, 3.0, 2.0, 2.0, 5.0, 5.0]);
        assert!((cronbach_alpha(&x).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn alpha_needs_two_items() {
        let x = DMatrix::from_row_slice(3, 1, &[1.0, 2.0, 3.0]);
        assert!(cronbach_alpha(&x).is_err());
    }

    #[test]
    fn cr_and_ave_arithmetic() {
        assert!((composite_reliability_standardized(&[1.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
        let cr = composite_reliability_standardized(&[0.8, 0.8, 0.8]).unwrap();
        assert!((cr - 5.76 / (5.76 + 1.08)).abs() < 1e-12);
        assert!((ave(&[0.8, 0.8, 0.8]).unwrap() - 0.64).abs() < 1e-12);
        assert_eq!(ave(&[1.0, 1.0]).unwrap(), 1.0);
        assert!(ave(&[]).is_err());
        assert!(composite_reliability(&[], &[]).is_err());
        assert!(composite_reliability_standardized(&[1.2]).is_err());
    }

    #[test]
    fn fornell_larcker_tie_fails() {
        let names = vec!["A".to_string(), "B".to_string()];
        let corr = DMatrix::from_row_slice(2, 2, &[1.0, 0.8, 0.8, 1.0]);
        let fl = fornell_larcker(&names, &[0.64, 0.64], &corr).unwrap();
        assert!(!fl.pass[0] && !fl.all_pass);
        let single = fornell_larcker(&names[..1], &[0.3], &DMatrix::identity(1, 1)).unwrap();
        assert!(single.all_pass);
    }

    #[test]
    fn htmt_single_indicator_blocks() {
        let corr = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 1.0]);
        assert!((htmt_pair(&corr, &[0], &[1]).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn vif_of_uncorrelated_and_duplicate_items() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 1.0, -1.0, 1.0, 1.0, -1.0, -1.0, -1.0]);
        for v in vif(&x).unwrap() {
            assert!((v - 1.0).abs() < 1e-10);
        }
        let d = DMatrix::from_row_slice(4, 2, &[1.0, 1.0, 2.0, 2.0, 4.0, 4.0, 3.0, 3.0]);
        assert!(vif(&d).unwrap().iter().all(|v| v.is_infinite()));
    }

    #[test]
    fn kmo_of_identity_is_undefined() {
        assert!(matches!(kmo(&DMatrix::identity(3, 3)), Err(Error::Undefined(_))));
    }

    #[test]
    fn aic_penalty() {
        assert!((aic_block(100.0, 100, 1).unwrap() - 2.0).abs() < 1e-12);
        let a = aic_block(40.0, 100, 2).unwrap();
        let b = aic_block(40.0, 100, 3).unwrap();
        assert!((b - a - 2.0).abs() < 1e-12);
        assert_eq!(aic_block(0.0, 10, 1).unwrap(), f64::NEG_INFINITY);
        assert!(aic_block(1.0, 2, 2).is_err());
    }

    #[test]
    fn rank_one_data_is_fully_explained_by_one_component() {
        let x = DMatrix::from_fn(20, 4, |i, j| (i as f64 + 1.0) * (j as f64 + 1.0));
        let tv = total_variance_explained(&x, 1).unwrap();
        assert!((tv.cumulative_pct - 100.0).abs() < 1e-8);
        assert!(total_variance_explained(&x, 5).is_err());
    }

    #[test]
    fn threshold_checks() {
        let t = Thresholds::default();
        assert!(t.alpha_passes(0.925));
        assert!(t.cr_passes(0.896));
        assert!(!t.ave_passes(0.49));
        assert!(!t.htmt_passes(0.86));
        assert!(t.kmo_passes(0.944));
        assert!(t.vif_passes(2.9));
    }
}
