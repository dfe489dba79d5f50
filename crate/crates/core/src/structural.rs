//! Structural-model quality: R², f² effect sizes, blindfolded Q², and the
//! global fit indices SRMR and NFI.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, ValidatedSample};
use crate::error::{Error, Result};
use crate::pls::{estimate_dataset, estimate_matrix, predicted_scores, EstimationConfig, PlsEstimate};
use crate::spec::{Edge, ModelSpec};

/// Default blindfolding omission distance.
pub const DEFAULT_OMISSION_DISTANCE: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitThresholds {
    /// SRMR passes at or below this value.
    pub srmr: f64,
    /// NFI passes at or above this value.
    pub nfi: f64,
}

impl Default for FitThresholds {
    fn default() -> Self {
        FitThresholds {
            srmr: 0.08,
            nfi: 0.90,
        }
    }
}

/// `R² = 1 − RSS/TSS` of an endogenous construct's structural regression.
pub fn r_square(estimate: &PlsEstimate, target: &str) -> Result<f64> {
    let fit = predicted_scores(estimate, target)?;
    if fit.tss <= 0.0 {
        return Err(Error::ZeroVariance(target.to_string()));
    }
    Ok(1.0 - fit.rss / fit.tss)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectBand {
    Large,
    Medium,
    Small,
    Trivial,
}

impl EffectBand {
    pub fn of(f2: f64) -> Self {
        if f2 >= 0.35 {
            EffectBand::Large
        } else if f2 >= 0.20 {
            EffectBand::Medium
        } else if f2 >= 0.15 {
            EffectBand::Small
        } else {
            EffectBand::Trivial
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            EffectBand::Large => "large",
            EffectBand::Medium => "medium",
            EffectBand::Small => "small",
            EffectBand::Trivial => "trivial",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FSquare {
    pub source: String,
    pub target: String,
    pub r2_included: f64,
    pub r2_excluded: f64,
    pub value: f64,
    pub band: EffectBand,
}

/// `f² = (R²_inc − R²_exc)/(1 − R²_inc)`.
pub fn f_square_from_r2(r2_included: f64, r2_excluded: f64) -> Result<f64> {
    if r2_included >= 1.0 {
        return Err(Error::Undefined("f² with R² = 1".into()));
    }
    Ok((r2_included - r2_excluded) / (1.0 - r2_included))
}

/// Effect size of one edge; the model is re-estimated without it.
pub fn f_square(
    estimate: &PlsEstimate,
    dataset: &Dataset,
    edge: &Edge,
    config: &EstimationConfig,
) -> Result<FSquare> {
    let spec = &estimate.spec;
    if !spec.has_edge(&edge.source, &edge.target) {
        return Err(Error::UnknownConstruct(format!("edge `{edge}`")));
    }
    let r2_included = r_square(estimate, &edge.target)?;
    let reduced = spec.without_edge(edge)?;
    let r2_excluded = if reduced.parents(&edge.target).is_empty() {
        0.0
    } else {
        let est = estimate_dataset(dataset, &reduced, config)?;
        r_square(&est, &edge.target)?
    };
    let value = f_square_from_r2(r2_included, r2_excluded)?;
    Ok(FSquare {
        source: edge.source.clone(),
        target: edge.target.clone(),
        r2_included,
        r2_excluded,
        value,
        band: EffectBand::of(value),
    })
}

/// Blindfolded cross-validated redundancy `Q² = 1 − PRESS/SSO` for an
/// endogenous construct. Cells of the target block are numbered down the
/// columns and every `d`-th is omitted per round; omitted cells are mean
/// imputed, the model refitted, and the cell predicted from the target's
/// structural fit times its loading.
pub fn q_square(
    dataset: &Dataset,
    spec: &ModelSpec,
    target: &str,
    d: usize,
    config: &EstimationConfig,
) -> Result<f64> {
    if spec.parents(target).is_empty() {
        return Err(Error::NoParents(target.to_string()));
    }
    let indicators = spec.estimation_indicators();
    let raw = dataset.matrix_for(&indicators)?;
    let n = raw.nrows();
    if d < 2 {
        return Err(Error::InvalidArgument(format!("omission distance {d} < 2")));
    }
    if n % d == 0 {
        return Err(Error::InvalidArgument(format!(
            "omission distance {d} divides the sample size {n}"
        )));
    }
    let cols: Vec<usize> = spec
        .block_indicators(target)
        .iter()
        .map(|i| indicators.iter().position(|x| x == i).expect("indicator"))
        .collect();
    let full_means: Vec<f64> = cols
        .iter()
        .map(|&c| raw.column(c).mean())
        .collect();

    let mut press = 0.0;
    let mut sso = 0.0;
    for round in 0..d {
        let omitted = |i: usize, k: usize| (k * n + i) % d == round;
        let mut x = raw.clone();
        for (k, &c) in cols.iter().enumerate() {
            let kept: Vec<f64> = (0..n).filter(|&i| !omitted(i, k)).map(|i| raw[(i, c)]).collect();
            let m = crate::linalg::mean(&kept);
            for i in 0..n {
                if omitted(i, k) {
                    x[(i, c)] = m;
                }
            }
        }
        let est = estimate_matrix(&x, spec, config)?;
        let fit = predicted_scores(&est, target)?;
        let t = est.construct_index(target).expect("target");
        for (k, &c) in cols.iter().enumerate() {
            let lambda = est.loadings[t][k];
            for i in 0..n {
                if !omitted(i, k) {
                    continue;
                }
                let pred = est.indicator_means[c] + est.indicator_sds[c] * lambda * fit.fitted[i];
                press += (raw[(i, c)] - pred).powi(2);
                sso += (raw[(i, c)] - full_means[k]).powi(2);
            }
        }
    }
    if sso <= 0.0 {
        return Err(Error::ZeroVariance(target.to_string()));
    }
    Ok(1.0 - press / sso)
}

/// Observed and model-implied correlations of the first-order indicators.
/// The implied matrix is `λ_i λ_j φ_AB` across blocks, `λ_i λ_j` within a
/// block, and 1 on the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpliedCorrelation {
    pub indicators: Vec<String>,
    pub observed: DMatrix<f64>,
    pub implied: DMatrix<f64>,
}

pub fn implied_correlation(estimate: &PlsEstimate) -> Result<ImpliedCorrelation> {
    let phi = estimate.latent_correlations();
    let mut entries: Vec<(usize, usize, f64)> = Vec::new(); // (indicator, construct, loading)
    for c in estimate.spec.first_order_constructs() {
        let j = estimate
            .construct_index(c)
            .ok_or_else(|| Error::UnknownConstruct(c.to_string()))?;
        for (k, ind) in estimate.blocks[j].iter().enumerate() {
            let col = estimate
                .indicators
                .iter()
                .position(|i| i == ind)
                .expect("indicator");
            entries.push((col, j, estimate.loadings[j][k]));
        }
    }
    let p = entries.len();
    let observed = DMatrix::from_fn(p, p, |a, b| estimate.indicator_corr[(entries[a].0, entries[b].0)]);
    let implied = DMatrix::from_fn(p, p, |a, b| {
        if a == b {
            1.0
        } else {
            let (_, ja, la) = entries[a];
            let (_, jb, lb) = entries[b];
            la * lb * if ja == jb { 1.0 } else { phi[(ja, jb)] }
        }
    });
    Ok(ImpliedCorrelation {
        indicators: entries
            .iter()
            .map(|e| estimate.indicators[e.0].clone())
            .collect(),
        observed,
        implied,
    })
}

/// Root mean square of `observed − implied` over the lower triangle
/// including the diagonal.
pub fn srmr_from_matrices(observed: &DMatrix<f64>, implied: &DMatrix<f64>) -> Result<f64> {
    let p = observed.nrows();
    if p == 0 || observed.shape() != implied.shape() || observed.ncols() != p {
        return Err(Error::DimensionMismatch("SRMR needs equal square matrices".into()));
    }
    let mut s = 0.0;
    for i in 0..p {
        for j in 0..=i {
            s += (observed[(i, j)] - implied[(i, j)]).powi(2);
        }
    }
    Ok((s / (p * (p + 1) / 2) as f64).sqrt())
}

pub fn srmr(estimate: &PlsEstimate) -> Result<f64> {
    let ic = implied_correlation(estimate)?;
    srmr_from_matrices(&ic.observed, &ic.implied)
}

/// Maximum-likelihood discrepancy `ln|Σ| − ln|S| + tr(SΣ⁻¹) − p`.
pub fn ml_discrepancy(observed: &DMatrix<f64>, implied: &DMatrix<f64>) -> Result<f64> {
    let p = observed.nrows();
    let chol_s = observed
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Singular("observed correlation matrix".into()))?;
    let chol_m = implied
        .clone()
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite("implied correlation matrix".into()))?;
    let logdet = |l: &DMatrix<f64>| 2.0 * l.diagonal().iter().map(|v| v.ln()).sum::<f64>();
    let ld_s = logdet(&chol_s.l());
    let ld_m = logdet(&chol_m.l());
    let tr = (observed * chol_m.inverse()).trace();
    Ok(ld_m - ld_s + tr - p as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormedFit {
    pub chi2_model: f64,
    pub chi2_null: f64,
    pub nfi: f64,
}

/// `NFI = 1 − χ²_model/χ²_null` with the null model `Σ = I`.
pub fn normed_fit(observed: &DMatrix<f64>, implied: &DMatrix<f64>, n: usize) -> Result<NormedFit> {
    let p = observed.nrows();
    let scale = n.saturating_sub(1) as f64;
    let chi2_model = scale * ml_discrepancy(observed, implied)?;
    let chi2_null = scale * ml_discrepancy(observed, &DMatrix::identity(p, p))?;
    if chi2_null <= 0.0 {
        return Err(Error::Undefined("NFI: null model fits perfectly".into()));
    }
    Ok(NormedFit {
        chi2_model,
        chi2_null,
        nfi: 1.0 - chi2_model / chi2_null,
    })
}

pub fn nfi(estimate: &PlsEstimate) -> Result<f64> {
    let ic = implied_correlation(estimate)?;
    Ok(normed_fit(&ic.observed, &ic.implied, estimate.n())?.nfi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructValue {
    pub construct: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuralReport {
    pub r_square: Vec<ConstructValue>,
    pub f_square: Vec<FSquare>,
    pub q_square: Vec<ConstructValue>,
    pub omission_distance: usize,
    pub srmr: f64,
    pub srmr_pass: bool,
    pub nfi: f64,
    pub nfi_pass: bool,
    pub chi2_model: f64,
    pub chi2_null: f64,
}

pub fn structural_report(
    sample: &ValidatedSample,
    estimate: &PlsEstimate,
    config: &EstimationConfig,
    omission_distance: usize,
    thresholds: &FitThresholds,
) -> Result<StructuralReport> {
    let spec = &sample.spec;
    let mut r2 = Vec::new();
    let mut q2 = Vec::new();
    for t in spec.endogenous() {
        r2.push(ConstructValue {
            construct: t.to_string(),
            value: r_square(estimate, t)?,
        });
        q2.push(ConstructValue {
            construct: t.to_string(),
            value: q_square(&sample.dataset, spec, t, omission_distance, config)?,
        });
    }
    let f2 = spec
        .edges()
        .iter()
        .map(|e| f_square(estimate, &sample.dataset, e, config))
        .collect::<Result<Vec<_>>>()?;
    let ic = implied_correlation(estimate)?;
    let srmr_value = srmr_from_matrices(&ic.observed, &ic.implied)?;
    let fit = normed_fit(&ic.observed, &ic.implied, estimate.n())?;
    Ok(StructuralReport {
        r_square: r2,
        f_square: f2,
        q_square: q2,
        omission_distance,
        srmr: srmr_value,
        srmr_pass: srmr_value <= thresholds.srmr,
        nfi: fit.nfi,
        nfi_pass: fit.nfi >= thresholds.nfi,
        chi2_model: fit.chi2_model,
        chi2_null: fit.chi2_null,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn effect_bands_are_inclusive_at_lower_bounds() {
        assert_eq!(EffectBand::of(0.35), EffectBand::Large);
        assert_eq!(EffectBand::of(0.20), EffectBand::Medium);
        assert_eq!(EffectBand::of(0.15), EffectBand::Small);
        assert_eq!(EffectBand::of(0.1499), EffectBand::Trivial);
    }

    #[test]
    fn f_square_arithmetic() {
        assert!((f_square_from_r2(0.5, 0.3).unwrap() - 0.4).abs() < 1e-12);
        assert!(f_square_from_r2(1.0, 0.3).is_err());
    }

    #[test]
    fn srmr_of_identical_matrices_is_zero() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 1.0]);
        assert_eq!(srmr_from_matrices(&m, &m).unwrap(), 0.0);
        let imp = DMatrix::identity(2, 2);
        // one off-diagonal residual of 0.3 over 3 elements
        assert!((srmr_from_matrices(&m, &imp).unwrap() - (0.09f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn nfi_is_one_for_a_perfect_model() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]);
        let f = normed_fit(&m, &m, 100).unwrap();
        assert!(f.chi2_model.abs() < 1e-12);
        assert!((f.nfi - 1.0).abs() < 1e-12);
        assert!((f.chi2_null - 99.0 * -(0.75f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn indefinite_implied_matrix_is_rejected() {
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]);
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 1.5, 1.5, 1.0]);
        assert!(matches!(ml_discrepancy(&s, &bad), Err(Error::NotPositiveDefinite(_))));
    }
}
