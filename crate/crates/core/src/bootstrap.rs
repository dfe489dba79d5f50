//! Nonparametric bootstrap of path coefficients and derived effects.
//!
//! Replicate `i` draws its rows from a ChaCha stream keyed by `(seed, i)`,
//! so results do not depend on how replicates are scheduled.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::data::{Dataset, ValidatedSample};
use crate::error::{Error, Result};
use crate::linalg::{mean, quantile_linear, select_rows, std_dev};
use crate::mediation::{EffectId, EffectPlan};
use crate::pls::{estimate_matrix, EstimationConfig, PlsEstimate};
use crate::spec::ModelSpec;

pub const DEFAULT_REPLICATES: usize = 5000;
pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub seed: u64,
    /// Two-sided level for verdicts and percentile intervals.
    pub alpha: f64,
    pub estimation: EstimationConfig,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            replicates: DEFAULT_REPLICATES,
            seed: 0,
            alpha: DEFAULT_ALPHA,
            estimation: EstimationConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Significant,
    NotSignificant,
    /// Zero bootstrap standard error; t and p are undefined.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Significance {
    pub t: Option<f64>,
    pub p: Option<f64>,
    pub verdict: Verdict,
}

impl Significance {
    /// Verdict at 0.05 from a p-value; `None` means degenerate.
    pub fn from_p(p: Option<f64>) -> Self {
        Significance {
            t: None,
            p,
            verdict: verdict_at(p, DEFAULT_ALPHA),
        }
    }

    pub fn is_significant(&self, alpha: f64) -> bool {
        self.p.is_some_and(|p| p <= alpha)
    }
}

fn verdict_at(p: Option<f64>, alpha: f64) -> Verdict {
    match p {
        None => Verdict::Degenerate,
        Some(p) if p <= alpha => Verdict::Significant,
        Some(_) => Verdict::NotSignificant,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectEstimate {
    pub id: EffectId,
    pub label: String,
    /// Point estimate from the full sample.
    pub value: f64,
    pub mean: f64,
    pub se: f64,
    pub t: Option<f64>,
    pub p: Option<f64>,
    pub ci_low: f64,
    pub ci_high: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub replicates: usize,
    pub used: usize,
    /// Replicates dropped because estimation failed or did not converge.
    pub failed_replicates: usize,
    pub seed: u64,
    pub alpha: f64,
    pub degrees_of_freedom: usize,
    pub effects: Vec<EffectEstimate>,
    /// Per-effect replicate values, aligned with `effects`.
    #[serde(skip)]
    pub draws: Vec<Vec<f64>>,
}

impl BootstrapResult {
    pub fn effect(&self, id: &EffectId) -> Option<&EffectEstimate> {
        self.effects.iter().find(|e| e.id == *id)
    }

    pub fn significance(&self, id: &EffectId) -> Result<Significance> {
        let e = self
            .effect(id)
            .ok_or_else(|| Error::UnknownEffect(id.to_string()))?;
        Ok(Significance {
            t: e.t,
            p: e.p,
            verdict: e.verdict,
        })
    }
}

/// `(t, p, verdict at 0.05)` of one effect.
pub fn effect_significance(result: &BootstrapResult, id: &EffectId) -> Result<Significance> {
    let e = result
        .effect(id)
        .ok_or_else(|| Error::UnknownEffect(id.to_string()))?;
    Ok(Significance {
        t: e.t,
        p: e.p,
        verdict: verdict_at(e.p, DEFAULT_ALPHA),
    })
}

pub fn bootstrap(sample: &ValidatedSample, config: &BootstrapConfig) -> Result<BootstrapResult> {
    bootstrap_dataset(&sample.dataset, &sample.spec, config)
}

/// Bootstrap without the validation step.
pub fn bootstrap_dataset(
    dataset: &Dataset,
    spec: &ModelSpec,
    config: &BootstrapConfig,
) -> Result<BootstrapResult> {
    if config.replicates < 2 {
        return Err(Error::InvalidArgument(format!(
            "bootstrap needs at least 2 replicates, got {}",
            config.replicates
        )));
    }
    let raw = dataset.matrix_for(&spec.estimation_indicators())?;
    let n = raw.nrows();
    let plan = EffectPlan::new(spec);
    let original = match estimate_matrix(&raw, spec, &config.estimation) {
        Ok(e) => e,
        Err(_) => return Err(Error::AllReplicatesFailed(config.replicates)),
    };
    let point = plan.evaluate_estimate(&original);

    let reps: Vec<Option<Vec<f64>>> = (0..config.replicates)
        .into_par_iter()
        .map(|i| replicate(&raw, spec, config, &original, &plan, i))
        .collect();
    let kept: Vec<Vec<f64>> = reps.into_iter().flatten().collect();
    let used = kept.len();
    if used < 2 {
        return Err(Error::AllReplicatesFailed(config.replicates));
    }

    let df = n - 1;
    let tdist = StudentsT::new(0.0, 1.0, df as f64).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut effects = Vec::with_capacity(plan.ids.len());
    let mut draws = Vec::with_capacity(plan.ids.len());
    for (k, id) in plan.ids.iter().enumerate() {
        let mut d: Vec<f64> = kept.iter().map(|r| r[k]).collect();
        let se = std_dev(&d);
        let (t, p) = if se > 0.0 {
            let t = point[k] / se;
            let p = (2.0 * (1.0 - tdist.cdf(t.abs()))).clamp(0.0, 1.0);
            (Some(t), Some(p))
        } else {
            (None, None)
        };
        let m = mean(&d);
        let unsorted = d.clone();
        d.sort_by(f64::total_cmp);
        effects.push(EffectEstimate {
            label: id.to_string(),
            id: id.clone(),
            value: point[k],
            mean: m,
            se,
            t,
            p,
            ci_low: quantile_linear(&d, config.alpha / 2.0),
            ci_high: quantile_linear(&d, 1.0 - config.alpha / 2.0),
            verdict: verdict_at(p, config.alpha),
        });
        draws.push(unsorted);
    }
    Ok(BootstrapResult {
        replicates: config.replicates,
        used,
        failed_replicates: config.replicates - used,
        seed: config.seed,
        alpha: config.alpha,
        degrees_of_freedom: df,
        effects,
        draws,
    })
}

/// Row indices of replicate `index`: `n` draws with replacement.
pub fn resample_rows(n: usize, seed: u64, index: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

fn replicate(
    raw: &DMatrix<f64>,
    spec: &ModelSpec,
    config: &BootstrapConfig,
    original: &PlsEstimate,
    plan: &EffectPlan,
    index: usize,
) -> Option<Vec<f64>> {
    let rows = resample_rows(raw.nrows(), config.seed, index);
    let x = select_rows(raw, &rows);
    let est = estimate_matrix(&x, spec, &config.estimation).ok()?;
    if !est.converged {
        return None;
    }
    let flips = sign_flips(original, &est);
    Some(plan.evaluate(|a, b| {
        let sa = flips[est.construct_index(a)?];
        let sb = flips[est.construct_index(b)?];
        est.path(a, b).map(|v| v * sa * sb)
    }))
}

/// Per construct, -1 when the replicate's loadings point away from the
/// original's (negative loading cross product), else 1.
fn sign_flips(original: &PlsEstimate, rep: &PlsEstimate) -> Vec<f64> {
    original
        .loadings
        .iter()
        .zip(&rep.loadings)
        .map(|(o, r)| {
            let dot: f64 = o.iter().zip(r).map(|(a, b)| a * b).sum();
            if dot < 0.0 {
                -1.0
            } else {
                1.0
            }
        })
        .collect()
}
