//! Effect algebra over the structural DAG: indirect-path enumeration,
//! direct/indirect/total decomposition, mediation typing, mediation shares
//! and the comparative metrics used to contrast two models or two studies.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bootstrap::{BootstrapResult, Significance};
use crate::error::{Error, Result};
use crate::pls::PlsEstimate;
use crate::spec::ModelSpec;

/// All simple directed paths with at least two edges from `source` to
/// `target`, in lexicographic order of their construct sequences.
pub fn enumerate_indirect_paths(spec: &ModelSpec, source: &str, target: &str) -> Result<Vec<Vec<String>>> {
    for name in [source, target] {
        if !spec.structural_constructs().contains(&name) {
            return Err(Error::UnknownConstruct(name.to_string()));
        }
    }
    if source == target {
        return Err(Error::InvalidArgument(format!(
            "source and target are both `{source}`"
        )));
    }
    let mut out = Vec::new();
    let mut stack = vec![source.to_string()];
    walk(spec, target, &mut stack, &mut out);
    out.retain(|p| p.len() >= 3);
    out.sort();
    Ok(out)
}

fn walk(spec: &ModelSpec, target: &str, stack: &mut Vec<String>, out: &mut Vec<Vec<String>>) {
    let last = stack.last().expect("nonempty").clone();
    for child in spec.children(&last) {
        if child == target {
            let mut p = stack.clone();
            p.push(child.to_string());
            out.push(p);
        } else if !stack.iter().any(|s| s == child) {
            stack.push(child.to_string());
            walk(spec, target, stack, out);
            stack.pop();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectKind {
    Direct,
    SpecificIndirect,
    TotalIndirect,
    Total,
}

/// Identifies one effect. `path` is `[source, target]` except for specific
/// indirect effects, which carry the whole construct sequence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EffectId {
    pub kind: EffectKind,
    pub path: Vec<String>,
}

impl EffectId {
    pub fn direct(source: &str, target: &str) -> Self {
        EffectId {
            kind: EffectKind::Direct,
            path: vec![source.into(), target.into()],
        }
    }

    pub fn specific<S: AsRef<str>>(path: &[S]) -> Self {
        EffectId {
            kind: EffectKind::SpecificIndirect,
            path: path.iter().map(|s| s.as_ref().to_string()).collect(),
        }
    }

    pub fn total_indirect(source: &str, target: &str) -> Self {
        EffectId {
            kind: EffectKind::TotalIndirect,
            path: vec![source.into(), target.into()],
        }
    }

    pub fn total(source: &str, target: &str) -> Self {
        EffectId {
            kind: EffectKind::Total,
            path: vec![source.into(), target.into()],
        }
    }

    pub fn source(&self) -> &str {
        &self.path[0]
    }

    pub fn target(&self) -> &str {
        self.path.last().expect("nonempty path")
    }
}

impl fmt::Display for EffectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arrow = self.path.join(" -> ");
        match self.kind {
            EffectKind::Direct | EffectKind::SpecificIndirect => write!(f, "{arrow}"),
            EffectKind::TotalIndirect => write!(f, "indirect {arrow}"),
            EffectKind::Total => write!(f, "total {arrow}"),
        }
    }
}

/// Every effect of a model: direct effects in edge order, then for each
/// connected pair with an indirect path its specific indirect effects,
/// total indirect effect and total effect.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectPlan {
    pub ids: Vec<EffectId>,
}

impl EffectPlan {
    pub fn new(spec: &ModelSpec) -> Self {
        let mut ids: Vec<EffectId> = spec
            .edges()
            .iter()
            .map(|e| EffectId::direct(&e.source, &e.target))
            .collect();
        let order = spec.topological_order();
        for (i, s) in order.iter().enumerate() {
            for t in &order[i + 1..] {
                let paths = enumerate_indirect_paths(spec, s, t).expect("constructs exist");
                if paths.is_empty() {
                    continue;
                }
                ids.extend(paths.iter().map(|p| EffectId::specific(p)));
                ids.push(EffectId::total_indirect(s, t));
                ids.push(EffectId::total(s, t));
            }
        }
        EffectPlan { ids }
    }

    /// Effect values for one set of path coefficients. Total indirect
    /// effects are the running sum of their specific effects in plan order
    /// and totals are direct plus total indirect, so the decomposition
    /// identity holds exactly per coefficient set.
    pub fn evaluate(&self, coefficient: impl Fn(&str, &str) -> Option<f64>) -> Vec<f64> {
        let coef = |a: &str, b: &str| coefficient(a, b).unwrap_or(0.0);
        let mut out = Vec::with_capacity(self.ids.len());
        let mut running = 0.0;
        for id in &self.ids {
            let v = match id.kind {
                EffectKind::Direct => coef(id.source(), id.target()),
                EffectKind::SpecificIndirect => {
                    let v = product_along(&id.path, &coef);
                    running += v;
                    v
                }
                EffectKind::TotalIndirect => {
                    let v = running;
                    running = 0.0;
                    v
                }
                EffectKind::Total => {
                    let ti = *out.last().expect("total follows total indirect");
                    coef(id.source(), id.target()) + ti
                }
            };
            out.push(v);
        }
        out
    }

    pub fn evaluate_estimate(&self, estimate: &PlsEstimate) -> Vec<f64> {
        self.evaluate(|a, b| estimate.path(a, b))
    }
}

fn product_along(path: &[String], coef: &impl Fn(&str, &str) -> f64) -> f64 {
    path.windows(2).map(|w| coef(&w[0], &w[1])).product()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecificEffect {
    pub path: Vec<String>,
    pub value: f64,
    pub significance: Option<Significance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectDecomposition {
    pub source: String,
    pub target: String,
    /// 0 when there is no direct edge.
    pub direct: f64,
    pub has_direct_edge: bool,
    pub direct_significance: Option<Significance>,
    pub specific: Vec<SpecificEffect>,
    pub total_indirect: f64,
    pub total_indirect_significance: Option<Significance>,
    pub total: f64,
    pub total_significance: Option<Significance>,
}

impl EffectDecomposition {
    /// Build from a direct coefficient (if any) and specific indirect
    /// effects. TE is computed from the parts.
    pub fn from_components(
        source: &str,
        target: &str,
        direct: Option<f64>,
        specific: Vec<(Vec<String>, f64)>,
    ) -> Self {
        let mut total_indirect = 0.0;
        for (_, v) in &specific {
            total_indirect += v;
        }
        let de = direct.unwrap_or(0.0);
        EffectDecomposition {
            source: source.into(),
            target: target.into(),
            direct: de,
            has_direct_edge: direct.is_some(),
            direct_significance: None,
            specific: specific
                .into_iter()
                .map(|(path, value)| SpecificEffect {
                    path,
                    value,
                    significance: None,
                })
                .collect(),
            total_indirect,
            total_indirect_significance: None,
            total: de + total_indirect,
            total_significance: None,
        }
    }
}

/// Decompose the effect of `source` on `target` from an estimate, attaching
/// bootstrap significance when a result is given.
pub fn decompose(
    estimate: &PlsEstimate,
    boot: Option<&BootstrapResult>,
    source: &str,
    target: &str,
) -> Result<EffectDecomposition> {
    let spec = &estimate.spec;
    let paths = enumerate_indirect_paths(spec, source, target)?;
    let coef = |a: &str, b: &str| estimate.path(a, b).unwrap_or(0.0);
    let specific = paths
        .into_iter()
        .map(|p| {
            let v = product_along(&p, &coef);
            (p, v)
        })
        .collect();
    let direct = spec.has_edge(source, target).then(|| coef(source, target));
    let mut d = EffectDecomposition::from_components(source, target, direct, specific);
    if let Some(b) = boot {
        if d.has_direct_edge {
            d.direct_significance = Some(b.significance(&EffectId::direct(source, target))?);
        }
        for s in d.specific.iter_mut() {
            s.significance = Some(b.significance(&EffectId::specific(&s.path))?);
        }
        if !d.specific.is_empty() {
            d.total_indirect_significance =
                Some(b.significance(&EffectId::total_indirect(source, target))?);
            d.total_significance = Some(b.significance(&EffectId::total(source, target))?);
        }
    }
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MediationType {
    Complementary,
    Competitive,
    IndirectOnly,
    DirectOnly,
    NoEffect,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MediationClass {
    pub kind: MediationType,
    /// Complementary mediation whose direct and indirect components are all positive.
    pub positive: bool,
    pub label: String,
}

/// Zhao-style decision tree on the significance of the direct effect and
/// the total indirect effect.
pub fn classify_mediation(decomp: &EffectDecomposition, alpha: f64) -> Result<MediationClass> {
    let sig = |s: &Option<Significance>, what: &str| -> Result<bool> {
        s.as_ref()
            .map(|s| s.is_significant(alpha))
            .ok_or_else(|| Error::MissingMetric(format!("significance of {what}")))
    };
    let ie_sig = if decomp.specific.is_empty() {
        false
    } else {
        sig(&decomp.total_indirect_significance, "the indirect effect")?
    };
    let de_sig = if decomp.has_direct_edge {
        sig(&decomp.direct_significance, "the direct effect")?
    } else {
        false
    };
    let (kind, label) = match (ie_sig, de_sig) {
        (true, true) if decomp.direct * decomp.total_indirect > 0.0 => {
            (MediationType::Complementary, "complementary (partial)")
        }
        (true, true) => (MediationType::Competitive, "competitive (partial)"),
        (true, false) => (MediationType::IndirectOnly, "indirect-only (full)"),
        (false, true) => (MediationType::DirectOnly, "direct-only (no mediation)"),
        (false, false) => (MediationType::NoEffect, "no effect"),
    };
    let positive = kind == MediationType::Complementary
        && decomp.direct > 0.0
        && decomp.specific.iter().all(|s| s.value > 0.0);
    Ok(MediationClass {
        kind,
        positive,
        label: if positive {
            format!("{label}, positive")
        } else {
            label.to_string()
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathShare {
    pub path: Vec<String>,
    pub pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MediationShares {
    pub source: String,
    pub target: String,
    /// `(TE − DE)/TE × 100`.
    pub indirect_pct: f64,
    /// `IE/TE × 100` per specific path.
    pub specific_pct: Vec<PathShare>,
}

pub fn mediation_shares(decomp: &EffectDecomposition) -> Result<MediationShares> {
    let te = decomp.total;
    if te == 0.0 {
        return Err(Error::Undefined("mediation share with TE = 0".into()));
    }
    Ok(MediationShares {
        source: decomp.source.clone(),
        target: decomp.target.clone(),
        indirect_pct: (te - decomp.direct) / te * 100.0,
        specific_pct: decomp
            .specific
            .iter()
            .map(|s| PathShare {
                path: s.path.clone(),
                pct: s.value / te * 100.0,
            })
            .collect(),
    })
}

/// `|a − b| / |(a + b)/2| × 100`.
pub fn percentage_difference(a: f64, b: f64) -> Result<f64> {
    let avg = (a + b) / 2.0;
    if avg == 0.0 {
        return Err(Error::Undefined("percentage difference with zero average".into()));
    }
    Ok((a - b).abs() / avg.abs() * 100.0)
}

/// `|a − b| / |b| × 100`.
pub fn change_rate(a: f64, b: f64) -> Result<f64> {
    if b == 0.0 {
        return Err(Error::Undefined("change rate with zero base".into()));
    }
    Ok((a - b).abs() / b.abs() * 100.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompareMode {
    /// Two models on one sample: percentage differences.
    Within,
    /// The same model on two studies: change rates.
    Between,
}

impl std::str::FromStr for CompareMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "within" => Ok(CompareMode::Within),
            "between" => Ok(CompareMode::Between),
            other => Err(Error::InvalidArgument(format!("unknown compare mode `{other}`"))),
        }
    }
}

/// Headline metrics and mediation shares of one analysed model. Metric keys
/// are `total_variance_pct`, `aic`, `srmr`, `nfi`, `r2:<construct>`,
/// `rmse:<indicator>`, `accuracy`; share keys are effect ids.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ModelSummary {
    pub label: String,
    pub metrics: BTreeMap<String, f64>,
    pub shares: BTreeMap<String, f64>,
}

/// Metrics that must be present in both summaries.
pub const REQUIRED_METRICS: [&str; 4] = ["total_variance_pct", "aic", "srmr", "nfi"];

fn higher_is_better(metric: &str) -> bool {
    !(metric == "aic" || metric == "srmr" || metric.starts_with("rmse") || metric.starts_with("mae"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Favors {
    A,
    B,
    Tie,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricComparison {
    pub metric: String,
    pub a: f64,
    pub b: f64,
    /// Percentage difference (within) or change rate of `a` against `b`
    /// (between); `None` when undefined.
    pub delta_pct: Option<f64>,
    pub favors: Favors,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShareComparison {
    pub effect: String,
    pub a_pct: f64,
    pub b_pct: f64,
    /// `a − b` in percentage points.
    pub delta_points: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub a: String,
    pub b: String,
    pub mode: CompareMode,
    pub share_flag_points: f64,
    pub metrics: Vec<MetricComparison>,
    pub shares: Vec<ShareComparison>,
    /// Keys present in only one of the two summaries.
    pub unmatched: Vec<String>,
}

/// Pair the metrics and shares of two models. Share deltas whose magnitude
/// exceeds `share_flag_points` are flagged.
pub fn compare_models(
    a: &ModelSummary,
    b: &ModelSummary,
    mode: CompareMode,
    share_flag_points: f64,
) -> Result<ComparisonReport> {
    for m in REQUIRED_METRICS {
        for s in [a, b] {
            if !s.metrics.contains_key(m) {
                return Err(Error::MissingMetric(format!("`{m}` in `{}`", s.label)));
            }
        }
    }
    let mut unmatched = Vec::new();
    let mut metrics = Vec::new();
    for (k, &va) in &a.metrics {
        let Some(&vb) = b.metrics.get(k) else {
            unmatched.push(k.clone());
            continue;
        };
        let delta_pct = match mode {
            CompareMode::Within => percentage_difference(va, vb).ok(),
            CompareMode::Between => change_rate(va, vb).ok(),
        };
        let favors = if va == vb {
            Favors::Tie
        } else if (va > vb) == higher_is_better(k) {
            Favors::A
        } else {
            Favors::B
        };
        metrics.push(MetricComparison {
            metric: k.clone(),
            a: va,
            b: vb,
            delta_pct,
            favors,
        });
    }
    unmatched.extend(b.metrics.keys().filter(|k| !a.metrics.contains_key(*k)).cloned());
    let mut shares = Vec::new();
    for (k, &va) in &a.shares {
        let Some(&vb) = b.shares.get(k) else {
            unmatched.push(k.clone());
            continue;
        };
        let delta_points = va - vb;
        shares.push(ShareComparison {
            effect: k.clone(),
            a_pct: va,
            b_pct: vb,
            delta_points,
            flagged: delta_points.abs() > share_flag_points,
        });
    }
    unmatched.extend(b.shares.keys().filter(|k| !a.shares.contains_key(*k)).cloned());
    Ok(ComparisonReport {
        a: a.label.clone(),
        b: b.label.clone(),
        mode,
        share_flag_points,
        metrics,
        shares,
        unmatched,
    })
}
