use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bootstrap::BootstrapResult;
use crate::classify::ClassificationReport;
use crate::error::{Error, Result};
use crate::mediation::{EffectDecomposition, EffectId, MediationClass, MediationShares, ModelSummary};
use crate::pls::PlsEstimate;
use crate::predict::PredictReport;
use crate::psychometrics::{CmbSummary, ReliabilityReport, ValidityReport};
use crate::structural::StructuralReport;

pub const BUNDLE_SCHEMA: &str = "pls-survey/bundle/1";
pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One report slot of a bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Section<T> {
    NotRun,
    Failed { error: String },
    Complete { sample_hash: String, value: T },
}

impl<T> Section<T> {
    pub fn value(&self) -> Option<&T> {
        match self {
            Section::Complete { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn is_complete(&self) -> bool {
        matches!(self, Section::Complete { .. })
    }

    pub fn status(&self) -> &'static str {
        match self {
            Section::NotRun => "not run",
            Section::Failed { .. } => "failed",
            Section::Complete { .. } => "complete",
        }
    }

    fn hash(&self) -> Option<&str> {
        match self {
            Section::Complete { sample_hash, .. } => Some(sample_hash),
            _ => None,
        }
    }

    /// The value, or `IncompleteBundle` naming the section.
    pub fn require(&self, name: &str) -> Result<&T> {
        self.value()
            .ok_or_else(|| Error::IncompleteBundle(format!("section `{name}` is {}", self.status())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    pub bootstrap_seed: u64,
    pub predict_seed: u64,
    pub classify_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleInfo {
    /// Hash of the dataset bound to its spec.
    pub hash: String,
    pub dataset_hash: String,
    pub rows: usize,
    pub rejected_rows: usize,
    pub indicators: usize,
    pub adequacy: f64,
    pub warnings: Vec<String>,
    pub spec: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MediationEntry {
    pub decomposition: EffectDecomposition,
    pub class: Option<MediationClass>,
    /// `None` when the total effect is zero.
    pub shares: Option<MediationShares>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureMarker {
    pub stage: String,
    pub exit_code: i32,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisBundle {
    pub schema: String,
    pub label: String,
    pub provenance: Provenance,
    pub sample: SampleInfo,
    pub estimate: Section<PlsEstimate>,
    pub reliability: Section<ReliabilityReport>,
    pub validity: Section<ValidityReport>,
    pub cmb: Section<CmbSummary>,
    pub structural: Section<StructuralReport>,
    pub bootstrap: Section<BootstrapResult>,
    pub predict: Section<PredictReport>,
    pub mediation: Section<Vec<MediationEntry>>,
    pub classification: Section<Vec<ClassificationReport>>,
    /// Set when a stage failed; later sections are then `NotRun`.
    pub failure: Option<FailureMarker>,
}

impl AnalysisBundle {
    pub fn new(label: &str, provenance: Provenance, sample: SampleInfo) -> Self {
        AnalysisBundle {
            schema: BUNDLE_SCHEMA.to_string(),
            label: label.to_string(),
            provenance,
            sample,
            estimate: Section::NotRun,
            reliability: Section::NotRun,
            validity: Section::NotRun,
            cmb: Section::NotRun,
            structural: Section::NotRun,
            bootstrap: Section::NotRun,
            predict: Section::NotRun,
            mediation: Section::NotRun,
            classification: Section::NotRun,
            failure: None,
        }
    }

    pub fn is_partial(&self) -> bool {
        self.failure.is_some()
    }

    fn section_hashes(&self) -> Vec<(&'static str, Option<&str>)> {
        vec![
            ("estimate", self.estimate.hash()),
            ("reliability", self.reliability.hash()),
            ("validity", self.validity.hash()),
            ("cmb", self.cmb.hash()),
            ("structural", self.structural.hash()),
            ("bootstrap", self.bootstrap.hash()),
            ("predict", self.predict.hash()),
            ("mediation", self.mediation.hash()),
            ("classification", self.classification.hash()),
        ]
    }

    /// Every complete section must carry the bundle's sample hash.
    pub fn check_consistency(&self) -> Result<()> {
        if self.schema != BUNDLE_SCHEMA {
            return Err(Error::UnsupportedVersion(self.schema.clone()));
        }
        for (name, h) in self.section_hashes() {
            if let Some(h) = h {
                if h != self.sample.hash {
                    return Err(Error::InconsistentBundle(format!(
                        "section `{name}` was built from sample {h}, bundle sample is {}",
                        self.sample.hash
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// Parse and check a bundle document.
    pub fn from_json(text: &str) -> Result<Self> {
        let b: AnalysisBundle = serde_json::from_str(text)?;
        b.check_consistency()?;
        Ok(b)
    }

    /// Headline metrics and mediation shares for model comparison. Needs
    /// complete reliability and structural sections.
    pub fn summary(&self) -> Result<ModelSummary> {
        let rel = self.reliability.require("reliability")?;
        let st = self.structural.require("structural")?;
        let mut metrics = BTreeMap::new();
        metrics.insert("total_variance_pct".to_string(), rel.total_variance.cumulative_pct);
        metrics.insert("kmo".to_string(), rel.kmo);
        metrics.insert("aic".to_string(), rel.aic_total);
        metrics.insert("srmr".to_string(), st.srmr);
        metrics.insert("nfi".to_string(), st.nfi);
        for r in &st.r_square {
            metrics.insert(format!("r2:{}", r.construct), r.value);
        }
        if let Some(p) = self.predict.value() {
            for i in &p.indicators {
                metrics.insert(format!("rmse:{}", i.indicator), i.rmse_pls);
            }
        }
        if let Some(reports) = self.classification.value() {
            for r in reports {
                metrics.insert(format!("accuracy_pct:{}", r.label), r.best_accuracy_pct);
            }
        }
        let mut shares = BTreeMap::new();
        if let Some(entries) = self.mediation.value() {
            for e in entries {
                let Some(s) = &e.shares else { continue };
                shares.insert(EffectId::total_indirect(&s.source, &s.target).to_string(), s.indirect_pct);
                for p in &s.specific_pct {
                    shares.insert(EffectId::specific(&p.path).to_string(), p.pct);
                }
            }
        }
        Ok(ModelSummary {
            label: self.label.clone(),
            metrics,
            shares,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn empty() -> AnalysisBundle {
        AnalysisBundle::new(
            "m",
            Provenance {
                tool: TOOL_NAME.into(),
                version: TOOL_VERSION.into(),
                config_hash: "c".into(),
                seed: 1,
                bootstrap_seed: 1,
                predict_seed: 1,
                classify_seed: 1,
            },
            SampleInfo {
                hash: "h".into(),
                dataset_hash: "d".into(),
                rows: 10,
                rejected_rows: 0,
                indicators: 2,
                adequacy: 5.0,
                warnings: vec![],
                spec: String::new(),
            },
        )
    }

    #[test]
    fn section_tags_serialize_flat() {
        let s: Section<u32> = Section::Complete {
            sample_hash: "h".into(),
            value: 3,
        };
        assert_eq!(
            serde_json::to_string(&s).unwrap(),
            r#"{"status":"complete","sample_hash":"h","value":3}"#
        );
        assert_eq!(serde_json::to_string(&Section::<u32>::NotRun).unwrap(), r#"{"status":"not_run"}"#);
    }

    #[test]
    fn mismatched_hash_is_rejected() {
        let mut b = empty();
        b.mediation = Section::Complete {
            sample_hash: "other".into(),
            value: vec![],
        };
        assert!(matches!(b.check_consistency(), Err(Error::InconsistentBundle(_))));
        b.mediation = Section::Complete {
            sample_hash: "h".into(),
            value: vec![],
        };
        b.check_consistency().unwrap();
        let back = AnalysisBundle::from_json(&b.to_json().unwrap()).unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn summary_needs_measurement_and_structure() {
        assert!(matches!(empty().summary(), Err(Error::IncompleteBundle(_))));
    }
}
