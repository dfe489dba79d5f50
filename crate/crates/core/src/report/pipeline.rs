use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bootstrap::bootstrap;
use crate::classify::classification_suite;
use crate::config::AnalysisConfig;
use crate::data::{load_dataset_with, validate, LoadOptions, ValidatedSample};
use crate::error::{Error, Result};
use crate::mediation::{classify_mediation, decompose, enumerate_indirect_paths, mediation_shares};
use crate::pls::estimate;
use crate::predict::pls_predict;
use crate::psychometrics::{cmb_marker_check, reliability_report, validity_report};
use crate::spec::{emit_model_spec, parse_model_spec, ModelSpec};
use crate::structural::structural_report;

use super::bundle::{
    AnalysisBundle, FailureMarker, MediationEntry, Provenance, SampleInfo, Section, TOOL_NAME, TOOL_VERSION,
};

/// Last stage to run. Measurement covers the estimate, reliability,
/// validity and method-bias checks; structural adds fit, bootstrap,
/// prediction and mediation; classification runs everything.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Measurement,
    Structural,
    #[default]
    Classification,
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "measurement" => Ok(Stage::Measurement),
            "structural" => Ok(Stage::Structural),
            "classification" | "all" => Ok(Stage::Classification),
            other => Err(Error::InvalidArgument(format!("unknown stage `{other}`"))),
        }
    }
}

/// A module error tagged with the pipeline step that raised it.
#[derive(Debug, Clone, PartialEq)]
pub struct StageError {
    pub stage: String,
    pub error: Error,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} stage failed: {}", self.stage, self.error)
    }
}

impl std::error::Error for StageError {}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutcome {
    pub bundle: AnalysisBundle,
    pub error: Option<StageError>,
}

/// Read a spec file, bind a CSV file to it and validate the result.
pub fn load_sample(data: &Path, spec: &Path, options: LoadOptions) -> Result<ValidatedSample> {
    let spec = load_spec(spec)?;
    let ds = load_dataset_with(data, &spec, options)?;
    validate(&ds, &spec)
}

pub fn load_spec(path: &Path) -> Result<ModelSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_model_spec(&text)
}

pub fn provenance(config: &AnalysisConfig) -> Provenance {
    Provenance {
        tool: TOOL_NAME.to_string(),
        version: TOOL_VERSION.to_string(),
        config_hash: config.hash(),
        seed: config.seed,
        bootstrap_seed: config.bootstrap_config().seed,
        predict_seed: config.predict_config().seed,
        classify_seed: config.classify_config().seed,
    }
}

pub fn sample_info(sample: &ValidatedSample) -> SampleInfo {
    SampleInfo {
        hash: sample.content_hash(),
        dataset_hash: sample.dataset.content_hash(),
        rows: sample.n,
        rejected_rows: sample.dataset.rejected_rows(),
        indicators: sample.p,
        adequacy: sample.adequacy,
        warnings: sample.warnings.clone(),
        spec: emit_model_spec(&sample.spec),
    }
}

/// Run the analysis up to `stage`. The first failing step stops the run;
/// its section is marked failed, later ones stay not run, and the bundle
/// carries a failure marker.
pub fn run_pipeline(sample: &ValidatedSample, config: &AnalysisConfig, stage: Stage, label: &str) -> PipelineOutcome {
    let info = sample_info(sample);
    let hash = info.hash.clone();
    let mut b = AnalysisBundle::new(label, provenance(config), info);

    macro_rules! step {
        ($slot:ident, $name:expr, $body:expr) => {
            match $body {
                Ok(v) => {
                    b.$slot = Section::Complete {
                        sample_hash: hash.clone(),
                        value: v,
                    };
                    b.$slot.value().expect("just set")
                }
                Err(error) => {
                    b.$slot = Section::Failed {
                        error: error.to_string(),
                    };
                    b.failure = Some(FailureMarker {
                        stage: $name.to_string(),
                        exit_code: error.exit_code(),
                        message: error.to_string(),
                    });
                    return PipelineOutcome {
                        bundle: b,
                        error: Some(StageError {
                            stage: $name.to_string(),
                            error,
                        }),
                    };
                }
            }
        };
    }

    let est = step!(estimate, "estimate", estimate(sample, &config.estimation)).clone();
    step!(reliability, "reliability", reliability_report(sample, &est, &config.thresholds));
    step!(validity, "validity", validity_report(sample, &est, &config.thresholds));
    if let Some(marker) = sample.spec.marker() {
        step!(cmb, "cmb", cmb_marker_check(sample, marker, &config.estimation, &config.cmb));
    }
    if stage == Stage::Measurement {
        return PipelineOutcome { bundle: b, error: None };
    }

    step!(
        structural,
        "structural",
        structural_report(
            sample,
            &est,
            &config.estimation,
            config.blindfold.omission_distance,
            &config.fit
        )
    );
    let boot = step!(bootstrap, "bootstrap", bootstrap(sample, &config.bootstrap_config())).clone();
    step!(predict, "predict", pls_predict(sample, &config.predict_config()));
    step!(mediation, "mediation", mediation_entries(&est.spec, &est, &boot, config.bootstrap.alpha));
    if stage == Stage::Structural {
        return PipelineOutcome { bundle: b, error: None };
    }

    step!(
        classification,
        "classification",
        classification_suite(&est, &sample.dataset, &config.classify.classifiers, &config.classify_config())
    );
    PipelineOutcome { bundle: b, error: None }
}

/// Decomposition of every ordered construct pair joined by at least one
/// indirect path.
pub fn mediation_entries(
    spec: &ModelSpec,
    est: &crate::pls::PlsEstimate,
    boot: &crate::bootstrap::BootstrapResult,
    alpha: f64,
) -> Result<Vec<MediationEntry>> {
    let order = spec.topological_order();
    let mut out = Vec::new();
    for (i, s) in order.iter().enumerate() {
        for t in &order[i + 1..] {
            if enumerate_indirect_paths(spec, s, t)?.is_empty() {
                continue;
            }
            let d = decompose(est, Some(boot), s, t)?;
            out.push(MediationEntry {
                class: Some(classify_mediation(&d, alpha)?),
                shares: mediation_shares(&d).ok(),
                decomposition: d,
            });
        }
    }
    Ok(out)
}
