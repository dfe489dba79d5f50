//! Analysis configuration read from TOML. Every key is optional; missing
//! keys take the defaults below.
//!
//! ```toml
//! seed = 7
//!
//! [thresholds]
//! htmt = 0.90
//!
//! [bootstrap]
//! replicates = 1000
//!
//! [classify]
//! classifiers = ["bayes", "c45"]
//! features = "raw_indicators"
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bootstrap::{BootstrapConfig, DEFAULT_ALPHA, DEFAULT_REPLICATES};
use crate::classify::adaboost::AdaBoostConfig;
use crate::classify::c45::C45Config;
use crate::classify::{one_r, ClassifierKind, ClassifierSettings, ClassifyConfig, FeatureSource, ROSTER};
use crate::error::{Error, Result};
use crate::pls::EstimationConfig;
use crate::predict::PredictConfig;
use crate::psychometrics::{CmbTolerances, Thresholds};
use crate::structural::{FitThresholds, DEFAULT_OMISSION_DISTANCE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BootstrapSection {
    pub replicates: usize,
    pub alpha: f64,
}

impl Default for BootstrapSection {
    fn default() -> Self {
        BootstrapSection {
            replicates: DEFAULT_REPLICATES,
            alpha: DEFAULT_ALPHA,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PredictSection {
    pub folds: usize,
    pub repetitions: usize,
}

impl Default for PredictSection {
    fn default() -> Self {
        PredictSection {
            folds: 10,
            repetitions: 30,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlindfoldSection {
    pub omission_distance: usize,
}

impl Default for BlindfoldSection {
    fn default() -> Self {
        BlindfoldSection {
            omission_distance: DEFAULT_OMISSION_DISTANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifySection {
    pub folds: usize,
    pub classifiers: Vec<ClassifierKind>,
    pub features: FeatureSource,
    pub adaboost: AdaBoostConfig,
    pub c45: C45Config,
    pub one_r_min_bucket: usize,
}

impl Default for ClassifySection {
    fn default() -> Self {
        ClassifySection {
            folds: 10,
            classifiers: ROSTER.to_vec(),
            features: FeatureSource::LatentScores,
            adaboost: AdaBoostConfig::default(),
            c45: C45Config::default(),
            one_r_min_bucket: one_r::MIN_BUCKET,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MediationSection {
    /// Share deltas above this many percentage points are flagged.
    pub share_flag_points: f64,
}

impl Default for MediationSection {
    fn default() -> Self {
        MediationSection { share_flag_points: 5.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Master seed shared by the bootstrap, the prediction folds and the
    /// classifier folds.
    pub seed: u64,
    pub estimation: EstimationConfig,
    pub thresholds: Thresholds,
    pub fit: FitThresholds,
    pub cmb: CmbTolerances,
    pub bootstrap: BootstrapSection,
    pub predict: PredictSection,
    pub blindfold: BlindfoldSection,
    pub classify: ClassifySection,
    pub mediation: MediationSection,
}

impl AnalysisConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn bootstrap_config(&self) -> BootstrapConfig {
        BootstrapConfig {
            replicates: self.bootstrap.replicates,
            seed: self.seed,
            alpha: self.bootstrap.alpha,
            estimation: self.estimation,
        }
    }

    pub fn predict_config(&self) -> PredictConfig {
        PredictConfig {
            folds: self.predict.folds,
            repetitions: self.predict.repetitions,
            seed: self.seed,
            estimation: self.estimation,
        }
    }

    pub fn classify_config(&self) -> ClassifyConfig {
        ClassifyConfig {
            folds: self.classify.folds,
            seed: self.seed,
            features: self.classify.features,
            settings: ClassifierSettings {
                adaboost: self.classify.adaboost,
                c45: self.classify.c45,
                one_r_min_bucket: self.classify.one_r_min_bucket,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = AnalysisConfig::from_toml_str("").unwrap();
        assert_eq!(c, AnalysisConfig::default());
        assert_eq!(c.thresholds.htmt, 0.85);
        assert_eq!(c.bootstrap.replicates, 5000);
        assert_eq!(c.classify.classifiers.len(), 6);
    }

    #[test]
    fn partial_sections_keep_other_defaults() {
        let c = AnalysisConfig::from_toml_str(
            "seed = 9\n[thresholds]\nhtmt = 0.9\n[classify]\nclassifiers = [\"one_r\", \"c45\"]\nfeatures = \"raw_indicators\"\n",
        )
        .unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.thresholds.htmt, 0.9);
        assert_eq!(c.thresholds.ave, 0.5);
        assert_eq!(c.classify.classifiers, vec![ClassifierKind::OneR, ClassifierKind::C45]);
        assert_eq!(c.classify_config().features, FeatureSource::RawIndicators);
        assert_eq!(c.bootstrap_config().seed, 9);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_config_errors() {
        assert!(matches!(AnalysisConfig::from_toml_str("sed = 1\n"), Err(Error::Config(_))));
        assert!(matches!(
            AnalysisConfig::from_toml_str("[classify]\nclassifiers = [\"svm\"]\n"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn hash_tracks_content() {
        let a = AnalysisConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
