//! Analysis bundles: the full pipeline run, its structured document and
//! the text tables rendered from it.

pub mod bundle;
pub mod pipeline;
pub mod render;

pub use bundle::{AnalysisBundle, MediationEntry, Section, BUNDLE_SCHEMA};
pub use pipeline::{load_sample, load_spec, run_pipeline, PipelineOutcome, Stage, StageError};
pub use render::render_bundle;

use crate::error::Result;
use crate::mediation::{compare_models, CompareMode, ComparisonReport};

/// Compare two complete bundles.
pub fn compare_bundles(
    a: &AnalysisBundle,
    b: &AnalysisBundle,
    mode: CompareMode,
    share_flag_points: f64,
) -> Result<ComparisonReport> {
    compare_models(&a.summary()?, &b.summary()?, mode, share_flag_points)
}
