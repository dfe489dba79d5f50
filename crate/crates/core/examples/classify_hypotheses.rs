//! Predictive accuracy of each hypothesis: binarize the target at the best
//! decile and cross-validate the classifier roster on the latent scores.

use pls_survey::classify::{classification_suite, ClassifyConfig, ROSTER};
use pls_survey::data::validate;
use pls_survey::pls::{estimate, EstimationConfig};
use pls_survey::report::render::render_classification;
use pls_survey::synth::{generate, parse_generator_spec};

fn main() -> pls_survey::Result<()> {
    let g = parse_generator_spec(include_str!("../specs/study2.gspec"))?;
    let sample = validate(&generate(&g)?, &g.spec)?;
    let est = estimate(&sample, &EstimationConfig::default())?;
    let reports = classification_suite(&est, &sample.dataset, &ROSTER, &ClassifyConfig::default())?;
    print!("{}", render_classification(&reports));
    Ok(())
}
