//! The whole pipeline for two competing models on one sample, their
//! structured bundles and the within-study comparison.

use pls_survey::config::AnalysisConfig;
use pls_survey::data::validate;
use pls_survey::mediation::CompareMode;
use pls_survey::report::render::render_comparison;
use pls_survey::report::{compare_bundles, render_bundle, run_pipeline, AnalysisBundle, Stage};
use pls_survey::spec::parse_model_spec;
use pls_survey::synth::{generate, parse_generator_spec};

fn main() -> pls_survey::Result<()> {
    let config = AnalysisConfig::from_toml_str(
        "seed = 11\n[bootstrap]\nreplicates = 300\n[predict]\nrepetitions = 3\n[classify]\nclassifiers = [\"bayes\", \"c45\"]\n",
    )?;
    let ds = generate(&parse_generator_spec(include_str!("../specs/study2.gspec"))?)?;

    let sequential = parse_model_spec(include_str!("../specs/study2.spec"))?;
    let psr_only = parse_model_spec(include_str!("../specs/psr_only.spec"))?;
    let a = run_pipeline(&validate(&ds, &sequential)?, &config, Stage::Structural, "sequential");
    let b = run_pipeline(&validate(&ds, &psr_only)?, &config, Stage::Structural, "psr only");
    for o in [&a, &b] {
        if let Some(e) = &o.error {
            eprintln!("{e}");
        }
    }
    print!("{}", render_bundle(&a.bundle));

    // the structured document parses back to the same text
    let json = a.bundle.to_json()?;
    assert_eq!(AnalysisBundle::from_json(&json)?.to_json()?, json);

    let cmp = compare_bundles(&a.bundle, &b.bundle, CompareMode::Within, config.mediation.share_flag_points)?;
    print!("{}", render_comparison(&cmp));
    Ok(())
}
