//! R², f², blindfolded Q² and the global fit indices of a fitted model.

use pls_survey::data::validate;
use pls_survey::pls::{estimate, EstimationConfig};
use pls_survey::report::render::render_structural;
use pls_survey::spec::Edge;
use pls_survey::structural::{f_square, structural_report, FitThresholds, DEFAULT_OMISSION_DISTANCE};
use pls_survey::synth::{generate, parse_generator_spec};

fn main() -> pls_survey::Result<()> {
    let g = parse_generator_spec(include_str!("../specs/study2.gspec"))?;
    let sample = validate(&generate(&g)?, &g.spec)?;
    let cfg = EstimationConfig::default();
    let est = estimate(&sample, &cfg)?;
    let report = structural_report(&sample, &est, &cfg, DEFAULT_OMISSION_DISTANCE, &FitThresholds::default())?;
    print!("{}", render_structural(&report));

    // effect size of one path on its own
    let f2 = f_square(&est, &sample.dataset, &Edge::new("BE", "I2P"), &cfg)?;
    println!("f2(BE -> I2P) = {:.3} ({:?})", f2.value, f2.band);
    Ok(())
}
