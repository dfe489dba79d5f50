//! Reliability, convergent and discriminant validity, and the marker-variable
//! check for common method bias.

use pls_survey::data::validate;
use pls_survey::pls::{estimate, EstimationConfig};
use pls_survey::psychometrics::{
    cmb_marker_check, cronbach_alpha, reliability_report, validity_report, CmbTolerances, Thresholds,
};
use pls_survey::report::render::{render_cmb, render_reliability, render_validity};
use pls_survey::synth::{generate, parse_generator_spec};

fn main() -> pls_survey::Result<()> {
    let g = parse_generator_spec(include_str!("../specs/study2.gspec"))?;
    let sample = validate(&generate(&g)?, &g.spec)?;
    let cfg = EstimationConfig::default();
    let est = estimate(&sample, &cfg)?;
    let th = Thresholds::default();

    print!("{}", render_reliability(&reliability_report(&sample, &est, &th)?));
    print!("{}", render_validity(&validity_report(&sample, &est, &th)?));
    print!("{}", render_cmb(&cmb_marker_check(&sample, "MKT", &cfg, &CmbTolerances::default())?));

    // the primitives work on plain item matrices too
    let items = sample.dataset.matrix_for(&["PSR-1", "PSR-2", "PSR-3", "PSR-4", "PSR-5"])?;
    println!("alpha(PSR) = {:.3}", cronbach_alpha(&items)?);
    Ok(())
}
