//! Train on one study's sample and measure structural errors on another
//! sample of the shared constructs, in both directions.

use pls_survey::pls::EstimationConfig;
use pls_survey::report::render::render_split_test;
use pls_survey::spec::parse_model_spec;
use pls_survey::split_test::split_test_both;
use pls_survey::synth::{generate, parse_generator_spec};

fn main() -> pls_survey::Result<()> {
    let shared = parse_model_spec(include_str!("../specs/common.spec"))?;
    let g = parse_generator_spec(include_str!("../specs/study2.gspec"))?;
    let a = generate(&g)?;
    let b = generate(&g.clone().with_seed(99).with_n(400))?;
    let (fwd, rev) = split_test_both(&a, &b, &shared, &EstimationConfig::default(), ("study A", "study B"))?;
    print!("{}", render_split_test(&fwd));
    print!("{}", render_split_test(&rev));
    Ok(())
}
