//! Fit the path model of the bundled study spec to synthetic data.

use pls_survey::data::validate;
use pls_survey::pls::{estimate, EstimationConfig};
use pls_survey::report::render::render_estimate;
use pls_survey::synth::parse_generator_spec;
use pls_survey::synth::generate;

fn main() -> pls_survey::Result<()> {
    let g = parse_generator_spec(include_str!("../specs/study2.gspec"))?;
    let sample = validate(&generate(&g)?, &g.spec)?;
    let est = estimate(&sample, &EstimationConfig::default())?;
    print!("{}", render_estimate(&est));
    println!("converged {} after {} iterations", est.converged, est.iterations);
    for (edge, truth) in &g.true_paths {
        let got = est.path(&edge.source, &edge.target).unwrap();
        println!("{edge}: true {truth:.2}  estimated {got:.3}");
    }
    Ok(())
}
