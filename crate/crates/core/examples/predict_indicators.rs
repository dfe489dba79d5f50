//! Out-of-sample prediction of the outcome's indicators against a linear
//! benchmark, plus the check that picks RMSE or MAE.

use pls_survey::data::validate;
use pls_survey::predict::{error_asymmetry_check, pls_predict, PredictConfig};
use pls_survey::report::render::render_predict;
use pls_survey::synth::{generate, parse_generator_spec};

fn main() -> pls_survey::Result<()> {
    let g = parse_generator_spec(include_str!("../specs/study2.gspec"))?;
    let sample = validate(&generate(&g)?, &g.spec)?;
    let cfg = PredictConfig {
        repetitions: 5,
        seed: 1,
        ..Default::default()
    };
    let rep = pls_predict(&sample, &cfg)?;
    print!("{}", render_predict(&rep));
    let check = error_asymmetry_check(&rep, "I2P")?;
    println!("report {:?} for I2P", check.recommendation);
    Ok(())
}
