//! Draw a synthetic survey from a generator spec and compare it with the
//! covariance the parameters imply.

use pls_survey::synth::{generate, implied_covariance, parse_generator_spec, OutputMode};

fn main() -> pls_survey::Result<()> {
    let g = parse_generator_spec(include_str!("../specs/study2.gspec"))?
        .with_n(20_000)
        .with_mode(OutputMode::Continuous);
    let imp = implied_covariance(&g)?;
    println!("implied corr SI, I2P = {:.3}", imp.latent_corr("SI", "I2P").unwrap());

    let ds = generate(&g)?;
    let x = ds.values();
    let col = |name: &str| x.column(ds.column_index(name).unwrap()).into_owned();
    let (a, b) = (col("PSR-1"), col("I2P-1"));
    let (ma, mb) = (a.mean(), b.mean());
    let cov = a.iter().zip(b.iter()).map(|(u, v)| (u - ma) * (v - mb)).sum::<f64>() / (x.nrows() - 1) as f64;
    let i = imp.indicator_names.iter().position(|n| n == "PSR-1").unwrap();
    let j = imp.indicator_names.iter().position(|n| n == "I2P-1").unwrap();
    println!("cov(PSR-1, I2P-1): sample {cov:.4}, implied {:.4}", imp.indicator[(i, j)]);

    // the Likert version of the same draw, written as CSV
    let likert = generate(&g.with_n(5).with_mode(OutputMode::Likert7))?;
    likert.write_csv(std::io::stdout().lock())
}
