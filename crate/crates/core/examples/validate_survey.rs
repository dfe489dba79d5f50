//! Bind a CSV export to a model spec and check it before any estimation.

use pls_survey::data::{read_dataset, validate, LoadOptions, LIKERT7};
use pls_survey::spec::parse_model_spec;

const SPEC: &str = "plsspec 1
[constructs]
SI = si1, si2, si3
I2P = i2p1, i2p2
[edges]
SI -> I2P
";

const CSV: &str = "si1,si2,si3,i2p1,i2p2
5,6,5,4,5
3,3,4,3,3
7,6,7,6,7
2,3,2,3,2
4,4,5,4,4
6,5,6,5,6
";

fn main() -> pls_survey::Result<()> {
    let spec = parse_model_spec(SPEC)?;
    println!("outcome {}, {} indicators", spec.outcome(), spec.estimation_indicators().len());

    let ds = read_dataset(CSV.as_bytes(), &spec, LoadOptions { scale: Some(LIKERT7) })?;
    let sample = validate(&ds, &spec)?;
    println!("rows {}  subject-to-item ratio {:.2}", sample.n, sample.adequacy);
    for w in &sample.warnings {
        println!("warning: {w}");
    }

    // an 8 on a seven-point scale is reported with its cell
    let bad = CSV.replacen("5,6,5,4,5", "5,8,5,4,5", 1);
    match read_dataset(bad.as_bytes(), &spec, LoadOptions { scale: Some(LIKERT7) }).and_then(|d| validate(&d, &spec)) {
        Ok(_) => println!("unexpectedly valid"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
