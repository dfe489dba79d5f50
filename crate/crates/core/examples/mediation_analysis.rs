//! Split the effect of SI on I2P into direct and indirect parts, test them
//! with the bootstrap and name the kind of mediation.

use pls_survey::bootstrap::{bootstrap, BootstrapConfig};
use pls_survey::data::validate;
use pls_survey::mediation::{classify_mediation, decompose, enumerate_indirect_paths, mediation_shares};
use pls_survey::pls::{estimate, EstimationConfig};
use pls_survey::synth::{generate, parse_generator_spec};

fn main() -> pls_survey::Result<()> {
    let g = parse_generator_spec(include_str!("../specs/study2.gspec"))?;
    let sample = validate(&generate(&g)?, &g.spec)?;
    for p in enumerate_indirect_paths(&sample.spec, "SI", "I2P")? {
        println!("path {}", p.join(" -> "));
    }

    let est = estimate(&sample, &EstimationConfig::default())?;
    let boot = bootstrap(
        &sample,
        &BootstrapConfig {
            replicates: 500,
            seed: 3,
            ..Default::default()
        },
    )?;
    let d = decompose(&est, Some(&boot), "SI", "I2P")?;
    println!("direct {:.3}  indirect {:.3}  total {:.3}", d.direct, d.total_indirect, d.total);
    for s in &d.specific {
        println!("  {}: {:.3}", s.path.join(" -> "), s.value);
    }
    println!("{}", classify_mediation(&d, 0.05)?.label);
    let shares = mediation_shares(&d)?;
    println!("{:.2}% of the total runs through mediators", shares.indirect_pct);
    Ok(())
}
