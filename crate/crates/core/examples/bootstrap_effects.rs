//! Percentile bootstrap of every path and effect. The result does not depend
//! on the number of worker threads.

use pls_survey::bootstrap::{bootstrap, BootstrapConfig};
use pls_survey::data::validate;
use pls_survey::report::render::render_bootstrap;
use pls_survey::synth::{generate, parse_generator_spec};

fn main() -> pls_survey::Result<()> {
    let g = parse_generator_spec(include_str!("../specs/study2.gspec"))?;
    let sample = validate(&generate(&g)?, &g.spec)?;
    let cfg = BootstrapConfig {
        replicates: 500,
        seed: 7,
        ..Default::default()
    };
    let r = bootstrap(&sample, &cfg)?;
    print!("{}", render_bootstrap(&r));

    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("pool")
        .install(|| bootstrap(&sample, &cfg))?;
    println!("same draws on one thread: {}", single.draws == r.draws);
    Ok(())
}
