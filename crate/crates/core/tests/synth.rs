mod common;

use nalgebra::DMatrix;

use pls_survey::pls::{estimate, EstimationConfig};
use pls_survey::linalg::least_squares;
use pls_survey::synth::{generate, implied_covariance, GeneratorSpec, OutputMode};

#[test]
fn chain_correlation_is_the_product_of_paths() {
    let spec = common::simple_spec(&[("A", 2), ("B", 2), ("C", 2)], &[("A", "B"), ("B", "C")]);
    let g = GeneratorSpec::new(spec, &[("A", "B", 0.7), ("B", "C", 0.5)], 10, 0).unwrap();
    let imp = implied_covariance(&g).unwrap();
    assert!((imp.latent_corr("A", "C").unwrap() - 0.35).abs() < 1e-12);
    for c in ["A", "B", "C"] {
        assert!((imp.latent_corr(c, c).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn large_draw_matches_the_implied_covariance() {
    let spec = common::mediation_spec(2);
    let g = GeneratorSpec::new(spec, &common::MEDIATION_PATHS, 100_000, 17)
        .unwrap()
        .with_mode(OutputMode::Continuous);
    let ds = generate(&g).unwrap();
    let imp = implied_covariance(&g).unwrap();
    let x = ds.values();
    let n = x.nrows() as f64;
    let means: Vec<f64> = x.column_iter().map(|c| c.mean()).collect();
    let p = x.ncols();
    let cov = DMatrix::from_fn(p, p, |a, b| {
        x.column(a)
            .iter()
            .zip(x.column(b).iter())
            .map(|(u, v)| (u - means[a]) * (v - means[b]))
            .sum::<f64>()
            / (n - 1.0)
    });
    assert_eq!(ds.column_names(), imp.indicator_names.as_slice());
    let worst = (&cov - &imp.indicator).abs().max();
    assert!(worst < 0.01, "max deviation {worst}");
}

#[test]
fn noiseless_generation_is_recovered_exactly() {
    let spec = common::mediation_spec(2);
    let g = GeneratorSpec::new(spec, &common::MEDIATION_PATHS, 300, 4)
        .unwrap()
        .with_mode(OutputMode::Continuous)
        .with_uniform_loading(1.0)
        .with_uniform_indicator_noise(0.0);
    let est = estimate(&common::sample_of(&g), &EstimationConfig::default()).unwrap();
    let ds = generate(&g).unwrap();
    let x = ds.values();
    assert_eq!(x.column(0), x.column(1));
    // the blocks repeat their latent, so the paths are the standardized
    // regressions among x1, m1 and y1
    let z = |j: usize| {
        let c = x.column(j);
        let m = c.mean();
        let sd = (c.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (c.len() - 1) as f64).sqrt();
        c.map(|v| (v - m) / sd)
    };
    let (zx, zm, zy) = (z(0), z(2), z(4));
    let design = DMatrix::from_columns(std::slice::from_ref(&zx));
    let bm = least_squares(&design, &zm).unwrap();
    assert!((est.path("X", "M").unwrap() - bm[0]).abs() < 1e-6);
    let design = DMatrix::from_columns(&[zx, zm]);
    let by = least_squares(&design, &zy).unwrap();
    assert!((est.path("X", "Y").unwrap() - by[0]).abs() < 1e-6);
    assert!((est.path("M", "Y").unwrap() - by[1]).abs() < 1e-6);
}

#[test]
fn likert_output_is_on_scale_and_attenuates_paths() {
    let spec = common::mediation_spec(3);
    let paths = [("X", "M", 0.6), ("M", "Y", 0.5), ("X", "Y", 0.3)];
    let cfg = EstimationConfig::default();
    let mut gap = Vec::new();
    for seed in 0..5 {
        let g = GeneratorSpec::new(spec.clone(), &paths, 3000, seed)
            .unwrap()
            .with_mode(OutputMode::Likert7);
        let ds = generate(&g).unwrap();
        assert!(ds.values().iter().all(|v| v.fract() == 0.0 && (1.0..=7.0).contains(v)));
        let lik = estimate(&common::sample_of(&g), &cfg).unwrap();
        let cont = estimate(&common::sample_of(&g.clone().with_mode(OutputMode::Continuous)), &cfg).unwrap();
        for (a, b, _) in paths {
            gap.push(cont.path(a, b).unwrap().abs() - lik.path(a, b).unwrap().abs());
        }
    }
    let mean = gap.iter().sum::<f64>() / gap.len() as f64;
    assert!(mean > 0.0, "{gap:?}");
}

#[test]
fn same_spec_gives_the_same_bytes() {
    let spec = common::mediation_spec(3);
    let g = GeneratorSpec::new(spec, &common::MEDIATION_PATHS, 250, 8)
        .unwrap()
        .with_mode(OutputMode::Likert7);
    let csv = |g: &GeneratorSpec| {
        let mut buf = Vec::new();
        generate(g).unwrap().write_csv(&mut buf).unwrap();
        buf
    };
    assert_eq!(csv(&g), csv(&g));
    assert_ne!(csv(&g), csv(&g.clone().with_seed(9)));
}
