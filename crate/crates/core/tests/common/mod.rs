#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use pls_survey::data::{validate, Dataset, ValidatedSample};
use pls_survey::spec::{parse_model_spec, ModelSpec};
use pls_survey::synth::{generate, GeneratorSpec, OutputMode};

pub fn spec_text(constructs: &[(&str, usize)], edges: &[(&str, &str)], outcome: Option<&str>) -> String {
    let mut t = String::from("plsspec 1\n[constructs]\n");
    for (c, k) in constructs {
        let items: Vec<String> = (1..=*k).map(|i| format!("{}{}", c.to_lowercase(), i)).collect();
        t.push_str(&format!("{c} = {}\n", items.join(", ")));
    }
    t.push_str("[edges]\n");
    for (a, b) in edges {
        t.push_str(&format!("{a} -> {b}\n"));
    }
    if let Some(o) = outcome {
        t.push_str(&format!("[outcome]\n{o}\n"));
    }
    t
}

pub fn simple_spec(constructs: &[(&str, usize)], edges: &[(&str, &str)]) -> ModelSpec {
    parse_model_spec(&spec_text(constructs, edges, None)).unwrap()
}

/// X -> M -> Y with a direct X -> Y edge.
pub fn mediation_spec(k: usize) -> ModelSpec {
    simple_spec(&[("X", k), ("M", k), ("Y", k)], &[("X", "M"), ("M", "Y"), ("X", "Y")])
}

pub const MEDIATION_PATHS: [(&str, &str, f64); 3] = [("X", "M", 0.5), ("M", "Y", 0.4), ("X", "Y", 0.2)];

pub fn sample_of(g: &GeneratorSpec) -> ValidatedSample {
    validate(&generate(g).unwrap(), &g.spec).unwrap()
}

pub fn continuous(spec: &ModelSpec, paths: &[(&str, &str, f64)], n: usize, seed: u64) -> ValidatedSample {
    sample_of(
        &GeneratorSpec::new(spec.clone(), paths, n, seed)
            .unwrap()
            .with_mode(OutputMode::Continuous),
    )
}

pub fn likert(spec: &ModelSpec, paths: &[(&str, &str, f64)], n: usize, seed: u64) -> ValidatedSample {
    sample_of(
        &GeneratorSpec::new(spec.clone(), paths, n, seed)
            .unwrap()
            .with_mode(OutputMode::Likert7),
    )
}

pub fn dataset(names: &[&str], values: DMatrix<f64>) -> Dataset {
    Dataset::new(names.iter().map(|s| s.to_string()).collect(), values, None).unwrap()
}

/// Multiply some columns by positive constants.
pub fn rescaled(ds: &Dataset, factors: &[(&str, f64)]) -> Dataset {
    let mut v = ds.values().clone();
    for (name, f) in factors {
        let j = ds.column_index(name).unwrap();
        v.column_mut(j).scale_mut(*f);
    }
    Dataset::new(ds.column_names().to_vec(), v, None).unwrap()
}

/// `n x k` matrix with orthonormal centered columns scaled to unit sample variance.
pub fn orthonormal(n: usize, k: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z: DMatrix<f64> = DMatrix::from_fn(n, k, |_, _| StandardNormal.sample(&mut rng));
    for mut c in z.column_iter_mut() {
        let m = c.mean();
        c.add_scalar_mut(-m);
    }
    z.qr().q() * ((n - 1) as f64).sqrt()
}

/// Columns whose sample correlation matrix is exactly `target`.
pub fn with_correlation(n: usize, target: &DMatrix<f64>, seed: u64) -> DMatrix<f64> {
    let l = target.clone().cholesky().unwrap().l();
    orthonormal(n, target.nrows(), seed) * l.transpose()
}

pub fn equicorrelation(k: usize, r: f64) -> DMatrix<f64> {
    DMatrix::from_fn(k, k, |i, j| if i == j { 1.0 } else { r })
}
