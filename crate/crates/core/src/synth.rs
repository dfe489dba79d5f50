//! Synthetic survey data with known structural and measurement parameters.
//!
//! Latents are generated in topological order of a DAG made of the
//! structural edges plus second-order → component edges. Every latent is
//! rescaled to unit variance, so path values are on the standardized scale
//! that PLS estimates.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::data::{Dataset, LIKERT7};
use crate::error::{Error, Result};
use crate::spec::{
    model_spec_from_sections, name_token, parse_edge_line, parse_sections, split_assignment,
    Edge, ModelSpec, SourceLine,
};

pub const DEFAULT_LOADING: f64 = 0.8;
pub const DEFAULT_SECOND_ORDER_LOADING: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputMode {
    Continuous,
    Likert7,
}

/// Generator parameters. Missing loadings default to 0.8, missing indicator
/// noise to `sqrt(1 - λ²)`, missing structural noise to whatever keeps the
/// latent variance at exactly 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub spec: ModelSpec,
    pub true_paths: BTreeMap<Edge, f64>,
    pub second_order_loadings: BTreeMap<String, f64>,
    pub true_loadings: BTreeMap<String, f64>,
    pub structural_noise_sd: BTreeMap<String, f64>,
    pub indicator_noise_sd: BTreeMap<String, f64>,
    pub n: usize,
    pub seed: u64,
    pub output_mode: OutputMode,
}

impl GeneratorSpec {
    /// Parameters with every structural path set from `paths` (which must
    /// cover each edge) and defaults elsewhere. Output is continuous unless
    /// changed with [`GeneratorSpec::with_mode`]; parsed generator specs
    /// default to Likert instead.
    pub fn new(spec: ModelSpec, paths: &[(&str, &str, f64)], n: usize, seed: u64) -> Result<Self> {
        let mut true_paths = BTreeMap::new();
        for (s, t, v) in paths {
            let e = Edge::new(*s, *t);
            if !spec.edges().contains(&e) {
                return Err(Error::InvalidArgument(format!("edge `{e}` is not in the spec")));
            }
            true_paths.insert(e, *v);
        }
        let g = GeneratorSpec {
            spec,
            true_paths,
            second_order_loadings: BTreeMap::new(),
            true_loadings: BTreeMap::new(),
            structural_noise_sd: BTreeMap::new(),
            indicator_noise_sd: BTreeMap::new(),
            n,
            seed,
            output_mode: OutputMode::Continuous,
        };
        g.check()?;
        Ok(g)
    }

    pub fn with_mode(mut self, mode: OutputMode) -> Self {
        self.output_mode = mode;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    /// Set the same loading on every indicator.
    pub fn with_uniform_loading(mut self, loading: f64) -> Self {
        for ind in self.spec.all_indicators() {
            self.true_loadings.insert(ind.to_string(), loading);
        }
        self
    }

    /// Set the same indicator noise sd on every indicator.
    pub fn with_uniform_indicator_noise(mut self, sd: f64) -> Self {
        for ind in self.spec.all_indicators() {
            self.indicator_noise_sd.insert(ind.to_string(), sd);
        }
        self
    }

    pub fn with_structural_noise(mut self, construct: &str, sd: f64) -> Self {
        self.structural_noise_sd.insert(construct.to_string(), sd);
        self
    }

    /// Validate parameters; the implied latent covariance must be a proper
    /// (positive semidefinite, unit-diagonal) correlation matrix.
    pub fn check(&self) -> Result<()> {
        for e in self.spec.edges() {
            if !self.true_paths.contains_key(e) {
                return Err(Error::InvalidArgument(format!("no value for edge `{e}`")));
            }
        }
        for (name, sd) in self
            .structural_noise_sd
            .iter()
            .chain(self.indicator_noise_sd.iter())
        {
            if !(sd.is_finite() && *sd >= 0.0) {
                return Err(Error::InvalidArgument(format!("noise sd for `{name}` must be >= 0")));
            }
        }
        if self.n < 2 {
            return Err(Error::TooFewRows { needed: 2, got: self.n });
        }
        self.latent_model().map(|_| ())
    }

    fn loading(&self, indicator: &str) -> f64 {
        *self.true_loadings.get(indicator).unwrap_or(&DEFAULT_LOADING)
    }

    fn indicator_noise(&self, indicator: &str) -> f64 {
        match self.indicator_noise_sd.get(indicator) {
            Some(sd) => *sd,
            None => (1.0 - self.loading(indicator).powi(2)).max(0.0).sqrt(),
        }
    }

    /// Latent DAG in generation order with scaled coefficients.
    fn latent_model(&self) -> Result<LatentModel> {
        let spec = &self.spec;
        let mut names: Vec<String> = spec
            .estimation_constructs()
            .iter()
            .map(|s| s.to_string())
            .collect();
        if let Some(m) = spec.marker() {
            names.push(m.to_string());
        }
        let idx = |n: &str| names.iter().position(|x| x == n).expect("latent");
        let mut parents: Vec<Vec<(usize, f64)>> = vec![Vec::new(); names.len()];
        for (e, v) in &self.true_paths {
            parents[idx(&e.target)].push((idx(&e.source), *v));
        }
        for so in spec.second_order() {
            for comp in &so.components {
                let g = *self
                    .second_order_loadings
                    .get(comp)
                    .unwrap_or(&DEFAULT_SECOND_ORDER_LOADING);
                parents[idx(comp)].push((idx(&so.name), g));
            }
        }
        // Topological order over the latent DAG.
        let c = names.len();
        let mut order = Vec::with_capacity(c);
        let mut placed = vec![false; c];
        while order.len() < c {
            let next = (0..c)
                .find(|&j| !placed[j] && parents[j].iter().all(|(p, _)| placed[*p]))
                .ok_or_else(|| Error::Cycle(names[0].clone()))?;
            placed[next] = true;
            order.push(next);
        }
        let mut cov = DMatrix::<f64>::zeros(c, c);
        let mut scaled_parents = vec![Vec::new(); c];
        let mut noise = vec![0.0; c];
        for &j in &order {
            if parents[j].is_empty() {
                cov[(j, j)] = 1.0;
                noise[j] = 1.0;
                continue;
            }
            let mut explained = 0.0;
            for &(p, bp) in &parents[j] {
                for &(q, bq) in &parents[j] {
                    explained += bp * bq * cov[(p, q)];
                }
            }
            let sigma = match self.structural_noise_sd.get(&names[j]) {
                Some(s) => *s,
                None => {
                    if explained > 1.0 + 1e-9 {
                        return Err(Error::NotPositiveDefinite(format!(
                            "paths into `{}` explain {explained:.4} > 1 of its variance",
                            names[j]
                        )));
                    }
                    (1.0 - explained).max(0.0).sqrt()
                }
            };
            let total = explained + sigma * sigma;
            if total <= 0.0 {
                return Err(Error::NotPositiveDefinite(format!(
                    "latent `{}` has zero implied variance",
                    names[j]
                )));
            }
            let s = total.sqrt();
            scaled_parents[j] = parents[j].iter().map(|&(p, b)| (p, b / s)).collect();
            noise[j] = sigma / s;
            for &k in order.iter().take_while(|&&k| k != j) {
                let v: f64 = scaled_parents[j]
                    .iter()
                    .map(|&(p, b)| b * cov[(p, k)])
                    .sum();
                cov[(j, k)] = v;
                cov[(k, j)] = v;
            }
            cov[(j, j)] = 1.0;
        }
        let min_eig = crate::linalg::sorted_eigenvalues(&cov)
            .last()
            .copied()
            .unwrap_or(1.0);
        if min_eig < -1e-9 {
            return Err(Error::NotPositiveDefinite(format!(
                "implied latent covariance has eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(LatentModel {
            names,
            order,
            parents: scaled_parents,
            noise,
            cov,
        })
    }
}

struct LatentModel {
    names: Vec<String>,
    order: Vec<usize>,
    parents: Vec<Vec<(usize, f64)>>,
    noise: Vec<f64>,
    cov: DMatrix<f64>,
}

/// Closed-form covariances implied by a generator spec.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpliedCovariance {
    pub latent_names: Vec<String>,
    pub latent: DMatrix<f64>,
    pub indicator_names: Vec<String>,
    /// Covariance of the continuous indicators before any discretization.
    pub indicator: DMatrix<f64>,
}

impl ImpliedCovariance {
    pub fn latent_corr(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.latent_names.iter().position(|x| x == a)?;
        let j = self.latent_names.iter().position(|x| x == b)?;
        Some(self.latent[(i, j)])
    }
}

pub fn implied_covariance(gspec: &GeneratorSpec) -> Result<ImpliedCovariance> {
    let lm = gspec.latent_model()?;
    let spec = &gspec.spec;
    let inds: Vec<(String, usize)> = spec
        .constructs()
        .iter()
        .flat_map(|c| {
            let j = lm.names.iter().position(|x| x == &c.name).expect("latent");
            c.indicators.iter().map(move |i| (i.clone(), j))
        })
        .collect();
    let p = inds.len();
    let mut cov = DMatrix::zeros(p, p);
    for a in 0..p {
        for b in 0..p {
            let (ia, ja) = (&inds[a].0, inds[a].1);
            let (ib, jb) = (&inds[b].0, inds[b].1);
            cov[(a, b)] = gspec.loading(ia) * gspec.loading(ib) * lm.cov[(ja, jb)];
        }
        cov[(a, a)] += gspec.indicator_noise(&inds[a].0).powi(2);
    }
    Ok(ImpliedCovariance {
        latent_names: lm.names.clone(),
        latent: lm.cov.clone(),
        indicator_names: inds.into_iter().map(|(n, _)| n).collect(),
        indicator: cov,
    })
}

/// Fixed cut points splitting the standard normal into seven equal-probability bins.
pub fn likert_cut_points() -> [f64; 6] {
    let z = Normal::standard();
    std::array::from_fn(|k| z.inverse_cdf((k + 1) as f64 / 7.0))
}

/// Draw a dataset. Deterministic in the spec (seed included).
pub fn generate(gspec: &GeneratorSpec) -> Result<Dataset> {
    let lm = gspec.latent_model()?;
    let spec = &gspec.spec;
    let cuts = likert_cut_points();
    let inds: Vec<(String, usize, f64, f64)> = spec
        .constructs()
        .iter()
        .flat_map(|c| {
            let j = lm.names.iter().position(|x| x == &c.name).expect("latent");
            c.indicators
                .iter()
                .map(move |i| (i.clone(), j, gspec.loading(i), gspec.indicator_noise(i)))
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(gspec.seed);
    let n = gspec.n;
    let mut values = DMatrix::zeros(n, inds.len());
    let mut eta = vec![0.0; lm.names.len()];
    for i in 0..n {
        for &j in &lm.order {
            let z: f64 = StandardNormal.sample(&mut rng);
            let mut v = lm.noise[j] * z;
            for &(p, b) in &lm.parents[j] {
                v += b * eta[p];
            }
            eta[j] = v;
        }
        for (k, (_, j, lambda, theta)) in inds.iter().enumerate() {
            let e: f64 = StandardNormal.sample(&mut rng);
            let x = lambda * eta[*j] + theta * e;
            values[(i, k)] = match gspec.output_mode {
                OutputMode::Continuous => x,
                OutputMode::Likert7 => {
                    let sd = (lambda * lambda + theta * theta).sqrt();
                    let zx = if sd > 0.0 { x / sd } else { 0.0 };
                    1.0 + cuts.iter().filter(|c| zx > **c).count() as f64
                }
            };
        }
    }
    let scale = match gspec.output_mode {
        OutputMode::Continuous => None,
        OutputMode::Likert7 => Some(LIKERT7),
    };
    Dataset::new(inds.into_iter().map(|t| t.0).collect(), values, scale)
}

const GENERATOR_SECTIONS: [&str; 6] = [
    "paths",
    "second_order_loadings",
    "loadings",
    "structural_noise",
    "indicator_noise",
    "generator",
];

fn number(text: &str, line: &SourceLine) -> Result<f64> {
    text.trim().parse().map_err(|_| Error::Syntax {
        line: line.line,
        column: line.column,
        message: format!("expected a number, found `{}`", text.trim()),
    })
}

/// Parse a generator spec: a model spec plus parameter sections.
pub fn parse_generator_spec(text: &str) -> Result<GeneratorSpec> {
    let sections = parse_sections(text)?;
    for s in &sections {
        let known = GENERATOR_SECTIONS.contains(&s.name.as_str())
            || ["constructs", "second_order", "edges", "marker", "outcome"].contains(&s.name.as_str());
        if !known {
            return Err(Error::Syntax {
                line: s.line,
                column: 1,
                message: format!("unknown section `[{}]`", s.name),
            });
        }
    }
    let spec = model_spec_from_sections(&sections, true)?;
    let mut g = GeneratorSpec {
        spec,
        true_paths: BTreeMap::new(),
        second_order_loadings: BTreeMap::new(),
        true_loadings: BTreeMap::new(),
        structural_noise_sd: BTreeMap::new(),
        indicator_noise_sd: BTreeMap::new(),
        n: 500,
        seed: 0,
        output_mode: OutputMode::Likert7,
    };
    let mut default_loading = None;
    let mut default_noise = None;
    for s in &sections {
        match s.name.as_str() {
            "paths" => {
                for l in &s.lines {
                    let (edge, tail) = parse_edge_line(l)?;
                    let Some(v) = tail else {
                        return Err(Error::Syntax {
                            line: l.line,
                            column: l.column,
                            message: "expected `Source -> Target = value`".into(),
                        });
                    };
                    if !g.spec.edges().contains(&edge) {
                        return Err(Error::UnknownConstruct(edge.to_string()));
                    }
                    g.true_paths.insert(edge, number(v, l)?);
                }
            }
            "second_order_loadings" | "loadings" | "structural_noise" | "indicator_noise" => {
                for l in &s.lines {
                    let (lhs, rhs, _) = split_assignment(l)?;
                    let key = name_token(lhs, l, 0)?;
                    let v = number(rhs, l)?;
                    let map = match s.name.as_str() {
                        "second_order_loadings" => &mut g.second_order_loadings,
                        "loadings" => &mut g.true_loadings,
                        "structural_noise" => &mut g.structural_noise_sd,
                        _ => &mut g.indicator_noise_sd,
                    };
                    map.insert(key, v);
                }
            }
            "generator" => {
                for l in &s.lines {
                    let (lhs, rhs, _) = split_assignment(l)?;
                    match lhs.trim() {
                        "n" => g.n = number(rhs, l)? as usize,
                        "seed" => g.seed = number(rhs, l)? as u64,
                        "loading" => default_loading = Some(number(rhs, l)?),
                        "indicator_noise" => default_noise = Some(number(rhs, l)?),
                        "mode" => {
                            g.output_mode = match rhs.trim() {
                                "continuous" => OutputMode::Continuous,
                                "likert7" => OutputMode::Likert7,
                                other => {
                                    return Err(Error::Syntax {
                                        line: l.line,
                                        column: l.column,
                                        message: format!("unknown mode `{other}`"),
                                    })
                                }
                            }
                        }
                        other => {
                            return Err(Error::Syntax {
                                line: l.line,
                                column: l.column,
                                message: format!("unknown generator key `{other}`"),
                            })
                        }
                    }
                }
            }
            _ => {}
        }
    }
    for ind in g.spec.all_indicators() {
        if let Some(l) = default_loading {
            g.true_loadings.entry(ind.to_string()).or_insert(l);
        }
        if let Some(s) = default_noise {
            g.indicator_noise_sd.entry(ind.to_string()).or_insert(s);
        }
    }
    g.check()?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::parse_model_spec;

    fn chain() -> ModelSpec {
        parse_model_spec(
            "plsspec 1\n[constructs]\nA = a1, a2\nB = b1, b2\nC = c1, c2\n[edges]\nA -> B\nB -> C\n",
        )
        .unwrap()
    }

    #[test]
    fn product_rule_on_a_chain() {
        let g = GeneratorSpec::new(chain(), &[("A", "B", 0.7), ("B", "C", 0.5)], 10, 0).unwrap();
        let imp = implied_covariance(&g).unwrap();
        assert!((imp.latent_corr("A", "C").unwrap() - 0.35).abs() < 1e-12);
    }

    #[test]
    fn single_edge_with_explicit_noise() {
        let spec = parse_model_spec("plsspec 1\n[constructs]\nA = a1\nB = b1\n[edges]\nA -> B\n").unwrap();
        let g = GeneratorSpec::new(spec, &[("A", "B", 0.6)], 10, 0)
            .unwrap()
            .with_structural_noise("B", 0.5);
        let imp = implied_covariance(&g).unwrap();
        let expected = 0.6 / (0.36f64 + 0.25).sqrt();
        assert!((imp.latent_corr("A", "B").unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn overexplained_latent_is_rejected() {
        let spec = parse_model_spec(
            "plsspec 1\n[constructs]\nA = a1\nB = b1\nC = c1\n[edges]\nA -> C\nB -> C\n",
        )
        .unwrap();
        let err = GeneratorSpec::new(spec, &[("A", "C", 0.9), ("B", "C", 0.9)], 10, 0).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite(_)));
    }

    #[test]
    fn likert_cells_are_on_scale() {
        let g = GeneratorSpec::new(chain(), &[("A", "B", 0.7), ("B", "C", 0.5)], 300, 9)
            .unwrap()
            .with_mode(OutputMode::Likert7);
        let ds = generate(&g).unwrap();
        assert!(ds
            .values()
            .iter()
            .all(|v| (1.0..=7.0).contains(v) && v.fract() == 0.0));
    }

    #[test]
    fn same_seed_same_bytes() {
        let g = GeneratorSpec::new(chain(), &[("A", "B", 0.7), ("B", "C", 0.5)], 50, 4).unwrap();
        assert_eq!(generate(&g).unwrap(), generate(&g).unwrap());
    }

    #[test]
    fn parses_generator_spec() {
        let text = "plsspec 1\n[constructs]\nA = a1, a2\nB = b1, b2\n[edges]\nA -> B\n\
                    [paths]\nA -> B = 0.6\n[loadings]\na1 = 0.9\n[generator]\nn = 40\nseed = 3\nmode = continuous\nloading = 0.7\n";
        let g = parse_generator_spec(text).unwrap();
        assert_eq!(g.n, 40);
        assert_eq!(g.true_loadings["a1"], 0.9);
        assert_eq!(g.true_loadings["b2"], 0.7);
        assert_eq!(g.output_mode, OutputMode::Continuous);
        assert_eq!(g.true_paths[&Edge::new("A", "B")], 0.6);
    }

    #[test]
    fn generator_spec_needs_every_path() {
        let text = "plsspec 1\n[constructs]\nA = a1\nB = b1\n[edges]\nA -> B\n[generator]\nn = 10\n";
        assert!(parse_generator_spec(text).is_err());
    }
}
