use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pls_survey::bootstrap::bootstrap;
use pls_survey::classify::{classification_suite, ClassifierKind, FeatureSource};
use pls_survey::config::AnalysisConfig;
use pls_survey::data::{load_dataset_with, LoadOptions, ValidatedSample, LIKERT7};
use pls_survey::mediation::CompareMode;
use pls_survey::pls::estimate;
use pls_survey::predict::pls_predict;
use pls_survey::report::pipeline::mediation_entries;
use pls_survey::report::render::{
    render_bootstrap, render_classification, render_comparison, render_estimate, render_mediation,
    render_predict, render_split_test,
};
use pls_survey::report::{compare_bundles, load_sample, load_spec, render_bundle, run_pipeline, AnalysisBundle, Stage};
use pls_survey::split_test::{split_test, split_test_both};
use pls_survey::synth::{generate, parse_generator_spec};
use pls_survey::{Error, Result};

#[derive(Parser)]
#[command(name = "pls-survey", version, about = "PLS path analysis of survey data")]
struct Cli {
    /// Master seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// TOML analysis config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Admissible value range of the data: `likert7`, `none` or `LOW,HIGH`.
    #[arg(long, global = true, default_value = "likert7")]
    scale: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Args)]
struct Input {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    spec: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Check a dataset against a model spec.
    Validate(Input),
    /// Fit the path model.
    Estimate(Input),
    /// Bootstrap path coefficients and effects.
    Bootstrap {
        #[command(flatten)]
        input: Input,
        /// Number of replicates.
        #[arg(long)]
        replicates: Option<usize>,
    },
    /// Cross-validated indicator prediction against a linear benchmark.
    Predict {
        #[command(flatten)]
        input: Input,
        /// Folds.
        #[arg(long)]
        k: Option<usize>,
        /// Repetitions.
        #[arg(long)]
        r: Option<usize>,
    },
    /// Direct, indirect and total effects with bootstrap significance.
    Mediate {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        replicates: Option<usize>,
    },
    /// Predictive accuracy of each hypothesis by classification.
    Classify {
        #[command(flatten)]
        input: Input,
        /// Comma-separated subset of bayes, logistic, lwl, adaboost_m1, one_r, c45.
        #[arg(long, value_delimiter = ',')]
        classifiers: Option<Vec<String>>,
        #[arg(long)]
        folds: Option<usize>,
        /// Use raw indicators as features instead of latent scores.
        #[arg(long)]
        raw_indicators: bool,
    },
    /// Train on one sample and compare structural errors on another.
    Splittest {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// Spec of the constructs shared by both samples.
        #[arg(long)]
        spec: PathBuf,
        /// Also run the reverse direction.
        #[arg(long)]
        both: bool,
    },
    /// Generate a synthetic dataset from a generator spec.
    Synth {
        #[arg(long)]
        gspec: PathBuf,
        /// Rows; overrides the generator spec.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Compare two analysis bundles.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value = "within")]
        mode: String,
    },
    /// Full pipeline; writes an analysis bundle.
    Run {
        #[command(flatten)]
        input: Input,
        /// Last stage to run: measurement, structural or all.
        #[arg(long, default_value = "all")]
        stage: String,
        /// Model label recorded in the bundle.
        #[arg(long)]
        label: Option<String>,
    },
}

fn parse_scale(s: &str) -> Result<LoadOptions> {
    let scale = match s {
        "likert7" => Some(LIKERT7),
        "none" => None,
        other => {
            let bad = || Error::InvalidArgument(format!("bad --scale `{other}`"));
            let (lo, hi) = other.split_once(',').ok_or_else(bad)?;
            Some((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
        }
    };
    Ok(LoadOptions { scale })
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut o = std::io::stdout().lock();
            o.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_value<T: Serialize>(cli: &Cli, value: &T, text: impl FnOnce(&T) -> String) -> Result<()> {
    let s = match cli.format {
        Format::Text => text(value),
        Format::Structured => serde_json::to_string_pretty(value)? + "\n",
    };
    emit(cli, &s)
}

fn sample(cli: &Cli, input: &Input) -> Result<ValidatedSample> {
    load_sample(&input.data, &input.spec, parse_scale(&cli.scale)?)
}

fn read_bundle(path: &Path) -> Result<AnalysisBundle> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    AnalysisBundle::from_json(&text)
}

fn run(cli: &Cli) -> Result<()> {
    let mut config = match &cli.config {
        Some(p) => AnalysisConfig::load(p)?,
        None => AnalysisConfig::default(),
    };
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    match &cli.command {
        Command::Validate(input) => {
            let s = sample(cli, input)?;
            let info = pls_survey::report::pipeline::sample_info(&s);
            emit_value(cli, &info, |i| {
                let mut t = format!(
                    "rows {}  indicators {}  rejected rows {}\nsubject-to-item ratio {:.2}\nsample {}\n",
                    i.rows, i.indicators, i.rejected_rows, i.adequacy, i.hash
                );
                for w in &i.warnings {
                    t.push_str(&format!("warning: {w}\n"));
                }
                t
            })
        }
        Command::Estimate(input) => {
            let s = sample(cli, input)?;
            let est = estimate(&s, &config.estimation)?;
            emit_value(cli, &est, render_estimate)
        }
        Command::Bootstrap { input, replicates } => {
            if let Some(b) = replicates {
                config.bootstrap.replicates = *b;
            }
            let s = sample(cli, input)?;
            let r = bootstrap(&s, &config.bootstrap_config())?;
            emit_value(cli, &r, render_bootstrap)
        }
        Command::Predict { input, k, r } => {
            if let Some(k) = k {
                config.predict.folds = *k;
            }
            if let Some(r) = r {
                config.predict.repetitions = *r;
            }
            let s = sample(cli, input)?;
            let rep = pls_predict(&s, &config.predict_config())?;
            emit_value(cli, &rep, render_predict)
        }
        Command::Mediate { input, replicates } => {
            if let Some(b) = replicates {
                config.bootstrap.replicates = *b;
            }
            let s = sample(cli, input)?;
            let est = estimate(&s, &config.estimation)?;
            let boot = bootstrap(&s, &config.bootstrap_config())?;
            let entries = mediation_entries(&s.spec, &est, &boot, config.bootstrap.alpha)?;
            emit_value(cli, &entries, |e| render_mediation(e))
        }
        Command::Classify {
            input,
            classifiers,
            folds,
            raw_indicators,
        } => {
            if let Some(list) = classifiers {
                config.classify.classifiers = list
                    .iter()
                    .map(|c| c.trim().parse::<ClassifierKind>())
                    .collect::<Result<_>>()?;
            }
            if let Some(f) = folds {
                config.classify.folds = *f;
            }
            if *raw_indicators {
                config.classify.features = FeatureSource::RawIndicators;
            }
            let s = sample(cli, input)?;
            let est = estimate(&s, &config.estimation)?;
            let reports = classification_suite(&est, &s.dataset, &config.classify.classifiers, &config.classify_config())?;
            emit_value(cli, &reports, |r| render_classification(r))
        }
        Command::Splittest { train, test, spec, both } => {
            let spec = load_spec(spec)?;
            let opts = parse_scale(&cli.scale)?;
            let a = load_dataset_with(train, &spec, opts)?;
            let b = load_dataset_with(test, &spec, opts)?;
            let la = train.display().to_string();
            let lb = test.display().to_string();
            if *both {
                let pair = split_test_both(&a, &b, &spec, &config.estimation, (&la, &lb))?;
                emit_value(cli, &pair, |(f, r)| format!("{}\n{}", render_split_test(f), render_split_test(r)))
            } else {
                let r = split_test(&a, &b, &spec, &config.estimation, (&la, &lb))?;
                emit_value(cli, &r, render_split_test)
            }
        }
        Command::Synth { gspec, n } => {
            let text = std::fs::read_to_string(gspec).map_err(|e| Error::Io(format!("{}: {e}", gspec.display())))?;
            let mut g = parse_generator_spec(&text)?;
            if let Some(n) = n {
                g = g.with_n(*n);
            }
            if let Some(s) = cli.seed {
                g = g.with_seed(s);
            }
            let ds = generate(&g)?;
            let mut buf = Vec::new();
            ds.write_csv(&mut buf)?;
            emit(cli, &String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))?)
        }
        Command::Compare { a, b, mode } => {
            let mode: CompareMode = mode.parse()?;
            let (a, b) = (read_bundle(a)?, read_bundle(b)?);
            let r = compare_bundles(&a, &b, mode, config.mediation.share_flag_points)?;
            emit_value(cli, &r, render_comparison)
        }
        Command::Run { input, stage, label } => {
            let stage: Stage = stage.parse()?;
            let s = sample(cli, input)?;
            let label = label.clone().unwrap_or_else(|| {
                input
                    .spec
                    .file_stem()
                    .map_or_else(|| "model".to_string(), |s| s.to_string_lossy().into_owned())
            });
            let outcome = run_pipeline(&s, &config, stage, &label);
            let text = match cli.format {
                Format::Text => render_bundle(&outcome.bundle),
                Format::Structured => outcome.bundle.to_json()?,
            };
            emit(cli, &text)?;
            match outcome.error {
                Some(e) => {
                    eprintln!("error: {e}");
                    std::process::exit(e.error.exit_code());
                }
                None => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
