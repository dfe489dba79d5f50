//! Plain-text tables. Every number printed here is a stored field formatted
//! at 3 decimals (coefficients, statistics) or 2 (percentages).

use std::fmt::Write as _;

use crate::bootstrap::{BootstrapResult, Significance, Verdict};
use crate::classify::ClassificationReport;
use crate::mediation::ComparisonReport;
use crate::pls::PlsEstimate;
use crate::predict::PredictReport;
use crate::psychometrics::{CmbSummary, CmbVerdict, ReliabilityReport, ValidityReport};
use crate::split_test::{SplitTestReport, SplitVerdict};
use crate::structural::StructuralReport;

use super::bundle::{AnalysisBundle, MediationEntry, Section};

pub fn coef(v: f64) -> String {
    format!("{v:.3}")
}

pub fn pct(v: f64) -> String {
    format!("{v:.2}")
}

fn opt(v: Option<f64>, f: fn(f64) -> String) -> String {
    v.map_or_else(|| "n/a".to_string(), f)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Column-aligned table; the first column is left aligned.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (j, c) in r.iter().enumerate() {
            widths[j] = widths[j].max(c.chars().count());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let mut s = String::new();
        for (j, c) in cells.iter().enumerate() {
            if j == 0 {
                let _ = write!(s, "{c:<w$}", w = widths[0]);
            } else {
                let _ = write!(s, "  {c:>w$}", w = widths[j]);
            }
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(header.to_vec(), &mut out);
    let total: usize = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
    out.push_str(&"-".repeat(total));
    out.push('\n');
    for r in rows {
        line(r.iter().map(String::as_str).collect(), &mut out);
    }
    out
}

pub fn render_estimate(est: &PlsEstimate) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "iterations {}  converged {}",
        est.iterations,
        yes_no(est.converged)
    );
    let rows: Vec<Vec<String>> = est
        .paths
        .iter()
        .map(|p| vec![format!("{} -> {}", p.source, p.target), coef(p.value)])
        .collect();
    out.push_str(&table(&["path", "coefficient"], &rows));
    if !est.second_order_weights.is_empty() {
        out.push('\n');
        let rows: Vec<Vec<String>> = est
            .second_order_weights
            .iter()
            .map(|w| vec![format!("{} -> {}", w.construct, w.component), coef(w.value)])
            .collect();
        out.push_str(&table(&["second order", "coefficient"], &rows));
    }
    out.push('\n');
    let mut rows = Vec::new();
    for (j, c) in est.constructs.iter().enumerate() {
        for (k, ind) in est.blocks[j].iter().enumerate() {
            rows.push(vec![c.clone(), ind.clone(), coef(est.loadings[j][k]), coef(est.weights[j][k])]);
        }
    }
    out.push_str(&table(&["construct", "indicator", "loading", "weight"], &rows));
    out
}

pub fn render_reliability(r: &ReliabilityReport) -> String {
    let mut out = String::new();
    let rows: Vec<Vec<String>> = r
        .constructs
        .iter()
        .map(|c| {
            vec![
                c.construct.clone(),
                coef(c.alpha),
                coef(c.cr),
                coef(c.ave),
                yes_no(c.alpha_pass && c.cr_pass && c.ave_pass).to_string(),
            ]
        })
        .collect();
    out.push_str(&table(&["construct", "alpha", "CR", "AVE", "pass"], &rows));
    out.push('\n');
    let rows: Vec<Vec<String>> = r
        .vif
        .iter()
        .map(|v| {
            vec![
                v.construct.clone(),
                v.indicator.clone(),
                opt(v.vif, coef),
                yes_no(v.pass).to_string(),
            ]
        })
        .collect();
    out.push_str(&table(&["construct", "indicator", "VIF", "pass"], &rows));
    out.push('\n');
    let _ = writeln!(out, "KMO {}  pass {}", coef(r.kmo), yes_no(r.kmo_pass));
    let _ = writeln!(
        out,
        "total variance explained {}% over {} components; largest component {}%",
        pct(r.total_variance.cumulative_pct),
        r.total_variance.components,
        opt(r.total_variance.component_pcts.first().copied(), pct)
    );
    let rows: Vec<Vec<String>> = r
        .aic_per_block
        .iter()
        .map(|a| vec![a.construct.clone(), coef(a.value)])
        .collect();
    out.push_str(&table(&["block", "AIC"], &rows));
    let _ = writeln!(out, "model AIC {}", coef(r.aic_total));
    out
}

pub fn render_validity(v: &ValidityReport) -> String {
    let mut out = String::new();
    let fl = &v.fornell_larcker;
    let mut header: Vec<&str> = vec!["Fornell-Larcker"];
    header.extend(fl.constructs.iter().map(String::as_str));
    header.push("pass");
    let rows: Vec<Vec<String>> = fl
        .constructs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut r = vec![c.clone()];
            for j in 0..=i {
                r.push(coef(fl.matrix[i][j]));
            }
            for _ in i + 1..fl.constructs.len() {
                r.push(String::new());
            }
            r.push(yes_no(fl.pass[i]).to_string());
            r
        })
        .collect();
    out.push_str(&table(&header, &rows));
    out.push('\n');
    let rows: Vec<Vec<String>> = v
        .htmt
        .iter()
        .map(|p| vec![format!("{} / {}", p.a, p.b), coef(p.value), yes_no(p.pass).to_string()])
        .collect();
    out.push_str(&table(&["HTMT pair", "ratio", "pass"], &rows));
    out
}

pub fn render_cmb(c: &CmbSummary) -> String {
    let verdict = match c.verdict {
        CmbVerdict::NoConcern => "no concern",
        CmbVerdict::Concern => "concern",
    };
    let rows = vec![
        vec![
            "SRMR".to_string(),
            coef(c.srmr_base),
            opt(c.srmr_marker, coef),
            opt(c.srmr_delta, coef),
        ],
        vec![
            "NFI".to_string(),
            coef(c.nfi_base),
            opt(c.nfi_marker, coef),
            opt(c.nfi_delta, coef),
        ],
    ];
    let mut out = format!("marker {}\n", c.marker);
    out.push_str(&table(&["index", "base", "with marker", "delta"], &rows));
    let _ = writeln!(
        out,
        "total variance {}%; largest single component {}%",
        pct(c.total_variance_pct),
        pct(c.max_single_share_pct)
    );
    let _ = writeln!(out, "common method bias: {verdict}");
    out
}

pub fn render_structural(s: &StructuralReport) -> String {
    let mut out = String::new();
    let rows: Vec<Vec<String>> = s
        .r_square
        .iter()
        .zip(&s.q_square)
        .map(|(r, q)| vec![r.construct.clone(), coef(r.value), coef(q.value)])
        .collect();
    out.push_str(&table(&["construct", "R2", "Q2"], &rows));
    let _ = writeln!(out, "blindfolding omission distance {}", s.omission_distance);
    out.push('\n');
    let rows: Vec<Vec<String>> = s
        .f_square
        .iter()
        .map(|f| vec![format!("{} -> {}", f.source, f.target), coef(f.value), f.band.label().to_string()])
        .collect();
    out.push_str(&table(&["path", "f2", "effect"], &rows));
    out.push('\n');
    let _ = writeln!(out, "SRMR {}  pass {}", coef(s.srmr), yes_no(s.srmr_pass));
    let _ = writeln!(out, "NFI {}  pass {}", coef(s.nfi), yes_no(s.nfi_pass));
    out
}

pub fn render_bootstrap(b: &BootstrapResult) -> String {
    let mut out = format!(
        "replicates {} used {} failed {} seed {}\n",
        b.replicates, b.used, b.failed_replicates, b.seed
    );
    let rows: Vec<Vec<String>> = b
        .effects
        .iter()
        .map(|e| {
            vec![
                e.label.clone(),
                coef(e.value),
                coef(e.mean),
                coef(e.se),
                opt(e.t, coef),
                opt(e.p, coef),
                coef(e.ci_low),
                coef(e.ci_high),
                match e.verdict {
                    Verdict::Significant => "significant",
                    Verdict::NotSignificant => "not significant",
                    Verdict::Degenerate => "degenerate",
                }
                .to_string(),
            ]
        })
        .collect();
    out.push_str(&table(
        &["effect", "estimate", "mean", "SE", "t", "p", "CI low", "CI high", "verdict"],
        &rows,
    ));
    out
}

pub fn render_predict(p: &PredictReport) -> String {
    let mut out = format!("{}-fold, {} repetitions, seed {}\n", p.folds, p.repetitions, p.seed);
    let rows: Vec<Vec<String>> = p
        .indicators
        .iter()
        .map(|i| {
            vec![
                i.indicator.clone(),
                coef(i.rmse_pls),
                coef(i.rmse_lm),
                opt(i.rmse_decrease_pct, pct),
                coef(i.mae_pls),
                coef(i.mae_lm),
                coef(i.q2_predict_pls),
                coef(i.q2_predict_lm),
            ]
        })
        .collect();
    out.push_str(&table(
        &["indicator", "RMSE PLS", "RMSE LM", "% decrease", "MAE PLS", "MAE LM", "Q2 PLS", "Q2 LM"],
        &rows,
    ));
    out.push('\n');
    let rows: Vec<Vec<String>> = p
        .constructs
        .iter()
        .map(|c| {
            vec![
                c.construct.clone(),
                opt(c.mean_rmse_decrease_pct, pct),
                opt(c.mean_mae_decrease_pct, pct),
            ]
        })
        .collect();
    out.push_str(&table(&["construct", "RMSE % decrease", "MAE % decrease"], &rows));
    if p.skipped_folds > 0 {
        let _ = writeln!(out, "skipped folds {}", p.skipped_folds);
    }
    out
}

fn sig_cell(s: &Option<Significance>) -> String {
    s.as_ref().map_or_else(|| "n/a".to_string(), |s| opt(s.p, coef))
}

pub fn render_mediation(entries: &[MediationEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        let d = &e.decomposition;
        let _ = writeln!(out, "{} -> {}", d.source, d.target);
        let mut rows = Vec::new();
        if d.has_direct_edge {
            rows.push(vec![
                "direct".to_string(),
                coef(d.direct),
                sig_cell(&d.direct_significance),
                String::new(),
            ]);
        }
        let share_of = |i: usize| {
            e.shares
                .as_ref()
                .map_or_else(|| "n/a".to_string(), |s| pct(s.specific_pct[i].pct))
        };
        for (i, s) in d.specific.iter().enumerate() {
            rows.push(vec![s.path.join(" -> "), coef(s.value), sig_cell(&s.significance), share_of(i)]);
        }
        rows.push(vec![
            "total indirect".to_string(),
            coef(d.total_indirect),
            sig_cell(&d.total_indirect_significance),
            e.shares
                .as_ref()
                .map_or_else(|| "n/a".to_string(), |s| pct(s.indirect_pct)),
        ]);
        rows.push(vec![
            "total".to_string(),
            coef(d.total),
            sig_cell(&d.total_significance),
            String::new(),
        ]);
        out.push_str(&table(&["effect", "value", "p", "% of total"], &rows));
        if let Some(c) = &e.class {
            let _ = writeln!(out, "mediation: {}", c.label);
        }
        out.push('\n');
    }
    out
}

pub fn render_classification(reports: &[ClassificationReport]) -> String {
    let mut out = String::new();
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            let m = &r.best_result().metrics;
            vec![
                r.label.clone(),
                r.decile.to_string(),
                r.best.name().to_string(),
                pct(r.best_accuracy_pct),
                opt(m.precision, coef),
                opt(m.recall, coef),
                opt(m.tp_rate, coef),
                opt(m.fp_rate, coef),
                r.band.label().to_string(),
            ]
        })
        .collect();
    out.push_str(&table(
        &["path", "decile", "best", "accuracy %", "precision", "recall", "TP rate", "FP rate", "band"],
        &rows,
    ));
    for r in reports {
        let _ = writeln!(
            out,
            "\n{} (decile {}, threshold {}, {}-fold)",
            r.label,
            r.decile,
            coef(r.threshold),
            r.folds
        );
        let rows: Vec<Vec<String>> = r
            .results
            .iter()
            .map(|c| {
                vec![
                    c.classifier.name().to_string(),
                    coef(c.metrics.accuracy),
                    opt(c.metrics.precision, coef),
                    opt(c.metrics.recall, coef),
                    opt(c.metrics.f_measure, coef),
                    c.counts.tp.to_string(),
                    c.counts.fp.to_string(),
                    c.counts.fn_.to_string(),
                    c.counts.tn.to_string(),
                ]
            })
            .collect();
        out.push_str(&table(
            &["classifier", "accuracy", "precision", "recall", "F", "TP", "FP", "FN", "TN"],
            &rows,
        ));
    }
    out
}

pub fn render_split_test(r: &SplitTestReport) -> String {
    let verdict = |v: SplitVerdict| match v {
        SplitVerdict::Drop => "drop",
        SplitVerdict::Spike => "spike",
        SplitVerdict::Tie => "tie",
    };
    let mut out = format!("train {}  test {}\n", r.train, r.test);
    let rows: Vec<Vec<String>> = r
        .constructs
        .iter()
        .map(|c| {
            vec![
                c.construct.clone(),
                coef(c.mse_train),
                coef(c.mse_test),
                opt(c.mse_difference_pct, pct),
                verdict(c.mse_verdict).to_string(),
                coef(c.rmse_train),
                coef(c.rmse_test),
                opt(c.rmse_difference_pct, pct),
                verdict(c.rmse_verdict).to_string(),
            ]
        })
        .collect();
    out.push_str(&table(
        &[
            "construct", "MSE train", "MSE test", "% diff", "MSE", "RMSE train", "RMSE test", "% diff", "RMSE",
        ],
        &rows,
    ));
    out
}

pub fn render_comparison(c: &ComparisonReport) -> String {
    let delta = match c.mode {
        crate::mediation::CompareMode::Within => "% difference",
        crate::mediation::CompareMode::Between => "change rate %",
    };
    let mut out = format!("A = {}  B = {}\n", c.a, c.b);
    let rows: Vec<Vec<String>> = c
        .metrics
        .iter()
        .map(|m| {
            vec![
                m.metric.clone(),
                coef(m.a),
                coef(m.b),
                opt(m.delta_pct, pct),
                format!("{:?}", m.favors),
            ]
        })
        .collect();
    out.push_str(&table(&["metric", "A", "B", delta, "favors"], &rows));
    if !c.shares.is_empty() {
        out.push('\n');
        let rows: Vec<Vec<String>> = c
            .shares
            .iter()
            .map(|s| {
                vec![
                    s.effect.clone(),
                    pct(s.a_pct),
                    pct(s.b_pct),
                    pct(s.delta_points),
                    if s.flagged { "*" } else { "" }.to_string(),
                ]
            })
            .collect();
        out.push_str(&table(&["share of total effect", "A %", "B %", "points", "flag"], &rows));
    }
    if !c.unmatched.is_empty() {
        let _ = writeln!(out, "\nunmatched: {}", c.unmatched.join(", "));
    }
    out
}

fn section<T>(out: &mut String, title: &str, s: &Section<T>, f: impl Fn(&T) -> String) {
    let _ = writeln!(out, "== {title} ==");
    match s {
        Section::NotRun => out.push_str("(not run)\n"),
        Section::Failed { error } => {
            let _ = writeln!(out, "(failed: {error})");
        }
        Section::Complete { value, .. } => out.push_str(&f(value)),
    }
    out.push('\n');
}

pub fn render_bundle(b: &AnalysisBundle) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}  {}", b.provenance.tool, b.provenance.version, b.schema);
    let _ = writeln!(out, "model {}", b.label);
    let _ = writeln!(
        out,
        "sample {}  rows {}  indicators {}",
        b.sample.hash, b.sample.rows, b.sample.indicators
    );
    let _ = writeln!(out, "config {}  seed {}", b.provenance.config_hash, b.provenance.seed);
    for w in &b.sample.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out.push('\n');
    section(&mut out, "Path model", &b.estimate, render_estimate);
    section(&mut out, "Reliability", &b.reliability, render_reliability);
    section(&mut out, "Discriminant validity", &b.validity, render_validity);
    section(&mut out, "Common method bias", &b.cmb, render_cmb);
    section(&mut out, "Structural model", &b.structural, render_structural);
    section(&mut out, "Bootstrap", &b.bootstrap, render_bootstrap);
    section(&mut out, "PLSpredict", &b.predict, render_predict);
    section(&mut out, "Mediation", &b.mediation, |m| render_mediation(m));
    section(&mut out, "Predictive accuracy", &b.classification, |c| render_classification(c));
    if let Some(f) = &b.failure {
        let _ = writeln!(out, "FAILED at {}: {}", f.stage, f.message);
    }
    out
}
