use rayon::prelude::*;
use serde::Serialize;

use chiral_blocks::blocks::{conformal_block_dim, expected_block_dim, BlockReport};
use chiral_blocks::linalg::hermitian_min_eigenvalue_f64;
use chiral_blocks::spectra::{default_max_level, eigenlevel_cached, hpp_dim_formula, EigenLevel};
use chiral_blocks::verify::{run_suite, Suite, SuiteSummary};
use chiral_blocks::{Error, Result};

use crate::config::{Format, Mode, RunConfig};

/// Rendered report plus whether every mathematical check passed.
pub struct Outcome {
    pub body: String,
    pub ok: bool,
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("report serialization cannot fail");
    s.push('\n');
    s
}

fn csv(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn max_level(cfg: &RunConfig) -> Result<usize> {
    let n = cfg.max_level.unwrap_or_else(|| default_max_level(cfg.k));
    if n == 0 {
        return Err(Error::Precondition("--max-level must be at least 1".into()));
    }
    Ok(n)
}

/// Levels `1..=N`, computed in parallel and returned in order.
fn levels(k: usize, n: usize) -> Result<Vec<std::sync::Arc<EigenLevel>>> {
    (1..=n).into_par_iter().map(|i| eigenlevel_cached(k, i)).collect()
}

#[derive(Serialize)]
struct SpectrumRow {
    i: usize,
    lambda: u64,
    dim: usize,
    dim_formula: usize,
    formula_match: bool,
    jtilde_square: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    gram_min_eig_f64: Option<f64>,
}

#[derive(Serialize)]
struct SpectrumReport {
    k: usize,
    gram_unit: &'static str,
    levels: Vec<SpectrumRow>,
}

pub fn spectrum(cfg: &RunConfig) -> Result<Outcome> {
    let n = max_level(cfg)?;
    let rows: Vec<SpectrumRow> = levels(cfg.k, n)?
        .iter()
        .map(|level| {
            let formula = hpp_dim_formula(cfg.k, level.i);
            SpectrumRow {
                i: level.i,
                lambda: level.lambda,
                dim: level.dim(),
                dim_formula: formula,
                formula_match: formula == level.dim(),
                // a level is only returned once [J̃]² = −λ has been verified
                jtilde_square: true,
                gram_min_eig_f64: (cfg.mode == Mode::Crosscheck).then(|| hermitian_min_eigenvalue_f64(&level.gram)),
            }
        })
        .collect();
    let ok = rows.iter().all(|r| r.formula_match && r.jtilde_square);
    let body = match cfg.format {
        Format::Json => json(&SpectrumReport { k: cfg.k, gram_unit: "pi^{n/2}", levels: rows }),
        Format::Csv => {
            let mut header = vec!["k", "i", "lambda", "dim", "dim_formula", "formula_match", "jtilde_square"];
            if cfg.mode == Mode::Crosscheck {
                header.push("gram_min_eig_f64");
            }
            let body = rows
                .iter()
                .map(|r| {
                    let mut row = vec![
                        cfg.k.to_string(),
                        r.i.to_string(),
                        r.lambda.to_string(),
                        r.dim.to_string(),
                        r.dim_formula.to_string(),
                        r.formula_match.to_string(),
                        r.jtilde_square.to_string(),
                    ];
                    row.extend(r.gram_min_eig_f64.map(float));
                    row
                })
                .collect();
            csv(&header, body)
        }
    };
    Ok(Outcome { body, ok })
}

#[derive(Serialize)]
struct SplitReport<'a> {
    k: usize,
    levels: Vec<&'a EigenLevel>,
}

pub fn split(cfg: &RunConfig) -> Result<Outcome> {
    let n = max_level(cfg)?;
    let levels = levels(cfg.k, n)?;
    let orthogonal: Vec<bool> = levels.par_iter().map(|l| l.halves_orthogonal()).collect();
    let ok = orthogonal.iter().all(|&o| o) && levels.iter().all(|l| 2 * l.split().chiral_forms.len() == l.dim());
    let body = match cfg.format {
        Format::Json => json(&SplitReport { k: cfg.k, levels: levels.iter().map(|l| l.as_ref()).collect() }),
        Format::Csv => {
            let mut header = vec!["k", "i", "lambda", "dim", "dim_chiral", "dim_antichiral", "orthogonal"];
            if cfg.mode == Mode::Crosscheck {
                header.push("gram_min_eig_f64");
            }
            let rows = levels
                .iter()
                .zip(&orthogonal)
                .map(|(l, o)| {
                    let split = l.split();
                    let mut row = vec![
                        cfg.k.to_string(),
                        l.i.to_string(),
                        l.lambda.to_string(),
                        l.dim().to_string(),
                        split.chiral_forms.len().to_string(),
                        split.antichiral_forms.len().to_string(),
                        o.to_string(),
                    ];
                    if cfg.mode == Mode::Crosscheck {
                        row.push(float(hermitian_min_eigenvalue_f64(&l.gram)));
                    }
                    row
                })
                .collect();
            csv(&header, rows)
        }
    };
    Ok(Outcome { body, ok })
}

pub fn blocks(cfg: &RunConfig) -> Result<Outcome> {
    let (default_n, default_d) = if cfg.k == 0 { (3, 4) } else { (1, 3) };
    let n = cfg.max_level.unwrap_or(default_n);
    let d = cfg.trunc.unwrap_or(default_d);
    let report: BlockReport = conformal_block_dim(cfg.k, cfg.lambda, n, d)?;
    let ok = expected_block_dim(cfg.k, cfg.lambda) == Some(report.dim);
    let body = match cfg.format {
        Format::Json => json(&report),
        Format::Csv => {
            let mut header: Vec<&str> = vec!["k", "lambda", "N", "D", "dim", "unit"];
            header.extend(report.checks.iter().map(|c| c.name.as_str()));
            let mut row = vec![
                report.k.to_string(),
                report.lambda.to_string(),
                report.max_level.to_string(),
                report.trunc.to_string(),
                report.dim.to_string(),
                report.unit.to_string(),
            ];
            row.extend(report.checks.iter().map(|c| c.pass.to_string()));
            csv(&header, vec![row])
        }
    };
    Ok(Outcome { body, ok })
}

#[derive(Serialize)]
struct VerifyReport {
    suites: Vec<SuiteSummary>,
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome> {
    let suites = Suite::parse_selection(cfg.suite.as_deref().unwrap_or("all"))?;
    let trials = cfg.trials.unwrap_or(if cfg.k == 0 { 100 } else { 25 });
    let summaries = suites.into_iter().map(|s| run_suite(s, cfg.k, trials, cfg.seed)).collect::<Result<Vec<_>>>()?;
    let ok = summaries.iter().all(SuiteSummary::all_pass);
    let body = match cfg.format {
        Format::Json => json(&VerifyReport { suites: summaries }),
        Format::Csv => csv(
            &["suite", "k", "seed", "trials", "passed"],
            summaries
                .iter()
                .map(|s| {
                    vec![
                        s.suite.clone(),
                        s.k.to_string(),
                        s.seed.to_string(),
                        s.trials.to_string(),
                        s.passed.to_string(),
                    ]
                })
                .collect(),
        ),
    };
    Ok(Outcome { body, ok })
}
