//! `converge`: sup-norm error of Cesaro means of negative order against
//! the oscillation hypotheses, one row per `(alpha, n)`.

use rayon::prelude::*;
use serde::Serialize;
use vilenkin_core::oscillation::{theorem1_condition, theorem2_series};
use vilenkin_core::{CesaroRoute, SeriesReport, StepFunction, VilenkinTransform};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{finite, number, Table};
use crate::report::{RunReport, SuiteResult};

pub const COLUMNS: &[&str] = &[
    "family",
    "params",
    "radix",
    "alpha",
    "n",
    "k",
    "scale_point",
    "sup_error",
    "theorem2_partial",
    "theorem1_condition",
    "hypothesis",
    "conclusion",
    "verdict",
];

/// Per-`alpha` convergence diagnosis.
#[derive(Debug, Clone, Serialize)]
pub struct Trend {
    pub alpha: f64,
    /// `(n, sup_error)` at the scale points `n = M_k`, in increasing `n`.
    pub scale_errors: Vec<(usize, Option<f64>)>,
    pub first_error: Option<f64>,
    pub final_error: Option<f64>,
    /// Scale points at the end over which the error never increased.
    pub trailing_checked: usize,
    pub trailing_non_increasing: bool,
    pub final_over_first_ok: bool,
    /// The oscillation series converges geometrically over the stored scales.
    pub hypothesis: bool,
    /// The sup error decays (trend thresholds met).
    pub conclusion: bool,
    pub theorem2_terms: Vec<f64>,
}

impl Trend {
    pub fn verdict(&self) -> &'static str {
        match (self.hypothesis, self.conclusion) {
            (true, true) => "converges_as_predicted",
            (true, false) => "prediction_violated",
            (false, true) => "converges_without_hypothesis",
            (false, false) => "no_prediction",
        }
    }
}

struct Row {
    alpha: f64,
    n: usize,
    k: usize,
    sup_error: f64,
    theorem1: Option<f64>,
}

pub fn run(config: &ExperimentConfig) -> Result<(RunReport, Table), CliError> {
    let ns = config.ns.clone();
    let f = config.function()?;
    let orders = config.file.n_schedule.orders(&ns)?;
    let t = VilenkinTransform::new(ns.clone());
    let top = ns.resolution();

    let items: Vec<(f64, usize)> = config
        .alphas()
        .iter()
        .flat_map(|&a| orders.iter().map(move |&n| (a, n)))
        .collect();
    let rows = items
        .par_iter()
        .map(|&(alpha, n)| -> Result<Row, CliError> {
            let mean = t.cesaro_mean(&f, n, alpha, CesaroRoute::Coefficients)?;
            let k = ns.top_position(n).expect("n >= 1");
            let theorem1 = if k < top {
                Some(theorem1_condition(&f, k, alpha)?)
            } else {
                None
            };
            Ok(Row {
                alpha,
                n,
                k,
                sup_error: sup_error(&mean, &f)?,
                theorem1,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let series: Vec<SeriesReport> = config
        .alphas()
        .iter()
        .map(|&a| theorem2_series(&f, a, top))
        .collect::<Result<_, _>>()?;

    let mut report = RunReport::new("converge", config);
    let mut trends = Vec::new();
    for (&alpha, s) in config.alphas().iter().zip(&series) {
        let own: Vec<&Row> = rows.iter().filter(|r| r.alpha == alpha).collect();
        trends.push(trend(config, alpha, &own, s));
    }

    let family = family_name(config);
    let params = config.file.function.label();
    let mut table = Table::new(COLUMNS);
    for r in &rows {
        let ti = config
            .alphas()
            .iter()
            .position(|&a| a == r.alpha)
            .expect("alpha listed");
        let trend = &trends[ti];
        let partial = if r.k == 0 {
            0.0
        } else {
            series[ti].partial_sums[r.k - 1]
        };
        table.push(vec![
            family.clone(),
            params.clone(),
            ns.radix().label(),
            number(r.alpha),
            r.n.to_string(),
            r.k.to_string(),
            (ns.scale(r.k) == r.n).to_string(),
            number(r.sup_error),
            number(partial),
            r.theorem1.map(number).unwrap_or_default(),
            trend.hypothesis.to_string(),
            trend.conclusion.to_string(),
            trend.verdict().to_string(),
        ]);
    }

    let mut suite = SuiteResult::new("convergence");
    for tr in &trends {
        suite.metric(&format!("final_over_first[alpha={}]", tr.alpha), ratio(tr));
        if tr.hypothesis {
            suite.require(
                &format!(
                    "sup error decays at alpha = {} as the hypothesis predicts",
                    tr.alpha
                ),
                tr.conclusion,
            );
        }
    }
    report.push(suite);
    report.summary("family", &family);
    report.summary("params", &params);
    report.summary("trends", &trends);
    report.summary("orders", &orders);
    Ok((report, table))
}

fn ratio(t: &Trend) -> f64 {
    match (t.first_error, t.final_error) {
        (Some(a), Some(b)) if a > 0.0 => b / a,
        (Some(_), Some(0.0)) => 0.0,
        _ => f64::NAN,
    }
}

fn trend(config: &ExperimentConfig, alpha: f64, rows: &[&Row], series: &SeriesReport) -> Trend {
    let ns = &config.ns;
    let th = config.thresholds();
    let points: Vec<(usize, f64)> = rows
        .iter()
        .filter(|r| r.n > 1 && ns.scale(r.k) == r.n)
        .map(|r| (r.n, r.sup_error))
        .collect();
    let errors: Vec<f64> = points.iter().map(|p| p.1).collect();
    let first = errors.first().copied();
    let last = errors.last().copied();
    let window = th.converge_trailing.min(errors.len());
    let tail = &errors[errors.len() - window..];
    let trailing_non_increasing = tail.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let final_over_first_ok = match (first, last) {
        (Some(a), Some(b)) => b <= th.converge_ratio * a || b <= 1e-12,
        _ => false,
    };
    let conclusion = errors.len() >= 2 && trailing_non_increasing && final_over_first_ok;
    let hypothesis = series.convergent || series.terms.iter().all(|&t| t == 0.0);
    Trend {
        alpha,
        scale_errors: points.iter().map(|&(n, e)| (n, finite(e))).collect(),
        first_error: first.and_then(finite),
        final_error: last.and_then(finite),
        trailing_checked: window,
        trailing_non_increasing,
        final_over_first_ok,
        hypothesis,
        conclusion,
        theorem2_terms: series.terms.clone(),
    }
}

fn sup_error(mean: &StepFunction, f: &StepFunction) -> Result<f64, CliError> {
    let res = mean.resolution().max(f.resolution());
    Ok(mean.lift(res)?.sup_distance(&f.lift(res)?)?)
}

/// The `family` tag of the configured function spec.
pub fn family_name(config: &ExperimentConfig) -> String {
    serde_json::to_value(&config.file.function)
        .ok()
        .and_then(|v| v.get("family").and_then(|f| f.as_str()).map(str::to_string))
        .unwrap_or_else(|| "unknown".into())
}
