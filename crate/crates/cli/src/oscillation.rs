//! `oscillation`: per-scale oscillation profile of the test function with
//! the BO and BO_M scores, the Jensen step and the sufficient-condition
//! series.

use serde::Serialize;
use vilenkin_core::families::{
    lacunary_decay_coefficients, lacunary_oscillation_bound, LacunaryCoefficients,
};
use vilenkin_core::oscillation::{
    bo_m_score, corollary_series, jensen_sides, theorem1_condition, theorem2_series,
};
use vilenkin_core::{FunctionSpec, OscillationProfile, SeriesReport};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{number, Table};
use crate::report::{RunReport, SuiteResult};

pub const COLUMNS: &[&str] = &["k", "M_k", "omega_k", "O_k", "nu_k", "theorem2_term"];

/// Slack for inequalities between sums of computed oscillations.
const SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
struct AlphaSeries {
    alpha: f64,
    theorem1: Vec<(usize, f64)>,
    theorem2: SeriesReport,
    corollary: SeriesReport,
}

#[derive(Debug, Clone, Serialize)]
struct JensenRow {
    k: usize,
    lhs: f64,
    rhs: f64,
}

pub fn run(config: &ExperimentConfig) -> Result<(RunReport, Table), CliError> {
    let ns = config.ns.clone();
    let f = config.function()?;
    let top = ns.resolution();
    let young = &config.file.young;
    let profile = OscillationProfile::of(&f)?;
    let bo_m = bo_m_score(&f, young)?;

    let series = config
        .alphas()
        .iter()
        .map(|&alpha| -> Result<AlphaSeries, CliError> {
            let theorem1 = (0..top)
                .map(|k| Ok((k, theorem1_condition(&f, k, alpha)?)))
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(AlphaSeries {
                alpha,
                theorem1,
                theorem2: theorem2_series(&f, alpha, top)?,
                corollary: corollary_series(young, &ns, alpha, top)?,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let jensen = (0..=top)
        .map(|k| {
            let (lhs, rhs) = jensen_sides(&f, young, k)?;
            Ok(JensenRow { k, lhs, rhs })
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    // The CSV term column uses the first configured alpha.
    let first = &series[0];
    let mut table = Table::new(COLUMNS);
    for k in 0..=top {
        let term = if k == 0 {
            String::new()
        } else {
            number(first.theorem2.terms[k - 1])
        };
        table.push(vec![
            k.to_string(),
            ns.scale(k).to_string(),
            number(profile.omega[k]),
            number(profile.big_o[k]),
            number(profile.nu[k]),
            term,
        ]);
    }

    let mut invariants = SuiteResult::new("oscillation_invariants");
    for k in 0..=top {
        invariants.require(
            &format!("omega at scale {k} is at most nu"),
            profile.omega[k] <= profile.nu[k] + SLACK,
        );
        invariants.require(
            &format!("O at scale {k} is at most nu"),
            profile.big_o[k] <= profile.nu[k] + SLACK,
        );
        if k > 0 {
            invariants.require(
                &format!("omega does not grow from scale {} to {k}", k - 1),
                profile.omega[k] <= profile.omega[k - 1] + SLACK,
            );
        }
    }
    invariants.require("top-scale oscillation vanishes", profile.nu[top] == 0.0);
    if let Some(coeffs) = lacunary_coefficients(config) {
        for k in 0..=top {
            let bound = lacunary_oscillation_bound(&coeffs, k);
            invariants.residual(
                &format!("lacunary omega bound at scale {k}"),
                profile.omega[k] - bound,
                SLACK,
            );
        }
    }

    let mut jensen_suite = SuiteResult::new("jensen");
    for row in &jensen {
        jensen_suite.residual(
            &format!("Jensen step at scale {}", row.k),
            row.lhs - row.rhs,
            SLACK,
        );
    }

    let mut report = RunReport::new("oscillation", config);
    report.push(invariants);
    report.push(jensen_suite);
    report.summary("function", config.file.function.label());
    report.summary("young", young);
    report.summary("bo_score", profile.bo_score());
    report.summary("bo_m_score", bo_m);
    report.summary("profile", &profile);
    report.summary("series", &series);
    report.summary("jensen", &jensen);
    Ok((report, table))
}

fn lacunary_coefficients(config: &ExperimentConfig) -> Option<Vec<f64>> {
    match &config.file.function {
        FunctionSpec::Lacunary { coefficients } => Some(match coefficients {
            LacunaryCoefficients::Decay { decay } => {
                lacunary_decay_coefficients(&config.ns, *decay)
            }
            LacunaryCoefficients::Explicit { coeffs } => coeffs.clone(),
        }),
        _ => None,
    }
}
