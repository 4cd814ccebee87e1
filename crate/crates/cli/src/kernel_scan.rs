//! `kernel-scan`: ratio scans for the kernel bounds whose constants are
//! not known in closed form, with half-range stability checks.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use vilenkin_core::{Kernels, NumberSystem, Stability, StepFunction};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{finite, number, Table};
use crate::report::{RunReport, SuiteResult};

pub const COLUMNS: &[&str] = &[
    "radix_spec",
    "n",
    "alpha",
    "scan_kind",
    "scale",
    "sup_ratio",
    "argmax_cell_index",
];

/// Orders at most this large form the reference window of the
/// random-coefficient Dirichlet scan.
pub const COMBINATION_REFERENCE_N: usize = 16;

/// Scales this close to the resolution of the test function are left out
/// of the smoothing scan.
pub const SMOOTHING_MARGIN: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSummary {
    pub radix: String,
    pub scan_kind: String,
    pub alpha: Option<f64>,
    pub points: usize,
    /// Largest ratio seen: the empirical constant.
    pub empirical_constant: Option<f64>,
    pub lower_max: Option<f64>,
    pub upper_max: Option<f64>,
    pub all_finite: bool,
    pub stable: bool,
}

struct Point {
    n: usize,
    alpha: Option<f64>,
    kind: &'static str,
    scale: Option<usize>,
    ratio: f64,
    argmax: Option<usize>,
}

pub fn run(config: &ExperimentConfig) -> Result<(RunReport, Table), CliError> {
    let mut report = RunReport::new("kernel-scan", config);
    let mut table = Table::new(COLUMNS);
    let mut summaries = Vec::new();
    let f = config.function()?;
    let systems: Vec<Arc<NumberSystem>> = std::iter::once(config.ns.clone())
        .chain(config.compare.iter().cloned())
        .collect();
    let factor = config.thresholds().stability_factor;
    let mut stability = SuiteResult::new("bound_stability");
    let mut combination = SuiteResult::new("dirichlet_combination");

    for ns in &systems {
        let label = ns.radix().label();
        let kernels = Kernels::new(ns.clone());
        let mut points = Vec::new();
        for &alpha in config.alphas() {
            points.extend(majorant_points(config, &kernels, alpha)?);
            points.extend(coset_points(config, &kernels, alpha)?);
            // the smoothing scan needs the test function on this group
            if ns.radix() == config.ns.radix() {
                points.extend(smoothing_points(&kernels, &f, alpha)?);
            }
        }
        points.extend(combination_points(config, &kernels)?);

        for p in &points {
            table.push(vec![
                label.clone(),
                p.n.to_string(),
                p.alpha.map(number).unwrap_or_default(),
                p.kind.to_string(),
                p.scale.map(|k| k.to_string()).unwrap_or_default(),
                number(p.ratio),
                p.argmax.map(|c| c.to_string()).unwrap_or_default(),
            ]);
        }

        let mut groups: Vec<(&'static str, Option<f64>)> = Vec::new();
        for p in &points {
            if !groups.iter().any(|g| g.0 == p.kind && g.1 == p.alpha) {
                groups.push((p.kind, p.alpha));
            }
        }
        for (kind, alpha) in groups {
            let pts: Vec<(usize, f64)> = points
                .iter()
                .filter(|p| p.kind == kind && p.alpha == alpha)
                .map(|p| (p.n, p.ratio))
                .collect();
            let summary = summarize(&label, kind, alpha, &pts, factor);
            let name = format!(
                "{kind} on {label}{}",
                alpha
                    .map(|a| format!(" at alpha = {a}"))
                    .unwrap_or_default()
            );
            if kind == "lemma4" {
                let reference = pts
                    .iter()
                    .filter(|p| p.0 <= COMBINATION_REFERENCE_N)
                    .map(|p| p.1)
                    .fold(0.0f64, f64::max);
                let overall = pts.iter().map(|p| p.1).fold(0.0f64, f64::max);
                combination.metric(&format!("small_n_max[{label}]"), reference);
                combination.metric(&format!("overall_max[{label}]"), overall);
                combination.require(&format!("{name}: finite"), summary.all_finite);
                let limit = config.thresholds().combination_factor * reference;
                combination.residual(&name, overall, limit);
            } else {
                stability.metric(&format!("upper_over_lower[{name}]"), ratio(&summary));
                stability.require(&format!("{name}: stable"), summary.stable);
            }
            summaries.push(summary);
        }
        // both scans estimate the same c(alpha), so their maxima should be comparable
        for &alpha in config.alphas() {
            let max_of = |kind: &str| {
                points
                    .iter()
                    .filter(|p| p.kind == kind && p.alpha == Some(alpha))
                    .map(|p| p.ratio)
                    .fold(f64::NAN, f64::max)
            };
            stability.metric(
                &format!("coset_over_majorant[{label},alpha={alpha}]"),
                max_of("lemma3") / max_of("lemma2"),
            );
        }
    }

    report.push(stability);
    report.push(combination);
    report.summary("scans", &summaries);
    report.summary("stability_factor", factor);
    Ok((report, table))
}

fn ratio(s: &ScanSummary) -> f64 {
    match (s.lower_max, s.upper_max) {
        (Some(l), Some(u)) if l > 0.0 => u / l,
        _ => f64::NAN,
    }
}

fn summarize(
    radix: &str,
    kind: &str,
    alpha: Option<f64>,
    pts: &[(usize, f64)],
    factor: f64,
) -> ScanSummary {
    let st = Stability::of(pts);
    let constant = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    ScanSummary {
        radix: radix.to_string(),
        scan_kind: kind.to_string(),
        alpha,
        points: pts.len(),
        empirical_constant: finite(constant),
        lower_max: finite(st.lower_max),
        upper_max: finite(st.upper_max),
        all_finite: st.all_finite,
        stable: st.holds(factor),
    }
}

fn max_order(config: &ExperimentConfig, ns: &NumberSystem) -> usize {
    config.limits().max_order.min(ns.size())
}

/// Kernel against the sum of scaled `D_{M_l}` majorant, every `n` up to the cap.
fn majorant_points(
    config: &ExperimentConfig,
    k: &Kernels,
    alpha: f64,
) -> Result<Vec<Point>, CliError> {
    let orders: Vec<usize> = (1..=max_order(config, k.number_system())).collect();
    Ok(k.kernel_majorant_scan(alpha, &orders)?
        .into_iter()
        .map(|r| Point {
            n: r.n,
            alpha: Some(alpha),
            kind: "lemma2",
            scale: None,
            ratio: r.sup_ratio,
            argmax: Some(r.argmax_cell),
        })
        .collect())
}

/// Kernel at the coset representatives of scale `k`, for `M_k <= n < M_{k+1}`.
fn coset_points(
    config: &ExperimentConfig,
    k: &Kernels,
    alpha: f64,
) -> Result<Vec<Point>, CliError> {
    let ns = k.number_system();
    let cap = max_order(config, ns);
    let mut out = Vec::new();
    for scale in 1..=ns.resolution() {
        let lo = ns.scale(scale);
        let hi = if scale < ns.resolution() {
            ns.scale(scale + 1) - 1
        } else {
            ns.size()
        };
        if lo > cap {
            break;
        }
        let orders: Vec<usize> = (lo..=hi.min(cap)).collect();
        out.extend(
            k.coset_kernel_scan(alpha, scale, &orders)?
                .into_iter()
                .map(|r| Point {
                    n: r.n,
                    alpha: Some(alpha),
                    kind: "lemma3",
                    scale: Some(scale),
                    ratio: r.sup_ratio,
                    argmax: Some(r.argmax_cell),
                }),
        );
    }
    Ok(out)
}

/// Random `+-1` coefficients: max ratio over the draws at every `n`.
fn combination_points(config: &ExperimentConfig, k: &Kernels) -> Result<Vec<Point>, CliError> {
    let ns = k.number_system();
    let max_n = config.limits().combination_max_n.min(ns.size());
    let draws = config.limits().combination_draws.max(1);
    let seed = config.seed;
    let points = (1..=max_n)
        .into_par_iter()
        .map(|n| -> Result<Point, CliError> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(n as u64);
            let mut best = f64::NEG_INFINITY;
            for _ in 0..draws {
                let a: Vec<f64> = (0..n)
                    .map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 })
                    .collect();
                best = best.max(k.dirichlet_combination_ratio(&a)?);
            }
            Ok(Point {
                n,
                alpha: None,
                kind: "lemma4",
                scale: None,
                ratio: best,
                argmax: None,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(points)
}

/// Low-frequency smoothing estimate at `n = M_k` for the scales
/// `1 <= k <= R - SMOOTHING_MARGIN`, `R` the resolution of `f`. Near `R` the
/// stored function has lost the oscillation of its finer digits, so
/// `omega(f, 1/M_k)` shrinks faster than the smoothing term and the ratio
/// reflects the truncation instead of the bound.
fn smoothing_points(k: &Kernels, f: &StepFunction, alpha: f64) -> Result<Vec<Point>, CliError> {
    (1..=f.resolution().saturating_sub(SMOOTHING_MARGIN))
        .map(|scale| {
            let n = k.number_system().scale(scale);
            let r = k.smoothing_ratio(f, n, scale, alpha)?;
            Ok(Point {
                n,
                alpha: Some(alpha),
                kind: "lemma5",
                scale: Some(scale),
                ratio: r.ratio,
                argmax: None,
            })
        })
        .collect()
}
