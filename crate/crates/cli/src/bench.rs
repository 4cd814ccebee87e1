//! `bench`: naive against fast forward transform on a seeded random
//! function at full resolution.

use std::time::Instant;

use serde::Serialize;
use vilenkin_core::families::random_cells;
use vilenkin_core::{CoefficientVector, VilenkinTransform};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::report::{RunReport, SuiteResult};

/// Outputs of the two transforms must agree this closely before timing.
pub const EQUALITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub cells: usize,
    pub repeats: usize,
    pub naive_seconds: Vec<f64>,
    pub fast_seconds: Vec<f64>,
    pub naive_median: f64,
    pub fast_median: f64,
    pub speedup: f64,
    pub max_abs_diff: f64,
    pub min_speedup: f64,
    /// Informational: timing depends on the machine.
    pub meets_min_speedup: bool,
}

pub fn run(config: &ExperimentConfig) -> Result<(RunReport, Timing), CliError> {
    let ns = config.ns.clone();
    let f = random_cells(&ns, ns.resolution(), config.seed)?;
    let t = VilenkinTransform::new(ns.clone());
    let repeats = config.limits().bench_repeats.max(1);

    let naive = t.forward_naive(&f)?;
    let fast = t.forward_fast(&f)?;
    let max_abs_diff = max_diff(&naive, &fast);
    let mut suite = SuiteResult::new("transform_equality");
    suite.residual(
        "naive against fast forward",
        max_abs_diff,
        EQUALITY_TOLERANCE,
    );

    let naive_seconds = time(repeats, || t.forward_naive(&f))?;
    let fast_seconds = time(repeats, || t.forward_fast(&f))?;
    let naive_median = median(&naive_seconds);
    let fast_median = median(&fast_seconds);
    let speedup = naive_median / fast_median.max(f64::MIN_POSITIVE);
    let min_speedup = config.thresholds().min_speedup;
    suite.metric("speedup", speedup);

    let timing = Timing {
        cells: ns.size(),
        repeats,
        naive_seconds,
        fast_seconds,
        naive_median,
        fast_median,
        speedup,
        max_abs_diff,
        min_speedup,
        meets_min_speedup: speedup >= min_speedup,
    };
    let mut report = RunReport::new("bench", config);
    report.push(suite);
    report.summary("timing", &timing);
    Ok((report, timing))
}

fn max_diff(a: &CoefficientVector, b: &CoefficientVector) -> f64 {
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn time<T>(
    repeats: usize,
    mut op: impl FnMut() -> vilenkin_core::Result<T>,
) -> Result<Vec<f64>, CliError> {
    (0..repeats)
        .map(|_| {
            let start = Instant::now();
            std::hint::black_box(op()?);
            Ok(start.elapsed().as_secs_f64())
        })
        .collect()
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let mid = s.len() / 2;
    if s.len().is_multiple_of(2) {
        (s[mid - 1] + s[mid]) / 2.0
    } else {
        s[mid]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
