//! Acceptance criteria, each driven through the same entry point as the
//! binary. Prints one PASS/FAIL line per criterion, then asserts.
//!
//! Runs without the libtest harness so the lines are never captured.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde_json::Value;
use tempfile::TempDir;
use vilenkin_cli::{execute, Command, Overrides, RunReport};
use vilenkin_core::families::{character, digit_indicator};
use vilenkin_core::oscillation::{corollary_series, theorem1_condition};
use vilenkin_core::{Complex64, NumberSystem, RadixSequence, StepFunction, YoungFunction};

const WALSH_64: &str = r#""radix": {"constant": 2, "length": 6}"#;
const MIXED_48: &str = r#""radix": [2, 3, 4, 2]"#;

struct Outcome {
    id: usize,
    title: &'static str,
    passed: bool,
    detail: String,
}

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().expect("temp dir"),
        }
    }

    fn config(&self, name: &str, body: &str) -> PathBuf {
        let path = self.dir.path().join(format!("{name}.json"));
        std::fs::write(&path, format!("{{\"schema_version\": 1, {body}}}")).expect("write config");
        path
    }

    fn out(&self, name: &str) -> PathBuf {
        self.dir.path().join("out").join(name)
    }

    /// Runs `command` and returns the report with its wall time.
    fn run(&self, command: Command, name: &str, body: &str) -> (RunReport, Duration) {
        let config = self.config(name, body);
        let start = Instant::now();
        let report = execute(command, &config, &self.out(name), &Overrides::default())
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        (report, start.elapsed())
    }
}

fn suite_residual(report: &RunReport, name: &str) -> f64 {
    report
        .suites
        .iter()
        .find(|s| s.name == name)
        .and_then(|s| s.max_residual)
        .unwrap_or(f64::INFINITY)
}

fn suites_pass(report: &RunReport, names: &[&str]) -> bool {
    names
        .iter()
        .all(|n| report.suites.iter().any(|s| s.name == *n && s.passed))
}

fn failures(report: &RunReport) -> String {
    report
        .suites
        .iter()
        .filter_map(|s| s.failure.as_ref().map(|f| format!("{}: {f}", s.name)))
        .map(|f| format!(" ({f})"))
        .collect::<Vec<_>>()
        .join("")
}

fn exact_identities(ws: &Workspace) -> Outcome {
    let suites = r#""suites": ["recursions", "dirichlet"]"#;
    let mut passed = true;
    let mut detail = Vec::new();
    for (name, radix) in [
        ("identities_walsh", WALSH_64),
        ("identities_mixed", MIXED_48),
    ] {
        let (r, t) = ws.run(Command::Verify, name, &format!("{radix}, {suites}"));
        let worst = suite_residual(&r, "recursions").max(suite_residual(&r, "dirichlet"));
        passed &= r.passed && worst <= 1e-9 && t <= Duration::from_secs(60);
        detail.push(format!(
            "{}: max residual {worst:.2e} in {:.2}s{}",
            r.radix_label,
            t.as_secs_f64(),
            failures(&r)
        ));
    }
    Outcome {
        id: 1,
        title: "exact identities of the Dirichlet kernel recursions and product formula",
        passed,
        detail: detail.join(", "),
    }
}

fn decomposition(ws: &Workspace) -> Outcome {
    let body = r#""suites": ["lemma1"], "alphas": [0.25, 0.5, 0.75]"#;
    let mut passed = true;
    let mut detail = Vec::new();
    for (name, radix) in [("lemma1_walsh", WALSH_64), ("lemma1_mixed", MIXED_48)] {
        let (r, _) = ws.run(Command::Verify, name, &format!("{radix}, {body}"));
        let worst = suite_residual(&r, "lemma1");
        let max_n = r.suites[0].metrics["max_n"].unwrap_or(0.0) as usize;
        passed &= r.passed && worst <= 1e-9 && max_n == r.cells;
        detail.push(format!(
            "{}: max residual {worst:.2e} over n <= {max_n}",
            r.radix_label
        ));
    }
    Outcome {
        id: 2,
        title: "kernel decomposition is exact for every n <= M_N",
        passed,
        detail: detail.join(", "),
    }
}

fn dirichlet_basics(ws: &Workspace) -> Outcome {
    let body = r#""suites": ["dirichlet"]"#;
    let mut passed = true;
    let mut detail = Vec::new();
    for (name, radix) in [("dirichlet_walsh", WALSH_64), ("dirichlet_mixed", MIXED_48)] {
        let (r, _) = ws.run(Command::Verify, name, &format!("{radix}, {body}"));
        passed &= suites_pass(&r, &["dirichlet"]);
        detail.push(format!(
            "{}: {} checks{}",
            r.radix_label,
            r.suites[0].checks,
            failures(&r)
        ));
    }
    // the same facts straight from the core types
    let ns = std::sync::Arc::new(
        NumberSystem::new(RadixSequence::new(vec![2, 3, 4, 2]).unwrap()).unwrap(),
    );
    let k = vilenkin_core::Kernels::new(ns.clone());
    for level in 0..=ns.resolution() {
        let mk = ns.scale(level);
        let d = k
            .dirichlet(mk, vilenkin_core::DirichletStrategy::Naive)
            .unwrap();
        let indicator = StepFunction::from_fn(ns.clone(), ns.resolution(), |x| {
            Complex64::new(if x % mk == 0 { mk as f64 } else { 0.0 }, 0.0)
        });
        passed &= d.lift_full().sup_distance(&indicator).unwrap() <= 1e-9;
    }
    for n in 1..=ns.size() {
        let d = k
            .dirichlet(n, vilenkin_core::DirichletStrategy::Naive)
            .unwrap();
        passed &= (d.average() - 1.0).norm() <= 1e-10;
    }
    Outcome {
        id: 3,
        title: "D_(M_k) = M_k 1_(I_k) and every D_n has mean 1",
        passed,
        detail: detail.join(", "),
    }
}

fn orthonormality(ws: &Workspace) -> Outcome {
    let body = r#""radix": {"constant": 2, "length": 8}, "suites": ["orthonormality", "transform_oracle"],
                  "limits": {"gram_cells": 256, "random_functions": 50}"#;
    let (r, _) = ws.run(Command::Verify, "orthonormality", body);
    let gram = suite_residual(&r, "orthonormality");
    let cells = r.suites[0].metrics["gram_cells"].unwrap_or(0.0);
    let oracle = &r.suites[1];
    Outcome {
        id: 4,
        title: "Gram matrix at M_N = 256 and Parseval on 50 random functions",
        passed: r.passed && cells == 256.0 && gram <= 1e-10 && oracle.checks >= 150,
        detail: format!(
            "Gram deviation {gram:.2e} on {cells} cells, oracle max {:.2e} over {} checks{}",
            suite_residual(&r, "transform_oracle"),
            oracle.checks,
            failures(&r)
        ),
    }
}

fn binomials(ws: &Workspace) -> Outcome {
    let body = format!(r#"{WALSH_64}, "suites": ["binomials"], "limits": {{"binomial_n": 10000}}"#);
    let (r, _) = ws.run(Command::Verify, "binomials", &body);
    let m = &r.suites[0].metrics;
    let gaps = [m["doubling_gap[alpha=-0.5]"], m["doubling_gap[alpha=0.5]"]];
    Outcome {
        id: 5,
        title: "binomial identities to n = 10^4 and the doubling ratio",
        passed: r.passed && gaps.iter().all(|g| g.is_some_and(|g| g <= 0.01)),
        detail: format!("doubling gaps {gaps:?}{}", failures(&r)),
    }
}

fn routes(ws: &Workspace) -> Outcome {
    let mut passed = true;
    let mut detail = Vec::new();
    for (name, radix) in [("routes_walsh", WALSH_64), ("routes_mixed", MIXED_48)] {
        let body = format!(
            r#"{radix}, "suites": ["routes"], "alphas": [0.25, 0.5, 0.75], "limits": {{"route_max_n": 64}}"#
        );
        let (r, _) = ws.run(Command::Verify, name, &body);
        passed &= r.passed;
        detail.push(format!(
            "{}: max {:.2e}{}",
            r.radix_label,
            suite_residual(&r, "routes"),
            failures(&r)
        ));
    }
    Outcome {
        id: 6,
        title: "three Cesaro mean routes agree within 1e-9 n for n <= 64",
        passed,
        detail: detail.join(", "),
    }
}

fn bound_stability(ws: &Workspace) -> Outcome {
    let body = r#""radix": {"constant": 2, "length": 8}, "compare_radices": [[2, 3, 4, 2]],
                  "alphas": [0.25, 0.5, 0.75], "function": {"family": "lacunary", "decay": 1.0},
                  "limits": {"max_order": 256, "combination_max_n": 256, "combination_draws": 100}"#;
    let (r, _) = ws.run(Command::KernelScan, "kernel_scan", body);
    let scans = r.summary["scans"].as_array().cloned().unwrap_or_default();
    let kinds = ["lemma2", "lemma3", "lemma4", "lemma5"];
    let covered = kinds
        .iter()
        .all(|k| scans.iter().any(|s| s["scan_kind"] == Value::from(*k)));
    let worst = scans
        .iter()
        .filter(|s| s["scan_kind"] != Value::from("lemma4"))
        .filter_map(|s| Some(s["upper_max"].as_f64()? / s["lower_max"].as_f64()?))
        .fold(0.0, f64::max);
    Outcome {
        id: 7,
        title: "bound ratios finite and stable over the n-range; random Dirichlet sums within 3x",
        passed: r.passed && covered && scans.iter().all(|s| s["all_finite"] == Value::Bool(true)),
        detail: format!(
            "{} scans, worst upper/lower {worst:.3}{}",
            scans.len(),
            failures(&r)
        ),
    }
}

fn convergence(ws: &Workspace) -> Outcome {
    let body = r#""radix": {"constant": 2, "length": 10}, "alphas": [0.5],
                  "function": {"family": "lacunary", "decay": 1.0}"#;
    let (r, t) = ws.run(Command::Converge, "converge", body);
    let csv =
        std::fs::read_to_string(ws.out("converge").join("converge.csv")).expect("converge.csv");
    let errors: Vec<(usize, f64)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[5].parse().unwrap(), c[8].parse().unwrap())
        })
        .collect();
    let at = |n: usize| errors.iter().find(|e| e.0 == n).map_or(f64::NAN, |e| e.1);
    let scale_errors: Vec<f64> = (1..=10).map(|k| at(1 << k)).collect();
    let last_four = &scale_errors[scale_errors.len() - 4..];
    let non_increasing = last_four.windows(2).all(|w| w[1] <= w[0]);
    let terms: Vec<f64> = r.summary["trends"][0]["theorem2_terms"]
        .as_array()
        .map(|a| a.iter().filter_map(Value::as_f64).collect())
        .unwrap_or_default();
    let increments_decreasing = !terms.is_empty() && terms.windows(2).all(|w| w[1] <= w[0]);
    let (e2, e9) = (at(4), at(512));
    Outcome {
        id: 8,
        title: "lacunary f converges at alpha = 0.5 on the Walsh group with N = 10",
        passed: r.passed
            && increments_decreasing
            && e9 <= 0.25 * e2
            && non_increasing
            && t <= Duration::from_secs(300),
        detail: format!(
            "sup_error {e2:.4} at M_2, {e9:.4} at M_9, last four {last_four:.4?}, {:.1}s",
            t.as_secs_f64()
        ),
    }
}

fn hypothesis_evaluators() -> Outcome {
    let ns = std::sync::Arc::new(
        NumberSystem::new(RadixSequence::new(vec![2, 3, 4, 2, 3]).unwrap()).unwrap(),
    );
    let constant = StepFunction::constant(ns.clone(), ns.resolution(), Complex64::new(1.5, -0.5));
    let coarse = [
        digit_indicator(&ns, 1, 1).unwrap(),
        character(&ns, 1).unwrap(),
    ];
    let mut worst = 0.0f64;
    for alpha in [0.25, 0.5, 0.75] {
        for k in 0..ns.resolution() {
            for f in std::iter::once(&constant).chain(&coarse) {
                worst = worst.max(theorem1_condition(f, k, alpha).unwrap());
            }
        }
    }
    let young = YoungFunction::power(2.0).unwrap();
    let walsh = NumberSystem::new(RadixSequence::walsh(12).unwrap()).unwrap();
    let low = corollary_series(&young, &walsh, 0.25, 12)
        .unwrap()
        .convergent;
    let high = corollary_series(&young, &walsh, 0.75, 12)
        .unwrap()
        .convergent;
    Outcome {
        id: 9,
        title: "sufficient conditions vanish on coarse functions; corollary boundary at 1/p",
        passed: worst == 0.0 && low && !high,
        detail: format!("max condition {worst}, p = 2 converges at 0.25: {low}, at 0.75: {high}"),
    }
}

fn performance(ws: &Workspace) -> Outcome {
    let body = r#""radix": {"constant": 4, "length": 6}, "limits": {"bench_repeats": 3}"#;
    let (r, _) = ws.run(Command::Bench, "bench", body);
    let timing = &r.summary["timing"];
    let speedup = timing["speedup"].as_f64().unwrap_or(0.0);
    let diff = timing["max_abs_diff"].as_f64().unwrap_or(f64::INFINITY);
    Outcome {
        id: 10,
        title: "fast transform at M_N = 4096 at least 10x faster than the naive oracle",
        passed: r.passed && r.cells == 4096 && speedup >= 10.0 && diff <= 1e-10,
        detail: format!("speedup {speedup:.0}x, max difference {diff:.2e}"),
    }
}

fn read_dir(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .expect("output dir")
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn reproducibility(ws: &Workspace) -> Outcome {
    let runs = [
        (Command::Verify, r#""radix": [2, 3, 4, 2], "seed": 11"#),
        (
            Command::Converge,
            r#""radix": [2, 3, 2, 3, 2], "seed": 11, "function": {"family": "random_lipschitz"}"#,
        ),
        (
            Command::KernelScan,
            r#""radix": [2, 3, 4, 2], "seed": 11, "limits": {"max_order": 48, "combination_draws": 20}"#,
        ),
        (
            Command::Oscillation,
            r#""radix": [3, 2, 3, 2], "seed": 11, "function": {"family": "random_lipschitz"}"#,
        ),
    ];
    let mut identical = 0;
    let mut compared = Vec::new();
    for (i, (command, body)) in runs.iter().enumerate() {
        let path = ws.config(&format!("repro_{i}"), body);
        let outputs: Vec<Vec<(String, Vec<u8>)>> = (0..2)
            .map(|round| {
                let out = ws.out(&format!("repro_{i}_{round}"));
                execute(*command, &path, &out, &Overrides::default()).expect("reproducible run");
                read_dir(&out)
            })
            .collect();
        if outputs[0] == outputs[1] && !outputs[0].is_empty() {
            identical += 1;
        }
        compared.extend(outputs[0].iter().map(|f| f.0.clone()));
    }
    Outcome {
        id: 11,
        title: "fixed config and seed give byte-identical CSV/JSON",
        passed: identical == runs.len(),
        detail: format!(
            "{identical}/{} commands identical over {compared:?}",
            runs.len()
        ),
    }
}

fn main() {
    let ws = Workspace::new();
    let outcomes = [
        exact_identities(&ws),
        decomposition(&ws),
        dirichlet_basics(&ws),
        orthonormality(&ws),
        binomials(&ws),
        routes(&ws),
        bound_stability(&ws),
        convergence(&ws),
        hypothesis_evaluators(),
        performance(&ws),
        reproducibility(&ws),
    ];
    for o in &outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("{status} [{:>2}] {}: {}", o.id, o.title, o.detail);
    }
    let failed: Vec<usize> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.id)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
