//! Experiment configuration: JSON file plus command-line and environment
//! overrides.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use vilenkin_core::{FunctionSpec, NumberSystem, RadixSequence, YoungFunction};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Largest `M_N` accepted unless the config or `--max-cells` raises it.
pub const DEFAULT_MAX_CELLS: usize = 1 << 20;

/// A radix sequence as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RadixSpec {
    List(Vec<usize>),
    Constant { constant: usize, length: usize },
    Pattern { pattern: Vec<usize>, length: usize },
}

impl RadixSpec {
    pub fn build(&self) -> Result<RadixSequence, CliError> {
        let r = match self {
            Self::List(v) => RadixSequence::new(v.clone()),
            Self::Constant { constant, length } => RadixSequence::constant(*constant, *length),
            Self::Pattern { pattern, length } => RadixSequence::pattern(pattern, *length),
        };
        r.map_err(|e| CliError::Config(format!("radix: {e}")))
    }
}

/// Which orders `n` an experiment visits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NSchedule {
    /// `n = M_1, ..., M_N`, plus any `extra` orders.
    Scales {
        #[serde(default)]
        extra: Vec<usize>,
    },
    List {
        values: Vec<usize>,
    },
    Range {
        start: usize,
        end: usize,
        #[serde(default = "one")]
        step: usize,
    },
}

fn one() -> usize {
    1
}

impl Default for NSchedule {
    fn default() -> Self {
        Self::Scales { extra: Vec::new() }
    }
}

impl NSchedule {
    /// Sorted, deduplicated orders within `1..=M_N`.
    pub fn orders(&self, ns: &NumberSystem) -> Result<Vec<usize>, CliError> {
        let raw: Vec<usize> = match self {
            Self::Scales { extra } => (1..=ns.resolution())
                .map(|k| ns.scale(k))
                .chain(extra.iter().copied())
                .collect(),
            Self::List { values } => values.clone(),
            Self::Range { start, end, step } => {
                if *step == 0 {
                    return Err(CliError::Config("n_schedule step must be positive".into()));
                }
                (*start..=*end).step_by(*step).collect()
            }
        };
        if let Some(bad) = raw.iter().find(|&&n| n == 0 || n > ns.size()) {
            return Err(CliError::Config(format!(
                "n_schedule entry {bad} is outside 1..={}",
                ns.size()
            )));
        }
        let set: BTreeSet<usize> = raw.into_iter().collect();
        if set.is_empty() {
            return Err(CliError::Config("n_schedule is empty".into()));
        }
        Ok(set.into_iter().collect())
    }
}

/// Pass/fail thresholds. Defaults are the acceptance thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Residual bound for exact identities.
    pub identity: f64,
    /// Route agreement is `route_per_n * n`.
    pub route_per_n: f64,
    /// Upper-half max over lower-half max allowed in bound scans.
    pub stability_factor: f64,
    /// Random-coefficient Dirichlet ratio versus its small-`n` maximum.
    pub combination_factor: f64,
    /// Final over first sup error in a convergence run.
    pub converge_ratio: f64,
    /// Trailing scale points over which the sup error must not increase.
    pub converge_trailing: usize,
    /// Reported, not enforced: minimum fast-over-naive speedup.
    pub min_speedup: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            identity: 1e-9,
            route_per_n: 1e-9,
            stability_factor: 1.5,
            combination_factor: 3.0,
            converge_ratio: 0.25,
            converge_trailing: 4,
            min_speedup: 10.0,
        }
    }
}

/// Size limits for the verify and kernel-scan suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Limits {
    /// Largest order used by exhaustive kernel checks.
    pub max_order: usize,
    /// Largest `M_r` used for the Gram matrix.
    pub gram_cells: usize,
    /// Largest `n` for the binomial identities.
    pub binomial_n: usize,
    /// Random functions in the transform oracle and Parseval checks.
    pub random_functions: usize,
    /// Largest order in route-equivalence checks.
    pub route_max_n: usize,
    /// Random draws per order for the Dirichlet-combination ratio.
    pub combination_draws: usize,
    /// Largest order for the Dirichlet-combination ratio.
    pub combination_max_n: usize,
    /// Timing repetitions for the benchmark (median reported).
    pub bench_repeats: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_order: 256,
            gram_cells: 256,
            binomial_n: 10_000,
            random_functions: 50,
            route_max_n: 64,
            combination_draws: 100,
            combination_max_n: 256,
            bench_repeats: 5,
        }
    }
}

/// Negative controls that deliberately break one computation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FaultInjection {
    /// Multiplies the `nu = 0` Cesaro kernel weight by this factor.
    pub cesaro_weight_factor: Option<f64>,
}

/// The raw config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub radix: RadixSpec,
    /// Defaults to the radix length; must not exceed it.
    #[serde(default)]
    pub resolution: Option<usize>,
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default = "default_function")]
    pub function: FunctionSpec,
    #[serde(default)]
    pub n_schedule: NSchedule,
    #[serde(default)]
    pub seed: u64,
    /// Suite names to run; empty means all suites of the command.
    #[serde(default)]
    pub suites: Vec<String>,
    #[serde(default)]
    pub max_cells: Option<usize>,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub limits: Limits,
    #[serde(default = "default_young")]
    pub young: YoungFunction,
    /// Extra radix sequences scanned alongside `radix` by kernel-scan.
    #[serde(default)]
    pub compare_radices: Vec<RadixSpec>,
    #[serde(default)]
    pub fault: FaultInjection,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

fn default_alphas() -> Vec<f64> {
    vec![0.25, 0.5, 0.75]
}

fn default_function() -> FunctionSpec {
    serde_json::from_str(r#"{"family":"lacunary","decay":1.0}"#).expect("valid literal")
}

fn default_young() -> YoungFunction {
    YoungFunction::Power { p: 2.0 }
}

/// Values supplied on the command line or through the environment.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub suites: Option<Vec<String>>,
    pub max_cells: Option<usize>,
}

/// A validated configuration with its number systems built.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub file: ConfigFile,
    pub ns: Arc<NumberSystem>,
    pub compare: Vec<Arc<NumberSystem>>,
    pub seed: u64,
    pub suites: Vec<String>,
    pub max_cells: usize,
}

impl ExperimentConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let file: ConfigFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_file(file, overrides, &base)
    }

    /// Validates `file`; relative paths inside it resolve against `base`.
    pub fn from_file(
        mut file: ConfigFile,
        overrides: &Overrides,
        base: &Path,
    ) -> Result<Self, CliError> {
        if file.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                file.schema_version
            )));
        }
        let max_cells = overrides
            .max_cells
            .or(file.max_cells)
            .unwrap_or(DEFAULT_MAX_CELLS);
        let ns = build_system(&file.radix, file.resolution, max_cells)?;
        let compare = file
            .compare_radices
            .iter()
            .map(|r| build_system(r, None, max_cells))
            .collect::<Result<Vec<_>, _>>()?;
        if file.alphas.is_empty() {
            return Err(CliError::Config("alphas must not be empty".into()));
        }
        if let Some(a) = file.alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
            return Err(CliError::Config(format!("alpha = {a} is outside (0, 1)")));
        }
        file.young
            .validate()
            .map_err(|e| CliError::Config(format!("young: {e}")))?;
        let t = &file.thresholds;
        let positive = [
            t.identity,
            t.route_per_n,
            t.stability_factor,
            t.combination_factor,
            t.converge_ratio,
            t.min_speedup,
        ];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(CliError::Config(
                "thresholds must be finite and positive".into(),
            ));
        }
        if let Some(f) = file.fault.cesaro_weight_factor {
            if !f.is_finite() {
                return Err(CliError::Config("fault factor must be finite".into()));
            }
        }
        if let FunctionSpec::File { path } = &mut file.function {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
        // Fail early on a function spec that cannot be built.
        file.function
            .build(&ns, file.seed)
            .map_err(|e| CliError::Config(format!("function: {e}")))?;
        file.n_schedule.orders(&ns)?;
        let seed = overrides.seed.unwrap_or(file.seed);
        let suites = overrides
            .suites
            .clone()
            .unwrap_or_else(|| file.suites.clone());
        Ok(Self {
            file,
            ns,
            compare,
            seed,
            suites,
            max_cells,
        })
    }

    /// Whether `name` is selected (an empty selection runs everything).
    pub fn selected(&self, name: &str) -> bool {
        self.suites.is_empty() || self.suites.iter().any(|s| s == name)
    }

    /// Rejects suite names the command does not know.
    pub fn check_suites(&self, known: &[&str]) -> Result<(), CliError> {
        match self.suites.iter().find(|s| !known.contains(&s.as_str())) {
            Some(bad) => Err(CliError::Config(format!(
                "unknown suite `{bad}`; expected one of {}",
                known.join(", ")
            ))),
            None => Ok(()),
        }
    }

    pub fn thresholds(&self) -> &Thresholds {
        &self.file.thresholds
    }

    pub fn limits(&self) -> &Limits {
        &self.file.limits
    }

    pub fn alphas(&self) -> &[f64] {
        &self.file.alphas
    }

    /// The test function, materialized with the effective seed.
    pub fn function(&self) -> Result<vilenkin_core::StepFunction, CliError> {
        self.file
            .function
            .build(&self.ns, self.seed)
            .map_err(|e| CliError::Config(format!("function: {e}")))
    }
}

fn build_system(
    radix: &RadixSpec,
    resolution: Option<usize>,
    max_cells: usize,
) -> Result<Arc<NumberSystem>, CliError> {
    let radix = radix.build()?;
    let radix = match resolution {
        None => radix,
        Some(0) => return Err(CliError::Config("resolution must be at least 1".into())),
        Some(n) if n > radix.len() => {
            return Err(CliError::Config(format!(
                "resolution {n} exceeds the radix length {}",
                radix.len()
            )))
        }
        Some(n) => RadixSequence::new(radix.radices()[..n].to_vec())
            .map_err(|e| CliError::Config(e.to_string()))?,
    };
    let ns = NumberSystem::new(radix).map_err(|e| CliError::Config(e.to_string()))?;
    if ns.size() > max_cells {
        return Err(CliError::Config(format!(
            "M_N = {} exceeds the cell cap {max_cells}",
            ns.size()
        )));
    }
    Ok(Arc::new(ns))
}

/// Resolves the output directory, creating it when needed.
pub fn prepare_out_dir(dir: &Path) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir.to_path_buf())
}
