//! Built-in test functions shared by the test suites and the CLI.
//!
//! Every family is materialized as an exact step function at the full
//! resolution of the number system.

use std::path::PathBuf;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::characters::{root_of_unity, CharacterTable};
use crate::error::{bail, Error, Result};
use crate::group::NumberSystem;
use crate::step::StepFunction;

/// Coefficients of the lacunary family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LacunaryCoefficients {
    /// `c_k = M_k^{-s}`.
    Decay { decay: f64 },
    /// Explicit `c_0, c_1, ...`; missing trailing entries are zero.
    Explicit { coeffs: Vec<f64> },
}

/// A test function family with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FunctionSpec {
    /// `f = sum_k c_k Re psi_{M_k}`; term `k` depends on `x_k` alone.
    Lacunary {
        #[serde(flatten)]
        coefficients: LacunaryCoefficients,
    },
    /// Indicator of the coset `I_scale + Z_beta^{(scale)}`.
    DigitIndicator { scale: usize, beta: usize },
    /// `f(x) = sum_k u_k x_k / (m_k M_k)` with `u_k` uniform in
    /// `[-amplitude, amplitude]`, drawn from the run seed.
    RandomLipschitz {
        #[serde(default = "one")]
        amplitude: f64,
    },
    Constant {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    /// A single character `psi_n`.
    Character { n: usize },
    /// Cell values loaded from a step-function JSON container.
    File { path: PathBuf },
}

fn one() -> f64 {
    1.0
}

impl FunctionSpec {
    /// Short label for reports.
    pub fn label(&self) -> String {
        match self {
            Self::Lacunary {
                coefficients: LacunaryCoefficients::Decay { decay },
            } => format!("lacunary(s={decay})"),
            Self::Lacunary {
                coefficients: LacunaryCoefficients::Explicit { coeffs },
            } => format!("lacunary(coeffs={})", coeffs.len()),
            Self::DigitIndicator { scale, beta } => format!("indicator(k={scale},beta={beta})"),
            Self::RandomLipschitz { amplitude } => format!("random_lipschitz(a={amplitude})"),
            Self::Constant { re, im } => format!("constant({re}{im:+}i)"),
            Self::Character { n } => format!("character(n={n})"),
            Self::File { path } => format!("file({})", path.display()),
        }
    }

    /// Whether evaluation draws from the seed.
    pub fn is_random(&self) -> bool {
        matches!(self, Self::RandomLipschitz { .. })
    }

    pub fn build(&self, ns: &Arc<NumberSystem>, seed: u64) -> Result<StepFunction> {
        match self {
            Self::Lacunary { coefficients } => {
                let c = match coefficients {
                    LacunaryCoefficients::Decay { decay } => {
                        if !decay.is_finite() {
                            bail!(Configuration, "lacunary decay must be finite");
                        }
                        lacunary_decay_coefficients(ns, *decay)
                    }
                    LacunaryCoefficients::Explicit { coeffs } => {
                        if coeffs.len() > ns.resolution() {
                            bail!(
                                Configuration,
                                "{} lacunary coefficients exceed resolution {}",
                                coeffs.len(),
                                ns.resolution()
                            );
                        }
                        coeffs.clone()
                    }
                };
                Ok(lacunary(ns, &c))
            }
            Self::DigitIndicator { scale, beta } => digit_indicator(ns, *scale, *beta),
            Self::RandomLipschitz { amplitude } => {
                if !(amplitude.is_finite() && *amplitude >= 0.0) {
                    bail!(Configuration, "amplitude must be finite and nonnegative");
                }
                Ok(random_lipschitz(ns, *amplitude, seed))
            }
            Self::Constant { re, im } => Ok(StepFunction::constant(
                ns.clone(),
                ns.resolution(),
                Complex64::new(*re, *im),
            )),
            Self::Character { n } => character(ns, *n),
            Self::File { path } => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::Configuration(format!("cannot read {}: {e}", path.display()))
                })?;
                let f = StepFunction::from_json(&text)?;
                if f.number_system().radix() != ns.radix() {
                    bail!(
                        Configuration,
                        "{} uses radix {} but the run uses {}",
                        path.display(),
                        f.number_system().radix().label(),
                        ns.radix().label()
                    );
                }
                let f = StepFunction::new(ns.clone(), f.resolution(), f.into_cells())?;
                Ok(f.lift_full())
            }
        }
    }
}

/// `c_k = M_k^{-s}` for `k < N`.
pub fn lacunary_decay_coefficients(ns: &NumberSystem, decay: f64) -> Vec<f64> {
    (0..ns.resolution())
        .map(|k| (ns.scale(k) as f64).powf(-decay))
        .collect()
}

/// `sum_k c_k cos(2 pi x_k / m_k)` at full resolution.
pub fn lacunary(ns: &Arc<NumberSystem>, coeffs: &[f64]) -> StepFunction {
    let cosines: Vec<Vec<f64>> = (0..coeffs.len())
        .map(|k| {
            let m = ns.m(k);
            (0..m).map(|a| root_of_unity(a, m).re).collect()
        })
        .collect();
    StepFunction::from_fn(ns.clone(), ns.resolution(), |cell| {
        let mut s = 0.0;
        for (k, c) in coeffs.iter().enumerate() {
            s += c * cosines[k][ns.digit(cell, k)];
        }
        Complex64::new(s, 0.0)
    })
}

/// `2 sum_{j >= k} |c_j|`, the bound on any scale-`k` coset oscillation of
/// the lacunary function.
pub fn lacunary_oscillation_bound(coeffs: &[f64], k: usize) -> f64 {
    2.0 * coeffs.iter().skip(k).map(|c| c.abs()).sum::<f64>()
}

/// Indicator of `I_k + Z_beta^{(k)}` at full resolution.
pub fn digit_indicator(ns: &Arc<NumberSystem>, k: usize, beta: usize) -> Result<StepFunction> {
    if k > ns.resolution() {
        bail!(
            Configuration,
            "indicator scale {k} exceeds resolution {}",
            ns.resolution()
        );
    }
    if beta >= ns.scale(k) {
        bail!(
            Configuration,
            "indicator beta = {beta} is outside [0, M_{k})"
        );
    }
    let base = ns.coset_cell(beta, k)?;
    let mk = ns.scale(k);
    Ok(StepFunction::from_fn(ns.clone(), ns.resolution(), |cell| {
        Complex64::new(if cell % mk == base { 1.0 } else { 0.0 }, 0.0)
    }))
}

/// Random Lipschitz-type function with seeded coefficients.
pub fn random_lipschitz(ns: &Arc<NumberSystem>, amplitude: f64, seed: u64) -> StepFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (0..ns.resolution())
        .map(|k| {
            let u: f64 = if amplitude > 0.0 {
                rng.random_range(-amplitude..=amplitude)
            } else {
                0.0
            };
            u / (ns.m(k) as f64 * ns.scale(k) as f64)
        })
        .collect();
    StepFunction::from_fn(ns.clone(), ns.resolution(), |cell| {
        let s: f64 = weights
            .iter()
            .enumerate()
            .map(|(k, w)| w * ns.digit(cell, k) as f64)
            .sum();
        Complex64::new(s, 0.0)
    })
}

/// `psi_n` at full resolution.
pub fn character(ns: &Arc<NumberSystem>, n: usize) -> Result<StepFunction> {
    if n >= ns.size() {
        bail!(Configuration, "character index {n} is outside [0, M_N)");
    }
    let table = CharacterTable::new(ns.clone());
    StepFunction::new(ns.clone(), ns.resolution(), table.row(n, ns.resolution()))
}

/// Complex cell values drawn uniformly from the unit square, for property
/// checks that need generic data.
pub fn random_cells(ns: &Arc<NumberSystem>, resolution: usize, seed: u64) -> Result<StepFunction> {
    ns.check_resolution(resolution)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = (0..ns.scale(resolution))
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    StepFunction::new(ns.clone(), resolution, cells)
}
