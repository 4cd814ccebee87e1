//! Cesaro binomial coefficients `A_n^alpha = (alpha+1)...(alpha+n)/n!`.
//!
//! Values come from the multiplicative recurrence
//! `A_n = A_{n-1} (alpha + n) / n`, `A_0 = 1`; no factorials or Gamma
//! function evaluations are involved, so relative error stays `O(n ulp)`.

use serde::Serialize;

use crate::error::{bail, Result};

fn is_negative_integer(alpha: f64) -> bool {
    alpha < 0.0 && alpha.fract() == 0.0
}

/// Tabulated `A_0^alpha ..= A_n^alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct CesaroTable {
    alpha: f64,
    values: Vec<f64>,
}

impl CesaroTable {
    /// Builds the table up to `n_max`; `alpha` must not be a negative integer.
    pub fn new(alpha: f64, n_max: usize) -> Result<Self> {
        if !alpha.is_finite() {
            bail!(Domain, "alpha = {alpha} is not finite");
        }
        if is_negative_integer(alpha) {
            bail!(Domain, "alpha = {alpha} is a negative integer");
        }
        Ok(Self::by_recurrence(alpha, n_max))
    }

    /// Runs the recurrence for any real `alpha`, including the negative
    /// integers where the product formula is still finite (it vanishes from
    /// `n = -alpha` on).
    pub fn by_recurrence(alpha: f64, n_max: usize) -> Self {
        let mut values = Vec::with_capacity(n_max + 1);
        values.push(1.0);
        let mut cur = 1.0f64;
        for n in 1..=n_max {
            cur *= (alpha + n as f64) / n as f64;
            values.push(cur);
        }
        Self { alpha, values }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn max_index(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `A_n^alpha`.
    ///
    /// # Panics
    /// If `n` exceeds the tabulated range.
    #[inline]
    pub fn get(&self, n: usize) -> f64 {
        self.values[n]
    }

    /// `A_n^alpha` with the convention `A_{-1}^alpha = 0` (the empty sum
    /// in the summation identity).
    #[inline]
    pub fn signed(&self, n: isize) -> f64 {
        if n < 0 {
            0.0
        } else {
            self.values[n as usize]
        }
    }
}

/// `A_n^alpha` by the multiplicative recurrence.
pub fn cesaro_coefficient(n: usize, alpha: f64) -> Result<f64> {
    Ok(CesaroTable::new(alpha, n)?.get(n))
}

/// Max residuals of the identities tying `A^alpha` to `A^{alpha-1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResiduals {
    pub alpha: f64,
    pub n_max: usize,
    /// `|A_n^a - A_{n-1}^a - A_n^{a-1}|`, max over `1 <= n <= n_max`.
    pub difference_abs: f64,
    /// Same, relative to `|A_n^{a-1}|`.
    pub difference_rel: f64,
    /// `sum_{k=0}^{n} A_k^{a-1} = A_n^a`, relative residual.
    pub summation_rel: f64,
    /// The shorter range `sum_{k=0}^{n-1} A_{n-k}^{a-1}` (omits `A_0^{a-1}`),
    /// relative residual; it is off by exactly `A_0^{a-1} = 1`.
    pub summation_short_rel: f64,
}

fn relative(diff: f64, scale: f64) -> f64 {
    if diff == 0.0 {
        0.0
    } else {
        diff / scale.abs().max(f64::MIN_POSITIVE)
    }
}

/// Evaluates the difference and summation identities for `n = 1..=n_max`.
pub fn verify_identities(n_max: usize, alpha: f64) -> IdentityResiduals {
    let a = CesaroTable::by_recurrence(alpha, n_max);
    let lower = CesaroTable::by_recurrence(alpha - 1.0, n_max);
    let mut out = IdentityResiduals {
        alpha,
        n_max,
        difference_abs: 0.0,
        difference_rel: 0.0,
        summation_rel: 0.0,
        summation_short_rel: 0.0,
    };
    let mut partial = lower.get(0);
    for n in 1..=n_max {
        let diff = (a.get(n) - a.get(n - 1) - lower.get(n)).abs();
        out.difference_abs = out.difference_abs.max(diff);
        out.difference_rel = out.difference_rel.max(relative(
            diff,
            lower.get(n).abs().max(a.get(n).abs() * f64::EPSILON),
        ));
        partial += lower.get(n);
        let scale = a.get(n).abs().max(partial.abs());
        out.summation_rel = out
            .summation_rel
            .max(relative((partial - a.get(n)).abs(), scale));
        let short = partial - lower.get(0);
        out.summation_short_rel = out
            .summation_short_rel
            .max(relative((short - a.get(n)).abs(), scale));
    }
    out
}

/// `A_n^alpha / A_{2n}^alpha`, which tends to `2^{-alpha}`.
pub fn doubling_ratio(alpha: f64, n: usize) -> Result<f64> {
    if n < 2 {
        bail!(Usage, "doubling ratio needs n >= 2, got {n}");
    }
    let t = CesaroTable::new(alpha, 2 * n)?;
    Ok(t.get(n) / t.get(2 * n))
}
