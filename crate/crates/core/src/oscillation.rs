//! Moduli of continuity, coset oscillations, Young functions, and the
//! scale-by-scale quantities that enter the uniform-convergence criteria
//! for Cesaro means of negative order.
//!
//! All quantities are exact for step functions: the oscillation of `f`
//! over a coset `I_k + Z_beta^{(k)}` is the diameter of the finite set of
//! cell values inside it. Membership in the bounded-oscillation classes
//! can only be witnessed up to the stored resolution, so the profile
//! reports finite-scale scores rather than true suprema over all `k`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::group::NumberSystem;
use crate::step::StepFunction;
use crate::transform::check_alpha;

fn diameter(values: impl Iterator<Item = Complex64> + Clone) -> f64 {
    if values.clone().all(|v| v.im == 0.0) {
        let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v.re), hi.max(v.re))
        });
        return if hi >= lo { hi - lo } else { 0.0 };
    }
    let v: Vec<Complex64> = values.collect();
    let mut best = 0.0f64;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            best = best.max((v[i] - v[j]).norm());
        }
    }
    best
}

/// `omega(f, I_k + Z_beta^{(k)})` for every `beta < M_k`.
///
/// Scales beyond the function's resolution give all zeros.
pub fn coset_oscillations(f: &StepFunction, k: usize) -> Result<Vec<f64>> {
    let ns = f.number_system();
    if k > ns.resolution() {
        bail!(
            Validation,
            "scale {k} exceeds resolution {}",
            ns.resolution()
        );
    }
    let mk = ns.scale(k);
    if k >= f.resolution() {
        return Ok(vec![0.0; mk]);
    }
    let cells = f.cells();
    let count = cells.len() / mk;
    (0..mk)
        .map(|beta| {
            let base = ns.coset_cell(beta, k)?;
            Ok(diameter((0..count).map(move |t| cells[base + t * mk])))
        })
        .collect()
}

/// `sup_{x, x' in I_k + Z_beta^{(k)}} |f(x) - f(x')|`.
pub fn coset_oscillation(f: &StepFunction, k: usize, beta: usize) -> Result<f64> {
    let ns = f.number_system();
    if k > ns.resolution() {
        bail!(
            Validation,
            "scale {k} exceeds resolution {}",
            ns.resolution()
        );
    }
    if beta >= ns.scale(k) {
        bail!(Validation, "beta = {beta} is outside [0, M_{k})");
    }
    if k >= f.resolution() {
        return Ok(0.0);
    }
    let mk = ns.scale(k);
    let base = ns.coset_cell(beta, k)?;
    let cells = f.cells();
    Ok(diameter(
        (0..cells.len() / mk).map(|t| cells[base + t * mk]),
    ))
}

/// `omega(f, 1/M_k) = sup_x sup_{t in I_k} |f(x - t) - f(x)|`.
pub fn modulus_of_continuity(f: &StepFunction, k: usize) -> Result<f64> {
    Ok(coset_oscillations(f, k)?.into_iter().fold(0.0, f64::max))
}

/// Per-scale oscillation data for `k = 0..=N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationProfile {
    /// `omega(f, 1/M_k)`.
    pub omega: Vec<f64>,
    /// `O(f, M_k) = sum_{beta >= 1} omega(f, I_k + Z_beta^{(k)})`.
    pub big_o: Vec<f64>,
    /// `nu(M_k, f) = sum_{beta >= 0} omega(f, I_k + Z_beta^{(k)})`.
    pub nu: Vec<f64>,
    /// `omega(f, I_k)`, the `beta = 0` coset.
    pub zero_coset: Vec<f64>,
    /// `max_{j <= k} O(f, M_j)`; the last entry is the finite-scale BO score.
    pub bo_running_sup: Vec<f64>,
}

impl OscillationProfile {
    pub fn of(f: &StepFunction) -> Result<Self> {
        let top = f.number_system().resolution();
        let mut p = Self {
            omega: Vec::with_capacity(top + 1),
            big_o: Vec::with_capacity(top + 1),
            nu: Vec::with_capacity(top + 1),
            zero_coset: Vec::with_capacity(top + 1),
            bo_running_sup: Vec::with_capacity(top + 1),
        };
        let mut running = 0.0f64;
        for k in 0..=top {
            let osc = coset_oscillations(f, k)?;
            let tail: f64 = osc[1..].iter().fold(0.0, |a, w| a + w);
            running = running.max(tail);
            p.omega.push(osc.iter().copied().fold(0.0, f64::max));
            p.big_o.push(tail);
            p.nu.push(osc[0] + tail);
            p.zero_coset.push(osc[0]);
            p.bo_running_sup.push(running);
        }
        Ok(p)
    }

    pub fn scales(&self) -> usize {
        self.omega.len()
    }

    /// `sup_k O(f, M_k)` over the stored scales.
    pub fn bo_score(&self) -> f64 {
        self.bo_running_sup.last().copied().unwrap_or(0.0)
    }
}

/// A Young function `M`: `M(0) = 0`, convex, strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum YoungFunction {
    /// `M(u) = u^p`, `p >= 1`.
    Power { p: f64 },
    /// Piecewise linear through `(u_i, M_i)`, continued linearly past the
    /// last node with the last slope.
    Table {
        u: Vec<f64>,
        #[serde(rename = "M")]
        m: Vec<f64>,
    },
}

impl YoungFunction {
    pub fn power(p: f64) -> Result<Self> {
        let y = Self::Power { p };
        y.validate()?;
        Ok(y)
    }

    pub fn table(u: Vec<f64>, m: Vec<f64>) -> Result<Self> {
        let y = Self::Table { u, m };
        y.validate()?;
        Ok(y)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Power { p } => {
                if !(p.is_finite() && *p >= 1.0) {
                    bail!(Domain, "power Young function needs p >= 1, got {p}");
                }
            }
            Self::Table { u, m } => {
                if u.len() != m.len() || u.len() < 2 {
                    bail!(Domain, "tabulated Young function needs >= 2 matching nodes");
                }
                if u[0] != 0.0 || m[0] != 0.0 {
                    bail!(Domain, "tabulated Young function must start at (0, 0)");
                }
                if u.windows(2).any(|w| w[1] <= w[0]) {
                    bail!(Domain, "tabulated u nodes must be strictly increasing");
                }
                if m.windows(2).any(|w| w[1] <= w[0]) {
                    bail!(
                        Domain,
                        "tabulated M is not strictly increasing, hence not invertible"
                    );
                }
                let slopes: Vec<f64> = u
                    .windows(2)
                    .zip(m.windows(2))
                    .map(|(a, b)| (b[1] - b[0]) / (a[1] - a[0]))
                    .collect();
                if slopes.windows(2).any(|s| s[1] < s[0] * (1.0 - 1e-12)) {
                    bail!(Domain, "tabulated M is not convex");
                }
            }
        }
        Ok(())
    }

    /// `M(u)` for `u >= 0`.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Power { p } => x.powf(*p),
            Self::Table { u, m } => {
                let i = u.partition_point(|&v| v <= x).clamp(1, u.len() - 1);
                let (u0, u1, m0, m1) = (u[i - 1], u[i], m[i - 1], m[i]);
                m0 + (m1 - m0) * (x - u0) / (u1 - u0)
            }
        }
    }

    /// `M^{-1}(y)`; closed form for the power kind, monotone bisection to
    /// relative tolerance `1e-10` for tables.
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // rejects NaN as well
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            bail!(Domain, "M^-1 is only defined for y >= 0, got {y}");
        }
        match self {
            Self::Power { p } => Ok(y.powf(1.0 / p)),
            Self::Table { .. } => {
                self.validate()?;
                if y == 0.0 {
                    return Ok(0.0);
                }
                let mut hi = 1.0f64;
                while self.eval(hi) < y {
                    hi *= 2.0;
                    if !hi.is_finite() {
                        bail!(Domain, "M^-1({y}) is not reachable");
                    }
                }
                let mut lo = 0.0f64;
                while hi - lo > 1e-10 * hi {
                    let mid = 0.5 * (lo + hi);
                    if self.eval(mid) < y {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Ok(0.5 * (lo + hi))
            }
        }
    }
}

/// `sup_k sum_{beta=1}^{M_k-1} M(omega(f, I_k + Z_beta^{(k)}))` over stored scales.
pub fn bo_m_score(f: &StepFunction, young: &YoungFunction) -> Result<f64> {
    young.validate()?;
    let top = f.number_system().resolution();
    let mut best = 0.0f64;
    for k in 0..=top {
        let osc = coset_oscillations(f, k)?;
        best = best.max(osc[1..].iter().map(|&w| young.eval(w)).sum());
    }
    Ok(best)
}

/// Both sides of `M(nu(M_k, f) / M_k) <= (1/M_k) sum_beta M(omega_beta)`.
pub fn jensen_sides(f: &StepFunction, young: &YoungFunction, k: usize) -> Result<(f64, f64)> {
    young.validate()?;
    let osc = coset_oscillations(f, k)?;
    let mk = osc.len() as f64;
    let nu: f64 = osc.iter().sum();
    let rhs = osc.iter().map(|&w| young.eval(w)).sum::<f64>() / mk;
    Ok((young.eval(nu / mk), rhs))
}

/// `sup_x sum_{beta=1}^{M_k-1} beta^{alpha-1} |f(x - Z_beta^{(k)}) - f(x - Z_beta^{(k)} - e_k)|`.
pub fn theorem1_condition(f: &StepFunction, k: usize, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let ns = f.number_system();
    if k >= ns.resolution() {
        bail!(
            Validation,
            "scale {k} needs coordinate {k}, beyond resolution {}",
            ns.resolution()
        );
    }
    let res = f.resolution().max(k + 1);
    let f = f.lift(res)?;
    let mk = ns.scale(k);
    let reps: Vec<(f64, usize)> = (1..mk)
        .map(|beta| Ok(((beta as f64).powf(alpha - 1.0), ns.coset_cell(beta, k)?)))
        .collect::<Result<_>>()?;
    let unit = ns.scale(k);
    let cells = f.cells();
    let mut best = 0.0f64;
    for x in 0..cells.len() {
        let mut s = 0.0;
        for &(w, z) in &reps {
            let shifted = ns.sub_index(x, z, res);
            let further = ns.sub_index(shifted, unit, res);
            s += w * (cells[shifted] - cells[further]).norm();
        }
        best = best.max(s);
    }
    Ok(best)
}

/// Partial sums of a nonnegative series with convergence diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesReport {
    /// Terms for `k = 1..=K`.
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// Geometric-decay verdict on the trailing half of the terms.
    pub convergent: bool,
}

impl SeriesReport {
    fn from_terms(terms: Vec<f64>) -> Self {
        let partial_sums = terms
            .iter()
            .scan(0.0, |acc, t| {
                *acc += t;
                Some(*acc)
            })
            .collect();
        let convergent = geometric_decay(&terms);
        Self {
            terms,
            partial_sums,
            convergent,
        }
    }

    /// Successive increments of the partial sums (the terms themselves).
    pub fn increments(&self) -> &[f64] {
        &self.terms
    }

    /// Whether the increments are non-increasing throughout.
    pub fn increments_decreasing(&self) -> bool {
        self.terms.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12))
    }
}

/// True when the trailing half of `terms` decays with every successive
/// ratio below one (or the terms have become exactly zero).
fn geometric_decay(terms: &[f64]) -> bool {
    if terms.len() < 2 {
        return terms.iter().all(|&t| t == 0.0);
    }
    let start = terms.len() / 2;
    let tail = &terms[start.saturating_sub(1)..];
    tail.windows(2).all(|w| {
        if w[0] == 0.0 {
            w[1] == 0.0
        } else {
            w[1] / w[0] < 1.0 - 1e-9
        }
    })
}

/// `sum_{k=1}^{K} nu(M_k, f) / M_k^{1-alpha}`.
pub fn theorem2_series(f: &StepFunction, alpha: f64, max_scale: usize) -> Result<SeriesReport> {
    check_alpha(alpha)?;
    let ns = f.number_system();
    if max_scale > ns.resolution() {
        bail!(
            Validation,
            "K = {max_scale} exceeds resolution {}",
            ns.resolution()
        );
    }
    let terms = (1..=max_scale)
        .map(|k| {
            let nu: f64 = coset_oscillations(f, k)?.iter().sum();
            Ok(nu / (ns.scale(k) as f64).powf(1.0 - alpha))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SeriesReport::from_terms(terms))
}

/// `sum_{k=1}^{K} M_k^alpha M^{-1}(1/M_k)`; for `M(u) = u^p` the terms are
/// `M_k^{alpha - 1/p}`.
pub fn corollary_series(
    young: &YoungFunction,
    ns: &NumberSystem,
    alpha: f64,
    max_scale: usize,
) -> Result<SeriesReport> {
    check_alpha(alpha)?;
    young.validate()?;
    if max_scale > ns.resolution() {
        bail!(
            Validation,
            "K = {max_scale} exceeds resolution {}",
            ns.resolution()
        );
    }
    let terms = (1..=max_scale)
        .map(|k| {
            let mk = ns.scale(k) as f64;
            Ok(mk.powf(alpha) * young.inverse(1.0 / mk)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SeriesReport::from_terms(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn walsh(n: usize) -> Arc<NumberSystem> {
        Arc::new(NumberSystem::from_radices(vec![2; n]).unwrap())
    }

    fn indicator_i1(ns: &Arc<NumberSystem>) -> StepFunction {
        StepFunction::from_fn(ns.clone(), ns.resolution(), |x| {
            Complex64::new(if x % ns.scale(1) == 0 { 1.0 } else { 0.0 }, 0.0)
        })
    }

    #[test]
    fn constants_have_no_oscillation() {
        let ns = walsh(5);
        let f = StepFunction::constant(ns.clone(), 5, Complex64::new(3.0, -1.0));
        let p = OscillationProfile::of(&f).unwrap();
        assert!(p.omega.iter().chain(&p.nu).all(|&v| v == 0.0));
        assert_eq!(
            bo_m_score(&f, &YoungFunction::power(2.0).unwrap()).unwrap(),
            0.0
        );
        assert_eq!(theorem1_condition(&f, 2, 0.5).unwrap(), 0.0);
        assert!(theorem1_condition(&f, 5, 0.5).is_err());
        let t2 = theorem2_series(&f, 0.5, 5).unwrap();
        assert!(t2.terms.iter().all(|&t| t == 0.0));
    }

    #[test]
    fn indicator_of_first_cell_block() {
        let ns = walsh(5);
        let f = indicator_i1(&ns);
        assert_eq!(coset_oscillation(&f, 1, 0).unwrap(), 0.0);
        let p = OscillationProfile::of(&f).unwrap();
        assert_eq!(p.omega[0], 1.0);
        assert!(p.omega[1..].iter().all(|&w| w == 0.0));
        for k in 1..5 {
            assert_eq!(theorem1_condition(&f, k, 0.5).unwrap(), 0.0);
        }
        // only scale 0 sees any oscillation, and scale 0 is not in the series
        let t2 = theorem2_series(&f, 0.5, 5).unwrap();
        assert!(t2.terms.iter().all(|&t| t == 0.0));
    }

    #[test]
    fn profile_relations() {
        let ns = Arc::new(NumberSystem::from_radices(vec![3, 2, 2, 3]).unwrap());
        let f = StepFunction::from_fn(ns.clone(), 4, |x| {
            Complex64::new(((x * 7919) % 13) as f64 / 13.0, ((x * 31) % 5) as f64 / 5.0)
        });
        let p = OscillationProfile::of(&f).unwrap();
        for k in 0..=4 {
            assert!((p.nu[k] - (p.big_o[k] + coset_oscillation(&f, k, 0).unwrap())).abs() < 1e-12);
            if k < 4 {
                assert!(p.omega[k + 1] <= p.omega[k]);
            }
        }
        assert!(p.omega.iter().all(|&w| w <= 2.0 * f.sup_norm() + 1e-12));
        let one = YoungFunction::power(1.0).unwrap();
        assert!((bo_m_score(&f, &one).unwrap() - p.bo_score()).abs() < 1e-12);
    }

    #[test]
    fn young_functions() {
        let p2 = YoungFunction::power(2.0).unwrap();
        assert_eq!(p2.eval(3.0), 9.0);
        assert!((p2.inverse(9.0).unwrap() - 3.0).abs() < 1e-12);
        assert!(YoungFunction::power(0.5).is_err());
        let t = YoungFunction::table(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 4.0]).unwrap();
        assert_eq!(t.eval(1.5), 2.5);
        assert_eq!(t.eval(3.0), 7.0);
        for u in [0.1, 0.7, 1.3, 2.0, 5.0] {
            assert!((t.inverse(t.eval(u)).unwrap() - u).abs() <= 1e-9 * u.max(1.0));
        }
        assert!(YoungFunction::table(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 3.0]).is_err());
        assert!(YoungFunction::table(vec![0.0, 1.0], vec![0.0, 0.0]).is_err());
        let json: YoungFunction =
            serde_json::from_str(r#"{"kind":"table","u":[0,1],"M":[0,1]}"#).unwrap();
        assert_eq!(
            json,
            YoungFunction::Table {
                u: vec![0.0, 1.0],
                m: vec![0.0, 1.0]
            }
        );
        let json: YoungFunction = serde_json::from_str(r#"{"kind":"power","p":2}"#).unwrap();
        assert_eq!(json, p2);
    }

    #[test]
    fn corollary_boundary() {
        let ns = walsh(12);
        let p2 = YoungFunction::power(2.0).unwrap();
        let conv = corollary_series(&p2, &ns, 0.25, 12).unwrap();
        for (k, t) in conv.terms.iter().enumerate() {
            let expected = 2f64.powf(-((k + 1) as f64) / 4.0);
            assert!((t - expected).abs() < 1e-12);
        }
        assert!(conv.convergent);
        assert!(!corollary_series(&p2, &ns, 0.75, 12).unwrap().convergent);
        let id = YoungFunction::power(1.0).unwrap();
        assert!(corollary_series(&id, &ns, 0.5, 12).unwrap().convergent);
    }
}
