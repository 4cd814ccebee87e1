//! Dirichlet, Fejer and Cesaro `(C, -alpha)` kernels, the Dirichlet
//! recursions, the Cesaro-kernel decomposition, and ratio scans for the
//! kernel bounds whose constants are not known in closed form.
//!
//! Kernels are built at the coarsest resolution on which they are constant
//! (`D_n` only reads digits `0..=A` where `M_A <= n - 1 < M_{A+1}`) and
//! lifted to the full resolution by the public constructors.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::binomials::CesaroTable;
use crate::characters::CharacterTable;
use crate::error::{bail, Result};
use crate::group::NumberSystem;
use crate::oscillation::modulus_of_continuity;
use crate::step::StepFunction;
use crate::transform::{check_alpha, VilenkinTransform};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Residual tolerance for identities whose two sides accumulate `n`-term
/// sums of unimodular values.
pub fn residual_tolerance(n: usize, max_radix: usize) -> f64 {
    1e-12 * n.max(1) as f64 * max_radix as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DirichletStrategy {
    /// `sum_{k<n} psi_k`.
    Naive,
    /// `M_k 1_{I_k}`, only for `n = M_k`.
    Closed,
    /// `psi_n(x) sum_j D_{M_j}(x) sum_{a=m_j-n_j}^{m_j-1} r_j^a(x)`.
    Recursive,
}

/// Which kernel a [`KernelEvaluation`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum KernelKind {
    Dirichlet,
    Fejer,
    Cesaro { alpha: f64 },
}

/// A kernel together with how it was produced.
#[derive(Debug, Clone)]
pub struct KernelEvaluation {
    pub kind: KernelKind,
    pub n: usize,
    pub strategy: DirichletStrategy,
    pub values: StepFunction,
}

/// Which lower limit to give the first sum of the Cesaro-kernel
/// decomposition. Only [`FromZero`](Self::FromZero) is an identity; the
/// other reading drops the `k = 0` block and is kept for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DecompositionReading {
    FromZero,
    FromOne,
}

/// Per-`n` outcome of a bound scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundScanRecord {
    pub n: usize,
    pub alpha: f64,
    /// Largest observed ratio to the majorant.
    pub sup_ratio: f64,
    /// Cell index (full-resolution numbering) where it was attained.
    pub argmax_cell: usize,
    /// For coset scans: the ratio at `Z_beta^{(k)}` for `beta = 1..M_k-1`.
    pub beta_ratios: Vec<f64>,
}

/// Lower-half vs upper-half comparison of a ratio scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stability {
    pub lower_max: f64,
    pub upper_max: f64,
    pub all_finite: bool,
}

impl Stability {
    /// Splits `(n, ratio)` pairs, sorted by `n`, into a lower and an upper
    /// half by position.
    pub fn of(points: &[(usize, f64)]) -> Self {
        let mut pts = points.to_vec();
        pts.sort_by_key(|p| p.0);
        let half = pts.len().div_ceil(2);
        let max = |s: &[(usize, f64)]| s.iter().map(|p| p.1).fold(0.0f64, f64::max);
        Self {
            lower_max: max(&pts[..half]),
            upper_max: max(&pts[half..]),
            all_finite: pts.iter().all(|p| p.1.is_finite() && p.1 >= 0.0),
        }
    }

    pub fn holds(&self, factor: f64) -> bool {
        self.all_finite && self.upper_max <= factor * self.lower_max
    }
}

/// Max residuals of the Dirichlet-kernel recursions over every admissible
/// parameter tuple.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RecursionResiduals {
    pub max_n: usize,
    /// `D_n = (1 - psi_{M_k}^{n_k}) / (1 - psi_{M_k}) D_{M_k} + psi_{M_k}^{n_k} D_{n'}`.
    pub top_digit_split: f64,
    /// `D_{j + n_k M_k} = D_{n_k M_k} + psi_{n_k M_k} D_j`.
    pub block_shift: f64,
    /// `D_{j + r M_k} = (sum_{q<r} psi_{M_k}^q) D_{M_k} + psi_{M_k}^r D_j`.
    pub geometric_shift: f64,
    /// `D_{n_s M_s - j} = D_{n_s M_s} - psi_{n_s M_s - 1} conj(D_j)`.
    pub reflection: f64,
    /// Naive vs product-form (`Recursive`) evaluation.
    pub product_form: f64,
    pub tuples: usize,
}

impl RecursionResiduals {
    pub fn max(&self) -> f64 {
        [
            self.top_digit_split,
            self.block_shift,
            self.geometric_shift,
            self.reflection,
            self.product_form,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// `D_0, ..., D_max` at full resolution, built by cumulative summation.
#[derive(Debug, Clone)]
pub struct DirichletTable {
    len: usize,
    rows: Vec<Complex64>,
}

impl DirichletTable {
    pub fn new(table: &CharacterTable, max_n: usize) -> Result<Self> {
        let ns = table.number_system();
        if max_n > ns.size() {
            bail!(Validation, "max_n = {max_n} exceeds M_N = {}", ns.size());
        }
        let len = ns.size();
        let mut rows = vec![ZERO; (max_n + 1) * len];
        for n in 1..=max_n {
            let (prev, cur) = rows[(n - 1) * len..(n + 1) * len].split_at_mut(len);
            for (x, slot) in cur.iter_mut().enumerate() {
                *slot = prev[x] + table.psi(n - 1, x);
            }
        }
        Ok(Self { len, rows })
    }

    /// `D_n` on every full-resolution cell.
    #[inline]
    pub fn row(&self, n: usize) -> &[Complex64] {
        &self.rows[n * self.len..(n + 1) * self.len]
    }

    pub fn max_n(&self) -> usize {
        self.rows.len() / self.len - 1
    }
}

/// Kernel constructions and checks for one number system.
#[derive(Debug, Clone)]
pub struct Kernels {
    transform: VilenkinTransform,
}

impl Kernels {
    pub fn new(ns: Arc<NumberSystem>) -> Self {
        Self {
            transform: VilenkinTransform::new(ns),
        }
    }

    pub fn from_transform(transform: VilenkinTransform) -> Self {
        Self { transform }
    }

    pub fn number_system(&self) -> &Arc<NumberSystem> {
        self.transform.number_system()
    }

    pub fn table(&self) -> &CharacterTable {
        self.transform.table()
    }

    pub fn transform(&self) -> &VilenkinTransform {
        &self.transform
    }

    fn ns(&self) -> &NumberSystem {
        self.number_system()
    }

    /// Coarsest resolution on which every `psi_k`, `k < n`, is constant.
    pub fn support_resolution(&self, n: usize) -> usize {
        match n {
            0 | 1 => 0,
            _ => self.ns().top_position(n - 1).map_or(0, |a| a + 1),
        }
    }

    fn check_order(&self, n: usize) -> Result<()> {
        if n > self.ns().size() {
            bail!(
                Validation,
                "order n = {n} exceeds M_N = {}",
                self.ns().size()
            );
        }
        Ok(())
    }

    /// `D_n` at the full resolution.
    pub fn dirichlet(&self, n: usize, strategy: DirichletStrategy) -> Result<StepFunction> {
        Ok(self.dirichlet_compact(n, strategy)?.lift_full())
    }

    /// `D_n` at its own support resolution (for `Closed`, at resolution `k`).
    pub fn dirichlet_compact(&self, n: usize, strategy: DirichletStrategy) -> Result<StepFunction> {
        self.check_order(n)?;
        let ns = self.number_system().clone();
        match strategy {
            DirichletStrategy::Naive => {
                let res = self.support_resolution(n);
                let table = self.table();
                Ok(StepFunction::from_fn(ns, res, |x| {
                    (0..n).map(|k| table.psi(k, x)).sum()
                }))
            }
            DirichletStrategy::Closed => {
                let Some(k) = ns.scales().iter().position(|&s| s == n) else {
                    bail!(Usage, "closed form needs n = M_k, got n = {n}");
                };
                Ok(self.dirichlet_power(k, k))
            }
            DirichletStrategy::Recursive => {
                if n == 0 {
                    return Ok(StepFunction::zeros(ns, 0));
                }
                if n == ns.size() {
                    let top = ns.resolution();
                    return Ok(self.dirichlet_power(top, top));
                }
                let a = ns.top_position(n).expect("n >= 1");
                let res = a + 1;
                let table = self.table();
                let digits = ns.digits_unchecked(n, res);
                Ok(StepFunction::from_fn(ns.clone(), res, |x| {
                    let mut sum = ZERO;
                    for (j, &nj) in digits.iter().enumerate() {
                        if nj == 0 || x % ns.scale(j) != 0 {
                            continue;
                        }
                        let m = ns.m(j);
                        let geometric: Complex64 =
                            (m - nj..m).map(|p| table.rademacher_power(j, p, x)).sum();
                        sum += geometric * ns.scale(j) as f64;
                    }
                    table.psi(n, x) * sum
                }))
            }
        }
    }

    /// `D_{M_k}` at resolution `res >= k`: `M_k` on `I_k`, zero elsewhere.
    fn dirichlet_power(&self, k: usize, res: usize) -> StepFunction {
        let ns = self.number_system().clone();
        let mk = ns.scale(k);
        StepFunction::from_fn(ns, res, |x| {
            Complex64::new(if x % mk == 0 { mk as f64 } else { 0.0 }, 0.0)
        })
    }

    /// Every applicable Dirichlet strategy for order `n`.
    pub fn dirichlet_evaluations(&self, n: usize) -> Result<Vec<KernelEvaluation>> {
        let mut strategies = vec![DirichletStrategy::Naive, DirichletStrategy::Recursive];
        if self.ns().scales().contains(&n) {
            strategies.push(DirichletStrategy::Closed);
        }
        strategies
            .into_iter()
            .map(|s| {
                Ok(KernelEvaluation {
                    kind: KernelKind::Dirichlet,
                    n,
                    strategy: s,
                    values: self.dirichlet(n, s)?,
                })
            })
            .collect()
    }

    /// Checks the Dirichlet recursions for every admissible tuple with all
    /// orders at most `max_n`, on every full-resolution cell.
    pub fn verify_recursions(&self, max_n: usize) -> Result<RecursionResiduals> {
        let ns = self.ns();
        let table = self.table();
        let d = DirichletTable::new(table, max_n)?;
        let len = ns.size();
        let big_n = ns.resolution();
        let mut out = RecursionResiduals {
            max_n,
            ..Default::default()
        };
        let worst = |acc: &mut f64, lhs: &[Complex64], rhs: &dyn Fn(usize) -> Complex64| {
            for (x, l) in lhs.iter().enumerate() {
                *acc = acc.max((l - rhs(x)).norm());
            }
        };

        for n in 1..=max_n {
            let a = ns.top_position(n).expect("n >= 1");
            if a >= big_n {
                continue;
            }
            let na = ns.digit(n, a);
            let rest = n - na * ns.scale(a);
            let dm = d.row(ns.scale(a));
            let dr = d.row(rest);
            worst(&mut out.top_digit_split, d.row(n), &|x| {
                let top = table.rademacher_power(a, na, x);
                let quotient = if ns.digit(x, a) == 0 {
                    Complex64::new(na as f64, 0.0)
                } else {
                    (1.0 - top) / (1.0 - table.rademacher_power(a, 1, x))
                };
                quotient * dm[x] + top * dr[x]
            });
            out.tuples += 1;
        }

        for k in 0..big_n {
            let mk = ns.scale(k);
            for nk in 1..ns.m(k) {
                let base = nk * mk;
                for j in 0..mk {
                    if j + base > max_n {
                        break;
                    }
                    let (db, dj) = (d.row(base), d.row(j));
                    worst(&mut out.block_shift, d.row(j + base), &|x| {
                        db[x] + table.psi(base, x) * dj[x]
                    });
                    out.tuples += 1;
                }
            }
            for r in 0..ns.m(k) {
                for j in 0..mk {
                    if j + r * mk > max_n {
                        break;
                    }
                    let dj = d.row(j);
                    let dm = (r > 0).then(|| d.row(mk));
                    worst(&mut out.geometric_shift, d.row(j + r * mk), &|x| {
                        let head = dm.map_or(ZERO, |dm| {
                            (0..r)
                                .map(|q| table.rademacher_power(k, q, x))
                                .sum::<Complex64>()
                                * dm[x]
                        });
                        head + table.rademacher_power(k, r, x) * dj[x]
                    });
                    out.tuples += 1;
                }
            }
            for ns_digit in 1..ns.m(k) {
                let top = ns_digit * mk;
                if top > max_n {
                    break;
                }
                let dt = d.row(top);
                for j in 0..top {
                    let dj = d.row(j);
                    worst(&mut out.reflection, d.row(top - j), &|x| {
                        dt[x] - table.psi(top - 1, x) * dj[x].conj()
                    });
                    out.tuples += 1;
                }
            }
        }

        for n in 0..=max_n {
            let rec = self.dirichlet_compact(n, DirichletStrategy::Recursive)?;
            let naive = d.row(n);
            for (x, v) in naive.iter().enumerate().take(len) {
                out.product_form = out.product_form.max((v - rec.at(x)).norm());
            }
            out.tuples += 1;
        }
        Ok(out)
    }

    /// `K_n = (1/n) sum_{k=1}^{n} D_k`, full resolution.
    pub fn fejer_kernel(&self, n: usize) -> Result<StepFunction> {
        if n == 0 {
            bail!(Usage, "Fejer kernel needs n >= 1");
        }
        self.check_order(n)?;
        let nf = n as f64;
        let weights: Vec<Complex64> = (0..n)
            .map(|k| Complex64::new((n - k) as f64 / nf, 0.0))
            .collect();
        Ok(self
            .transform
            .synthesize(&weights, self.support_resolution(n))?
            .lift_full())
    }

    /// `K_n^{-alpha} = (1/A_{n-1}^{-alpha}) sum_{nu<n} A_{n-1-nu}^{-alpha} psi_nu`,
    /// full resolution, synthesized through the fast transform.
    pub fn cesaro_kernel(&self, n: usize, alpha: f64) -> Result<StepFunction> {
        Ok(self.cesaro_kernel_compact(n, alpha)?.lift_full())
    }

    pub fn cesaro_kernel_compact(&self, n: usize, alpha: f64) -> Result<StepFunction> {
        let weights = self.cesaro_weights(n, alpha)?;
        self.transform
            .synthesize(&weights, self.support_resolution(n))
    }

    /// `A_{n-1-nu}^{-alpha} / A_{n-1}^{-alpha}` for `nu < n`.
    fn cesaro_weights(&self, n: usize, alpha: f64) -> Result<Vec<Complex64>> {
        check_alpha(alpha)?;
        if n == 0 {
            bail!(Usage, "Cesaro kernel needs n >= 1");
        }
        self.check_order(n)?;
        let a = CesaroTable::new(-alpha, n - 1)?;
        let norm = a.get(n - 1);
        Ok((0..n)
            .map(|nu| Complex64::new(a.get(n - 1 - nu) / norm, 0.0))
            .collect())
    }

    /// Max over cells of `|LHS - RHS|` in
    /// `sum_{j=1}^{n} A_{n-j}^{-alpha-1} D_j = sum_k P_k D_{n_k M_k} A_{n^{(k)}-1}^{-alpha}
    ///  - sum_k P_k psi_{n_k M_k - 1} sum_{j<n_k M_k} A_{n^{(k-1)}+j}^{-alpha-1} conj(D_j)`
    /// with `P_k = prod_{l=k+1}^{A} psi_{n_l M_l}`.
    pub fn decomposition_residual(
        &self,
        n: usize,
        alpha: f64,
        reading: DecompositionReading,
    ) -> Result<f64> {
        check_alpha(alpha)?;
        if n == 0 {
            bail!(Usage, "decomposition needs n >= 1");
        }
        let d = DirichletTable::new(self.table(), n)?;
        self.decomposition_residual_with(&d, n, alpha, reading)
    }

    /// Max decomposition residual over `1 <= n <= max_n`.
    pub fn decomposition_scan(
        &self,
        max_n: usize,
        alpha: f64,
        reading: DecompositionReading,
    ) -> Result<f64> {
        check_alpha(alpha)?;
        let d = DirichletTable::new(self.table(), max_n)?;
        let residuals = (1..=max_n)
            .into_par_iter()
            .map(|n| self.decomposition_residual_with(&d, n, alpha, reading))
            .collect::<Result<Vec<_>>>()?;
        Ok(residuals.into_iter().fold(0.0, f64::max))
    }

    fn decomposition_residual_with(
        &self,
        d: &DirichletTable,
        n: usize,
        alpha: f64,
        reading: DecompositionReading,
    ) -> Result<f64> {
        let ns = self.ns();
        let table = self.table();
        let upper = CesaroTable::new(-alpha, n)?;
        let lower = CesaroTable::new(-alpha - 1.0, n)?;
        let len = ns.size();

        let mut lhs = vec![ZERO; len];
        for j in 1..=n {
            let w = lower.get(n - j);
            for (acc, v) in lhs.iter_mut().zip(d.row(j)) {
                *acc += v * w;
            }
        }

        let a = ns.top_position(n).expect("n >= 1");
        let mut rhs = vec![ZERO; len];
        for k in 0..=a {
            let nk = ns.digit(n, k);
            if nk == 0 {
                continue;
            }
            let block = nk * ns.scale(k);
            let trunc = ns.truncation(n, k as isize);
            let prev = ns.truncation(n, k as isize - 1);
            let above = n - trunc;
            let first = reading == DecompositionReading::FromZero || k >= 1;
            let head_w = upper.get(trunc - 1);
            let db = d.row(block);
            for (x, acc) in rhs.iter_mut().enumerate() {
                let p = table.psi(above, x);
                let mut term = ZERO;
                if first {
                    term += db[x] * head_w;
                }
                let mut tail = ZERO;
                for j in 0..block {
                    tail += d.row(j)[x].conj() * lower.get(prev + j);
                }
                term -= table.psi(block - 1, x) * tail;
                *acc += p * term;
            }
        }
        Ok(lhs
            .iter()
            .zip(&rhs)
            .map(|(l, r)| (l - r).norm())
            .fold(0.0, f64::max))
    }

    /// For each `n`: `sup_x |A_{n-1}^{-alpha} K_n^{-alpha}(x)| / sum_{l<=A} M_l^{-alpha} D_{M_l}(x)`.
    pub fn kernel_majorant_scan(
        &self,
        alpha: f64,
        orders: &[usize],
    ) -> Result<Vec<BoundScanRecord>> {
        check_alpha(alpha)?;
        orders
            .par_iter()
            .map(|&n| self.kernel_majorant_ratio(alpha, n))
            .collect()
    }

    fn kernel_majorant_ratio(&self, alpha: f64, n: usize) -> Result<BoundScanRecord> {
        let ns = self.ns();
        let weights = self.cesaro_weights(n, alpha)?;
        let a_top = ns.top_position(n).expect("n >= 1");
        let res = (a_top + 1)
            .min(ns.resolution())
            .max(self.support_resolution(n));
        let kernel = self.transform.synthesize(&weights, res)?;
        let norm = CesaroTable::new(-alpha, n - 1)?.get(n - 1).abs();
        let mut best = (f64::NEG_INFINITY, 0usize);
        for (x, v) in kernel.cells().iter().enumerate() {
            let majorant: f64 = (0..=a_top)
                .filter(|&l| x % ns.scale(l) == 0)
                .map(|l| (ns.scale(l) as f64).powf(1.0 - alpha))
                .sum();
            let ratio = v.norm() * norm / majorant;
            if ratio > best.0 {
                best = (ratio, x);
            }
        }
        Ok(BoundScanRecord {
            n,
            alpha,
            sup_ratio: best.0,
            argmax_cell: best.1,
            beta_ratios: Vec::new(),
        })
    }

    /// For each `n`: `|K_n^{-alpha}(Z_beta^{(k)})| beta^{1-alpha} / M_k`, `beta = 1..M_k-1`.
    ///
    /// Orders must satisfy `n < M_{k+1}` (or `n <= M_N` when `k = N`).
    pub fn coset_kernel_scan(
        &self,
        alpha: f64,
        k: usize,
        orders: &[usize],
    ) -> Result<Vec<BoundScanRecord>> {
        check_alpha(alpha)?;
        let ns = self.ns();
        if k == 0 || k > ns.resolution() {
            bail!(
                Validation,
                "scale k = {k} must lie in 1..={}",
                ns.resolution()
            );
        }
        let limit = if k < ns.resolution() {
            ns.scale(k + 1) - 1
        } else {
            ns.size()
        };
        if let Some(&bad) = orders.iter().find(|&&n| n == 0 || n > limit) {
            bail!(
                Validation,
                "order n = {bad} is outside 1..={limit} for scale {k}"
            );
        }
        let mk = ns.scale(k);
        let cells: Vec<usize> = (1..mk)
            .map(|beta| ns.coset_cell(beta, k))
            .collect::<Result<_>>()?;
        orders
            .par_iter()
            .map(|&n| {
                let kernel = self.cesaro_kernel_compact(n, alpha)?;
                let res = kernel.resolution().max(k);
                let kernel = kernel.lift(res)?;
                let ratios: Vec<f64> = cells
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| {
                        let beta = (i + 1) as f64;
                        kernel.at(c).norm() * beta.powf(1.0 - alpha) / mk as f64
                    })
                    .collect();
                let (arg, sup) =
                    ratios
                        .iter()
                        .enumerate()
                        .fold(
                            (0, f64::NEG_INFINITY),
                            |b, (i, &r)| if r > b.1 { (i, r) } else { b },
                        );
                Ok(BoundScanRecord {
                    n,
                    alpha,
                    sup_ratio: sup,
                    argmax_cell: cells.get(arg).copied().unwrap_or(0),
                    beta_ratios: ratios,
                })
            })
            .collect()
    }

    /// `[(1/n) integral |sum_{k=1}^{n} a_k D_k|] sqrt(n) / ||a||_2`.
    pub fn dirichlet_combination_ratio(&self, a: &[f64]) -> Result<f64> {
        let n = a.len();
        if n == 0 {
            bail!(Usage, "coefficient vector is empty");
        }
        self.check_order(n)?;
        let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            bail!(Domain, "coefficient vector is identically zero");
        }
        // sum_k a_k D_k = sum_nu (sum_{k > nu} a_k) psi_nu
        let mut weights = vec![ZERO; n];
        let mut tail = 0.0;
        for nu in (0..n).rev() {
            tail += a[nu];
            weights[nu] = Complex64::new(tail, 0.0);
        }
        let g = self
            .transform
            .synthesize(&weights, self.support_resolution(n))?;
        let mean_abs = g.cells().iter().map(|v| v.norm()).sum::<f64>() / g.len() as f64;
        let nf = n as f64;
        Ok(mean_abs / nf * nf.sqrt() / norm)
    }

    /// Low-frequency smoothing estimate at order `n` and scale `k`
    /// (`M_k <= n < M_{k+1}`): compares
    /// `(1/|A_n^{-alpha}|) sup_x |integral g(u) [f(x+u) - f(x)] d mu(u)|`,
    /// `g = sum_{nu < M_{k-1}} A_{n-nu}^{-alpha} psi_nu`, against
    /// `sum_{r<k} (M_r / M_k) omega(f, 1/M_k)`.
    pub fn smoothing_ratio(
        &self,
        f: &StepFunction,
        n: usize,
        k: usize,
        alpha: f64,
    ) -> Result<SmoothingRatio> {
        check_alpha(alpha)?;
        let ns = self.ns();
        if k == 0 {
            bail!(Usage, "scale k = 0 leaves an empty low-frequency block");
        }
        if k > ns.resolution() || n < ns.scale(k) || (k < ns.resolution() && n >= ns.scale(k + 1)) {
            bail!(Validation, "order n = {n} is not in [M_{k}, M_{})", k + 1);
        }
        if n > ns.size() {
            bail!(Validation, "order n = {n} exceeds M_N");
        }
        let a = CesaroTable::new(-alpha, n)?;
        let low = ns.scale(k - 1);
        let weights: Vec<Complex64> = (0..low)
            .map(|nu| Complex64::new(a.get(n - nu), 0.0))
            .collect();
        let res = f.resolution().max(k - 1);
        let f = f.lift(res)?;
        let g = self.transform.synthesize(&weights, k - 1)?.lift(res)?;
        let len = f.len();
        let lhs_values: Vec<f64> = (0..len)
            .into_par_iter()
            .map(|x| {
                let fx = f.cells()[x];
                let mut s = ZERO;
                for (u, gu) in g.cells().iter().enumerate() {
                    s += gu * (f.cells()[ns.add_index(x, u, res)] - fx);
                }
                (s / len as f64).norm()
            })
            .collect();
        let lhs = lhs_values.into_iter().fold(0.0, f64::max) / a.get(n).abs();
        let omega = modulus_of_continuity(&f, k)?;
        let factor: f64 = (0..k)
            .map(|r| ns.scale(r) as f64 / ns.scale(k) as f64)
            .sum();
        let rhs = factor * omega;
        let (ratio, anomaly) = if rhs > 0.0 {
            (lhs / rhs, false)
        } else if lhs <= 1e-12 {
            (0.0, false)
        } else {
            (f64::INFINITY, true)
        };
        Ok(SmoothingRatio {
            lhs,
            rhs,
            ratio,
            anomaly,
        })
    }
}

/// Outcome of [`Kernels::smoothing_ratio`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothingRatio {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// Set when the modulus of continuity vanishes but the left side does not.
    pub anomaly: bool,
}

/// `K_n^{-alpha}` at resolution `res` by direct character summation.
pub fn cesaro_kernel_direct(
    table: &CharacterTable,
    n: usize,
    alpha: f64,
    res: usize,
) -> Result<StepFunction> {
    check_alpha(alpha)?;
    if n == 0 {
        bail!(Usage, "Cesaro kernel needs n >= 1");
    }
    let ns = table.number_system().clone();
    ns.check_resolution(res)?;
    if n > ns.size() {
        bail!(Validation, "order n = {n} exceeds M_N = {}", ns.size());
    }
    let a = CesaroTable::new(-alpha, n - 1)?;
    let norm = a.get(n - 1);
    Ok(StepFunction::from_fn(ns, res, |x| {
        (0..n)
            .map(|nu| table.psi(nu, x) * a.get(n - 1 - nu))
            .sum::<Complex64>()
            / norm
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kernels(r: &[usize]) -> Kernels {
        Kernels::new(Arc::new(NumberSystem::from_radices(r.to_vec()).unwrap()))
    }

    #[test]
    fn dirichlet_basics() {
        let k = kernels(&[2, 3, 2]);
        for n in 0..=12 {
            let d = k.dirichlet(n, DirichletStrategy::Naive).unwrap();
            assert!((d.at(0) - n as f64).norm() < 1e-12);
            if n >= 1 {
                assert!((d.average() - 1.0).norm() < 1e-12);
            }
            let r = k.dirichlet(n, DirichletStrategy::Recursive).unwrap();
            assert!(d.sup_distance(&r).unwrap() < 1e-12, "n = {n}");
        }
        let closed = k.dirichlet(6, DirichletStrategy::Closed).unwrap();
        for x in 0..12 {
            let target = if x % 6 == 0 { 6.0 } else { 0.0 };
            assert_eq!(closed.at(x), Complex64::new(target, 0.0));
        }
        assert!(matches!(
            k.dirichlet(5, DirichletStrategy::Closed),
            Err(crate::Error::Usage(_))
        ));
        assert!(k.dirichlet(13, DirichletStrategy::Naive).is_err());
    }

    #[test]
    fn support_resolution_is_exact() {
        let k = kernels(&[2, 3, 2, 2]);
        for n in 1..=24 {
            let compact = k.dirichlet_compact(n, DirichletStrategy::Naive).unwrap();
            let full = k.dirichlet(n, DirichletStrategy::Naive).unwrap();
            let direct: Vec<Complex64> = (0..24)
                .map(|x| (0..n).map(|j| k.table().psi(j, x)).sum())
                .collect();
            for x in 0..24 {
                assert!((full.at(x) - direct[x]).norm() < 1e-12);
            }
            assert!(compact.resolution() <= k.ns().top_position(n).unwrap() + 1);
        }
    }

    #[test]
    fn recursions_hold_on_small_groups() {
        let r = kernels(&[2, 3, 2]).verify_recursions(12).unwrap();
        assert!(r.max() < 1e-12, "{r:?}");
        assert!(r.tuples > 0);
    }

    #[test]
    fn reflection_with_plus_sign_fails() {
        // the conjugate term enters with a minus sign; flipping it breaks the identity
        let k = kernels(&[2, 2, 2]);
        let d = DirichletTable::new(k.table(), 8).unwrap();
        let (top, j) = (4, 1);
        let worst = (0..8)
            .map(|x| {
                (d.row(top - j)[x]
                    - (d.row(top)[x] + k.table().psi(top - 1, x) * d.row(j)[x].conj()))
                .norm()
            })
            .fold(0.0, f64::max);
        assert!(worst > 0.5);
    }

    #[test]
    fn kernel_means_and_values() {
        let k = kernels(&[2, 2, 3]);
        let f1 = k.fejer_kernel(1).unwrap();
        assert!(f1.cells().iter().all(|v| (v - 1.0).norm() < 1e-14));
        for n in 1..=12 {
            let f = k.fejer_kernel(n).unwrap();
            assert!((f.at(0) - (n as f64 + 1.0) / 2.0).norm() < 1e-12);
            assert!((f.average() - 1.0).norm() < 1e-12);
            let c = k.cesaro_kernel(n, 0.3).unwrap();
            assert!((c.average() - 1.0).norm() < 1e-12);
            let direct = cesaro_kernel_direct(k.table(), n, 0.3, 3).unwrap();
            assert!(c.sup_distance(&direct).unwrap() < 1e-12);
        }
        let c2 = k.cesaro_kernel(2, 0.5).unwrap();
        assert!((c2.at(0) - 3.0).norm() < 1e-12);
        assert!(k.cesaro_kernel(3, 1.5).is_err());
        assert!(k.fejer_kernel(0).is_err());
    }

    #[test]
    fn decomposition_readings() {
        let k = kernels(&[2, 2, 2, 2]);
        assert!(
            k.decomposition_residual(1, 0.5, DecompositionReading::FromZero)
                .unwrap()
                < 1e-14
        );
        let zero = k
            .decomposition_scan(16, 0.5, DecompositionReading::FromZero)
            .unwrap();
        assert!(zero < 1e-12, "{zero}");
        let one = k
            .decomposition_scan(16, 0.5, DecompositionReading::FromOne)
            .unwrap();
        assert!(one > 1e-3, "{one}");
    }

    #[test]
    fn majorant_scan_first_order() {
        let k = kernels(&[2; 5]);
        let recs = k.kernel_majorant_scan(0.5, &[1, 2, 3, 32]).unwrap();
        assert!((recs[0].sup_ratio - 1.0).abs() < 1e-14);
        assert!(recs
            .iter()
            .all(|r| r.sup_ratio.is_finite() && r.sup_ratio > 0.0));
    }

    #[test]
    fn coset_scan_shape() {
        let k = kernels(&[2; 5]);
        let recs = k.coset_kernel_scan(0.5, 3, &[8, 15]).unwrap();
        assert_eq!(recs[0].beta_ratios.len(), 7);
        assert!(k.coset_kernel_scan(0.5, 3, &[16]).is_err());
        assert!(k.coset_kernel_scan(0.5, 0, &[1]).is_err());
    }

    #[test]
    fn combination_ratio() {
        let k = kernels(&[2; 6]);
        assert!((k.dirichlet_combination_ratio(&[1.0]).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(
            k.dirichlet_combination_ratio(&[0.0, 0.0]),
            Err(crate::Error::Domain(_))
        ));
        let mut basis = vec![0.0; 10];
        basis[9] = 1.0;
        let r = k.dirichlet_combination_ratio(&basis).unwrap();
        let d = k.dirichlet(10, DirichletStrategy::Naive).unwrap();
        let avg = d.cells().iter().map(|v| v.norm()).sum::<f64>() / 64.0;
        assert!((r - avg / 10f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn smoothing_ratio_constant() {
        let k = kernels(&[2; 6]);
        let ns = k.number_system().clone();
        let f = StepFunction::constant(ns, 6, Complex64::new(2.0, 0.0));
        let s = k.smoothing_ratio(&f, 16, 4, 0.5).unwrap();
        assert_eq!(s.ratio, 0.0);
        assert!(!s.anomaly);
        assert!(k.smoothing_ratio(&f, 1, 0, 0.5).is_err());
        assert!(k.smoothing_ratio(&f, 40, 4, 0.5).is_err());
    }

    #[test]
    fn stability_split() {
        let s = Stability::of(&[(1, 1.0), (2, 2.0), (3, 2.5), (4, 2.9)]);
        assert_eq!(s.lower_max, 2.0);
        assert_eq!(s.upper_max, 2.9);
        assert!(s.holds(1.5));
        assert!(!Stability::of(&[(1, 1.0), (2, f64::NAN)]).holds(1.5));
    }
}
