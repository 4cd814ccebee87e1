//! Vilenkin-Fourier analysis: coefficients, synthesis, partial sums,
//! Fejer and Cesaro `(C, -alpha)` means, and group convolution.
//!
//! Because `psi_n(x) = prod_j exp(2 pi i n_j x_j / m_j)` pairs digit `j` of
//! the frequency with coordinate `j` of the point, the transform on
//! `M_r` cells is a tensor product of small DFTs: for each axis `j` there
//! are `M_r / m_j` independent `m_j`-point DFTs along stride `M_j`, and no
//! twiddle factors couple the stages. [`VilenkinTransform::forward`] with
//! [`ForwardStrategy::Fast`] runs those stages in `O(M_r sum m_j)`;
//! [`ForwardStrategy::Naive`] is the `O(M_r^2)` definition and serves as
//! the oracle.
//!
//! Cesaro means use the frequency weights `A_{n-1-nu}^{-alpha} / A_{n-1}^{-alpha}`
//! for `nu = 0..n-1`, which is the convention under which the
//! coefficient, partial-sum and convolution forms coincide.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::binomials::CesaroTable;
use crate::characters::CharacterTable;
use crate::error::{bail, Result};
use crate::group::NumberSystem;
use crate::kernels;
use crate::step::{CoefficientVector, StepFunction};

/// Arrays at least this long run their DFT stages on the rayon pool.
const PARALLEL_LEN: usize = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ForwardStrategy {
    Naive,
    Fast,
}

/// The three equivalent ways of forming `sigma_n^{-alpha} f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CesaroRoute {
    /// `sum_nu A_{n-1-nu}^{-alpha} hat f(nu) psi_nu / A_{n-1}^{-alpha}`.
    Coefficients,
    /// `sum_{nu=0}^{n} A_{n-nu}^{-alpha-1} S_nu f / A_{n-1}^{-alpha}`.
    PartialSums,
    /// `f * K_n^{-alpha}` by direct cell summation.
    Convolution,
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        bail!(Domain, "alpha = {alpha} is outside (0, 1)");
    }
    Ok(())
}

/// Transform engine bound to one number system.
#[derive(Debug, Clone)]
pub struct VilenkinTransform {
    table: CharacterTable,
}

impl VilenkinTransform {
    pub fn new(ns: Arc<NumberSystem>) -> Self {
        Self {
            table: CharacterTable::new(ns),
        }
    }

    pub fn from_table(table: CharacterTable) -> Self {
        Self { table }
    }

    pub fn number_system(&self) -> &Arc<NumberSystem> {
        self.table.number_system()
    }

    pub fn table(&self) -> &CharacterTable {
        &self.table
    }

    fn check_owned(&self, f: &StepFunction) -> Result<()> {
        let ns = self.number_system();
        if !(Arc::ptr_eq(ns, f.number_system()) || **ns == **f.number_system()) {
            bail!(Validation, "function belongs to a different group");
        }
        Ok(())
    }

    /// `hat f(k) = integral f conj(psi_k) d mu` for `k < M_r`.
    pub fn forward(
        &self,
        f: &StepFunction,
        strategy: ForwardStrategy,
    ) -> Result<CoefficientVector> {
        match strategy {
            ForwardStrategy::Naive => self.forward_naive(f),
            ForwardStrategy::Fast => self.forward_fast(f),
        }
    }

    pub fn forward_naive(&self, f: &StepFunction) -> Result<CoefficientVector> {
        self.check_owned(f)?;
        let len = f.len();
        let scale = 1.0 / len as f64;
        let coeffs = (0..len)
            .map(|k| {
                f.cells()
                    .iter()
                    .enumerate()
                    .map(|(x, v)| v * self.table.psi(k, x).conj())
                    .sum::<Complex64>()
                    * scale
            })
            .collect();
        CoefficientVector::new(self.number_system().clone(), f.resolution(), coeffs)
    }

    pub fn forward_fast(&self, f: &StepFunction) -> Result<CoefficientVector> {
        let order: Vec<usize> = (0..f.resolution()).collect();
        self.forward_fast_ordered(f, &order)
    }

    /// Fast forward transform running the axis stages in `order`, which must
    /// be a permutation of `0..resolution`.
    pub fn forward_fast_ordered(
        &self,
        f: &StepFunction,
        order: &[usize],
    ) -> Result<CoefficientVector> {
        self.check_owned(f)?;
        check_permutation(order, f.resolution())?;
        let mut data = f.cells().to_vec();
        for &axis in order {
            self.stage(&mut data, axis, Direction::Forward);
        }
        let scale = 1.0 / data.len() as f64;
        data.iter_mut().for_each(|v| *v *= scale);
        CoefficientVector::new(self.number_system().clone(), f.resolution(), data)
    }

    /// Synthesis `sum_k c_k psi_k` through the fast stages.
    pub fn inverse(&self, c: &CoefficientVector) -> Result<StepFunction> {
        if **self.number_system() != **c.number_system() {
            bail!(Validation, "coefficients belong to a different group");
        }
        let mut data = c.coeffs().to_vec();
        for axis in 0..c.resolution() {
            self.stage(&mut data, axis, Direction::Inverse);
        }
        StepFunction::new(self.number_system().clone(), c.resolution(), data)
    }

    /// Synthesis by direct summation, `O(M_r^2)`.
    pub fn inverse_naive(&self, c: &CoefficientVector) -> Result<StepFunction> {
        if **self.number_system() != **c.number_system() {
            bail!(Validation, "coefficients belong to a different group");
        }
        let cells = (0..c.coeffs().len())
            .map(|x| {
                c.coeffs()
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v != Complex64::new(0.0, 0.0))
                    .map(|(k, v)| v * self.table.psi(k, x))
                    .sum()
            })
            .collect();
        StepFunction::new(self.number_system().clone(), c.resolution(), cells)
    }

    /// Synthesizes `sum_{k < weights.len()} weights[k] psi_k` at resolution `res`.
    pub fn synthesize(&self, weights: &[Complex64], res: usize) -> Result<StepFunction> {
        let ns = self.number_system();
        ns.check_resolution(res)?;
        let len = ns.scale(res);
        if weights.len() > len {
            bail!(
                Validation,
                "{} frequencies do not fit resolution {res} ({len} cells)",
                weights.len()
            );
        }
        let mut coeffs = weights.to_vec();
        coeffs.resize(len, Complex64::new(0.0, 0.0));
        self.inverse(&CoefficientVector::new(ns.clone(), res, coeffs)?)
    }

    fn stage(&self, data: &mut [Complex64], axis: usize, dir: Direction) {
        let ns = self.number_system();
        let m = ns.m(axis);
        let stride = ns.scale(axis);
        let block = ns.scale(axis + 1);
        let roots: Vec<Complex64> = (0..m).map(|a| self.table.root(axis, a)).collect();
        let run = |chunk: &mut [Complex64]| dft_block(chunk, m, stride, &roots, dir);
        if data.len() >= PARALLEL_LEN && data.len() / block >= 2 {
            data.par_chunks_mut(block).for_each(run);
        } else {
            data.chunks_mut(block).for_each(run);
        }
    }

    /// Brings `f` to a resolution whose cell count covers `n` frequencies.
    fn covering(&self, f: &StepFunction, n: usize) -> Result<StepFunction> {
        self.check_owned(f)?;
        let ns = self.number_system();
        if n > ns.size() {
            bail!(Validation, "n = {n} exceeds M_N = {}", ns.size());
        }
        if n <= f.len() {
            return Ok(f.clone());
        }
        let res = (f.resolution()..=ns.resolution())
            .find(|&r| ns.scale(r) >= n)
            .unwrap_or(ns.resolution());
        f.lift(res)
    }

    /// Applies the frequency multiplier `weights[k]` (zero beyond its length).
    fn multiplier(
        &self,
        f: &StepFunction,
        weights: impl Fn(usize) -> f64,
        n: usize,
    ) -> Result<StepFunction> {
        let f = self.covering(f, n)?;
        let mut c = self.forward_fast(&f)?;
        for (k, v) in c.coeffs_mut().iter_mut().enumerate() {
            *v *= if k < n { weights(k) } else { 0.0 };
        }
        self.inverse(&c)
    }

    /// `S_n f = sum_{k<n} hat f(k) psi_k`, with `S_0 f = 0`.
    pub fn partial_sum(&self, f: &StepFunction, n: usize) -> Result<StepFunction> {
        self.multiplier(f, |_| 1.0, n)
    }

    /// `sigma_n f = (1/n) sum_{k=1}^{n} S_k f`.
    pub fn fejer_mean(&self, f: &StepFunction, n: usize) -> Result<StepFunction> {
        if n == 0 {
            bail!(Usage, "Fejer mean needs n >= 1");
        }
        let nf = n as f64;
        self.multiplier(f, |k| (n - k) as f64 / nf, n)
    }

    /// `sigma_n^{-alpha} f` along the requested route.
    pub fn cesaro_mean(
        &self,
        f: &StepFunction,
        n: usize,
        alpha: f64,
        route: CesaroRoute,
    ) -> Result<StepFunction> {
        check_alpha(alpha)?;
        if n == 0 {
            bail!(Usage, "Cesaro mean needs n >= 1");
        }
        match route {
            CesaroRoute::Coefficients => {
                let a = CesaroTable::new(-alpha, n)?;
                let norm = a.get(n - 1);
                self.multiplier(f, |nu| a.get(n - 1 - nu) / norm, n)
            }
            CesaroRoute::PartialSums => self.cesaro_by_partial_sums(f, n, alpha),
            CesaroRoute::Convolution => {
                let f = self.covering(f, n)?;
                let kernel = kernels::cesaro_kernel_direct(&self.table, n, alpha, f.resolution())?;
                self.convolve_direct(&f, &kernel)
            }
        }
    }

    fn cesaro_by_partial_sums(
        &self,
        f: &StepFunction,
        n: usize,
        alpha: f64,
    ) -> Result<StepFunction> {
        let f = self.covering(f, n)?;
        let coeffs = self.forward_fast(&f)?;
        let lower = CesaroTable::new(-alpha - 1.0, n)?;
        let norm = CesaroTable::new(-alpha, n)?.get(n - 1);
        let len = f.len();
        let mut partial = vec![Complex64::new(0.0, 0.0); len];
        let mut acc = vec![Complex64::new(0.0, 0.0); len];
        for nu in 0..=n {
            // S_nu enters with weight A_{n-nu}^{-alpha-1}; S_0 = 0.
            let w = lower.get(n - nu);
            for (a, s) in acc.iter_mut().zip(&partial) {
                *a += s * w;
            }
            if nu < n {
                let c = coeffs.coeffs()[nu];
                for (x, s) in partial.iter_mut().enumerate() {
                    *s += c * self.table.psi(nu, x);
                }
            }
        }
        acc.iter_mut().for_each(|v| *v /= norm);
        StepFunction::new(self.number_system().clone(), f.resolution(), acc)
    }

    /// `(f * g)(x) = integral f(x - t) g(t) d mu(t)`.
    ///
    /// Uses the coefficient product when both inputs are at the full
    /// resolution and direct cell summation otherwise.
    pub fn convolve(&self, f: &StepFunction, g: &StepFunction) -> Result<StepFunction> {
        let full = self.number_system().resolution();
        if f.resolution() == full && g.resolution() == full {
            self.convolve_fast(f, g)
        } else {
            self.convolve_direct(f, g)
        }
    }

    pub fn convolve_direct(&self, f: &StepFunction, g: &StepFunction) -> Result<StepFunction> {
        self.check_owned(f)?;
        f.check_compatible(g)?;
        let ns = self.number_system();
        let res = f.resolution();
        let len = f.len();
        let cells = (0..len)
            .into_par_iter()
            .map(|x| {
                let mut s = Complex64::new(0.0, 0.0);
                for (t, gt) in g.cells().iter().enumerate() {
                    s += f.cells()[ns.sub_index(x, t, res)] * gt;
                }
                s / len as f64
            })
            .collect();
        StepFunction::new(ns.clone(), res, cells)
    }

    pub fn convolve_fast(&self, f: &StepFunction, g: &StepFunction) -> Result<StepFunction> {
        self.check_owned(f)?;
        f.check_compatible(g)?;
        let mut a = self.forward_fast(f)?;
        let b = self.forward_fast(g)?;
        for (x, y) in a.coeffs_mut().iter_mut().zip(b.coeffs()) {
            *x *= y;
        }
        self.inverse(&a)
    }
}

/// `max_x |f(x) - g(x)|`.
pub fn sup_distance(f: &StepFunction, g: &StepFunction) -> Result<f64> {
    f.sup_distance(g)
}

#[derive(Clone, Copy)]
enum Direction {
    Forward,
    Inverse,
}

fn check_permutation(order: &[usize], res: usize) -> Result<()> {
    let mut seen = vec![false; res];
    if order.len() != res {
        bail!(
            Validation,
            "axis order has {} entries, expected {res}",
            order.len()
        );
    }
    for &a in order {
        if a >= res || seen[a] {
            bail!(
                Validation,
                "axis order {order:?} is not a permutation of 0..{res}"
            );
        }
        seen[a] = true;
    }
    Ok(())
}

/// Runs the `m`-point DFTs of one contiguous block of length `m * stride`.
fn dft_block(
    chunk: &mut [Complex64],
    m: usize,
    stride: usize,
    roots: &[Complex64],
    dir: Direction,
) {
    if m == 2 {
        let (lo, hi) = chunk.split_at_mut(stride);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = x + y;
            *b = x - y;
        }
        return;
    }
    let mut input = vec![Complex64::new(0.0, 0.0); m];
    for inner in 0..stride {
        for (d, slot) in input.iter_mut().enumerate() {
            *slot = chunk[inner + d * stride];
        }
        for freq in 0..m {
            let mut acc = input[0];
            for (d, v) in input.iter().enumerate().skip(1) {
                let e = freq * d % m;
                let w = match dir {
                    Direction::Forward => roots[(m - e) % m],
                    Direction::Inverse => roots[e],
                };
                acc += v * w;
            }
            chunk[inner + freq * stride] = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn engine(r: &[usize]) -> VilenkinTransform {
        VilenkinTransform::new(Arc::new(NumberSystem::from_radices(r.to_vec()).unwrap()))
    }

    fn pseudo_random(ns: &Arc<NumberSystem>, seed: u64) -> StepFunction {
        let mut s = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let mut next = move || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        StepFunction::from_fn(ns.clone(), ns.resolution(), |_| {
            Complex64::new(next(), next())
        })
    }

    #[test]
    fn constant_and_character_spectra() {
        let t = engine(&[2, 3, 4]);
        let ns = t.number_system().clone();
        let one = StepFunction::constant(ns.clone(), 3, Complex64::new(1.0, 0.0));
        let c = t.forward_fast(&one).unwrap();
        assert!((c.coeffs()[0] - 1.0).norm() < 1e-15);
        assert!(c.coeffs()[1..].iter().all(|v| v.norm() < 1e-15));
        let psi5 = StepFunction::new(ns.clone(), 3, t.table().row(5, 3)).unwrap();
        for strat in [ForwardStrategy::Naive, ForwardStrategy::Fast] {
            let c = t.forward(&psi5, strat).unwrap();
            for (k, v) in c.coeffs().iter().enumerate() {
                let target = if k == 5 { 1.0 } else { 0.0 };
                assert!((v - target).norm() < 1e-12, "{strat:?} k={k}");
            }
        }
    }

    #[test]
    fn fast_matches_naive_and_round_trips() {
        for r in [&[2usize, 4, 4, 2][..], &[3, 2, 5], &[2, 2, 2, 2, 2]] {
            let t = engine(r);
            let ns = t.number_system().clone();
            for seed in 0..5 {
                let f = pseudo_random(&ns, seed);
                let a = t.forward_naive(&f).unwrap();
                let b = t.forward_fast(&f).unwrap();
                assert!(a.max_distance(&b).unwrap() < 1e-12);
                let back = t.inverse(&b).unwrap();
                assert!(back.sup_distance(&f).unwrap() < 1e-12);
                let back = t.inverse_naive(&b).unwrap();
                assert!(back.sup_distance(&f).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn stage_order_is_irrelevant() {
        let t = engine(&[3, 2, 4, 2]);
        let ns = t.number_system().clone();
        let f = pseudo_random(&ns, 7);
        let a = t.forward_fast(&f).unwrap();
        let b = t.forward_fast_ordered(&f, &[3, 1, 0, 2]).unwrap();
        assert!(a.max_distance(&b).unwrap() < 1e-13);
        assert!(t.forward_fast_ordered(&f, &[0, 0, 1, 2]).is_err());
    }

    #[test]
    fn inverse_edge_cases() {
        let t = engine(&[2, 3]);
        let ns = t.number_system().clone();
        let e4 = CoefficientVector::unit(ns.clone(), 2, 4).unwrap();
        let g = t.inverse(&e4).unwrap();
        let psi4 = StepFunction::new(ns.clone(), 2, t.table().row(4, 2)).unwrap();
        assert!(g.sup_distance(&psi4).unwrap() < 1e-14);
        let z = CoefficientVector::new(ns.clone(), 2, vec![Complex64::new(0.0, 0.0); 6]).unwrap();
        assert_eq!(t.inverse(&z).unwrap().sup_norm(), 0.0);
    }

    #[test]
    fn partial_sums_and_means() {
        let t = engine(&[2, 3, 2]);
        let ns = t.number_system().clone();
        let f = pseudo_random(&ns, 3);
        assert_eq!(t.partial_sum(&f, 0).unwrap().sup_norm(), 0.0);
        assert!(t.partial_sum(&f, 12).unwrap().sup_distance(&f).unwrap() < 1e-12);
        assert!(t.partial_sum(&f, 13).is_err());
        let s1 = t.fejer_mean(&f, 1).unwrap();
        assert!(s1.cells().iter().all(|v| (v - f.average()).norm() < 1e-12));
        assert!(t.fejer_mean(&f, 0).is_err());
        assert!(matches!(
            t.cesaro_mean(&f, 3, 1.0, CesaroRoute::Coefficients),
            Err(crate::Error::Domain(_))
        ));
        let c1 = t.cesaro_mean(&f, 1, 0.5, CesaroRoute::PartialSums).unwrap();
        assert!(c1.cells().iter().all(|v| (v - f.average()).norm() < 1e-12));
    }

    #[test]
    fn coarse_functions_are_lifted_when_needed() {
        let t = engine(&[2, 2, 2]);
        let ns = t.number_system().clone();
        let f = StepFunction::from_fn(ns.clone(), 1, |c| Complex64::new(c as f64, 0.0));
        let s = t.partial_sum(&f, 6).unwrap();
        assert_eq!(s.resolution(), 3);
        assert!(s.sup_distance(&f.lift(3).unwrap()).unwrap() < 1e-14);
    }

    #[test]
    fn convolution_paths_agree() {
        let t = engine(&[3, 2, 2]);
        let ns = t.number_system().clone();
        let f = pseudo_random(&ns, 1);
        let g = pseudo_random(&ns, 2);
        let a = t.convolve_direct(&f, &g).unwrap();
        let b = t.convolve_fast(&f, &g).unwrap();
        assert!(a.sup_distance(&b).unwrap() < 1e-12);
        let c = t.convolve_direct(&g, &f).unwrap();
        assert!(a.sup_distance(&c).unwrap() < 1e-12);
        // M_N times the indicator of the zero cell is the identity
        let delta = StepFunction::from_fn(ns.clone(), 3, |x| {
            Complex64::new(if x == 0 { ns.size() as f64 } else { 0.0 }, 0.0)
        });
        assert!(t.convolve(&f, &delta).unwrap().sup_distance(&f).unwrap() < 1e-12);
    }
}
