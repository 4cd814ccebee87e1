//! Generalized Rademacher functions and the Vilenkin character system.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{bail, Result};
use crate::group::{GroupElement, NumberSystem};

/// A unimodular character value.
pub type CharacterValue = Complex64;

/// `exp(2 pi i a / m)` with `a` reduced mod `m` first.
pub fn root_of_unity(a: usize, m: usize) -> Complex64 {
    let a = a % m;
    if a == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 2 * a == m {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * a == m {
        return Complex64::new(0.0, 1.0);
    }
    if 4 * a == 3 * m {
        return Complex64::new(0.0, -1.0);
    }
    Complex64::from_polar(1.0, 2.0 * PI * a as f64 / m as f64)
}

/// `r_k(x) = exp(2 pi i x_k / m_k)`.
pub fn rademacher(ns: &NumberSystem, k: usize, x: &GroupElement) -> Result<CharacterValue> {
    if k >= x.resolution() {
        bail!(
            Validation,
            "coordinate {k} is outside resolution {}",
            x.resolution()
        );
    }
    Ok(root_of_unity(x.digit(k), ns.m(k)))
}

/// `psi_n(x) = prod_k r_k(x)^{n_k}`.
pub fn vilenkin(ns: &NumberSystem, n: usize, x: &GroupElement) -> Result<CharacterValue> {
    if n >= ns.size() {
        bail!(Validation, "n = {n} is outside [0, M_N = {})", ns.size());
    }
    let nd = ns.digits_unchecked(n, ns.resolution());
    let mut v = Complex64::new(1.0, 0.0);
    for (j, &d) in nd.iter().enumerate() {
        if d != 0 {
            v *= root_of_unity(d * x.digit(j), ns.m(j));
        }
    }
    Ok(v)
}

/// Memoized `m_j`-th roots of unity per coordinate.
///
/// Every character evaluation inside the transforms and kernels goes through
/// this table, so equal angles always produce bit-identical values.
#[derive(Debug, Clone)]
pub struct CharacterTable {
    ns: Arc<NumberSystem>,
    roots: Vec<Vec<Complex64>>,
}

impl CharacterTable {
    pub fn new(ns: Arc<NumberSystem>) -> Self {
        let roots = ns
            .radix()
            .radices()
            .iter()
            .map(|&m| (0..m).map(|a| root_of_unity(a, m)).collect())
            .collect();
        Self { ns, roots }
    }

    pub fn number_system(&self) -> &Arc<NumberSystem> {
        &self.ns
    }

    /// `exp(2 pi i a / m_j)`.
    #[inline]
    pub fn root(&self, j: usize, a: usize) -> Complex64 {
        self.roots[j][a % self.ns.m(j)]
    }

    /// `r_j(x)^{power}` where `x` is a cell index.
    #[inline]
    pub fn rademacher_power(&self, j: usize, power: usize, cell: usize) -> Complex64 {
        let m = self.ns.m(j);
        self.roots[j][(power % m) * self.ns.digit(cell, j) % m]
    }

    /// `psi_n(x)` for a cell index `x`; both are read digitwise.
    #[inline]
    pub fn psi(&self, n: usize, cell: usize) -> Complex64 {
        let (mut n, mut x) = (n, cell);
        let mut v = Complex64::new(1.0, 0.0);
        let mut j = 0;
        while n != 0 {
            let m = self.ns.m(j);
            let (nj, xj) = (n % m, x % m);
            if nj != 0 && xj != 0 {
                v *= self.roots[j][nj * xj % m];
            }
            n /= m;
            x /= m;
            j += 1;
        }
        v
    }

    /// Values of `psi_n` on every cell at resolution `res`.
    pub fn row(&self, n: usize, res: usize) -> Vec<Complex64> {
        (0..self.ns.scale(res)).map(|x| self.psi(n, x)).collect()
    }
}

/// Max deviation of the Gram matrix `(1/M) sum_x psi_j(x) conj(psi_k(x))`
/// from the identity, evaluated by brute force at resolution `res`.
pub fn gram_deviation(table: &CharacterTable, res: usize) -> f64 {
    let size = table.ns.scale(res);
    let rows: Vec<Vec<Complex64>> = (0..size).map(|n| table.row(n, res)).collect();
    let mut worst = 0.0f64;
    for j in 0..size {
        for k in j..size {
            let s: Complex64 = rows[j]
                .iter()
                .zip(&rows[k])
                .map(|(a, b)| a * b.conj())
                .sum::<Complex64>()
                / size as f64;
            let target = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((s - target).norm());
        }
    }
    worst
}

/// Max residual of `psi_{M_k}^{-n_k}(e_k) psi_{M_k}^{n_k}(t) = psi_{M_k}^{n_k}(t - e_k)`
/// over `1 <= n_k < m_k` and every cell `t` at resolution `res > k`.
pub fn shift_identity_residual(table: &CharacterTable, k: usize, res: usize) -> f64 {
    let ns = &table.ns;
    let e_k = ns.scale(k);
    let mut worst = 0.0f64;
    for nk in 1..ns.m(k) {
        let freq = nk * ns.scale(k);
        let at_unit = table.psi(freq, e_k).conj();
        for t in 0..ns.scale(res) {
            let lhs = at_unit * table.psi(freq, t);
            let rhs = table.psi(freq, ns.sub_index(t, e_k, res));
            worst = worst.max((lhs - rhs).norm());
        }
    }
    worst
}

/// `|1 - psi_{M_k}^{-n_k}(e_k)|`, which equals `2 |sin(pi n_k / m_k)|`.
pub fn unit_shift_distance(table: &CharacterTable, k: usize, nk: usize) -> f64 {
    let v = table.psi(nk * table.ns.scale(k), table.ns.scale(k)).conj();
    (Complex64::new(1.0, 0.0) - v).norm()
}
