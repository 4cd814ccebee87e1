//! The bounded Vilenkin group `G_m` truncated at a finite resolution.
//!
//! An element is a little-endian digit vector `x_0, x_1, ..., x_{N-1}` with
//! `0 <= x_j < m_j`. Two integer encodings of digit vectors are used:
//!
//! * the *cell index* `sum x_j M_j` (natural weights), which addresses the
//!   `I_N`-cells of a [`StepFunction`](crate::StepFunction);
//! * the *coset index* `beta = sum_{j<k} x_j M_k / M_{j+1}` (reversed weights),
//!   which enumerates the representatives `Z_beta^{(k)}` of `G_m / I_k`.
//!
//! Both conversions are explicit methods on [`NumberSystem`].

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};

/// The radix vector `m_0, ..., m_{N-1}`, every entry at least 2.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RadixSequence {
    radices: Arc<[usize]>,
    max_radix: usize,
}

impl RadixSequence {
    pub fn new(radices: Vec<usize>) -> Result<Self> {
        if radices.is_empty() {
            bail!(Validation, "radix sequence must be nonempty");
        }
        if let Some((k, &m)) = radices.iter().enumerate().find(|(_, &m)| m < 2) {
            bail!(Validation, "radix m_{k} = {m} is smaller than 2");
        }
        let max_radix = radices.iter().copied().max().unwrap_or(2);
        Ok(Self {
            radices: radices.into(),
            max_radix,
        })
    }

    /// `m_k = radix` for `k < length`.
    pub fn constant(radix: usize, length: usize) -> Result<Self> {
        Self::new(vec![radix; length])
    }

    /// Cycles `pattern` until `length` entries are produced.
    pub fn pattern(pattern: &[usize], length: usize) -> Result<Self> {
        if pattern.is_empty() {
            bail!(Validation, "radix pattern must be nonempty");
        }
        Self::new(pattern.iter().copied().cycle().take(length).collect())
    }

    /// The Walsh-Paley case `m = 2`.
    pub fn walsh(length: usize) -> Result<Self> {
        Self::constant(2, length)
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub fn len(&self) -> usize {
        self.radices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radices.is_empty()
    }

    pub fn max_radix(&self) -> usize {
        self.max_radix
    }

    pub fn is_walsh(&self) -> bool {
        self.max_radix == 2
    }

    /// Short label, e.g. `2^10` or `2,3,4,2`.
    pub fn label(&self) -> String {
        let first = self.radices[0];
        if self.radices.iter().all(|&m| m == first) {
            format!("{}^{}", first, self.radices.len())
        } else {
            self.radices
                .iter()
                .map(|m| m.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
    }
}

impl fmt::Debug for RadixSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RadixSequence({:?})", &self.radices[..])
    }
}

impl Serialize for RadixSequence {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.radices.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RadixSequence {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        RadixSequence::new(v).map_err(serde::de::Error::custom)
    }
}

/// The generalized number system `M_0 = 1, M_{k+1} = m_k M_k`.
#[derive(Clone, PartialEq, Eq)]
pub struct NumberSystem {
    radix: RadixSequence,
    scales: Vec<usize>,
}

impl fmt::Debug for NumberSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumberSystem")
            .field("radix", &&self.radix.radices[..])
            .field("scales", &self.scales)
            .finish()
    }
}

impl NumberSystem {
    pub fn new(radix: RadixSequence) -> Result<Self> {
        let mut scales = Vec::with_capacity(radix.len() + 1);
        scales.push(1usize);
        for (k, &m) in radix.radices().iter().enumerate() {
            let prev = scales[k];
            match prev.checked_mul(m) {
                Some(next) => scales.push(next),
                None => bail!(
                    Configuration,
                    "M_{} = {prev} * {m} overflows the exact integer range",
                    k + 1
                ),
            }
        }
        Ok(Self { radix, scales })
    }

    pub fn from_radices(radices: Vec<usize>) -> Result<Self> {
        Self::new(RadixSequence::new(radices)?)
    }

    pub fn radix(&self) -> &RadixSequence {
        &self.radix
    }

    /// `m_k`.
    pub fn m(&self, k: usize) -> usize {
        self.radix.radices[k]
    }

    /// `M_k` for `0 <= k <= N`.
    pub fn scale(&self, k: usize) -> usize {
        self.scales[k]
    }

    /// The full ladder `M_0, ..., M_N`.
    pub fn scales(&self) -> &[usize] {
        &self.scales
    }

    /// The resolution `N` (number of stored coordinates).
    pub fn resolution(&self) -> usize {
        self.radix.len()
    }

    /// `M_N`, the number of `I_N`-cells.
    pub fn size(&self) -> usize {
        self.scales[self.resolution()]
    }

    /// The `A` with `M_A <= n < M_{A+1}`, or `None` for `n = 0`.
    ///
    /// For `n = M_N` this returns `N`.
    pub fn top_position(&self, n: usize) -> Option<usize> {
        if n == 0 {
            return None;
        }
        let pos = self.scales.partition_point(|&s| s <= n);
        Some(pos - 1)
    }

    /// Mixed-radix digits of `n`, `N` entries little-endian.
    pub fn digits_of(&self, n: usize) -> Result<Vec<usize>> {
        if n >= self.size() {
            bail!(Validation, "n = {n} is outside [0, M_N = {})", self.size());
        }
        Ok(self.digits_unchecked(n, self.resolution()))
    }

    pub(crate) fn digits_unchecked(&self, mut n: usize, len: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(len);
        for j in 0..len {
            let m = self.m(j);
            out.push(n % m);
            n /= m;
        }
        out
    }

    /// Digit `j` of `n` (zero beyond the stored resolution).
    pub fn digit(&self, n: usize, j: usize) -> usize {
        if j >= self.resolution() {
            return if j == self.resolution() {
                n / self.size()
            } else {
                0
            };
        }
        (n / self.scales[j]) % self.m(j)
    }

    /// `n^{(a)} = n_a M_a + ... + n_0 M_0`; `a = -1` gives 0.
    pub fn truncation(&self, n: usize, a: isize) -> usize {
        if a < 0 {
            return 0;
        }
        let a = a as usize;
        if a + 1 >= self.scales.len() {
            return n;
        }
        n % self.scales[a + 1]
    }

    /// Inverse of [`digits_of`](Self::digits_of): `sum x_j M_j`.
    pub fn index_of(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() > self.resolution() {
            bail!(
                Validation,
                "{} digits exceed resolution {}",
                digits.len(),
                self.resolution()
            );
        }
        let mut idx = 0;
        for (j, &x) in digits.iter().enumerate() {
            if x >= self.m(j) {
                bail!(
                    Validation,
                    "digit x_{j} = {x} is not below m_{j} = {}",
                    self.m(j)
                );
            }
            idx += x * self.scales[j];
        }
        Ok(idx)
    }

    /// The element with cell index `index` at resolution `res`.
    pub fn element(&self, index: usize, res: usize) -> Result<GroupElement> {
        self.check_resolution(res)?;
        if index >= self.scales[res] {
            bail!(Validation, "cell index {index} is outside [0, M_{res})");
        }
        Ok(GroupElement {
            radix: self.radix.clone(),
            digits: self.digits_unchecked(index, res),
        })
    }

    /// `e_n`: digit 1 at coordinate `n`, zero elsewhere.
    pub fn unit(&self, n: usize, res: usize) -> Result<GroupElement> {
        self.check_resolution(res)?;
        if n >= res {
            bail!(Validation, "coordinate {n} is outside resolution {res}");
        }
        let mut digits = vec![0; res];
        digits[n] = 1;
        Ok(GroupElement {
            radix: self.radix.clone(),
            digits,
        })
    }

    pub fn zero(&self, res: usize) -> Result<GroupElement> {
        self.check_resolution(res)?;
        Ok(GroupElement {
            radix: self.radix.clone(),
            digits: vec![0; res],
        })
    }

    pub(crate) fn check_resolution(&self, res: usize) -> Result<()> {
        if res > self.resolution() {
            bail!(
                Validation,
                "resolution {res} exceeds the number system's {}",
                self.resolution()
            );
        }
        Ok(())
    }

    /// Digitwise sum of two cell indices at resolution `res`.
    pub fn add_index(&self, a: usize, b: usize, res: usize) -> usize {
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        for j in 0..res {
            let m = self.m(j);
            let s = a % m + b % m;
            out += if s >= m { s - m } else { s } * self.scales[j];
            a /= m;
            b /= m;
        }
        out
    }

    /// Digitwise difference `a - b` of two cell indices at resolution `res`.
    pub fn sub_index(&self, a: usize, b: usize, res: usize) -> usize {
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        for j in 0..res {
            let m = self.m(j);
            let (x, y) = (a % m, b % m);
            out += if x >= y { x - y } else { x + m - y } * self.scales[j];
            a /= m;
            b /= m;
        }
        out
    }

    /// Cell index of `-x` at resolution `res`.
    pub fn neg_index(&self, a: usize, res: usize) -> usize {
        self.sub_index(0, a, res)
    }

    /// Weights `M_k / M_{j+1}` of the coset index at scale `k`, for `j < k`.
    pub fn coset_weights(&self, k: usize) -> Vec<usize> {
        (0..k)
            .map(|j| self.scales[k] / self.scales[j + 1])
            .collect()
    }

    /// Digits `x_0..x_{k-1}` of `Z_beta^{(k)}`.
    pub fn coset_digits(&self, beta: usize, k: usize) -> Result<Vec<usize>> {
        if k > self.resolution() {
            bail!(
                Validation,
                "scale {k} exceeds resolution {}",
                self.resolution()
            );
        }
        if beta >= self.scales[k] {
            bail!(
                Validation,
                "beta = {beta} is outside [0, M_{k} = {})",
                self.scales[k]
            );
        }
        // x_{k-1} carries weight 1, x_{k-2} weight m_{k-1}, ...: reversed decoding.
        let mut digits = vec![0; k];
        let mut rest = beta;
        for j in (0..k).rev() {
            let m = self.m(j);
            digits[j] = rest % m;
            rest /= m;
        }
        Ok(digits)
    }

    /// The coset representative `Z_beta^{(k)} = (x_0, ..., x_{k-1}, 0, ...)`.
    pub fn coset_rep(&self, beta: usize, k: usize) -> Result<GroupElement> {
        let mut digits = self.coset_digits(beta, k)?;
        digits.resize(self.resolution(), 0);
        Ok(GroupElement {
            radix: self.radix.clone(),
            digits,
        })
    }

    /// Cell index of `Z_beta^{(k)}`; it is also the residue mod `M_k` shared
    /// by every cell of the coset `I_k + Z_beta^{(k)}`.
    pub fn coset_cell(&self, beta: usize, k: usize) -> Result<usize> {
        let digits = self.coset_digits(beta, k)?;
        Ok(digits
            .iter()
            .enumerate()
            .map(|(j, &x)| x * self.scales[j])
            .sum())
    }

    /// Inverse of [`coset_digits`](Self::coset_digits) on the first `k`
    /// digits of `x`: the `beta` with `x in I_k + Z_beta^{(k)}`.
    pub fn coset_index_of(&self, x: &GroupElement, k: usize) -> Result<CosetIndex> {
        if k > x.resolution() {
            bail!(
                Validation,
                "scale {k} exceeds element resolution {}",
                x.resolution()
            );
        }
        let beta = self
            .coset_weights(k)
            .iter()
            .zip(&x.digits[..k])
            .map(|(w, d)| w * d)
            .sum::<usize>();
        Ok(CosetIndex { beta, scale: k })
    }

    /// Cell indices (at resolution `res`) of the coset `I_k + Z_beta^{(k)}`.
    pub fn coset_cells(
        &self,
        beta: usize,
        k: usize,
        res: usize,
    ) -> Result<impl Iterator<Item = usize>> {
        self.check_resolution(res)?;
        if k > res {
            bail!(Validation, "scale {k} exceeds resolution {res}");
        }
        let base = self.coset_cell(beta, k)?;
        let step = self.scales[k];
        let count = self.scales[res] / step;
        Ok((0..count).map(move |t| base + t * step))
    }
}

/// A point of `G_m` given by its first `resolution` coordinates.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupElement {
    radix: RadixSequence,
    digits: Vec<usize>,
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElement{:?}", self.digits)
    }
}

impl GroupElement {
    pub fn new(radix: RadixSequence, digits: Vec<usize>) -> Result<Self> {
        if digits.len() > radix.len() {
            bail!(
                Validation,
                "{} digits exceed radix length {}",
                digits.len(),
                radix.len()
            );
        }
        for (j, &x) in digits.iter().enumerate() {
            if x >= radix.radices[j] {
                bail!(
                    Validation,
                    "digit x_{j} = {x} is not below m_{j} = {}",
                    radix.radices[j]
                );
            }
        }
        Ok(Self { radix, digits })
    }

    pub fn digits(&self) -> &[usize] {
        &self.digits
    }

    /// Coordinate `j`, zero past the stored resolution.
    pub fn digit(&self, j: usize) -> usize {
        self.digits.get(j).copied().unwrap_or(0)
    }

    pub fn resolution(&self) -> usize {
        self.digits.len()
    }

    pub fn radix(&self) -> &RadixSequence {
        &self.radix
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.radix != other.radix || self.digits.len() != other.digits.len() {
            bail!(
                Validation,
                "elements live in different groups or resolutions ({:?} vs {:?})",
                self.radix,
                other.radix
            );
        }
        Ok(())
    }

    /// Digitwise sum mod `m_k`, no carries.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let digits = self
            .digits
            .iter()
            .zip(&other.digits)
            .zip(self.radix.radices.iter())
            .map(|((&x, &y), &m)| (x + y) % m)
            .collect();
        Ok(Self {
            radix: self.radix.clone(),
            digits,
        })
    }

    pub fn neg(&self) -> Self {
        let digits = self
            .digits
            .iter()
            .zip(self.radix.radices.iter())
            .map(|(&x, &m)| (m - x) % m)
            .collect();
        Self {
            radix: self.radix.clone(),
            digits,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Position of the first nonzero digit.
    pub fn first_nonzero(&self) -> Option<usize> {
        self.digits.iter().position(|&d| d != 0)
    }
}

/// `beta` in `[0, M_k)` naming the coset `I_k + Z_beta^{(k)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CosetIndex {
    pub beta: usize,
    pub scale: usize,
}

impl CosetIndex {
    pub fn new(beta: usize, scale: usize, ns: &NumberSystem) -> Result<Self> {
        if scale > ns.resolution() {
            bail!(
                Validation,
                "scale {scale} exceeds resolution {}",
                ns.resolution()
            );
        }
        if beta >= ns.scale(scale) {
            bail!(Validation, "beta = {beta} is outside [0, M_{scale})");
        }
        Ok(Self { beta, scale })
    }

    pub fn representative(&self, ns: &NumberSystem) -> Result<GroupElement> {
        ns.coset_rep(self.beta, self.scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ns(r: &[usize]) -> NumberSystem {
        NumberSystem::from_radices(r.to_vec()).unwrap()
    }

    fn el(r: &[usize], d: &[usize]) -> GroupElement {
        GroupElement::new(RadixSequence::new(r.to_vec()).unwrap(), d.to_vec()).unwrap()
    }

    #[test]
    fn ladder() {
        assert_eq!(ns(&[2, 2, 2]).scales(), &[1, 2, 4, 8]);
        assert_eq!(ns(&[2, 3, 4]).scales(), &[1, 2, 6, 24]);
        assert!(matches!(
            RadixSequence::new(vec![5, 1]),
            Err(crate::Error::Validation(_))
        ));
        assert!(matches!(
            NumberSystem::new(RadixSequence::constant(2, 80).unwrap()),
            Err(crate::Error::Configuration(_))
        ));
    }

    #[test]
    fn radix_builders() {
        let p = RadixSequence::pattern(&[2, 3], 8).unwrap();
        assert_eq!(p.radices(), &[2, 3, 2, 3, 2, 3, 2, 3]);
        assert_eq!(p.max_radix(), 3);
        assert_eq!(RadixSequence::constant(4, 3).unwrap().label(), "4^3");
        assert_eq!(p.label(), "2,3,2,3,2,3,2,3");
    }

    #[test]
    fn addition_and_negation() {
        let s = el(&[2, 2], &[1, 1]).add(&el(&[2, 2], &[1, 0])).unwrap();
        assert_eq!(s.digits(), &[0, 1]);
        let s = el(&[3, 2], &[2, 1]).add(&el(&[3, 2], &[2, 1])).unwrap();
        assert_eq!(s.digits(), &[1, 0]);
        assert_eq!(el(&[2, 2], &[1, 0]).neg().digits(), &[1, 0]);
        assert_eq!(el(&[3, 2], &[1, 1]).neg().digits(), &[2, 1]);
        assert!(el(&[3, 2], &[0, 0]).neg().is_zero());
        let x = el(&[3, 2], &[2, 1]);
        assert!(x.add(&x.neg()).unwrap().is_zero());
        assert!(x.add(&el(&[2, 3], &[1, 1])).is_err());
    }

    #[test]
    fn digits_round_trip() {
        let n = ns(&[2, 2, 2]);
        assert_eq!(n.digits_of(5).unwrap(), vec![1, 0, 1]);
        assert_eq!(n.index_of(&[1, 0, 1]).unwrap(), 5);
        assert_eq!(n.digits_of(0).unwrap(), vec![0, 0, 0]);
        assert_eq!(n.truncation(5, -1), 0);
        assert!(n.digits_of(8).is_err());
        assert!(n.index_of(&[2, 0, 0]).is_err());

        let n = ns(&[2, 3, 4]);
        let d = n.digits_of(13).unwrap();
        assert_eq!(d, vec![1, 0, 2]);
        // recompose with the ladder directly
        assert_eq!(d[0] * 1 + d[1] * 2 + d[2] * 6, 13);
        assert_eq!(n.truncation(13, 0), 1);
        assert_eq!(n.truncation(13, 1), 1);
        assert_eq!(n.truncation(13, 2), 13);
        for i in 0..n.size() {
            assert_eq!(n.index_of(&n.digits_of(i).unwrap()).unwrap(), i);
        }
    }

    #[test]
    fn top_position() {
        let n = ns(&[2, 3, 4]);
        assert_eq!(n.top_position(0), None);
        assert_eq!(n.top_position(1), Some(0));
        assert_eq!(n.top_position(2), Some(1));
        assert_eq!(n.top_position(5), Some(1));
        assert_eq!(n.top_position(6), Some(2));
        assert_eq!(n.top_position(23), Some(2));
        assert_eq!(n.top_position(24), Some(3));
    }

    #[test]
    fn coset_representatives() {
        let n = ns(&[2, 2]);
        assert_eq!(n.coset_weights(2), vec![2, 1]);
        assert_eq!(n.coset_digits(3, 2).unwrap(), vec![1, 1]);
        assert_eq!(n.coset_digits(2, 2).unwrap(), vec![1, 0]);
        assert_eq!(n.coset_digits(1, 2).unwrap(), vec![0, 1]);
        for k in 0..=2 {
            assert!(n.coset_rep(0, k).unwrap().is_zero());
        }
        assert!(n.coset_rep(4, 2).is_err());

        let n = ns(&[2, 3, 4]);
        let z = n.coset_rep(5, 2).unwrap();
        // weights at k = 2 are (M_2/M_1, M_2/M_2) = (3, 1): 5 = 1*3 + 2*1
        assert_eq!(z.digits(), &[1, 2, 0]);
        assert_eq!(n.coset_index_of(&z, 2).unwrap().beta, 5);
    }

    #[test]
    fn coset_cells_partition() {
        let n = ns(&[2, 3, 4, 2]);
        for k in 0..=n.resolution() {
            let mut seen = vec![0u8; n.size()];
            for beta in 0..n.scale(k) {
                for c in n.coset_cells(beta, k, n.resolution()).unwrap() {
                    seen[c] += 1;
                }
            }
            assert!(seen.iter().all(|&c| c == 1), "scale {k}");
        }
    }

    #[test]
    fn index_arithmetic_matches_elements() {
        let n = ns(&[3, 2, 4]);
        let res = n.resolution();
        for a in 0..n.size() {
            for b in 0..n.size() {
                let x = n.element(a, res).unwrap();
                let y = n.element(b, res).unwrap();
                let s = x.add(&y).unwrap();
                assert_eq!(n.index_of(s.digits()).unwrap(), n.add_index(a, b, res));
                let d = x.sub(&y).unwrap();
                assert_eq!(n.index_of(d.digits()).unwrap(), n.sub_index(a, b, res));
            }
        }
    }
}
