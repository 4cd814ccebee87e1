//! Step functions on `G_m` (constant on `I_r`-cells) and coefficient vectors.

use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Error, Result};
use crate::group::{GroupElement, NumberSystem, RadixSequence};

/// A complex function constant on every `I_r`-cell, stored as the `M_r`
/// cell values in natural cell-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    ns: Arc<NumberSystem>,
    resolution: usize,
    cells: Vec<Complex64>,
}

fn same_group(a: &Arc<NumberSystem>, b: &Arc<NumberSystem>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl StepFunction {
    pub fn new(ns: Arc<NumberSystem>, resolution: usize, cells: Vec<Complex64>) -> Result<Self> {
        ns.check_resolution(resolution)?;
        if cells.len() != ns.scale(resolution) {
            bail!(
                Validation,
                "{} cell values given, resolution {resolution} needs {}",
                cells.len(),
                ns.scale(resolution)
            );
        }
        Ok(Self {
            ns,
            resolution,
            cells,
        })
    }

    /// Full-resolution function from real cell values.
    pub fn from_real(ns: Arc<NumberSystem>, values: &[f64]) -> Result<Self> {
        let res = ns.resolution();
        Self::new(
            ns,
            res,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn zeros(ns: Arc<NumberSystem>, resolution: usize) -> Self {
        Self::constant(ns, resolution, Complex64::new(0.0, 0.0))
    }

    pub fn constant(ns: Arc<NumberSystem>, resolution: usize, value: Complex64) -> Self {
        let len = ns.scale(resolution);
        Self {
            ns,
            resolution,
            cells: vec![value; len],
        }
    }

    /// Tabulates `f(cell_index)` for every cell at `resolution`.
    pub fn from_fn(
        ns: Arc<NumberSystem>,
        resolution: usize,
        f: impl FnMut(usize) -> Complex64,
    ) -> Self {
        let cells = (0..ns.scale(resolution)).map(f).collect();
        Self {
            ns,
            resolution,
            cells,
        }
    }

    pub fn number_system(&self) -> &Arc<NumberSystem> {
        &self.ns
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn cells(&self) -> &[Complex64] {
        &self.cells
    }

    pub fn cells_mut(&mut self) -> &mut [Complex64] {
        &mut self.cells
    }

    pub fn into_cells(self) -> Vec<Complex64> {
        self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Value at a cell index of *any* resolution at least this one's.
    #[inline]
    pub fn at(&self, cell: usize) -> Complex64 {
        self.cells[cell % self.cells.len()]
    }

    /// `f(x)`; only the first `resolution` digits of `x` matter.
    pub fn value(&self, x: &GroupElement) -> Result<Complex64> {
        if x.resolution() < self.resolution {
            bail!(
                Validation,
                "element resolution {} is coarser than the function's {}",
                x.resolution(),
                self.resolution
            );
        }
        let idx = self.ns.index_of(&x.digits()[..self.resolution])?;
        Ok(self.cells[idx])
    }

    /// The same function viewed on the finer `I_res`-cells.
    pub fn lift(&self, res: usize) -> Result<Self> {
        self.ns.check_resolution(res)?;
        if res < self.resolution {
            bail!(
                Validation,
                "cannot lift resolution {} down to {res}",
                self.resolution
            );
        }
        let len = self.ns.scale(res);
        let cells = (0..len).map(|c| self.cells[c % self.cells.len()]).collect();
        Ok(Self {
            ns: self.ns.clone(),
            resolution: res,
            cells,
        })
    }

    pub fn lift_full(&self) -> Self {
        self.lift(self.ns.resolution())
            .expect("full resolution is always reachable")
    }

    /// Haar integral: each `I_r`-cell has measure `1 / M_r`.
    pub fn average(&self) -> Complex64 {
        self.cells.iter().sum::<Complex64>() / self.cells.len() as f64
    }

    /// `||f||_C = max_x |f(x)|`.
    pub fn sup_norm(&self) -> f64 {
        self.cells.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Index of the cell where `|f|` is largest (first one on ties).
    pub fn argmax_norm(&self) -> usize {
        let mut best = 0;
        let mut val = f64::NEG_INFINITY;
        for (i, c) in self.cells.iter().enumerate() {
            if c.norm() > val {
                val = c.norm();
                best = i;
            }
        }
        best
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if !same_group(&self.ns, &other.ns) {
            bail!(Validation, "step functions live on different groups");
        }
        if self.resolution != other.resolution {
            bail!(
                Validation,
                "resolution mismatch: {} vs {}",
                self.resolution,
                other.resolution
            );
        }
        Ok(())
    }

    /// `max_x |f(x) - g(x)|`.
    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .cells
            .iter()
            .zip(&other.cells)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            ns: self.ns.clone(),
            resolution: self.resolution,
            cells: self.cells.iter().map(|&c| f(c)).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        self.map(|c| c.conj())
    }

    pub fn scale_by(&self, s: Complex64) -> Self {
        self.map(|c| c * s)
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            ns: self.ns.clone(),
            resolution: self.resolution,
            cells: self
                .cells
                .iter()
                .zip(&other.cells)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(&Container::from_parts(
            &self.ns,
            self.resolution,
            &self.cells,
            Field::Cells,
        ))
        .map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: Container =
            serde_json::from_str(s).map_err(|e| Error::Serialization(e.to_string()))?;
        let (ns, res, values) = c.into_parts(Field::Cells)?;
        Self::new(ns, res, values)
    }
}

macro_rules! operator {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait for &StepFunction {
            type Output = StepFunction;
            /// # Panics
            /// On mismatched groups or resolutions; use the `try_` form to
            /// handle that case.
            fn $method(self, rhs: &StepFunction) -> StepFunction {
                self.$try(rhs).expect("incompatible step functions")
            }
        }
    };
}

operator!(Add, add, try_add);
operator!(Sub, sub, try_sub);
operator!(Mul, mul, try_mul);

/// Vilenkin-Fourier coefficients `hat f(0..M_r)` of a resolution-`r` function.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    ns: Arc<NumberSystem>,
    resolution: usize,
    coeffs: Vec<Complex64>,
}

impl CoefficientVector {
    pub fn new(ns: Arc<NumberSystem>, resolution: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        ns.check_resolution(resolution)?;
        if coeffs.len() != ns.scale(resolution) {
            bail!(
                Validation,
                "{} coefficients given, resolution {resolution} needs {}",
                coeffs.len(),
                ns.scale(resolution)
            );
        }
        Ok(Self {
            ns,
            resolution,
            coeffs,
        })
    }

    /// The unit vector selecting `psi_k`.
    pub fn unit(ns: Arc<NumberSystem>, resolution: usize, k: usize) -> Result<Self> {
        let len = ns.scale(resolution);
        if k >= len {
            bail!(Validation, "frequency {k} is outside [0, {len})");
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); len];
        coeffs[k] = Complex64::new(1.0, 0.0);
        Self::new(ns, resolution, coeffs)
    }

    pub fn number_system(&self) -> &Arc<NumberSystem> {
        &self.ns
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// `sum_k |hat f(k)|^2`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Largest coefficientwise distance.
    pub fn max_distance(&self, other: &Self) -> Result<f64> {
        if !same_group(&self.ns, &other.ns) || self.resolution != other.resolution {
            bail!(Validation, "coefficient vectors are not comparable");
        }
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(&Container::from_parts(
            &self.ns,
            self.resolution,
            &self.coeffs,
            Field::Coeffs,
        ))
        .map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: Container =
            serde_json::from_str(s).map_err(|e| Error::Serialization(e.to_string()))?;
        let (ns, res, values) = c.into_parts(Field::Coeffs)?;
        Self::new(ns, res, values)
    }
}

#[derive(Clone, Copy)]
enum Field {
    Cells,
    Coeffs,
}

/// `{ "radix": [...], "resolution": N, "cells"|"coeffs": [[re, im], ...] }`
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Container {
    radix: RadixSequence,
    resolution: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cells: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coeffs: Option<Vec<[f64; 2]>>,
}

impl Container {
    fn from_parts(
        ns: &NumberSystem,
        resolution: usize,
        values: &[Complex64],
        field: Field,
    ) -> Self {
        let pairs = Some(values.iter().map(|c| [c.re, c.im]).collect());
        let (cells, coeffs) = match field {
            Field::Cells => (pairs, None),
            Field::Coeffs => (None, pairs),
        };
        Self {
            radix: ns.radix().clone(),
            resolution,
            cells,
            coeffs,
        }
    }

    fn into_parts(self, field: Field) -> Result<(Arc<NumberSystem>, usize, Vec<Complex64>)> {
        let values = match field {
            Field::Cells => self.cells,
            Field::Coeffs => self.coeffs,
        };
        let Some(values) = values else {
            bail!(Serialization, "container is missing its value array");
        };
        let ns = Arc::new(NumberSystem::new(self.radix)?);
        Ok((
            ns,
            self.resolution,
            values
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        ))
    }
}
