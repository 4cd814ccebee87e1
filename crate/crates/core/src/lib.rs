//! Fourier analysis on bounded Vilenkin groups.
//!
//! The group `G_m` is the product of cyclic groups `Z_{m_0} x Z_{m_1} x ...`
//! with bounded radices. Everything here works with exact step functions:
//! complex values on the `M_r` cells of the subgroup `I_r`, so integrals,
//! convolutions, partial sums and Cesaro means involve no quadrature.
//!
//! Modules, bottom-up:
//! - [`group`]: radix sequences, the `M_k` ladder, digits, cosets.
//! - [`characters`]: Rademacher and Vilenkin characters.
//! - [`binomials`]: Cesaro numbers `A_n^alpha`.
//! - [`step`]: step functions and coefficient vectors with JSON I/O.
//! - [`transform`]: fast and naive transforms, partial sums, means, convolution.
//! - [`kernels`]: Dirichlet, Fejer, Cesaro kernels, recursions and bound scans.
//! - [`oscillation`]: moduli of continuity, coset oscillations, Young functions.
//! - [`families`]: built-in test functions.

pub mod binomials;
pub mod characters;
pub mod error;
pub mod families;
pub mod group;
pub mod kernels;
pub mod oscillation;
pub mod step;
pub mod transform;

pub use binomials::{CesaroTable, IdentityResiduals};
pub use characters::{CharacterTable, CharacterValue};
pub use error::{Error, Result};
pub use families::FunctionSpec;
pub use group::{CosetIndex, GroupElement, NumberSystem, RadixSequence};
pub use kernels::{
    BoundScanRecord, DecompositionReading, DirichletStrategy, KernelKind, Kernels,
    RecursionResiduals, Stability,
};
pub use num_complex::Complex64;
pub use oscillation::{OscillationProfile, SeriesReport, YoungFunction};
pub use step::{CoefficientVector, StepFunction};
pub use transform::{CesaroRoute, ForwardStrategy, VilenkinTransform};
