//! Shared fixtures for the transform benchmarks.

use std::sync::Arc;

use vilenkin_core::families::random_cells;
use vilenkin_core::{NumberSystem, RadixSequence, StepFunction, VilenkinTransform};

/// Radix sequences benchmarked, each with `M_N = 4096` or close to it.
pub const CASES: &[(&str, &[usize])] = &[
    ("walsh_4096", &[2; 12]),
    ("quaternary_4096", &[4; 6]),
    ("mixed_3456", &[2, 3, 4, 2, 3, 4, 6]),
];

/// A transform and a seeded random function at full resolution.
pub fn fixture(radices: &[usize], seed: u64) -> (VilenkinTransform, StepFunction) {
    let radix = RadixSequence::new(radices.to_vec()).expect("valid radix sequence");
    let ns = Arc::new(NumberSystem::new(radix).expect("valid number system"));
    let f = random_cells(&ns, ns.resolution(), seed).expect("resolution in range");
    (VilenkinTransform::new(ns), f)
}
