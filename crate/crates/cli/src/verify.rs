//! `verify`: exact identity suites for every core module.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vilenkin_core::binomials::{doubling_ratio, verify_identities};
use vilenkin_core::characters::{gram_deviation, shift_identity_residual, unit_shift_distance};
use vilenkin_core::families::random_cells;
use vilenkin_core::kernels::{cesaro_kernel_direct, residual_tolerance};
use vilenkin_core::{
    CesaroRoute, CesaroTable, DecompositionReading, DirichletStrategy, Kernels, NumberSystem,
    StepFunction,
};

use crate::config::ExperimentConfig;
use crate::report::{RunReport, SuiteResult};

pub const SUITES: &[&str] = &[
    "group_laws",
    "partition",
    "orthonormality",
    "characters",
    "binomials",
    "dirichlet",
    "recursions",
    "cesaro_kernel",
    "lemma1",
    "routes",
    "transform_oracle",
];

/// Tolerance for orthonormality and transform agreement.
const ORACLE_TOL: f64 = 1e-10;
/// Tolerance for Parseval.
const PARSEVAL_TOL: f64 = 1e-9;
/// Relative tolerance for the binomial identities.
const BINOMIAL_TOL: f64 = 1e-10;
/// Absolute tolerance of the doubling-ratio proxy.
const DOUBLING_TOL: f64 = 0.01;
/// Cap on cells for the naive O(M^2) transform oracle.
const NAIVE_CELLS: usize = 4096;
/// Sample size for group laws when exhaustive checking is too large.
const GROUP_SAMPLES: usize = 20_000;

pub fn run(config: &ExperimentConfig) -> RunReport {
    let mut report = RunReport::new("verify", config);
    let ctx = Context::new(config);
    type Runner = fn(&Context) -> SuiteResult;
    let runners: [(&str, Runner); 11] = [
        ("group_laws", group_laws),
        ("partition", partition),
        ("orthonormality", orthonormality),
        ("characters", characters),
        ("binomials", binomials),
        ("dirichlet", dirichlet),
        ("recursions", recursions),
        ("cesaro_kernel", cesaro_kernel),
        ("lemma1", lemma1),
        ("routes", routes),
        ("transform_oracle", transform_oracle),
    ];
    for (name, run) in runners {
        if config.selected(name) {
            report.push(run(&ctx));
        }
    }
    report
}

struct Context<'a> {
    config: &'a ExperimentConfig,
    ns: Arc<NumberSystem>,
    kernels: Kernels,
}

impl<'a> Context<'a> {
    fn new(config: &'a ExperimentConfig) -> Self {
        Self {
            config,
            ns: config.ns.clone(),
            kernels: Kernels::new(config.ns.clone()),
        }
    }

    fn max_order(&self) -> usize {
        self.config.limits().max_order.min(self.ns.size())
    }

    fn identity_tol(&self) -> f64 {
        self.config.thresholds().identity
    }

    /// Independent stream per suite so suite selection does not change data.
    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(stream);
        rng
    }

    /// Largest resolution whose cell count stays within `cells`.
    fn resolution_within(&self, cells: usize) -> usize {
        (0..=self.ns.resolution())
            .rev()
            .find(|&r| self.ns.scale(r) <= cells)
            .unwrap_or(0)
    }
}

fn group_laws(ctx: &Context) -> SuiteResult {
    let mut s = SuiteResult::new("group_laws");
    let ns = &ctx.ns;
    let res = ns.resolution();
    let size = ns.size();
    let mut failures = 0usize;
    let mut check = |a: usize, b: usize, c: usize| {
        let ab = ns.add_index(a, b, res);
        let ok = ab == ns.add_index(b, a, res)
            && ns.add_index(ab, c, res) == ns.add_index(a, ns.add_index(b, c, res), res)
            && ns.add_index(a, 0, res) == a
            && ns.add_index(a, ns.neg_index(a, res), res) == 0
            && ns.sub_index(ab, b, res) == a;
        if !ok {
            failures += 1;
        }
    };
    let triples = if size <= 64 {
        for a in 0..size {
            for b in 0..size {
                for c in 0..size {
                    check(a, b, c);
                }
            }
        }
        size * size * size
    } else {
        let mut rng = ctx.rng(1);
        for _ in 0..GROUP_SAMPLES {
            check(
                rng.random_range(0..size),
                rng.random_range(0..size),
                rng.random_range(0..size),
            );
        }
        GROUP_SAMPLES
    };
    s.metric("triples", triples as f64);
    s.residual("group law violations", failures as f64, 0.0);
    // element arithmetic agrees with index arithmetic, digits round-trip
    let step = (size / 64).max(1);
    for a in (0..size).step_by(step) {
        let Some(x) = s.absorb(ns.element(a, res)) else {
            return s;
        };
        let Some(digits) = s.absorb(ns.digits_of(a)) else {
            return s;
        };
        s.require("index_of(digits_of(n)) = n", ns.index_of(&digits) == Ok(a));
        for b in (0..size).step_by(step) {
            let Some(y) = s.absorb(ns.element(b, res)) else {
                return s;
            };
            let sum = x.add(&y).and_then(|z| ns.index_of(z.digits()));
            s.require(
                "element sum matches index sum",
                sum == Ok(ns.add_index(a, b, res)),
            );
        }
    }
    s
}

fn partition(ctx: &Context) -> SuiteResult {
    let mut s = SuiteResult::new("partition");
    let ns = &ctx.ns;
    let res = ns.resolution();
    for k in 0..=res {
        let mut hits = vec![0u32; ns.size()];
        for beta in 0..ns.scale(k) {
            let Some(cells) = s.absorb(ns.coset_cells(beta, k, res)) else {
                return s;
            };
            for c in cells {
                hits[c] += 1;
            }
            if beta >= 1 && ns.scale(k) <= 4096 {
                let Some(rep) = s.absorb(ns.coset_rep(beta, k)) else {
                    return s;
                };
                let q = rep.first_nonzero().unwrap_or(0);
                let (lo, hi) = (ns.scale(k) / ns.scale(q + 1), ns.scale(k) / ns.scale(q) - 1);
                s.require("coset index bracket", lo <= beta && beta <= hi);
                let back = ns.coset_index_of(&rep, k).map(|c| c.beta);
                s.require("coset index round trip", back == Ok(beta));
            }
        }
        s.require(
            &format!("cosets at scale {k} partition the cells"),
            hits.iter().all(|&h| h == 1),
        );
    }
    s
}

fn orthonormality(ctx: &Context) -> SuiteResult {
    let mut s = SuiteResult::new("orthonormality");
    let res = ctx.resolution_within(ctx.config.limits().gram_cells);
    s.metric("gram_cells", ctx.ns.scale(res) as f64);
    s.residual(
        "Gram matrix",
        gram_deviation(ctx.kernels.table(), res),
        ORACLE_TOL,
    );
    s
}

fn characters(ctx: &Context) -> SuiteResult {
    let mut s = SuiteResult::new("characters");
    let ns = &ctx.ns;
    let table = ctx.kernels.table();
    let res = ctx.resolution_within(256);
    let size = ns.scale(res);
    let mut unimodular = 0.0f64;
    let mut law = 0.0f64;
    let exhaustive_law = size <= 64;
    for n in 0..size {
        for x in 0..size {
            let v = table.psi(n, x);
            unimodular = unimodular.max((v.norm() - 1.0).abs());
            if ns.radix().is_walsh() {
                s.require("Walsh values are +-1", v.im == 0.0 && v.re.abs() == 1.0);
            }
            if exhaustive_law {
                for y in 0..size {
                    let lhs = table.psi(n, ns.add_index(x, y, res));
                    law = law.max((lhs - v * table.psi(n, y)).norm());
                }
            }
        }
    }
    if !exhaustive_law {
        let mut rng = ctx.rng(2);
        for _ in 0..GROUP_SAMPLES {
            let (n, x, y) = (
                rng.random_range(0..ns.size()),
                rng.random_range(0..ns.size()),
                rng.random_range(0..ns.size()),
            );
            let full = ns.resolution();
            let lhs = table.psi(n, ns.add_index(x, y, full));
            law = law.max((lhs - table.psi(n, x) * table.psi(n, y)).norm());
        }
    }
    s.residual("unimodularity", unimodular, 1e-12);
    s.residual("character law", law, 1e-12);
    let max_radix = ns.radix().max_radix() as f64;
    let floor = 2.0 * (std::f64::consts::PI / max_radix).sin();
    for k in 0..ns.resolution() {
        s.residual(
            &format!("shift identity at k = {k}"),
            shift_identity_residual(table, k, ns.resolution()),
            1e-12,
        );
        for nk in 1..ns.m(k) {
            let d = unit_shift_distance(table, k, nk);
            let exact = 2.0
                * (std::f64::consts::PI * nk as f64 / ns.m(k) as f64)
                    .sin()
                    .abs();
            s.residual("distance from unity", (d - exact).abs(), 1e-12);
            s.require("distance from unity floor", d >= floor - 1e-12);
        }
    }
    s
}

fn binomials(ctx: &Context) -> SuiteResult {
    let mut s = SuiteResult::new("binomials");
    let n_max = ctx.config.limits().binomial_n;
    for alpha in [-0.9, -0.5, -0.25, 0.25, 0.5, 0.9] {
        let r = verify_identities(n_max, alpha);
        s.residual(
            &format!("difference identity at alpha = {alpha}"),
            r.difference_rel,
            BINOMIAL_TOL,
        );
        s.residual(
            &format!("summation identity at alpha = {alpha}"),
            r.summation_rel,
            BINOMIAL_TOL,
        );
        s.metric(
            &format!("summation_without_k0_rel[alpha={alpha}]"),
            r.summation_short_rel,
        );
    }
    for alpha in [-0.5, 0.5] {
        let n = n_max.max(2);
        if let Some(ratio) = s.absorb(doubling_ratio(alpha, n)) {
            let gap = (ratio - 2f64.powf(-alpha)).abs();
            s.metric(&format!("doubling_gap[alpha={alpha}]"), gap);
            s.residual(
                &format!("doubling ratio at alpha = {alpha}"),
                gap,
                DOUBLING_TOL,
            );
            s.require("doubling ratio within 5/n", gap <= 5.0 / n as f64);
        }
    }
    let Some(t) = s.absorb(CesaroTable::new(-0.5, 2)) else {
        return s;
    };
    s.residual("A_2^{-1/2} = 0.375", (t.get(2) - 0.375).abs(), 1e-15);
    for alpha in [0.25, 0.5, 0.75] {
        let Some(upper) = s.absorb(CesaroTable::new(-alpha, n_max)) else {
            return s;
        };
        let Some(lower) = s.absorb(CesaroTable::new(-alpha - 1.0, n_max)) else {
            return s;
        };
        s.require(
            "A^{-alpha} positive and decreasing",
            upper.values().windows(2).all(|w| w[1] > 0.0 && w[1] < w[0]),
        );
        s.require(
            "A^{-alpha-1} negative past 0",
            lower.values()[1..].iter().all(|&v| v < 0.0),
        );
    }
    s
}

fn dirichlet(ctx: &Context) -> SuiteResult {
    let mut s = SuiteResult::new("dirichlet");
    let ns = &ctx.ns;
    let k = &ctx.kernels;
    let tol = ctx.identity_tol();
    for n in 0..=ctx.max_order() {
        let Some(evals) = s.absorb(k.dirichlet_evaluations(n)) else {
            return s;
        };
        let naive = &evals[0].values;
        for e in &evals[1..] {
            s.residual(
                &format!("{:?} vs naive D_{n}", e.strategy),
                naive.sup_distance(&e.values).unwrap_or(f64::INFINITY),
                tol.max(residual_tolerance(n, ns.radix().max_radix())),
            );
        }
        s.residual(
            &format!("D_{n}(0) = {n}"),
            (naive.at(0) - n as f64).norm(),
            tol,
        );
        if n >= 1 {
            s.residual(
                &format!("mean of D_{n}"),
                (naive.average() - 1.0).norm(),
                ORACLE_TOL,
            );
        }
        // D_n only depends on digits 0..=A: the compact evaluation, lifted,
        // must match a character sum taken over every full-resolution cell
        if n <= 64 {
            let table = k.table();
            let full = StepFunction::from_fn(ns.clone(), ns.resolution(), |x| {
                (0..n).map(|j| table.psi(j, x)).sum()
            });
            s.residual(
                "support resolution",
                full.sup_distance(naive).unwrap_or(f64::INFINITY),
                tol.max(residual_tolerance(n, ns.radix().max_radix())),
            );
        }
    }
    for level in 0..=ns.resolution() {
        let mk = ns.scale(level);
        let Some(closed) = s.absorb(k.dirichlet(mk, DirichletStrategy::Closed)) else {
            return s;
        };
        let indicator = StepFunction::from_fn(ns.clone(), ns.resolution(), |x| {
            Complex64::new(if x % mk == 0 { mk as f64 } else { 0.0 }, 0.0)
        });
        s.require("D_{M_k} = M_k 1_{I_k}", closed == indicator);
        if mk <= ctx.max_order().max(1) {
            let Some(naive) = s.absorb(k.dirichlet(mk, DirichletStrategy::Naive)) else {
                return s;
            };
            s.residual(
                &format!("naive D_{mk} vs M_k 1_(I_k)"),
                naive.sup_distance(&indicator).unwrap_or(f64::INFINITY),
                tol,
            );
        }
    }
    s
}

fn recursions(ctx: &Context) -> SuiteResult {
    let mut s = SuiteResult::new("recursions");
    let Some(r) = s.absorb(ctx.kernels.verify_recursions(ctx.max_order())) else {
        return s;
    };
    let tol = ctx.identity_tol();
    s.metric("max_n", r.max_n as f64);
    s.metric("tuples", r.tuples as f64);
    s.residual("top-digit split", r.top_digit_split, tol);
    s.residual("block shift", r.block_shift, tol);
    s.residual("geometric shift", r.geometric_shift, tol);
    s.residual("reflection", r.reflection, tol);
    s.residual("product form", r.product_form, tol);
    s
}

fn cesaro_kernel(ctx: &Context) -> SuiteResult {
    let mut s = SuiteResult::new("cesaro_kernel");
    let ns = &ctx.ns;
    let k = &ctx.kernels;
    let factor = ctx.config.file.fault.cesaro_weight_factor.unwrap_or(1.0);
    if factor != 1.0 {
        s.metric("fault_cesaro_weight_factor", factor);
    }
    let tol = ctx.identity_tol();
    let max_n = ctx.max_order();
    for &alpha in ctx.config.alphas() {
        let Some(a) = s.absorb(CesaroTable::new(-alpha, max_n)) else {
            return s;
        };
        for n in 1..=max_n {
            let norm = a.get(n - 1);
            let mut weights: Vec<Complex64> = (0..n)
                .map(|nu| Complex64::new(a.get(n - 1 - nu) / norm, 0.0))
                .collect();
            weights[0] *= factor;
            let Some(reference) = s.absorb(k.transform().synthesize(&weights, ns.resolution()))
            else {
                return s;
            };
            let Some(kernel) = s.absorb(k.cesaro_kernel(n, alpha)) else {
                return s;
            };
            let rtol = tol.max(residual_tolerance(n, ns.radix().max_radix()));
            s.residual(
                &format!("K_{n}^(-{alpha}) against its weights"),
                kernel.sup_distance(&reference).unwrap_or(f64::INFINITY),
                rtol,
            );
            s.residual(
                &format!("mean of K_{n}^(-{alpha})"),
                (reference.average() - 1.0).norm(),
                ORACLE_TOL,
            );
            if n <= 64 {
                let Some(direct) =
                    s.absorb(cesaro_kernel_direct(k.table(), n, alpha, ns.resolution()))
                else {
                    return s;
                };
                s.residual(
                    "direct summation",
                    direct.sup_distance(&kernel).unwrap_or(f64::INFINITY),
                    rtol,
                );
            }
        }
        let expected = 1.0 + 1.0 / (1.0 - alpha);
        if max_n >= 2 {
            if let Some(k2) = s.absorb(k.cesaro_kernel(2, alpha)) {
                s.residual("K_2^(-alpha)(0)", (k2.at(0).re - expected).abs(), 1e-12);
            }
        }
    }
    for n in 1..=max_n.min(64) {
        let Some(fejer) = s.absorb(k.fejer_kernel(n)) else {
            return s;
        };
        s.residual(
            "Fejer kernel mean",
            (fejer.average() - 1.0).norm(),
            ORACLE_TOL,
        );
        s.residual(
            "Fejer kernel at 0",
            (fejer.at(0).re - (n as f64 + 1.0) / 2.0).abs(),
            1e-10 * n as f64,
        );
    }
    s
}

fn lemma1(ctx: &Context) -> SuiteResult {
    let mut s = SuiteResult::new("lemma1");
    let max_n = ctx.max_order();
    for &alpha in ctx.config.alphas() {
        let from_zero =
            ctx.kernels
                .decomposition_scan(max_n, alpha, DecompositionReading::FromZero);
        if let Some(r) = s.absorb(from_zero) {
            s.residual(
                &format!("decomposition at alpha = {alpha}"),
                r,
                ctx.identity_tol(),
            );
        }
        // the k >= 1 reading is reported for comparison only
        let from_one =
            ctx.kernels
                .decomposition_residual(max_n.min(64), alpha, DecompositionReading::FromOne);
        if let Ok(r) = from_one {
            s.metric(
                &format!("from_one_residual[alpha={alpha},n={}]", max_n.min(64)),
                r,
            );
        }
    }
    s.metric("max_n", max_n as f64);
    s
}

fn routes(ctx: &Context) -> SuiteResult {
    let mut s = SuiteResult::new("routes");
    let ns = &ctx.ns;
    let t = ctx.kernels.transform();
    let max_n = ctx.config.limits().route_max_n.min(ns.size());
    let Some(f) = s.absorb(random_cells(ns, ns.resolution(), ctx.config.seed ^ 0x5eed)) else {
        return s;
    };
    let per_n = ctx.config.thresholds().route_per_n;
    for &alpha in ctx.config.alphas() {
        for n in 1..=max_n {
            let Some(a) = s.absorb(t.cesaro_mean(&f, n, alpha, CesaroRoute::Coefficients)) else {
                return s;
            };
            let Some(b) = s.absorb(t.cesaro_mean(&f, n, alpha, CesaroRoute::PartialSums)) else {
                return s;
            };
            let Some(c) = s.absorb(t.cesaro_mean(&f, n, alpha, CesaroRoute::Convolution)) else {
                return s;
            };
            let tol = per_n * n as f64;
            s.residual(
                "partial-sum route",
                a.sup_distance(&b).unwrap_or(f64::INFINITY),
                tol,
            );
            s.residual(
                "convolution route",
                a.sup_distance(&c).unwrap_or(f64::INFINITY),
                tol,
            );
        }
        let constant =
            StepFunction::constant(ns.clone(), ns.resolution(), Complex64::new(2.5, -1.0));
        for n in [1, max_n] {
            if let Some(m) = s.absorb(t.cesaro_mean(&constant, n, alpha, CesaroRoute::Coefficients))
            {
                s.residual(
                    "mean of a constant",
                    m.sup_distance(&constant).unwrap_or(f64::INFINITY),
                    1e-12,
                );
            }
        }
    }
    s.metric("max_n", max_n as f64);
    s
}

fn transform_oracle(ctx: &Context) -> SuiteResult {
    let mut s = SuiteResult::new("transform_oracle");
    let ns = &ctx.ns;
    let t = ctx.kernels.transform();
    let res = ctx.resolution_within(NAIVE_CELLS);
    s.metric("oracle_cells", ns.scale(res) as f64);
    let count = ctx.config.limits().random_functions;
    let reversed: Vec<usize> = (0..res).rev().collect();
    for i in 0..count {
        let seed = ctx.config.seed.wrapping_add(1 + i as u64);
        let Some(f) = s.absorb(random_cells(ns, res, seed)) else {
            return s;
        };
        let Some(fast) = s.absorb(t.forward_fast(&f)) else {
            return s;
        };
        let Some(naive) = s.absorb(t.forward_naive(&f)) else {
            return s;
        };
        s.residual(
            "fast vs naive",
            fast.max_distance(&naive).unwrap_or(f64::INFINITY),
            ORACLE_TOL,
        );
        let energy = f.cells().iter().map(|v| v.norm_sqr()).sum::<f64>() / f.len() as f64;
        s.residual("Parseval", (fast.energy() - energy).abs(), PARSEVAL_TOL);
        let Some(back) = s.absorb(t.inverse(&fast)) else {
            return s;
        };
        s.residual(
            "round trip",
            back.sup_distance(&f).unwrap_or(f64::INFINITY),
            ORACLE_TOL,
        );
        if let Some(perm) = s.absorb(t.forward_fast_ordered(&f, &reversed)) {
            s.residual(
                "stage order",
                perm.max_distance(&fast).unwrap_or(f64::INFINITY),
                ORACLE_TOL,
            );
        }
        if i == 0 {
            if let Some(full) = s.absorb(t.partial_sum(&f, ns.scale(res))) {
                s.residual(
                    "S_(M_N) f = f",
                    full.sup_distance(&f).unwrap_or(f64::INFINITY),
                    ORACLE_TOL,
                );
            }
            for level in 0..=res {
                let mk = ns.scale(level);
                let Some(once) = s.absorb(t.partial_sum(&f, mk)) else {
                    return s;
                };
                let Some(twice) = s.absorb(t.partial_sum(&once, mk)) else {
                    return s;
                };
                s.residual(
                    "S_(M_k) is idempotent",
                    twice.sup_distance(&once).unwrap_or(f64::INFINITY),
                    1e-12,
                );
            }
        }
    }
    s
}
