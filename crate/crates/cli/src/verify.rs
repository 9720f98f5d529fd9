//! Seeded invariant suites run by `nccausal verify`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nccausal_core::clifford::HermitianSpectrum;
use nccausal_core::finite_geometry::{
    commutator_norm, divergence_witness, latitude, LATITUDE_TOL, random_unitary, same_latitude_closed_form, unitary_conjugate,
};
use nccausal_core::product_causality::{
    causal_report, curve_oracle, CausalReport, product_symbol, reachable_longitudes, search_grid, separating_element_search,
    SearchOptions,
};
use nccausal_core::spacetime::{
    causal_scalar, default_boost_grid, is_causal_function, lorentz_distance_functional, max_proper_time,
    steep_scalar, BoostFunction, FnField, ScalarField, NSD_TOL,
};
use nccausal_core::{
    causal_symbol, causally_precedes, causally_related, is_nsd, lorentzian_distance, spectral_distance,
    standard_basis, steep_symbol, CausalVerdict, CliffordBasis, Event, EventGrid, FiniteDirac, Herm2,
    NotRelatedReason, OptimizerOptions, ProductState,
};
use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::Rng;

use crate::csv::number;
use crate::sampling::{self, stream};
use crate::scene::Scene;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    All,
    Clifford,
    Finite,
    Spacetime,
    Product,
}

impl Suite {
    pub fn label(&self) -> &'static str {
        match self {
            Self::All => "all",
            Self::Clifford => "clifford",
            Self::Finite => "finite",
            Self::Spacetime => "spacetime",
            Self::Product => "product",
        }
    }

    fn members(self) -> Vec<Suite> {
        match self {
            Self::All => vec![Self::Clifford, Self::Finite, Self::Spacetime, Self::Product],
            s => vec![s],
        }
    }
}

/// Outcome of one invariant over its samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: Suite,
    pub name: &'static str,
    pub samples: usize,
    pub violations: usize,
    /// Largest deviation seen, in the units of `tolerance`.
    pub worst: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(suite: Suite, name: &'static str, tolerance: f64) -> Self {
        Self {
            suite,
            name,
            samples: 0,
            violations: 0,
            worst: 0.0,
            tolerance,
        }
    }

    /// Records a sample whose deviation must not exceed the tolerance.
    fn deviation(&mut self, d: f64) {
        self.samples += 1;
        if d.is_nan() || d > self.tolerance {
            self.violations += 1;
        }
        if d.is_nan() || d > self.worst {
            self.worst = d;
        }
    }

    /// Records a boolean sample.
    fn holds(&mut self, ok: bool) {
        self.samples += 1;
        if !ok {
            self.violations += 1;
            self.worst = 1.0;
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0 && self.samples > 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            writeln!(
                out,
                "{} {}/{}: samples={} violations={} worst={:e} tol={:e}",
                if c.passed() { "PASS" } else { "FAIL" },
                c.suite.label(),
                c.name,
                c.samples,
                c.violations,
                c.worst,
                c.tolerance
            )
            .unwrap();
        }
        let failed = self.checks.iter().filter(|c| !c.passed()).count();
        writeln!(out, "{} invariants, {failed} failed", self.checks.len()).unwrap();
        out
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("suite,invariant,samples,violations,worst,tolerance,status\n");
        for c in &self.checks {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                c.suite.label(),
                c.name,
                c.samples,
                c.violations,
                number(c.worst),
                number(c.tolerance),
                if c.passed() { "pass" } else { "fail" }
            )
            .unwrap();
        }
        out
    }
}

pub fn run(scene: &Scene, suite: Suite) -> Report {
    let seed = scene.optimizer.seed;
    let mut checks = Vec::new();
    for s in suite.members() {
        checks.extend(match s {
            Suite::Clifford => clifford_suite(seed),
            Suite::Finite => finite_suite(&scene.dirac, &scene.optimizer),
            Suite::Spacetime => spacetime_suite(seed),
            Suite::Product => product_suite(&scene.dirac, seed),
            Suite::All => unreachable!("expanded above"),
        });
    }
    Report { checks }
}

fn max_entry(m: &Matrix2<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise deviation over all basis identities.
pub fn basis_deviation(b: &CliffordBasis) -> f64 {
    let id = Matrix2::<Complex64>::identity();
    let mut worst: f64 = 0.0;
    for mu in 0..2 {
        for nu in 0..2 {
            let (g, h) = (b.gamma(mu), b.gamma(nu));
            let anti = g * h + h * g - id * Complex64::new(2.0 * CliffordBasis::eta(mu, nu), 0.0);
            worst = worst.max(max_entry(&anti));
        }
        let krein = b.gamma(mu).adjoint() + b.j * b.gamma(mu) * b.j;
        worst = worst.max(max_entry(&krein));
    }
    worst = worst.max(max_entry(&(b.j * b.j - id)));
    worst = worst.max(max_entry(&(b.j.adjoint() - b.j)));
    worst = worst.max(max_entry(&(b.j * b.gamma_m + b.gamma_m * b.j)));
    worst = worst.max(max_entry(&(b.gamma0 * b.gamma1 - b.gamma_m)));
    worst
}

fn spectrum_deviation(m: &Herm2, expected: [f64; 2], scale: f64) -> f64 {
    let e = m.eigenvalues();
    let (lo, hi) = (expected[0].min(expected[1]), expected[0].max(expected[1]));
    ((e[0] - lo).abs().max((e[1] - hi).abs())) / scale
}

fn clifford_suite(seed: u64) -> Vec<Check> {
    let s = Suite::Clifford;
    let mut rng = stream(seed, "clifford");

    let mut axioms = Check::new(s, "basis_axioms", 1e-14);
    axioms.deviation(basis_deviation(&standard_basis()));

    let mut causal = Check::new(s, "causal_symbol_spectrum", 1e-12);
    let mut steep = Check::new(s, "steep_symbol_spectrum", 1e-12);
    let mut linear = Check::new(s, "causal_symbol_linearity", 1e-12);
    for _ in 0..10_000 {
        let ft: f64 = rng.gen_range(-10.0..10.0);
        let fx: f64 = rng.gen_range(-10.0..10.0);
        let scale = 1.0 + ft.abs() + fx.abs();
        causal.deviation(spectrum_deviation(
            &causal_symbol(ft, fx),
            [-ft - fx.abs(), -ft + fx.abs()],
            scale,
        ));
        let r = (1.0 + fx * fx).sqrt();
        steep.deviation(spectrum_deviation(&steep_symbol(ft, fx), [-ft - r, -ft + r], scale));

        let (gt, gx): (f64, f64) = (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        let sum = causal_symbol(ft + gt, fx + gx) - (causal_symbol(ft, fx) + causal_symbol(gt, gx));
        linear.deviation(sum.max_abs() / (scale + gt.abs() + gx.abs()));
    }
    vec![axioms, causal, steep, linear]
}

fn finite_suite(df: &FiniteDirac, opts: &OptimizerOptions) -> Vec<Check> {
    let s = Suite::Finite;
    let mut rng = stream(opts.seed, "finite");

    let mut closed = Check::new(s, "closed_form_agreement", 1e-6);
    for _ in 0..20 {
        let z = sampling::latitude_value(&mut rng);
        let (a, b) = (sampling::on_parallel(&mut rng, z), sampling::on_parallel(&mut rng, z));
        let exact = same_latitude_closed_form(df, &a, &b).expect("same parallel");
        match spectral_distance(df, &a, &b, opts).finite() {
            Some(d) => closed.deviation((d - exact).abs()),
            None => closed.holds(false),
        }
    }

    let mut metric = Check::new(s, "metric_axioms", 1e-6);
    for _ in 0..8 {
        let z = sampling::latitude_value(&mut rng);
        let st: [_; 3] = std::array::from_fn(|_| sampling::on_parallel(&mut rng, z));
        let d = |i: usize, j: usize| spectral_distance(df, &st[i], &st[j], opts).finite().unwrap_or(f64::NAN);
        let (ab, ba, bc, ac) = (d(0, 1), d(1, 0), d(1, 2), d(0, 2));
        metric.deviation((ab - ba).abs());
        metric.deviation((ac - ab - bc).max(0.0));
        metric.deviation(d(0, 0).abs());
    }

    let mut infinite = Check::new(s, "cross_latitude_divergence", 0.0);
    for _ in 0..10 {
        let z1 = sampling::latitude_value(&mut rng);
        let z2 = z1 + rng.gen_range(0.01..0.5) * if z1 > 0.0 { -1.0 } else { 1.0 };
        let (a, b) = (sampling::on_parallel(&mut rng, z1), sampling::on_parallel(&mut rng, z2));
        let witness = divergence_witness(df, &a, &b, 1e6, opts);
        infinite.holds(spectral_distance(df, &a, &b, opts).is_infinite() && witness.objective > 1e6);
    }

    let mut unitary = Check::new(s, "unitary_invariance", 1e-6);
    for _ in 0..5 {
        let u = random_unitary(&mut rng);
        let conj = unitary_conjugate(df, &u).expect("random_unitary is unitary");
        let z = sampling::latitude_value(&mut rng);
        let (a, b) = (sampling::on_parallel(&mut rng, z), sampling::on_parallel(&mut rng, z));
        let before = spectral_distance(df, &a, &b, opts).finite().unwrap_or(f64::NAN);
        let after = conj
            .distance(&conj.map_state(&a), &conj.map_state(&b), opts)
            .finite()
            .unwrap_or(f64::NAN);
        unitary.deviation((before - after).abs());
    }

    let mut commutator = Check::new(s, "commutator_norm_formula", 1e-12);
    for _ in 0..1_000 {
        let a12 = Complex64::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let a = Herm2::from_parts(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), a12);
        let expected = df.gap() * a12.norm();
        commutator.deviation((commutator_norm(df, &a) - expected).abs() / (1.0 + expected));
    }

    vec![closed, metric, infinite, unitary, commutator]
}

fn spacetime_suite(seed: u64) -> Vec<Check> {
    let s = Suite::Spacetime;
    let mut rng = stream(seed, "spacetime");

    let mut order = Check::new(s, "causal_order_axioms", 0.0);
    for _ in 0..1_000 {
        let [p, q, r]: [Event; 3] = std::array::from_fn(|_| sampling::lattice_event(&mut rng, 3));
        order.holds(causally_precedes(&p, &p));
        order.holds(!(causally_precedes(&p, &q) && causally_precedes(&q, &p)) || p == q);
        order.holds(!(causally_precedes(&p, &q) && causally_precedes(&q, &r)) || causally_precedes(&p, &r));
    }

    let mut triangle = Check::new(s, "reverse_triangle_inequality", 1e-12);
    let mut distance = Check::new(s, "distance_axioms", 0.0);
    for _ in 0..1_000 {
        let p = sampling::event(&mut rng, 3.0);
        let q = sampling::future_event(&mut rng, &p, 3.0);
        let r = sampling::future_event(&mut rng, &q, 3.0);
        let shortfall = lorentzian_distance(&p, &q) + lorentzian_distance(&q, &r) - lorentzian_distance(&p, &r);
        triangle.deviation(shortfall.max(0.0));

        let a = sampling::event(&mut rng, 3.0);
        let b = sampling::event(&mut rng, 3.0);
        distance.holds(lorentzian_distance(&a, &a) == 0.0);
        distance.holds(lorentzian_distance(&a, &b) == 0.0 || lorentzian_distance(&b, &a) == 0.0);
    }

    let mut causal_pred = Check::new(s, "causal_predicate_agreement", 0.0);
    let mut steep_pred = Check::new(s, "steep_predicate_agreement", 0.0);
    for (ft, fx) in gradient_samples(&mut rng, 10_000) {
        causal_pred.holds(is_nsd(&causal_symbol(ft, fx), NSD_TOL) == causal_scalar(ft, fx, NSD_TOL));
        steep_pred.holds(is_nsd(&steep_symbol(ft, fx), NSD_TOL) == steep_scalar(ft, fx, NSD_TOL));
    }

    let boosts = default_boost_grid();
    let mut functional = Check::new(s, "functional_equals_distance", 1e-9);
    for _ in 0..20 {
        let p = sampling::event(&mut rng, 3.0);
        let q = sampling::future_event(&mut rng, &p, 3.0);
        let value = lorentz_distance_functional(&p, &q, &boosts).unwrap_or(f64::NAN);
        functional.deviation((value - lorentzian_distance(&p, &q)).abs());
        let r = sampling::spacelike_event(&mut rng, &p, 3.0);
        functional.deviation(lorentz_distance_functional(&p, &r, &boosts).unwrap_or(f64::NAN).abs());
    }

    let mut curves = Check::new(s, "max_proper_time_bound", 1e-9);
    for _ in 0..5 {
        let p = sampling::event(&mut rng, 2.0);
        let q = sampling::future_event(&mut rng, &p, 2.0);
        let d = lorentzian_distance(&p, &q);
        for n in [1, 2, 4] {
            let tau = max_proper_time(&p, &q, n).unwrap_or(f64::NAN);
            curves.deviation((tau - d).abs());
        }
    }

    let mut convexity = Check::new(s, "causal_cone_convexity", 0.0);
    let grid = EventGrid::new((-1.0, 1.0), (-1.0, 1.0), 9, 9).expect("valid grid");
    for _ in 0..20 {
        let betas: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
        let weights: [f64; 3] = std::array::from_fn(|_| rng.gen_range(0.0..2.0));
        let f = FnField::new(
            move |e: Event| betas.iter().zip(weights).map(|(b, w)| w * BoostFunction { beta: *b }.value(e)).sum(),
            move |e: Event| {
                betas.iter().zip(weights).fold((0.0, 0.0), |acc, (b, w)| {
                    let (gt, gx) = BoostFunction { beta: *b }.gradient(e);
                    (acc.0 + w * gt, acc.1 + w * gx)
                })
            },
        );
        convexity.holds(matches!(is_causal_function(&f, &grid), Ok(true)));
    }
    let space = FnField::new(|e: Event| e.x, |_| (0.0, 1.0));
    convexity.holds(matches!(is_causal_function(&space, &grid), Ok(false)));

    vec![order, triangle, distance, causal_pred, steep_pred, functional, curves, convexity]
}

/// Uniform gradients mixed with points on and beside both predicate
/// boundaries.
pub fn gradient_samples<R: Rng>(rng: &mut R, n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|k| {
            let fx: f64 = rng.gen_range(-3.0..3.0);
            let offset = rng.gen_range(-1e-6..1e-6);
            match k % 4 {
                0 => (rng.gen_range(-3.0..3.0), fx),
                1 => (fx.abs(), fx),
                2 => (fx.abs() + offset, fx),
                _ => ((1.0 + fx * fx).sqrt() + offset, fx),
            }
        })
        .collect()
}

fn same_state(a: &ProductState, b: &ProductState) -> bool {
    let [a1, a2] = a.internal.components();
    let [b1, b2] = b.internal.components();
    a.event == b.event && (a1 - b1).norm() <= 1e-12 && (a2 - b2).norm() <= 1e-12
}

/// Whether the verdict hinges on the speed inequality: the bases are
/// causally ordered and the states share a parallel.
pub fn speed_decides(report: &CausalReport) -> bool {
    report.base_causal && (report.latitudes.0 - report.latitudes.1).abs() <= LATITUDE_TOL
}

/// A discrete step into the (mostly causal) future of `w`; a quarter of the
/// time it returns `w` itself so that coincidences occur.
fn discrete_step<R: Rng>(rng: &mut R, w: &ProductState, z: f64, theta: f64) -> (ProductState, f64, f64) {
    if rng.gen_bool(0.25) {
        return (*w, z, theta);
    }
    let dt = rng.gen_range(0..=4);
    let dx = rng.gen_range(-dt - 1..=dt + 1);
    let event = Event::new(w.event.t + f64::from(dt) / 4.0, w.event.x + f64::from(dx) / 4.0);
    let z = if rng.gen_bool(0.8) { z } else { [-0.5, 0.0, 0.5][rng.gen_range(0..3)] };
    let theta = theta + f64::from(rng.gen_range(-2..=2)) * 0.25;
    (ProductState::new(event, sampling::at(z, theta)), z, theta)
}

/// Triples `(a, b, c)` built as short discrete walks, so that chains
/// `a ⪯ b ⪯ c` and mutual pairs `a ⪯ b ⪯ a` are common.
pub fn discrete_triple<R: Rng>(rng: &mut R) -> [ProductState; 3] {
    let z = [-0.5, 0.0, 0.5][rng.gen_range(0..3)];
    let theta = f64::from(rng.gen_range(-2..=2)) * 0.25;
    let a = ProductState::new(sampling::lattice_event(rng, 4), sampling::at(z, theta));
    let (b, z, theta) = discrete_step(rng, &a, z, theta);
    let (c, _, _) = discrete_step(rng, &b, z, theta);
    [a, b, c]
}

fn product_suite(df: &FiniteDirac, seed: u64) -> Vec<Check> {
    let s = Suite::Product;
    let mut rng = stream(seed, "product");

    let mut reflexive = Check::new(s, "reflexivity", 0.0);
    let mut antisymmetric = Check::new(s, "antisymmetry", 0.0);
    let mut transitive = Check::new(s, "transitivity", 0.0);
    for _ in 0..1_000 {
        let [a, b, c] = discrete_triple(&mut rng);
        let rel = |x: &ProductState, y: &ProductState| causally_related(x, y, df).is_related();
        reflexive.holds(rel(&a, &a));
        antisymmetric.holds(!(rel(&a, &b) && rel(&b, &a)) || same_state(&a, &b));
        transitive.holds(!(rel(&a, &b) && rel(&b, &c)) || rel(&a, &c));
    }

    let mut oracle = Check::new(s, "curve_oracle_agreement", 0.0);
    for _ in 0..200 {
        let (w1, w2) = sampling::mixed_pair(&mut rng, df);
        let report = causal_report(&w1, &w2, df);
        if speed_decides(&report) && report.speed_margin.is_some_and(|m| m.abs() < 1e-3) {
            continue;
        }
        oracle.holds(report.verdict.is_related() == curve_oracle(&w1, &w2, df, 4));
    }

    let mut rigidity = Check::new(s, "lightlike_rigidity", 0.0);
    for k in 0..100 {
        let p = sampling::lattice_event(&mut rng, 8);
        let step = f64::from(rng.gen_range(1..8)) / 4.0;
        let q = Event::new(p.t + step, p.x + if k % 2 == 0 { step } else { -step });
        let w1 = ProductState::new(p, sampling::internal(&mut rng));
        let internal2 = match k % 3 {
            0 => w1.internal,
            1 => sampling::state_at_budget_fraction(&w1, &Event::new(p.t + 1.0, p.x), df, rng.gen_range(0.01..1.0)),
            _ => sampling::internal(&mut rng),
        };
        let w2 = ProductState::new(q, internal2);
        let equal = w1.internal == w2.internal;
        rigidity.holds(causally_related(&w1, &w2, df).is_related() == equal);
    }

    let mut restriction = Check::new(s, "restriction_to_base", 0.0);
    let mut reachable = Check::new(s, "reachable_arc_consistency", 0.0);
    for _ in 0..1_000 {
        let p = sampling::event(&mut rng, 2.0);
        let q = sampling::event(&mut rng, 2.0);
        let xi = sampling::internal(&mut rng);
        let base = causally_precedes(&p, &q);
        restriction.holds(causally_related(&ProductState::new(p, xi), &ProductState::new(q, xi), df).is_related() == base);
        let pole = sampling::at(1.0, 0.0);
        restriction.holds(causally_related(&ProductState::new(p, pole), &ProductState::new(q, pole), df).is_related() == base);

        let w = ProductState::new(p, xi);
        let theta = rng.gen_range(-PI..PI);
        let target = ProductState::new(q, sampling::at(latitude(&xi), theta));
        let report = causal_report(&w, &target, df);
        if speed_decides(&report) && report.speed_margin.is_some_and(|m| m.abs() < 1e-9) {
            continue;
        }
        let arc = reachable_longitudes(&w, &q, df).expect("not a pole");
        reachable.holds(arc.contains(theta) == report.verdict.is_related());
    }

    let mut reduction = Check::new(s, "symbol_reduction", 1e-12);
    for _ in 0..1_000 {
        let f = rng.gen_range(-3.0..3.0);
        let (ft, fx): (f64, f64) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let one = Herm2::identity();
        let scalar = product_symbol(&one.scale(f), &one.scale(ft), &one.scale(fx), df).eigenvalues();
        let base = causal_symbol(ft, fx).eigenvalues();
        let expected = [base[0], base[0], base[1], base[1]];
        let scale = 1.0 + ft.abs() + fx.abs();
        reduction.deviation((0..4).map(|i| (scalar[i] - expected[i]).abs()).fold(0.0, f64::max) / scale);

        let a12 = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let h = Herm2::from_parts(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), a12);
        let zero = Herm2::zeros();
        let internal = product_symbol(&h, &zero, &zero, df).eigenvalues();
        let g = df.gap() * a12.norm();
        let expected = [-g, -g, g, g];
        reduction.deviation((0..4).map(|i| (internal[i] - expected[i]).abs()).fold(0.0, f64::max) / (1.0 + g));
    }

    let mut separation = Check::new(s, "separating_elements", 0.0);
    let opts = SearchOptions::default();
    for kind in 0..6 {
        let p = sampling::event(&mut rng, 1.0);
        let w1 = ProductState::new(p, sampling::internal(&mut rng));
        let (w2, expect_witness) = match kind % 3 {
            0 => {
                let q = sampling::future_event(&mut rng, &p, 1.5);
                let z = latitude(&w1.internal);
                let shifted = z + rng.gen_range(0.2..0.6) * if z > 0.0 { -1.0 } else { 1.0 };
                (ProductState::new(q, sampling::on_parallel(&mut rng, shifted)), true)
            }
            1 => {
                let q = sampling::spacelike_event(&mut rng, &p, 1.5);
                (ProductState::new(q, w1.internal), true)
            }
            _ => {
                let q = sampling::future_event(&mut rng, &p, 1.5);
                let fraction = rng.gen_range(-0.9..0.9);
                (ProductState::new(q, sampling::state_at_budget_fraction(&w1, &q, df, fraction)), false)
            }
        };
        let verdict = causally_related(&w1, &w2, df);
        let consistent = match verdict {
            CausalVerdict::Related => !expect_witness,
            CausalVerdict::NotRelated(NotRelatedReason::SpeedLimitExceeded) => false,
            CausalVerdict::NotRelated(_) => expect_witness,
        };
        let outcome = search_grid(&w1.event, &w2.event, 13)
            .and_then(|grid| separating_element_search(&w1, &w2, df, &grid, &opts));
        separation.holds(consistent && matches!(outcome, Ok(o) if o.is_witness() == expect_witness));
    }

    vec![
        reflexive,
        antisymmetric,
        transitive,
        oracle,
        rigidity,
        restriction,
        reachable,
        reduction,
        separation,
    ]
}
