//! Causal structure of 1+1 dimensional Minkowski space.
//!
//! Events are `(t, x)` with metric `−dt² + dx²`. Curves are piecewise linear
//! with future-directed causal segments; their length is the proper time. The
//! function predicates test causal and steep functions through the matrix
//! symbols from [`crate::clifford`] and cross-check them against the scalar
//! inequalities on the gradient.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::clifford::{causal_symbol, is_nsd, steep_symbol};

/// Tolerance for the negative semidefiniteness of function symbols.
pub const NSD_TOL: f64 = 1e-9;
/// Step for the central-difference gradient check.
pub const FD_STEP: f64 = 1e-5;
/// Points per axis of the default predicate grid.
pub const DEFAULT_RESOLUTION: usize = 101;
/// Bracket width at which golden-section refinement stops.
pub const GOLDEN_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpacetimeError {
    #[error("event coordinates must be finite, got ({0}, {1})")]
    NonFinite(f64, f64),
    #[error("a curve needs at least two vertices, got {0}")]
    TooFewVertices(usize),
    #[error("segment {index} from {from:?} to {to:?} is not future-directed causal")]
    NonCausalSegment { index: usize, from: Event, to: Event },
    #[error("{from:?} does not causally precede {to:?}")]
    NotCausallyRelated { from: Event, to: Event },
    #[error("need at least one segment")]
    NoSegments,
    #[error("supplied gradient {supplied:?} at {at:?} disagrees with finite differences {numeric:?}")]
    GradientMismatch {
        at: Event,
        supplied: (f64, f64),
        numeric: (f64, f64),
    },
    #[error("matrix and scalar predicates disagree at {at:?} for gradient {gradient:?}")]
    PredicateDisagreement { at: Event, gradient: (f64, f64) },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("boost grid must be nonempty, finite and symmetric around zero")]
    InvalidBoostGrid,
}

/// A point `(t, x)` of 2D Minkowski space.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Event {
    pub t: f64,
    pub x: f64,
}

impl Event {
    pub const fn new(t: f64, x: f64) -> Self {
        Self { t, x }
    }

    pub fn try_new(t: f64, x: f64) -> Result<Self, SpacetimeError> {
        if t.is_finite() && x.is_finite() {
            Ok(Self { t, x })
        } else {
            Err(SpacetimeError::NonFinite(t, x))
        }
    }

    /// Minkowski interval `−Δt² + Δx²` to `other`.
    pub fn interval(&self, other: &Event) -> f64 {
        let dt = other.t - self.t;
        let dx = other.x - self.x;
        dx * dx - dt * dt
    }

    pub fn lerp(&self, other: &Event, s: f64) -> Event {
        Event::new(self.t + s * (other.t - self.t), self.x + s * (other.x - self.x))
    }
}

/// `p ⪯ q` iff `q.t − p.t ≥ |q.x − p.x|`.
pub fn causally_precedes(p: &Event, q: &Event) -> bool {
    q.t - p.t >= (q.x - p.x).abs()
}

/// `sqrt(Δt² − Δx²)` when `p ⪯ q`, else 0.
pub fn lorentzian_distance(p: &Event, q: &Event) -> f64 {
    if !causally_precedes(p, q) {
        return 0.0;
    }
    let dt = q.t - p.t;
    let dx = q.x - p.x;
    ((dt - dx.abs()) * (dt + dx.abs())).max(0.0).sqrt()
}

fn segment_is_causal(a: &Event, b: &Event) -> bool {
    let dt = b.t - a.t;
    dt > 0.0 && dt >= (b.x - a.x).abs()
}

fn segment_length(a: &Event, b: &Event) -> f64 {
    let dt = b.t - a.t;
    let dx = (b.x - a.x).abs();
    ((dt - dx) * (dt + dx)).max(0.0).sqrt()
}

fn validate_vertices(vertices: &[Event]) -> Result<(), SpacetimeError> {
    if vertices.len() < 2 {
        return Err(SpacetimeError::TooFewVertices(vertices.len()));
    }
    for (index, pair) in vertices.windows(2).enumerate() {
        if !segment_is_causal(&pair[0], &pair[1]) {
            return Err(SpacetimeError::NonCausalSegment {
                index,
                from: pair[0],
                to: pair[1],
            });
        }
    }
    Ok(())
}

/// Sum of segment proper times of a piecewise-linear curve.
pub fn proper_time(vertices: &[Event]) -> Result<f64, SpacetimeError> {
    validate_vertices(vertices)?;
    Ok(vertices.windows(2).map(|w| segment_length(&w[0], &w[1])).sum())
}

/// Piecewise-linear future-directed causal curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    vertices: Vec<Event>,
}

impl Curve {
    pub fn new(vertices: Vec<Event>) -> Result<Self, SpacetimeError> {
        validate_vertices(&vertices)?;
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Event] {
        &self.vertices
    }

    pub fn proper_time(&self) -> f64 {
        self.vertices.windows(2).map(|w| segment_length(&w[0], &w[1])).sum()
    }

    pub fn segment_proper_times(&self) -> Vec<f64> {
        self.vertices.windows(2).map(|w| segment_length(&w[0], &w[1])).collect()
    }
}

/// Multi-start settings for [`max_proper_time_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSearchOptions {
    pub seed: u64,
    pub starts: usize,
    pub max_sweeps: usize,
    /// Stop once a full sweep gains less than this.
    pub tol: f64,
}

impl Default for CurveSearchOptions {
    fn default() -> Self {
        Self {
            seed: 42,
            starts: 4,
            max_sweeps: 4000,
            tol: 1e-15,
        }
    }
}

/// Longest piecewise-linear causal curve from `p` to `q` with `n_segments`
/// pieces, by coordinate ascent on the interior vertices.
pub fn max_proper_time(p: &Event, q: &Event, n_segments: usize) -> Result<f64, SpacetimeError> {
    max_proper_time_with(p, q, n_segments, &CurveSearchOptions::default()).map(|(v, _)| v)
}

/// As [`max_proper_time`], also returning the best vertex chain found
/// (`[p]` alone when `p == q`).
pub fn max_proper_time_with(
    p: &Event,
    q: &Event,
    n_segments: usize,
    opts: &CurveSearchOptions,
) -> Result<(f64, Vec<Event>), SpacetimeError> {
    if n_segments == 0 {
        return Err(SpacetimeError::NoSegments);
    }
    if !causally_precedes(p, q) {
        return Err(SpacetimeError::NotCausallyRelated { from: *p, to: *q });
    }
    if p == q {
        return Ok((0.0, vec![*p]));
    }
    if q.t - p.t <= 0.0 {
        return Err(SpacetimeError::NotCausallyRelated { from: *p, to: *q });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<(f64, Vec<Event>)> = None;
    for _ in 0..opts.starts.max(1) {
        let mut chain = random_chain(&mut rng, p, q, n_segments);
        let mut current = chain_length(&chain);
        for _ in 0..opts.max_sweeps {
            for i in 1..n_segments {
                improve_vertex(&mut chain, i);
            }
            let next = chain_length(&chain);
            let gain = next - current;
            current = next;
            if gain < opts.tol {
                break;
            }
        }
        if best.as_ref().is_none_or(|(b, _)| current > *b) {
            best = Some((current, chain));
        }
    }
    let (length, chain) = best.expect("at least one start");
    Ok((length, compact(chain)))
}

/// Drops vertices that collapsed onto a neighbour during the ascent, so each
/// remaining segment is strictly future-directed.
fn compact(chain: Vec<Event>) -> Vec<Event> {
    let last = *chain.last().expect("nonempty");
    let mut kept: Vec<Event> = Vec::with_capacity(chain.len());
    for v in &chain[..chain.len() - 1] {
        if kept.last().is_none_or(|prev| segment_is_causal(prev, v)) {
            kept.push(*v);
        }
    }
    while kept.len() > 1 && !segment_is_causal(kept.last().expect("nonempty"), &last) {
        kept.pop();
    }
    kept.push(last);
    kept
}

fn chain_length(chain: &[Event]) -> f64 {
    chain.windows(2).map(|w| segment_length(&w[0], &w[1])).sum()
}

fn random_chain(rng: &mut ChaCha8Rng, p: &Event, q: &Event, n: usize) -> Vec<Event> {
    let total = q.t - p.t;
    let mut cuts: Vec<f64> = (1..n).map(|_| rng.gen_range(0.05..0.95)).collect();
    cuts.sort_by(f64::total_cmp);
    let mut chain = Vec::with_capacity(n + 1);
    chain.push(*p);
    for (k, cut) in cuts.iter().enumerate() {
        // Blend the random cut with the uniform subdivision to keep segments
        // strictly ordered in time.
        let s = 0.5 * cut + 0.5 * (k + 1) as f64 / n as f64;
        let t = p.t + s * total;
        let prev = *chain.last().expect("nonempty");
        let dt = t - prev.t;
        let lo = (prev.x - dt).max(q.x - (q.t - t));
        let hi = (prev.x + dt).min(q.x + (q.t - t));
        let x = if hi > lo { rng.gen_range(lo..=hi) } else { 0.5 * (lo + hi) };
        chain.push(Event::new(t, x));
    }
    chain.push(*q);
    chain
}

fn vertex_gain(a: &Event, v: &Event, b: &Event) -> f64 {
    segment_length(a, v) + segment_length(v, b)
}

fn improve_vertex(chain: &mut [Event], i: usize) {
    let a = chain[i - 1];
    let b = chain[i + 1];
    let v = chain[i];

    // Move in t with x fixed.
    let t_lo = a.t + (v.x - a.x).abs();
    let t_hi = b.t - (b.x - v.x).abs();
    if t_hi > t_lo {
        let t = golden_max(t_lo, t_hi, |t| vertex_gain(&a, &Event::new(t, v.x), &b));
        let candidate = Event::new(t, v.x);
        if vertex_gain(&a, &candidate, &b) >= vertex_gain(&a, &chain[i], &b) {
            chain[i] = candidate;
        }
    }

    // Move in x with t fixed.
    let v = chain[i];
    let x_lo = (a.x - (v.t - a.t)).max(b.x - (b.t - v.t));
    let x_hi = (a.x + (v.t - a.t)).min(b.x + (b.t - v.t));
    if x_hi > x_lo {
        let x = golden_max(x_lo, x_hi, |x| vertex_gain(&a, &Event::new(v.t, x), &b));
        let candidate = Event::new(v.t, x);
        if vertex_gain(&a, &candidate, &b) >= vertex_gain(&a, &chain[i], &b) {
            chain[i] = candidate;
        }
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the maximizer of a unimodal function on `[lo, hi]`.
pub fn golden_max<F: Fn(f64) -> f64>(mut lo: f64, mut hi: f64, f: F) -> f64 {
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    let width_tol = GOLDEN_TOL * (1.0 + lo.abs().max(hi.abs()));
    while hi - lo > width_tol {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    let mid = 0.5 * (lo + hi);
    [lo, mid, hi, c, d]
        .into_iter()
        .max_by(|u, v| f(*u).total_cmp(&f(*v)))
        .expect("nonempty")
}

/// A real function on space-time with its gradient `(∂_t f, ∂_x f)`.
pub trait ScalarField {
    fn value(&self, e: Event) -> f64;
    fn gradient(&self, e: Event) -> (f64, f64);
}

/// [`ScalarField`] from a pair of closures.
pub struct FnField<V, G> {
    value: V,
    gradient: G,
}

impl<V, G> FnField<V, G>
where
    V: Fn(Event) -> f64,
    G: Fn(Event) -> (f64, f64),
{
    pub fn new(value: V, gradient: G) -> Self {
        Self { value, gradient }
    }
}

impl<V, G> ScalarField for FnField<V, G>
where
    V: Fn(Event) -> f64,
    G: Fn(Event) -> (f64, f64),
{
    fn value(&self, e: Event) -> f64 {
        (self.value)(e)
    }

    fn gradient(&self, e: Event) -> (f64, f64) {
        (self.gradient)(e)
    }
}

/// `f(t, x) = t·cosh β + x·sinh β`, a boosted global time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostFunction {
    pub beta: f64,
}

impl ScalarField for BoostFunction {
    fn value(&self, e: Event) -> f64 {
        e.t * self.beta.cosh() + e.x * self.beta.sinh()
    }

    fn gradient(&self, _e: Event) -> (f64, f64) {
        (self.beta.cosh(), self.beta.sinh())
    }
}

/// Uniform rectangular grid of events, scanned row-major with `t` outer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub nt: usize,
    pub nx: usize,
}

impl EventGrid {
    pub fn new(
        t_range: (f64, f64),
        x_range: (f64, f64),
        nt: usize,
        nx: usize,
    ) -> Result<Self, SpacetimeError> {
        let grid = Self {
            t_min: t_range.0,
            t_max: t_range.1,
            x_min: x_range.0,
            x_max: x_range.1,
            nt,
            nx,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Default-resolution grid over a rectangle.
    pub fn over(t_range: (f64, f64), x_range: (f64, f64)) -> Result<Self, SpacetimeError> {
        Self::new(t_range, x_range, DEFAULT_RESOLUTION, DEFAULT_RESOLUTION)
    }

    pub fn validate(&self) -> Result<(), SpacetimeError> {
        let bounds = [self.t_min, self.t_max, self.x_min, self.x_max];
        if bounds.iter().any(|v| !v.is_finite()) {
            return Err(SpacetimeError::InvalidGrid("bounds must be finite".into()));
        }
        if self.t_min > self.t_max || self.x_min > self.x_max {
            return Err(SpacetimeError::InvalidGrid("empty rectangle".into()));
        }
        if self.nt == 0 || self.nx == 0 {
            return Err(SpacetimeError::InvalidGrid("resolution must be positive".into()));
        }
        Ok(())
    }

    fn coordinate(lo: f64, hi: f64, n: usize, k: usize) -> f64 {
        if n == 1 {
            lo
        } else if k + 1 == n {
            hi
        } else {
            lo + (hi - lo) * k as f64 / (n - 1) as f64
        }
    }

    pub fn t_at(&self, i: usize) -> f64 {
        Self::coordinate(self.t_min, self.t_max, self.nt, i)
    }

    pub fn x_at(&self, j: usize) -> f64 {
        Self::coordinate(self.x_min, self.x_max, self.nx, j)
    }

    pub fn len(&self) -> usize {
        self.nt * self.nx
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> impl Iterator<Item = Event> + '_ {
        (0..self.nt).flat_map(move |i| (0..self.nx).map(move |j| Event::new(self.t_at(i), self.x_at(j))))
    }

    /// Same rectangle with every spacing halved (`2n − 1` points per axis).
    pub fn refined(&self) -> Self {
        Self {
            nt: 2 * self.nt - 1,
            nx: 2 * self.nx - 1,
            ..*self
        }
    }

    pub fn contains(&self, e: &Event) -> bool {
        e.t >= self.t_min && e.t <= self.t_max && e.x >= self.x_min && e.x <= self.x_max
    }
}

/// Checks the supplied gradient against central differences with step
/// [`FD_STEP`], within `max(1e−5, 1e−3·‖grad‖)` per component.
pub fn check_gradient<F: ScalarField + ?Sized>(f: &F, grid: &EventGrid) -> Result<(), SpacetimeError> {
    for e in grid.points() {
        let supplied = f.gradient(e);
        let dt = (f.value(Event::new(e.t + FD_STEP, e.x)) - f.value(Event::new(e.t - FD_STEP, e.x)))
            / (2.0 * FD_STEP);
        let dx = (f.value(Event::new(e.t, e.x + FD_STEP)) - f.value(Event::new(e.t, e.x - FD_STEP)))
            / (2.0 * FD_STEP);
        let tol = (1e-3 * supplied.0.hypot(supplied.1)).max(1e-5);
        if (dt - supplied.0).abs() > tol || (dx - supplied.1).abs() > tol {
            return Err(SpacetimeError::GradientMismatch {
                at: e,
                supplied,
                numeric: (dt, dx),
            });
        }
    }
    Ok(())
}

/// Scalar form of the causal condition: `∂_t f ≥ |∂_x f| − tol`.
pub fn causal_scalar(dft: f64, dfx: f64, tol: f64) -> bool {
    -dft + dfx.abs() <= tol
}

/// Scalar form of the steep condition: `∂_t f ≥ sqrt(1 + (∂_x f)²) − tol`.
pub fn steep_scalar(dft: f64, dfx: f64, tol: f64) -> bool {
    -dft + dfx.hypot(1.0) <= tol
}

fn scan_predicate<F, M, S>(f: &F, grid: &EventGrid, matrix: M, scalar: S) -> Result<bool, SpacetimeError>
where
    F: ScalarField + ?Sized,
    M: Fn(f64, f64) -> bool,
    S: Fn(f64, f64) -> bool,
{
    grid.validate()?;
    check_gradient(f, grid)?;
    let mut all = true;
    for e in grid.points() {
        let (dft, dfx) = f.gradient(e);
        let by_matrix = matrix(dft, dfx);
        if by_matrix != scalar(dft, dfx) {
            return Err(SpacetimeError::PredicateDisagreement {
                at: e,
                gradient: (dft, dfx),
            });
        }
        all &= by_matrix;
    }
    Ok(all)
}

/// True iff `J[D, f]` is negative semidefinite at every grid point.
pub fn is_causal_function<F: ScalarField + ?Sized>(f: &F, grid: &EventGrid) -> Result<bool, SpacetimeError> {
    scan_predicate(
        f,
        grid,
        |a, b| is_nsd(&causal_symbol(a, b), NSD_TOL),
        |a, b| causal_scalar(a, b, NSD_TOL),
    )
}

/// True iff `J([D, f] + iγ_M)` is negative semidefinite at every grid point.
pub fn is_steep_function<F: ScalarField + ?Sized>(f: &F, grid: &EventGrid) -> Result<bool, SpacetimeError> {
    scan_predicate(
        f,
        grid,
        |a, b| is_nsd(&steep_symbol(a, b), NSD_TOL),
        |a, b| steep_scalar(a, b, NSD_TOL),
    )
}

/// Rapidities `−12, −11.75, …, 12`.
pub fn default_boost_grid() -> Vec<f64> {
    (-48..=48).map(|k| f64::from(k) * 0.25).collect()
}

fn boost_is_steep(beta: f64, check_grid: &EventGrid) -> bool {
    matches!(is_steep_function(&BoostFunction { beta }, check_grid), Ok(true))
}

/// `inf_β max(0, f_β(q) − f_β(p))` over the boosted global times
/// `f_β = t·cosh β + x·sinh β`, each verified steep before use.
///
/// The grid minimum is refined by golden-section search on its neighbouring
/// bracket.
pub fn lorentz_distance_functional(p: &Event, q: &Event, boost_grid: &[f64]) -> Result<f64, SpacetimeError> {
    if boost_grid.is_empty() || boost_grid.iter().any(|b| !b.is_finite()) {
        return Err(SpacetimeError::InvalidBoostGrid);
    }
    let mut grid: Vec<f64> = boost_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let symmetric = grid
        .iter()
        .zip(grid.iter().rev())
        .all(|(a, b)| (a + b).abs() <= 1e-12 * (1.0 + a.abs()));
    if !symmetric {
        return Err(SpacetimeError::InvalidBoostGrid);
    }

    let t_lo = p.t.min(q.t);
    let t_hi = p.t.max(q.t);
    let x_lo = p.x.min(q.x);
    let x_hi = p.x.max(q.x);
    let check_grid = EventGrid::new((t_lo, t_hi), (x_lo, x_hi), 3, 3)?;

    let dt = q.t - p.t;
    let dx = q.x - p.x;
    let gain = |beta: f64| dt * beta.cosh() + dx * beta.sinh();

    let mut best: Option<(usize, f64)> = None;
    for (k, &beta) in grid.iter().enumerate() {
        if !boost_is_steep(beta, &check_grid) {
            continue;
        }
        let g = gain(beta);
        if best.is_none_or(|(_, b)| g < b) {
            best = Some((k, g));
        }
    }
    let Some((k, mut value)) = best else {
        return Err(SpacetimeError::InvalidBoostGrid);
    };
    if value > 0.0 {
        let lo = grid[k.saturating_sub(1)];
        let hi = grid[(k + 1).min(grid.len() - 1)];
        if hi > lo {
            let beta = golden_max(lo, hi, |b| -gain(b));
            if boost_is_steep(beta, &check_grid) {
                value = value.min(gain(beta));
            }
        }
    }
    Ok(value.max(0.0))
}
