//! Causal structure of the almost commutative product `ℝ^{1,1} × M₂(ℂ)`.
//!
//! A pure state of the product is a pair `(event, internal state)`. Two such
//! states are causally related when the events are, the internal states share
//! a parallel of latitude, and the longitude change is covered by the proper
//! time between the events at angular speed at most `|d₁ − d₂|`.
//!
//! Besides the predicate this module provides an independent curve oracle on
//! `ℝ^{1,1} × S¹` and a search for cone elements that separate two states.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use thiserror::Error;

use crate::clifford::{self, is_nsd, CliffordError, Herm2, Herm4, HermitianSpectrum};
use crate::eigen;
use crate::finite_geometry::{latitude, longitude, state_eval, FiniteDirac, InternalState, LATITUDE_TOL, POLE_TOL};
use crate::spacetime::{
    causally_precedes, lorentzian_distance, max_proper_time_with, CurveSearchOptions, Event, EventGrid,
};

/// Slack in the speed inequality `Δθ ≤ |d₁−d₂|·d(p,q)`.
pub const SPEED_TOL: f64 = 1e-12;
/// Total angular slack granted to curves built by [`curve_oracle`].
pub const CURVE_SLACK: f64 = 1e-3;
/// A witness must beat the causal order by more than this.
pub const WITNESS_SIGNIFICANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProductError {
    #[error(transparent)]
    Clifford(#[from] CliffordError),
    #[error("longitude is undefined at a pole (latitude {0})")]
    PoleState(f64),
    #[error("grid must cover both events with a margin of at least {required}")]
    GridTooSmall { required: f64 },
    #[error("{0}")]
    InvalidCurve(String),
}

/// A pure state `ω_{p,ξ}` of the product algebra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductState {
    pub event: Event,
    pub internal: InternalState,
}

impl ProductState {
    pub fn new(event: Event, internal: InternalState) -> Self {
        Self { event, internal }
    }

    /// `ω_{p,ξ}(a) = ξ* a(p) ξ` for a matrix-valued function `a`.
    pub fn eval<F: Fn(Event) -> Herm2>(&self, a: F) -> f64 {
        state_eval(&self.internal, &a(self.event))
    }
}

/// Pointwise symbol of `J[D, a]` for `D = D_M ⊗ 1 + γ_M ⊗ D_F` and
/// `J = iγ⁰ ⊗ 1`, from the value and first derivatives of `a` at one event.
pub fn product_symbol(a_val: &Herm2, da_dt: &Herm2, da_dx: &Herm2, df: &FiniteDirac) -> Herm4 {
    let basis = clifford::standard_basis();
    let i = Complex64::new(0.0, 1.0);
    let dfm = *df.matrix().matrix();
    let a = *a_val.matrix();
    let internal_commutator = dfm * a - a * dfm;

    let commutator: Matrix4<Complex64> = (basis.gamma0 * -i).kronecker(da_dt.matrix())
        + (basis.gamma1 * -i).kronecker(da_dx.matrix())
        + basis.gamma_m.kronecker(&internal_commutator);
    let j = basis.j.kronecker(&Matrix2::<Complex64>::identity());
    Herm4::new(j * commutator).expect("J[D,a] is Hermitian for Hermitian a")
}

/// [`product_symbol`] on raw matrices, rejecting non-Hermitian input.
pub fn product_symbol_raw(
    a_val: &Matrix2<Complex64>,
    da_dt: &Matrix2<Complex64>,
    da_dx: &Matrix2<Complex64>,
    df: &FiniteDirac,
) -> Result<Herm4, ProductError> {
    Ok(product_symbol(
        &Herm2::new(*a_val)?,
        &Herm2::new(*da_dt)?,
        &Herm2::new(*da_dx)?,
        df,
    ))
}

/// `|d₁ − d₂|`.
pub fn speed_bound(df: &FiniteDirac) -> f64 {
    df.gap()
}

/// Distance between two longitudes along the circle, in `[0, π]`.
///
/// Winding is ignored: a longer path around the parallel never helps.
pub fn angular_gap(theta1: f64, theta2: f64) -> f64 {
    let d = (theta2 - theta1).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NotRelatedReason {
    BaseNotCausal,
    LatitudeMismatch,
    SpeedLimitExceeded,
}

impl NotRelatedReason {
    pub fn label(&self) -> &'static str {
        match self {
            Self::BaseNotCausal => "base",
            Self::LatitudeMismatch => "latitude",
            Self::SpeedLimitExceeded => "speed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CausalVerdict {
    Related,
    NotRelated(NotRelatedReason),
}

impl CausalVerdict {
    pub fn is_related(&self) -> bool {
        matches!(self, Self::Related)
    }
}

/// Every quantity entering the verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CausalReport {
    pub base_causal: bool,
    pub lorentzian_distance: f64,
    pub latitudes: (f64, f64),
    /// `None` when either state is a pole.
    pub angular_gap: Option<f64>,
    /// `|d₁ − d₂|·d(p, q)`.
    pub angular_budget: f64,
    /// `budget − gap`; `None` at poles.
    pub speed_margin: Option<f64>,
    pub verdict: CausalVerdict,
}

/// Full evaluation of the causal relation `w1 ⪯ w2`.
pub fn causal_report(w1: &ProductState, w2: &ProductState, df: &FiniteDirac) -> CausalReport {
    let base_causal = causally_precedes(&w1.event, &w2.event);
    let distance = lorentzian_distance(&w1.event, &w2.event);
    let (z1, z2) = (latitude(&w1.internal), latitude(&w2.internal));
    let gap = match (longitude(&w1.internal), longitude(&w2.internal)) {
        (Ok(t1), Ok(t2)) => Some(angular_gap(t1, t2)),
        _ => None,
    };
    let budget = speed_bound(df) * distance;
    let margin = gap.map(|g| budget - g);

    let verdict = if !base_causal {
        CausalVerdict::NotRelated(NotRelatedReason::BaseNotCausal)
    } else if (z1 - z2).abs() > LATITUDE_TOL {
        CausalVerdict::NotRelated(NotRelatedReason::LatitudeMismatch)
    } else if margin.is_some_and(|m| m < -SPEED_TOL) {
        CausalVerdict::NotRelated(NotRelatedReason::SpeedLimitExceeded)
    } else {
        CausalVerdict::Related
    };
    CausalReport {
        base_causal,
        lorentzian_distance: distance,
        latitudes: (z1, z2),
        angular_gap: gap,
        angular_budget: budget,
        speed_margin: margin,
        verdict,
    }
}

/// Whether `w1 ⪯ w2`; the first failing condition names the reason.
pub fn causally_related(w1: &ProductState, w2: &ProductState, df: &FiniteDirac) -> CausalVerdict {
    causal_report(w1, w2, df).verdict
}

/// A closed subset of the circle of longitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArcSet {
    Empty,
    /// `[center − half_width, center + half_width]`, with `half_width < π`.
    Arc { center: f64, half_width: f64 },
    Full,
}

impl ArcSet {
    pub fn contains(&self, theta: f64) -> bool {
        match self {
            Self::Empty => false,
            Self::Full => true,
            Self::Arc { center, half_width } => angular_gap(*center, theta) <= *half_width + SPEED_TOL,
        }
    }
}

/// Longitudes reachable at event `q` from the state `w` on its parallel.
pub fn reachable_longitudes(w: &ProductState, q: &Event, df: &FiniteDirac) -> Result<ArcSet, ProductError> {
    let theta = longitude(&w.internal).map_err(|_| ProductError::PoleState(latitude(&w.internal)))?;
    if !causally_precedes(&w.event, q) {
        return Ok(ArcSet::Empty);
    }
    let half_width = speed_bound(df) * lorentzian_distance(&w.event, q);
    if half_width >= PI {
        Ok(ArcSet::Full)
    } else {
        Ok(ArcSet::Arc {
            center: theta,
            half_width,
        })
    }
}

/// Piecewise-linear curve in `ℝ^{1,1} × S¹` with unwrapped longitude.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductCurve {
    pub vertices: Vec<(Event, f64)>,
}

impl ProductCurve {
    /// Checks that each segment is future-directed causal in the base and
    /// that `|Δθ| ≤ |d₁−d₂|·Δτ + slack/segments`, i.e.
    /// `(Δθ)²/(d₁−d₂)² ≤ Δt² − Δx²` up to the slack.
    pub fn validate(&self, df: &FiniteDirac, slack: f64) -> Result<(), ProductError> {
        if self.vertices.len() < 2 {
            return Err(ProductError::InvalidCurve("fewer than two vertices".into()));
        }
        let per_segment = slack / (self.vertices.len() - 1) as f64;
        for (k, w) in self.vertices.windows(2).enumerate() {
            let ((a, ta), (b, tb)) = (w[0], w[1]);
            let dt = b.t - a.t;
            if !(dt > 0.0 && dt >= (b.x - a.x).abs()) {
                return Err(ProductError::InvalidCurve(format!("segment {k} is not causal in the base")));
            }
            let tau = lorentzian_distance(&a, &b);
            if (tb - ta).abs() > speed_bound(df) * tau + per_segment {
                return Err(ProductError::InvalidCurve(format!("segment {k} exceeds the internal speed bound")));
            }
        }
        Ok(())
    }
}

/// Brute-force search for a causal curve on `ℝ^{1,1} × S¹` joining the two
/// states, trying the windings `θ₂ + 2πk` for `k ∈ {−1, 0, 1}`.
///
/// The base curve comes from [`max_proper_time_with`] with `n_segments`
/// pieces; longitude is spread in proportion to segment proper time.
pub fn curve_oracle(w1: &ProductState, w2: &ProductState, df: &FiniteDirac, n_segments: usize) -> bool {
    let (z1, z2) = (latitude(&w1.internal), latitude(&w2.internal));
    if (z1 - z2).abs() > LATITUDE_TOL {
        return false;
    }
    let on_pole = z1.abs() >= 1.0 - POLE_TOL || z2.abs() >= 1.0 - POLE_TOL;
    let (p, q) = (w1.event, w2.event);

    let chain = match max_proper_time_with(&p, &q, n_segments, &CurveSearchOptions::default()) {
        Ok((_, chain)) => chain,
        Err(_) => return false,
    };
    if on_pole {
        return true;
    }
    let (Ok(theta1), Ok(theta2)) = (longitude(&w1.internal), longitude(&w2.internal)) else {
        return true;
    };

    if chain.len() == 1 {
        // p == q: only the constant curve is available.
        return (-1..=1).any(|k| (theta2 + 2.0 * PI * f64::from(k) - theta1).abs() <= CURVE_SLACK);
    }

    let taus: Vec<f64> = chain.windows(2).map(|w| lorentzian_distance(&w[0], &w[1])).collect();
    let total: f64 = taus.iter().sum();
    (-1..=1).any(|k| {
        let target = theta2 + 2.0 * PI * f64::from(k) - theta1;
        let mut vertices = Vec::with_capacity(chain.len());
        let mut elapsed = 0.0;
        vertices.push((chain[0], theta1));
        for (i, event) in chain.iter().enumerate().skip(1) {
            elapsed += taus[i - 1];
            let theta = if i + 1 == chain.len() {
                theta1 + target
            } else if total > 0.0 {
                theta1 + target * elapsed / total
            } else {
                theta1
            };
            vertices.push((*event, theta));
        }
        ProductCurve { vertices }.validate(df, CURVE_SLACK).is_ok()
    })
}

/// Scalar profiles `u_k(t, x)` of the separating-element dictionary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    Constant,
    /// `tanh((cosh β·(t − t₀) + sinh β·(x − x₀)) / scale)`; causal for every β.
    Tanh { beta: f64, center: Event, scale: f64 },
    /// `exp(−|e − center|² / (2·width²))`.
    Bump { center: Event, width: f64 },
}

impl Profile {
    pub fn value(&self, e: Event) -> f64 {
        match *self {
            Self::Constant => 1.0,
            Self::Tanh { beta, center, scale } => {
                ((beta.cosh() * (e.t - center.t) + beta.sinh() * (e.x - center.x)) / scale).tanh()
            }
            Self::Bump { center, width } => {
                let r2 = (e.t - center.t).powi(2) + (e.x - center.x).powi(2);
                (-r2 / (2.0 * width * width)).exp()
            }
        }
    }

    pub fn gradient(&self, e: Event) -> (f64, f64) {
        match *self {
            Self::Constant => (0.0, 0.0),
            Self::Tanh { beta, center, scale } => {
                let s = (beta.cosh() * (e.t - center.t) + beta.sinh() * (e.x - center.x)) / scale;
                let sech2 = 1.0 - s.tanh().powi(2);
                (sech2 * beta.cosh() / scale, sech2 * beta.sinh() / scale)
            }
            Self::Bump { center, width } => {
                let v = self.value(e);
                let w2 = width * width;
                (-v * (e.t - center.t) / w2, -v * (e.x - center.x) / w2)
            }
        }
    }
}

/// Hermitian generators `I, σ_z, σ_x, σ_y`.
pub fn generators() -> [Herm2; 4] {
    [Herm2::identity(), Herm2::pauli_z(), Herm2::pauli_x(), Herm2::pauli_y()]
}

/// Matrix-valued functions `a = Σ_k c_k·u_k·H_k` span the products of the
/// profiles with [`generators`]; coefficient `4·profile + generator`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    pub profiles: Vec<Profile>,
}

/// Index of the slowly varying global time profile in [`Dictionary::for_pair`].
pub const TIME_PROFILE: usize = 1;
/// Rapidities of the boosted tanh profiles.
pub const DICTIONARY_BOOSTS: [f64; 7] = [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0];

impl Dictionary {
    /// Constant, a global time function, boosted tanh steps centred between
    /// the two events and three bumps along the segment joining them.
    pub fn for_pair(p: &Event, q: &Event, grid: &EventGrid) -> Self {
        let separation = (q.t - p.t).hypot(q.x - p.x);
        let scale = if separation > 1e-9 { separation } else { 1.0 };
        let center = p.lerp(q, 0.5);
        let extent = (grid.t_max - grid.t_min).max(grid.x_max - grid.x_min);
        let mut profiles = vec![
            Profile::Constant,
            Profile::Tanh {
                beta: 0.0,
                center,
                scale: 2.0 * extent + scale,
            },
        ];
        profiles.extend(DICTIONARY_BOOSTS.iter().map(|&beta| Profile::Tanh { beta, center, scale }));
        profiles.extend([0.25, 0.5, 0.75].iter().map(|&s| Profile::Bump {
            center: p.lerp(q, s),
            width: 0.5 * scale,
        }));
        Self { profiles }
    }

    pub fn len(&self) -> usize {
        4 * self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    /// `(value, ∂_t, ∂_x)` of the `k`-th dictionary element at `e`.
    fn element_parts(&self, k: usize, e: Event) -> (Herm2, Herm2, Herm2) {
        let profile = &self.profiles[k / 4];
        let h = generators()[k % 4];
        let (gt, gx) = profile.gradient(e);
        (h.scale(profile.value(e)), h.scale(gt), h.scale(gx))
    }
}

/// A candidate element of the causal cone.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalElement {
    pub dictionary: Dictionary,
    pub coefficients: Vec<f64>,
}

impl CausalElement {
    pub fn new(dictionary: Dictionary, coefficients: Vec<f64>) -> Self {
        assert_eq!(dictionary.len(), coefficients.len(), "one coefficient per dictionary element");
        Self {
            dictionary,
            coefficients,
        }
    }

    fn combine(&self, e: Event) -> (Herm2, Herm2, Herm2) {
        let mut parts = (Herm2::zeros(), Herm2::zeros(), Herm2::zeros());
        for (k, &c) in self.coefficients.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let (v, dt, dx) = self.dictionary.element_parts(k, e);
            parts.0 = parts.0 + v.scale(c);
            parts.1 = parts.1 + dt.scale(c);
            parts.2 = parts.2 + dx.scale(c);
        }
        parts
    }

    pub fn value(&self, e: Event) -> Herm2 {
        self.combine(e).0
    }

    pub fn symbol(&self, e: Event, df: &FiniteDirac) -> Herm4 {
        let (v, dt, dx) = self.combine(e);
        product_symbol(&v, &dt, &dx, df)
    }

    pub fn eval(&self, w: &ProductState) -> f64 {
        state_eval(&w.internal, &self.value(w.event))
    }

    /// Pointwise negative semidefiniteness of the symbol on every grid point.
    pub fn certify(&self, grid: &EventGrid, df: &FiniteDirac, tol: f64) -> bool {
        grid.points().all(|e| is_nsd(&self.symbol(e, df), tol))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub penalty_rounds: usize,
    pub iterations_per_round: usize,
    pub initial_penalty: f64,
    pub penalty_growth: f64,
    pub nsd_tol: f64,
    pub significance: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            penalty_rounds: 6,
            iterations_per_round: 60,
            initial_penalty: 1.0,
            penalty_growth: 10.0,
            nsd_tol: 1e-9,
            significance: WITNESS_SIGNIFICANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    /// A certified cone element with `ω₂(a) − ω₁(a) = gap < −significance`.
    Witness { element: CausalElement, gap: f64 },
    /// No certified element beat the significance threshold.
    NoneFound { best_gap: f64 },
}

impl SearchOutcome {
    pub fn is_witness(&self) -> bool {
        matches!(self, Self::Witness { .. })
    }
}

/// Looks for `a` in the causal cone with `ω₂(a) < ω₁(a)`, which certifies
/// that `w1 ⪯ w2` fails.
///
/// Minimizes `ω₂(a) − ω₁(a)` over dictionary coefficients in `[−1, 1]` with a
/// quadratic penalty on positive symbol eigenvalues at the grid points, then
/// restores exact feasibility on the refined grid by adding the global time
/// profile (whose symbol is a negative multiple of the identity) and
/// re-verifies the result on that grid.
pub fn separating_element_search(
    w1: &ProductState,
    w2: &ProductState,
    df: &FiniteDirac,
    grid: &EventGrid,
    opts: &SearchOptions,
) -> Result<SearchOutcome, ProductError> {
    let (p, q) = (w1.event, w2.event);
    let margin = (q.t - p.t).hypot(q.x - p.x);
    let covered = grid.t_min <= p.t.min(q.t) - margin
        && grid.t_max >= p.t.max(q.t) + margin
        && grid.x_min <= p.x.min(q.x) - margin
        && grid.x_max >= p.x.max(q.x) + margin;
    if !covered || grid.validate().is_err() {
        return Err(ProductError::GridTooSmall { required: margin });
    }

    let dictionary = Dictionary::for_pair(&p, &q, grid);
    let n = dictionary.len();
    let objective: Vec<f64> = (0..n)
        .map(|k| {
            let h = generators()[k % 4];
            let profile = &dictionary.profiles[k / 4];
            profile.value(q) * state_eval(&w2.internal, &h) - profile.value(p) * state_eval(&w1.internal, &h)
        })
        .collect();

    let coarse = SymbolTable::build(&dictionary, grid, df);
    let mut coefficients = vec![0.0; n];
    let mut mu = opts.initial_penalty;
    let mut step = 1.0;
    let curvature = coarse.curvature_bounds(n);
    for _ in 0..opts.penalty_rounds {
        // Diagonal preconditioner: bound on the penalty's second derivative
        // along each coefficient.
        let scaling: Vec<f64> = curvature.iter().map(|c| 1.0 / (1.0 + 2.0 * mu * c)).collect();
        for _ in 0..opts.iterations_per_round {
            let (value, gradient) = coarse.penalized(&coefficients, &objective, mu);
            let mut accepted = false;
            for _ in 0..40 {
                let trial: Vec<f64> = coefficients
                    .iter()
                    .zip(&gradient)
                    .zip(&scaling)
                    .map(|((c, g), d)| (c - step * d * g).clamp(-1.0, 1.0))
                    .collect();
                let decrease: f64 = coefficients
                    .iter()
                    .zip(&trial)
                    .zip(&gradient)
                    .map(|((c, t), g)| g * (c - t))
                    .sum();
                let trial_value = coarse.penalized_value(&trial, &objective, mu);
                if trial_value <= value - 1e-4 * decrease {
                    accepted = decrease > 0.0;
                    coefficients = trial;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
            step = (step * 2.0).min(1e3);
        }
        mu *= opts.penalty_growth;
    }

    let fine_grid = grid.refined();
    let fine = SymbolTable::build(&dictionary, &fine_grid, df);
    let time_index = 4 * TIME_PROFILE;
    let mut lift: f64 = 0.0;
    for (i, e) in fine_grid.points().enumerate() {
        let top = fine.max_eigenvalue(i, &coefficients);
        let rate = dictionary.profiles[TIME_PROFILE].gradient(e).0;
        if top > 0.0 {
            lift = lift.max((top + 1e-12) / rate);
        }
    }
    coefficients[time_index] += lift;

    let element = CausalElement::new(dictionary, coefficients);
    let gap = element.eval(w2) - element.eval(w1);
    if element.certify(&fine_grid, df, opts.nsd_tol) && gap < -opts.significance {
        Ok(SearchOutcome::Witness { element, gap })
    } else {
        Ok(SearchOutcome::NoneFound { best_gap: gap })
    }
}

/// Smallest grid accepted by [`separating_element_search`] for the pair: the
/// bounding box of `p` and `q` padded by their Euclidean separation, with `n`
/// points per axis. Spacing scales with the separation, as do the dictionary
/// profiles.
pub fn search_grid(p: &Event, q: &Event, n: usize) -> Result<EventGrid, ProductError> {
    let margin = (q.t - p.t).hypot(q.x - p.x).max(1e-3);
    EventGrid::new(
        (p.t.min(q.t) - margin, p.t.max(q.t) + margin),
        (p.x.min(q.x) - margin, p.x.max(q.x) + margin),
        n,
        n,
    )
    .map_err(|_| ProductError::GridTooSmall { required: margin })
}

/// Cheap test for a strictly negative spectrum, used to skip eigensolves.
fn negative_definite(m: &Matrix4<Complex64>) -> bool {
    eigen::is_positive_definite(&-m)
}

/// Precomputed symbols of each dictionary element at each grid point.
struct SymbolTable {
    /// `symbols[i]` lists `(k, S_k(point i))` for the nonzero symbols.
    symbols: Vec<Vec<(usize, Matrix4<Complex64>)>>,
}

impl SymbolTable {
    fn build(dictionary: &Dictionary, grid: &EventGrid, df: &FiniteDirac) -> Self {
        let symbols = grid
            .points()
            .map(|e| {
                (0..dictionary.len())
                    .filter_map(|k| {
                        let (v, dt, dx) = dictionary.element_parts(k, e);
                        let s = product_symbol(&v, &dt, &dx, df).into_inner();
                        (s.norm() > 0.0).then_some((k, s))
                    })
                    .collect()
            })
            .collect();
        Self { symbols }
    }

    /// `Σ_i ‖S_k(point i)‖²` per coefficient (Frobenius norm).
    fn curvature_bounds(&self, n: usize) -> Vec<f64> {
        let mut bounds = vec![0.0; n];
        for row in &self.symbols {
            for (k, s) in row {
                bounds[*k] += s.norm_squared();
            }
        }
        bounds
    }

    fn assemble(&self, i: usize, c: &[f64]) -> Matrix4<Complex64> {
        let mut m = Matrix4::<Complex64>::zeros();
        for (k, s) in &self.symbols[i] {
            if c[*k] != 0.0 {
                m += s * Complex64::new(c[*k], 0.0);
            }
        }
        m
    }

    fn max_eigenvalue(&self, i: usize, c: &[f64]) -> f64 {
        Herm4::new(self.assemble(i, c))
            .map(|h| h.max_eigenvalue())
            .unwrap_or(f64::INFINITY)
    }

    fn penalized_value(&self, c: &[f64], objective: &[f64], mu: f64) -> f64 {
        let linear: f64 = c.iter().zip(objective).map(|(a, b)| a * b).sum();
        let penalty: f64 = (0..self.symbols.len())
            .map(|i| {
                let m = self.assemble(i, c);
                if negative_definite(&m) {
                    0.0
                } else {
                    eigen::max_eigenpair(&m).0.max(0.0).powi(2)
                }
            })
            .sum();
        linear + mu * penalty
    }

    fn penalized(&self, c: &[f64], objective: &[f64], mu: f64) -> (f64, Vec<f64>) {
        let mut gradient = objective.to_vec();
        let mut penalty = 0.0;
        for i in 0..self.symbols.len() {
            let m = self.assemble(i, c);
            if negative_definite(&m) {
                continue;
            }
            let (top, v) = eigen::max_eigenpair(&m);
            if top <= 0.0 {
                continue;
            }
            penalty += top * top;
            for (k, s) in &self.symbols[i] {
                let rayleigh = (v.adjoint() * s * v)[(0, 0)].re;
                gradient[*k] += 2.0 * mu * top * rayleigh;
            }
        }
        let linear: f64 = c.iter().zip(objective).map(|(a, b)| a * b).sum();
        (linear + mu * penalty, gradient)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::causal_symbol;
    use crate::finite_geometry::make_state;

    fn e(t: f64, x: f64) -> Event {
        Event::new(t, x)
    }

    fn equator(theta: f64) -> InternalState {
        InternalState::from_latitude_longitude(0.0, theta).unwrap()
    }

    fn df12() -> FiniteDirac {
        FiniteDirac::new(1.0, 2.0).unwrap()
    }

    /// Direct assembly of `J[D, a]` from explicit 4×4 Kronecker blocks,
    /// written out entry by entry.
    fn kron(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Matrix4<Complex64> {
        Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
    }

    #[test]
    fn constant_identity_has_vanishing_symbol() {
        let s = product_symbol(&Herm2::identity().scale(3.0), &Herm2::zeros(), &Herm2::zeros(), &df12());
        assert_eq!(s.max_abs(), 0.0);
    }

    #[test]
    fn time_coordinate_has_minus_identity_symbol() {
        let s = product_symbol(&Herm2::zeros(), &Herm2::identity(), &Herm2::zeros(), &df12());
        assert!((s.into_inner() + Matrix4::identity()).norm() < 1e-15);
        assert!(is_nsd(&s, 1e-9));

        let b = clifford::standard_basis();
        let i = Complex64::new(0.0, 1.0);
        let j = kron(&(b.gamma0 * i), &Matrix2::identity());
        let d = kron(&(b.gamma0 * -i), &Matrix2::identity());
        assert!(((j * d) - s.into_inner()).norm() < 1e-15);
    }

    #[test]
    fn scalar_symbol_doubles_the_causal_spectrum() {
        for (a, b) in [(1.0, 0.3), (0.2, -0.9), (-1.0, 2.0)] {
            let s = product_symbol(&Herm2::zeros(), &Herm2::identity().scale(a), &Herm2::identity().scale(b), &df12());
            let four = s.eigenvalues();
            let two = causal_symbol(a, b).eigenvalues();
            let expected = [two[0], two[0], two[1], two[1]];
            for (x, y) in four.iter().zip(expected) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn raw_symbol_rejects_non_hermitian_input() {
        let bad = Matrix2::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let zero = Matrix2::zeros();
        assert!(matches!(
            product_symbol_raw(&bad, &zero, &zero, &df12()),
            Err(ProductError::Clifford(CliffordError::NotHermitian(_)))
        ));
    }

    #[test]
    fn speed_limit_examples() {
        let df = df12();
        let w = ProductState::new(e(0.0, 0.0), equator(0.0));
        assert_eq!(causally_related(&w, &w, &df), CausalVerdict::Related);
        let near = ProductState::new(e(2.0, 0.0), equator(1.5));
        assert_eq!(causally_related(&w, &near, &df), CausalVerdict::Related);
        let far = ProductState::new(e(2.0, 0.0), equator(PI));
        assert_eq!(
            causally_related(&w, &far, &df),
            CausalVerdict::NotRelated(NotRelatedReason::SpeedLimitExceeded)
        );
        assert!(curve_oracle(&w, &near, &df, 4));
        assert!(!curve_oracle(&w, &far, &df, 4));
    }

    #[test]
    fn first_failing_condition_is_reported() {
        let df = df12();
        let w = ProductState::new(e(0.0, 0.0), equator(0.0));
        let spacelike = ProductState::new(e(0.0, 3.0), InternalState::from_latitude_longitude(0.5, 0.0).unwrap());
        assert_eq!(
            causally_related(&w, &spacelike, &df),
            CausalVerdict::NotRelated(NotRelatedReason::BaseNotCausal)
        );
        let other_parallel = ProductState::new(e(5.0, 0.0), InternalState::from_latitude_longitude(0.5, 0.0).unwrap());
        assert_eq!(
            causally_related(&w, &other_parallel, &df),
            CausalVerdict::NotRelated(NotRelatedReason::LatitudeMismatch)
        );
    }

    #[test]
    fn poles_are_handled() {
        let df = df12();
        let north = make_state([Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        let south = make_state([Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap();
        let a = ProductState::new(e(0.0, 0.0), north);
        let b = ProductState::new(e(1.0, 1.0), north);
        assert_eq!(causally_related(&a, &b, &df), CausalVerdict::Related);
        let c = ProductState::new(e(3.0, 0.0), south);
        assert_eq!(
            causally_related(&a, &c, &df),
            CausalVerdict::NotRelated(NotRelatedReason::LatitudeMismatch)
        );
        assert!(matches!(reachable_longitudes(&a, &e(1.0, 0.0), &df), Err(ProductError::PoleState(_))));
        assert!(curve_oracle(&a, &b, &df, 3));
    }

    #[test]
    fn angular_gap_takes_the_short_way_round() {
        assert!((angular_gap(0.1, -0.1) - 0.2).abs() < 1e-15);
        assert!((angular_gap(3.0, -3.0) - (2.0 * PI - 6.0)).abs() < 1e-12);
        assert!((angular_gap(0.0, PI) - PI).abs() < 1e-15);
        assert!(angular_gap(1.0, 1.0 + 2.0 * PI) < 1e-12);
    }

    #[test]
    fn reachable_longitude_examples() {
        let w = ProductState::new(e(0.0, 0.0), equator(0.4));
        let df = FiniteDirac::new(0.0, 1.0).unwrap();
        assert_eq!(reachable_longitudes(&w, &e(0.0, 1.0), &df).unwrap(), ArcSet::Empty);
        assert_eq!(reachable_longitudes(&w, &e(PI, 0.0), &df).unwrap(), ArcSet::Full);
        assert_eq!(
            reachable_longitudes(&w, &e(1.0, 1.0), &df).unwrap(),
            ArcSet::Arc {
                center: 0.4,
                half_width: 0.0
            }
        );
        let arc = reachable_longitudes(&w, &e(1.0, 0.0), &df).unwrap();
        assert!(arc.contains(1.4) && arc.contains(-0.6) && !arc.contains(1.5));
    }

    #[test]
    fn speed_bound_examples() {
        assert_eq!(speed_bound(&FiniteDirac::new(1.0, 2.0).unwrap()), 1.0);
        assert_eq!(speed_bound(&FiniteDirac::new(0.0, 1.0).unwrap()), 1.0);
        assert_eq!(speed_bound(&FiniteDirac::new(-3.0, 3.0).unwrap()), 6.0);
    }

    #[test]
    fn curve_oracle_borderline_and_winding() {
        let df = df12();
        let w = ProductState::new(e(0.0, 0.0), equator(0.0));
        // |Δθ| equal to the budget of 2.
        let edge = ProductState::new(e(2.0, 0.0), equator(2.0));
        assert!(curve_oracle(&w, &edge, &df, 4));
        // Crossing the branch cut: 3.0 → −3.0 is a gap of 2π − 6 ≈ 0.28.
        let a = ProductState::new(e(0.0, 0.0), equator(3.0));
        let b = ProductState::new(e(0.5, 0.0), equator(-3.0));
        assert!(curve_oracle(&a, &b, &df, 3));
        assert!(causally_related(&a, &b, &df).is_related());
        assert!(curve_oracle(&w, &w, &df, 3));
        let moved = ProductState::new(e(0.0, 0.0), equator(0.5));
        assert!(!curve_oracle(&w, &moved, &df, 3));
    }

    #[test]
    fn product_curve_validation() {
        let df = df12();
        let good = ProductCurve {
            vertices: vec![(e(0.0, 0.0), 0.0), (e(1.0, 0.0), 0.9), (e(2.0, 0.0), 1.8)],
        };
        assert!(good.validate(&df, 0.0).is_ok());
        let fast = ProductCurve {
            vertices: vec![(e(0.0, 0.0), 0.0), (e(1.0, 0.0), 1.5)],
        };
        assert!(fast.validate(&df, 0.0).is_err());
        let spacelike = ProductCurve {
            vertices: vec![(e(0.0, 0.0), 0.0), (e(1.0, 2.0), 0.0)],
        };
        assert!(spacelike.validate(&df, 0.0).is_err());
    }

    fn grid_around(p: &Event, q: &Event) -> EventGrid {
        search_grid(p, q, 13).unwrap()
    }

    #[test]
    fn latitude_mismatch_is_separated_by_sigma_z() {
        let df = df12();
        let w1 = ProductState::new(e(0.0, 0.0), InternalState::from_latitude_longitude(0.6, 0.0).unwrap());
        let w2 = ProductState::new(e(1.0, 0.2), InternalState::from_latitude_longitude(-0.2, 0.0).unwrap());
        let grid = grid_around(&w1.event, &w2.event);
        let outcome = separating_element_search(&w1, &w2, &df, &grid, &SearchOptions::default()).unwrap();
        let SearchOutcome::Witness { element, gap } = outcome else {
            panic!("expected a witness, got {outcome:?}");
        };
        assert!(gap < -0.5, "{gap}");
        // The σ_z coefficient on the constant profile carries the separation.
        assert!(element.coefficients[1] > 0.5);
        assert!(element.certify(&grid.refined(), &df, 1e-9));
    }

    #[test]
    fn spacelike_pair_is_separated_by_a_causal_function() {
        let df = df12();
        let w1 = ProductState::new(e(0.0, 0.0), equator(0.3));
        let w2 = ProductState::new(e(0.5, 2.0), equator(0.3));
        let grid = grid_around(&w1.event, &w2.event);
        let outcome = separating_element_search(&w1, &w2, &df, &grid, &SearchOptions::default()).unwrap();
        assert!(outcome.is_witness(), "{outcome:?}");
    }

    #[test]
    fn related_pair_has_no_witness() {
        let df = df12();
        let w1 = ProductState::new(e(0.0, 0.0), equator(0.3));
        let w2 = ProductState::new(e(2.0, 0.5), equator(1.0));
        assert!(causally_related(&w1, &w2, &df).is_related());
        let grid = grid_around(&w1.event, &w2.event);
        let outcome = separating_element_search(&w1, &w2, &df, &grid, &SearchOptions::default()).unwrap();
        assert!(!outcome.is_witness(), "{outcome:?}");
    }

    #[test]
    fn small_grid_is_rejected() {
        let df = df12();
        let w1 = ProductState::new(e(0.0, 0.0), equator(0.3));
        let w2 = ProductState::new(e(2.0, 0.0), equator(0.3));
        let grid = EventGrid::new((0.0, 2.0), (-1.0, 1.0), 5, 5).unwrap();
        assert!(matches!(
            separating_element_search(&w1, &w2, &df, &grid, &SearchOptions::default()),
            Err(ProductError::GridTooSmall { .. })
        ));
    }

    #[test]
    fn dictionary_gradients_match_finite_differences() {
        let p = e(0.0, 0.0);
        let q = e(1.0, 0.5);
        let dict = Dictionary::for_pair(&p, &q, &grid_around(&p, &q));
        assert!(dict.len() <= 64);
        let h = 1e-6;
        for profile in &dict.profiles {
            for point in [e(0.3, -0.2), e(1.2, 0.9), e(-0.5, 0.1)] {
                let (gt, gx) = profile.gradient(point);
                let nt = (profile.value(e(point.t + h, point.x)) - profile.value(e(point.t - h, point.x))) / (2.0 * h);
                let nx = (profile.value(e(point.t, point.x + h)) - profile.value(e(point.t, point.x - h))) / (2.0 * h);
                assert!((gt - nt).abs() < 1e-6 && (gx - nx).abs() < 1e-6, "{profile:?}");
            }
        }
    }
}
